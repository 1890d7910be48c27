"""
Конфигурация приложения.

Этот модуль содержит все настройки walklap.
Настройки загружаются из переменных окружения (префикс WALKLAP_)
или из файла .env, иначе используются значения по умолчанию.
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Класс настроек приложения.

    Attributes:
        app_name: Название приложения
        app_version: Версия (пишется в заголовок каждого выходного файла)
        debug: Режим отладки (уровень логов DEBUG)

        dense_limit: Максимальный размер n для плотных матриц (общий для всех модулей)
        enumeration_budget: Лимит частичных блужданий для переборного оракула

        power_tol / power_max_iter: Степенной метод
        lanczos_tol / lanczos_max_dim: Ланцош для f(A)v
        cg_tol / cg_max_iter: Предобусловленный CG
        inner_tol / inner_max_iter: Внутренние сдвинутые решения (MINRES)
        aaa_tol / aaa_max_degree / aaa_samples: Подбор полюсов AAA

        trace_rho_iter / trace_rho_tol: Грубая оценка ρ для интервала полюсов
        support_tol / checkpoints: История исследования графа цепью Маркова
        time_points: Число точек временной сетки по умолчанию
        threads: Максимум потоков для параллельных циклов по времени

        dataset_dir: Каталог с сетями (SuiteSparse .mtx)
    """

    # Основные настройки приложения
    app_name: str = "walklap"
    app_version: str = "1.0.0"
    debug: bool = False

    # Плотный режим (один общий предел на все модули)
    dense_limit: int = 4096
    enumeration_budget: int = 10**7

    # Степенной метод
    power_tol: float = 1e-10
    power_max_iter: int = 5000

    # Крыловские методы
    lanczos_tol: float = 1e-12
    lanczos_max_dim: int = 300
    cg_tol: float = 1e-10
    cg_max_iter: int = 5000
    inner_tol: float = 1e-8
    inner_max_iter: int = 2000

    # Рациональная аппроксимация
    aaa_tol: float = 1e-9
    aaa_max_degree: int = 16
    aaa_samples: int = 500

    # Оценка следа
    trace_rho_iter: int = 50
    trace_rho_tol: float = 1e-4
    time_points: int = 30

    # Цепи Маркова
    support_tol: float = 1e-3
    checkpoints: list[int] = [20, 40, 80]

    threads: int = 1

    # Каталог с сетями (WALKLAP_DATASET_DIR)
    dataset_dir: Optional[Path] = None

    model_config = SettingsConfigDict(
        env_prefix="WALKLAP_",
        env_file=".env",  # Загружать переменные из файла .env
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """
    Получить настройки приложения.

    Используем @lru_cache чтобы не создавать объект настроек
    каждый раз заново (один объект на процесс).

    Returns:
        Settings: Объект с настройками
    """
    return Settings()

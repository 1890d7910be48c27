"""
Конфигурация pytest.

conftest.py — специальный файл pytest, который:
1. Содержит fixtures (переиспользуемые графы для тестов)
2. Автоматически загружается pytest
3. Fixtures доступны во всех тестах
"""

import numpy as np
import pytest

from walklap.core.config import get_settings
from walklap.services import generators


@pytest.fixture
def p3():
    """Путь из 3 вершин: 0 - 1 - 2."""
    return generators.path_graph(3)


@pytest.fixture
def k3():
    """Треугольник K3, σ(A) = {2, −1, −1}."""
    return generators.complete_graph(3)


@pytest.fixture
def c4():
    """Цикл из 4 вершин (двудольный, ρ(A) = 2)."""
    return generators.cycle_graph(4)


@pytest.fixture
def star9():
    """Звезда с 9 листьями, ρ(A) = 3."""
    return generators.star_graph(9)


@pytest.fixture
def g58():
    """Граф-ловушка G_{5,8}: центр 2, концы пути 0 и 4, листья 5..12."""
    return generators.trap_graph(5, 8)


@pytest.fixture
def karate():
    """Клуб карате Закари (34 вершины)."""
    return generators.karate_club()


@pytest.fixture
def grid():
    """Решётка 6×6."""
    return generators.grid_graph(6, 6)


@pytest.fixture
def random_graphs():
    """Небольшие связные случайные графы с фиксированными зернами."""
    return [generators.random_connected_graph(n, 0.2, seed=s) for n, s in [(8, 1), (12, 2), (20, 3)]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_dense_limit(monkeypatch):
    """
    Временно уменьшить dense_limit до 10.

    Настройки кэшируются, поэтому кэш сбрасывается до и после теста.
    """
    monkeypatch.setenv("WALKLAP_DENSE_LIMIT", "10")
    get_settings.cache_clear()
    yield 10
    get_settings.cache_clear()


@pytest.fixture
def short_krylov(monkeypatch):
    """Ограничить размерность Ланцоша/Арнольди двумя векторами."""
    monkeypatch.setenv("WALKLAP_LANCZOS_MAX_DIM", "2")
    get_settings.cache_clear()
    yield 2
    get_settings.cache_clear()

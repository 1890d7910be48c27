"""
Конфигурация одного запуска CLI.
"""

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    """
    Параметры запуска команды.

    Attributes:
        command: Имя подкоманды
        graph: Источник графа (builtin:..., dataset:..., путь к файлу)
        family: Спецификация оператора
        seed: Зерно генератора (пишется в заголовок вывода)
        output: Путь к выходному файлу (None — stdout)
        as_json: Формат JSON вместо CSV
        argv: Исходная командная строка
    """

    command: str
    graph: Optional[str] = None
    family: Optional[str] = None
    seed: int = Field(default=0, ge=0)
    output: Optional[Path] = None
    as_json: bool = False
    argv: list[str] = Field(default_factory=list)

    def header(self, version: str) -> str:
        """Строка заголовка: версия, командная строка, зерно."""
        command_line = " ".join(self.argv) if self.argv else self.command
        return f"# walklap {version} | {command_line} | seed={self.seed}"

"""
Иерархия исключений walklap.

Ошибки параметров и формата наследуют ValueError, чтобы CLI
отличал "плохой ввод" (код 2) от сбоев вычислений (код 1).
"""

from typing import Optional


class WalkLapError(Exception):
    """Базовое исключение библиотеки."""


class GraphFormatError(WalkLapError, ValueError):
    """Файл графа не разбирается, граф пуст или индексы вне границ."""


class ParameterError(WalkLapError, ValueError):
    """Недопустимая комбинация параметров."""


class DatasetNotFoundError(WalkLapError):
    """Именованная сеть отсутствует в каталоге данных."""


class SizeLimitError(WalkLapError):
    """Превышен предел плотного режима."""

    def __init__(self, size: int, limit: int, what: str = "operation"):
        self.size = size
        self.limit = limit
        super().__init__(
            f"{what} requires dense storage for n={size}, "
            f"which exceeds dense_limit={limit} (set WALKLAP_DENSE_LIMIT to raise it)"
        )


class ConvergenceError(WalkLapError):
    """Итерационный метод не сошёлся."""

    def __init__(
        self,
        message: str,
        iterations: Optional[int] = None,
        residual: Optional[float] = None,
    ):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class OscillationError(ConvergenceError):
    """Степенной метод колеблется между двумя оценками (комплексная пара)."""

    def __init__(self, first: float, second: float, iterations: int):
        self.estimates = (first, second)
        super().__init__(
            f"power iteration oscillates between Rayleigh estimates "
            f"{first:.12g} and {second:.12g}",
            iterations=iterations,
        )


class NegativeCurvatureError(ConvergenceError):
    """CG встретил p^T M p <= 0: матрица не SPD."""


class RankDeficiencyError(WalkLapError):
    """Блок зондов или блочный базис Крылова потерял ранг."""


class NotPositiveSemidefiniteError(WalkLapError):
    """Отрицательный ведущий элемент в аппроксимации Нистрёма."""


class SymmetryError(WalkLapError):
    """Материализованный оператор несимметричен."""


class EnumerationBudgetError(WalkLapError):
    """Переборный оракул превысил лимит частичных блужданий."""

"""Core модуль - конфигурация и исключения."""

from walklap.core.config import get_settings, Settings
from walklap.core.exceptions import (
    ConvergenceError,
    DatasetNotFoundError,
    EnumerationBudgetError,
    GraphFormatError,
    NegativeCurvatureError,
    NotPositiveSemidefiniteError,
    OscillationError,
    ParameterError,
    RankDeficiencyError,
    SizeLimitError,
    SymmetryError,
    WalkLapError,
)

__all__ = [
    "get_settings",
    "Settings",
    "ConvergenceError",
    "DatasetNotFoundError",
    "EnumerationBudgetError",
    "GraphFormatError",
    "NegativeCurvatureError",
    "NotPositiveSemidefiniteError",
    "OscillationError",
    "ParameterError",
    "RankDeficiencyError",
    "SizeLimitError",
    "SymmetryError",
    "WalkLapError",
]

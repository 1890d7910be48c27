"""
Модели средней вероятности возврата.
"""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class TraceEstimate(BaseModel):
    """Рандомизированная оценка следа и её leave-one-out стандартная ошибка."""

    value: float
    error_estimate: float = Field(..., ge=0)


class ReturnProbabilityCurve(BaseModel):
    """
    Кривая p̂(t) = tr(exp(−t𝔏)) / n на временной сетке.

    Attributes:
        times: Временная сетка
        values: p̂(t) в каждой точке
        error_estimates: Оценки ошибки (нули для точного режима)
        method: exact, stochastic (XNysTrace-exp) или hutchinson (базовая линия)
        probes: Число зондов M (стохастические режимы)
        seed: Зерно генератора (стохастические режимы)
        label: Подпись семейства оператора
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    times: np.ndarray
    values: np.ndarray
    error_estimates: np.ndarray
    method: Literal["exact", "stochastic", "hutchinson"]
    probes: Optional[int] = None
    seed: Optional[int] = None
    label: str = ""

    def rows(self) -> list[tuple[float, float, float]]:
        """Строки (t, p_hat, err_est) для CSV."""
        return [
            (float(t), float(v), float(e))
            for t, v, e in zip(self.times, self.values, self.error_estimates)
        ]

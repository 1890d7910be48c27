"""Модели спектральных оценок."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SpectralEstimate(BaseModel):
    """
    Оценка спектрального радиуса.

    Attributes:
        value: Модуль доминирующего собственного значения (≥ 0)
        residual: Относительная невязка ‖Mx − λx‖ / (|λ|‖x‖)
        iterations: Число выполненных итераций
        method: "power" или "dense" (плотный запасной вариант)
    """

    value: float = Field(..., ge=0, description="Оценка ρ")
    residual: float = Field(..., ge=0, description="Невязка")
    iterations: int = Field(..., ge=0, description="Итерации")
    method: str = Field(default="power", description="Метод вычисления")


class DenseSpectrum(BaseModel):
    """Собственные значения (по возрастанию) и ортонормированные векторы."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def smallest(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def largest(self) -> float:
        return float(self.eigenvalues[-1])

"""
Модели крыловских методов.

SolverInfo — диагностика любого итерационного решателя,
LanczosDecomposition — базис и трёхдиагональная матрица Ланцоша,
PoleSet — полюса рациональной аппроксимации,
RationalKrylovPencil — блочный рациональный пучок (ℋ, 𝒦).
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SolverInfo(BaseModel):
    """
    Диагностика итерационного решателя.

    Attributes:
        method: Имя метода (lanczos, arnoldi, pcg, minres)
        iterations: Число итераций / размерность подпространства
        residual: Итоговая относительная невязка (или разность итераций)
        converged: Достигнута ли точность
    """

    method: str
    iterations: int = Field(..., ge=0)
    residual: float
    converged: bool


class LanczosDecomposition(BaseModel):
    """Q_k, T_k и норма стартового вектора."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: np.ndarray = Field(..., description="Q (n×k), ортонормированные столбцы")
    alpha: np.ndarray = Field(..., description="Диагональ T (k)")
    beta: np.ndarray = Field(..., description="Поддиагональ T (k-1)")
    norm: float = Field(..., description="‖v‖ стартового вектора")

    @property
    def dimension(self) -> int:
        return int(self.alpha.size)

    def tridiagonal(self) -> np.ndarray:
        """Плотная T_k."""
        return np.diag(self.alpha) + np.diag(self.beta, 1) + np.diag(self.beta, -1)


class PoleSet(BaseModel):
    """
    Полюса рациональной аппроксимации exp(−x).

    Attributes:
        poles: Полюса (вещественные или комплексно-сопряжённые пары)
        error: Максимальная ошибка на выборке
        interval: Аппроксимируемый отрезок [a, b]
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    poles: np.ndarray
    error: float
    interval: tuple[float, float]

    @model_validator(mode="after")
    def _poles_off_interval(self) -> "PoleSet":
        a, b = self.interval
        for pole in np.atleast_1d(self.poles):
            if np.isfinite(pole) and abs(pole.imag) <= 1e-12 and a <= pole.real <= b:
                raise ValueError(f"pole {pole} lies in the sampled interval [{a}, {b}]")
        return self

    @property
    def degree(self) -> int:
        return int(np.size(self.poles))

    def scaled(self, factor: float) -> "PoleSet":
        """Полюса и отрезок, делённые на factor (перенос с [0, t*ρ] на [0, ρ])."""
        a, b = self.interval
        return PoleSet(
            poles=np.asarray(self.poles) / factor,
            error=self.error,
            interval=(a / factor, b / factor),
        )


class RationalKrylovPencil(BaseModel):
    """
    Блочное рациональное разложение Арнольди 𝔏 V 𝒦 = V ℋ.

    Attributes:
        basis: V размера n × (k+1)M с ортонормированными столбцами
        H: Блочная верхняя хессенбергова матрица (k+1)M × kM
        K: Блочная верхняя хессенбергова матрица (k+1)M × kM
        poles: Использованные полюса ξ_1..ξ_k (np.inf для бесконечного)
        block_size: M
        closure: Vᵀ 𝔏 V_last (последний блочный столбец для приведённого пучка)
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: np.ndarray
    H: np.ndarray
    K: np.ndarray
    poles: np.ndarray
    block_size: int
    closure: Optional[np.ndarray] = None

    @property
    def steps(self) -> int:
        return self.H.shape[1] // self.block_size

"""
Модели диффузии и цепей Маркова.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from walklap.core.exceptions import ParameterError


class ProbabilityVector(BaseModel):
    """
    Распределение вероятностей на вершинах.

    Инварианты: p ≥ −1e−12 поэлементно, Σp = 1 ± 1e−10.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: np.ndarray = Field(..., description="Вектор вероятностей длины n")

    @field_validator("p", mode="before")
    @classmethod
    def _check_distribution(cls, value) -> np.ndarray:
        p = np.asarray(value, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("probability vector must not be empty")
        if np.any(p < -1e-12):
            raise ValueError(f"probability vector has negative entry {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probability vector sums to {p.sum():.15g}, not 1")
        return p

    @classmethod
    def point_mass(cls, n: int, node: int) -> "ProbabilityVector":
        """Дельта-распределение e_node."""
        if not 0 <= node < n:
            raise ParameterError(f"node {node} out of range [0, {n})")
        p = np.zeros(n)
        p[node] = 1.0
        return cls(p=p)

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityVector":
        return cls(p=np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return int(self.p.size)


class MarkovChain(BaseModel):
    """
    Дискретная цепь Маркова P = I − D⁻¹𝕃.

    Attributes:
        P: Плотная матрица переходов n×n
        diagonal: Веса D (f(A)𝟏 или diag(𝕃), см. weighting)
        stationary: Стационарное распределение π ∝ D
        provenance: Семейство оператора и параметры (для заголовков)
        weighting: Схема весов: communicability или diagonal
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    P: np.ndarray
    diagonal: np.ndarray
    stationary: ProbabilityVector
    provenance: str = Field(default="", description="Происхождение оператора")
    weighting: Literal["communicability", "diagonal"] = "communicability"

    @property
    def n(self) -> int:
        return int(self.P.shape[0])

"""
Модели исчисления блужданий.

WalkCountSequence — плотные матрицы q_0..q_K (число блужданий с
понижающим весом за возвраты), ZOperator — сопровождающий оператор
размера 2n, степени которого продвигают трёхчленную рекуррентность.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from walklap.core.exceptions import ParameterError
from walklap.models.graph import Graph


def validate_mu(mu: float) -> float:
    if not 0.0 <= mu <= 1.0:
        raise ParameterError(f"mu must lie in [0, 1], got {mu}")
    return float(mu)


class WalkCountSequence(BaseModel):
    """
    Последовательность матриц q_k для k = 0..K.

    Attributes:
        mu: Параметр понижения веса возвратов
        counts: Список плотных симметричных матриц n×n
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mu: float = Field(..., description="Параметр μ в [0, 1]")
    counts: list[np.ndarray] = Field(..., description="Матрицы q_0..q_K")

    @field_validator("mu")
    @classmethod
    def _validate_mu(cls, v: float) -> float:
        return validate_mu(v)

    @property
    def max_length(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, k: int) -> np.ndarray:
        return self.counts[k]

    def __len__(self) -> int:
        return len(self.counts)


class ZOperator(BaseModel):
    """
    Сопровождающий оператор Z = [[O, I], [μ(μI − D), A]].

    Действует на составные векторы (x; y) длины 2n.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    graph: Graph
    mu: float

    @field_validator("mu")
    @classmethod
    def _validate_mu(cls, v: float) -> float:
        return validate_mu(v)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.graph.n, 2 * self.graph.n)

    @property
    def lower_diagonal(self) -> np.ndarray:
        """Диагональ левого нижнего блока μ(μ − d_i)."""
        return self.mu * (self.mu - self.graph.degrees)

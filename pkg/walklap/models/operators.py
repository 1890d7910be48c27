"""
Модели, описывающие операторы: деформированный лапласиан
и разобранная спецификация семейства.
"""

from typing import Literal, Optional

import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field


FamilyName = Literal[
    "standard",
    "kwalk",
    "walk-exp",
    "walk-res",
    "walk-series",
    "btdw-exp",
    "btdw-res",
    "btdw-series",
    "kpath-exp",
    "kpath-pow",
]


class DeformedLaplacian(BaseModel):
    """
    Деформированный лапласиан 𝒜_μ(α) = I − αA − α²μ(μI − D).

    При μ = 1 это I − αA − α²(I − D); при μ = 0 это I − αA.
    Выполняется Σ α^k q_k · 𝒜_μ(α) = (1 − α²μ²) I.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    alpha: float
    mu: float = 1.0
    matrix: sp.csr_matrix

    @property
    def scale(self) -> float:
        """Множитель 1 − α²μ² правой части."""
        return 1.0 - (self.alpha * self.mu) ** 2


class OperatorSpec(BaseModel):
    """
    Разобранная строка семейства вида <family>[:key=value]*.

    Пример: btdw-exp:mu=0.5:beta=0.2
    """

    family: FamilyName
    mu: Optional[float] = Field(default=None, ge=0, le=1)
    alpha: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)
    k: int = Field(default=1, ge=0)
    truncation: int = Field(default=10, ge=0)

    def label(self) -> str:
        parts = [self.family]
        if self.mu is not None:
            parts.append(f"mu={self.mu:g}")
        if self.family == "kwalk":
            parts.append(f"k={self.k}")
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.beta is not None:
            parts.append(f"beta={self.beta:g}")
        if self.family.endswith("series"):
            parts.append(f"K={self.truncation}")
        return ":".join(parts)

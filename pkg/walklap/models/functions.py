"""
Модель коэффициентной функции.

CoefficientFunction задаёт последовательность весов {c_k} и скалярную
функцию f(x) = Σ c_k x^k, которые параметризуют все преобразованные
лапласианы (𝕃(f), 𝕃_μ(f)).
"""

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from walklap.core.exceptions import ParameterError


class CoefficientFunction(BaseModel):
    """
    Коэффициентная функция преобразованного лапласиана.

    Варианты:
        resolvent:   c_k = α^k,       f(x) = 1 / (1 − αx)
        exponential: c_k = β^k / k!,  f(x) = exp(βx)
        series:      c_0..c_K заданы явно (усечённый ряд)
        monomial:    c_k = 1 только для одного k (вне класса 𝒫)

    Для exponential допускается beta=None: обратная температура
    подставляется оператором (1/ρ(A) или 1/ρ(Z)).
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["resolvent", "exponential", "series", "monomial"] = Field(
        ..., description="Вид функции"
    )
    alpha: Optional[float] = Field(default=None, description="Параметр резольвенты α")
    beta: Optional[float] = Field(default=None, description="Обратная температура β")
    coefficients: tuple[float, ...] = Field(
        default=(), description="Коэффициенты усечённого ряда c_0..c_K"
    )
    k: Optional[int] = Field(default=None, description="Степень монома")

    @model_validator(mode="after")
    def _check_parameters(self) -> "CoefficientFunction":
        if self.kind == "resolvent":
            if self.alpha is None or not self.alpha > 0:
                raise ValueError(f"resolvent requires alpha > 0, got {self.alpha}")
        elif self.kind == "exponential":
            if self.beta is not None and not self.beta > 0:
                raise ValueError(f"exponential requires beta > 0, got {self.beta}")
        elif self.kind == "series":
            if not self.coefficients:
                raise ValueError("series requires at least one coefficient")
            if any(not math.isfinite(c) or c < 0 for c in self.coefficients):
                raise ValueError("series coefficients must be finite and nonnegative")
        elif self.k is None or self.k < 0:
            raise ValueError(f"monomial requires k >= 0, got {self.k}")
        return self

    @classmethod
    def resolvent(cls, alpha: float) -> "CoefficientFunction":
        return cls(kind="resolvent", alpha=alpha)

    @classmethod
    def exponential(cls, beta: Optional[float] = None) -> "CoefficientFunction":
        return cls(kind="exponential", beta=beta)

    @classmethod
    def series(cls, coefficients) -> "CoefficientFunction":
        return cls(kind="series", coefficients=tuple(float(c) for c in coefficients))

    @classmethod
    def monomial(cls, k: int) -> "CoefficientFunction":
        return cls(kind="monomial", k=k)

    @property
    def resolved(self) -> bool:
        """Все параметры известны (β подставлена)."""
        return self.kind != "exponential" or self.beta is not None

    @property
    def in_class_p(self) -> bool:
        """
        Принадлежит ли f классу 𝒫 (ряды с положительными коэффициентами).

        Мономы всегда вне 𝒫; для усечённого ряда требуется c_k > 0 при k ≥ 1.
        """
        if self.kind == "monomial":
            return False
        if self.kind == "series":
            return len(self.coefficients) > 1 and all(c > 0 for c in self.coefficients[1:])
        return True

    @property
    def degree(self) -> Optional[int]:
        """Степень многочлена или None для бесконечного ряда."""
        if self.kind == "series":
            return len(self.coefficients) - 1
        if self.kind == "monomial":
            return self.k
        return None

    @property
    def radius_of_convergence(self) -> float:
        if self.kind == "resolvent":
            return 1.0 / self.alpha
        return math.inf

    def with_beta(self, beta: float) -> "CoefficientFunction":
        """Копия экспоненты с подставленной обратной температурой."""
        if self.kind != "exponential":
            raise ParameterError(f"beta applies to exponential functions, not {self.kind}")
        return CoefficientFunction.exponential(beta)

    def coefficient(self, k: int) -> float:
        """Коэффициент c_k."""
        if k < 0:
            return 0.0
        if self.kind == "resolvent":
            return self.alpha**k
        if self.kind == "exponential":
            self._require_resolved()
            return math.exp(k * math.log(self.beta) - math.lgamma(k + 1))
        if self.kind == "series":
            return self.coefficients[k] if k < len(self.coefficients) else 0.0
        return 1.0 if k == self.k else 0.0

    def __call__(self, x):
        """Скалярная f(x), векторизовано по numpy."""
        x = np.asarray(x, dtype=float)
        if self.kind == "resolvent":
            return 1.0 / (1.0 - self.alpha * x)
        if self.kind == "exponential":
            self._require_resolved()
            return np.exp(self.beta * x)
        if self.kind == "series":
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        return x**self.k

    def tail(self, x):
        """f(x) − c_0: слагаемое c_0·I сокращается в diag(φ𝟏) − φ."""
        x = np.asarray(x, dtype=float)
        if self.kind == "resolvent":
            return self.alpha * x / (1.0 - self.alpha * x)
        if self.kind == "exponential":
            self._require_resolved()
            return np.expm1(self.beta * x)
        if self.kind == "series":
            return np.polynomial.polynomial.polyval(x, (0.0,) + self.coefficients[1:])
        return x**self.k if self.k >= 1 else np.zeros_like(x)

    def label(self) -> str:
        """Короткое имя для заголовков таблиц."""
        if self.kind == "resolvent":
            return f"res(alpha={self.alpha:.6g})"
        if self.kind == "exponential":
            return "exp" if self.beta is None else f"exp(beta={self.beta:.6g})"
        if self.kind == "series":
            return f"series(K={self.degree})"
        return f"mono(k={self.k})"

    def _require_resolved(self) -> None:
        if self.beta is None:
            raise ParameterError("exponential beta is unresolved; build the operator first")

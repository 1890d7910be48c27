"""
Семейство лапласианов.

Этот модуль отвечает за:
1. Единый матрично-свободный интерфейс LaplacianOperator (apply/diagonal/to_dense)
2. Стандартный L, k-walk 𝕃_{k,μ}, преобразованные 𝕃(f) и 𝕃_μ(f), k-path ℒ
3. Деформированный лапласиан 𝒜_μ(α)
4. Разбор строк семейств (<family>[:key=value]*) и кэш построенных операторов

Все операторы имеют вид diag(φ𝟏) − φ, где φ = Σ_{k≥1} c_k q_k.
Слагаемое c_0·I сокращается, поэтому нигде не вычисляется.
"""

import math
from abc import ABC, abstractmethod
from typing import Callable, Literal, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from cachetools import LRUCache
from loguru import logger
from pydantic import ValidationError
from scipy.sparse.linalg import LinearOperator

from walklap.core.config import get_settings
from walklap.core.exceptions import ConvergenceError, ParameterError, SizeLimitError
from walklap.models.functions import CoefficientFunction
from walklap.models.graph import Graph
from walklap.models.operators import DeformedLaplacian, OperatorSpec
from walklap.models.walks import validate_mu
from walklap.services.graph_core import UNREACHABLE, all_pairs_distances
from walklap.services.krylov import (
    arnoldi_fun_apply,
    ensure_converged,
    lanczos_fun_apply,
    pcg_solve,
    phi1_matrix,
)
from walklap.services.spectral import spectral_radius_adjacency, spectral_radius_Z
from walklap.services.walk_calculus import (
    btdw_counts,
    walk_count_apply,
    z_apply,
    z_operator,
)

# Построенные операторы: ключ (отпечаток графа, семейство, параметры)
operator_cache: LRUCache = LRUCache(maxsize=64)

# Лимит членов ряда для плотной экспоненты BTDW
MAX_SERIES_TERMS = 2000

# Запас для αρ < 1: ρ известен с точностью power_tol
ADMISSIBILITY_MARGIN = 10.0


class LaplacianOperator(ABC):
    """
    Симметричный оператор M = diag(t) − φ, t = φ𝟏.

    Подклассы задают только действие φ (без c_0·I); сдвиг t
    вычисляется один раз при создании. После создания оператор
    неизменяем, apply можно вызывать из нескольких потоков.

    Attributes:
        family: Имя семейства
        graph: Граф
        n: Размер
        shift: Вектор t = φ𝟏 (полная коммуникабельность для 𝕃(f))
    """

    family: str = "abstract"

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.n
        self._phi_dense: Optional[np.ndarray] = None
        if graph.m == 0:
            self.shift = np.zeros(self.n)
        else:
            self.shift = self.apply_phi(np.ones(self.n))
        self.shift.setflags(write=False)
        logger.info(f"Built {self.label()} operator for {graph}")

    @abstractmethod
    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        """φ·v для одного вектора."""

    def apply_phi(self, v: np.ndarray) -> np.ndarray:
        """φ·v (v — вектор или блок n×b, по столбцам)."""
        v = self._check_vector(v)
        if self.graph.m == 0:
            return np.zeros_like(v)
        if v.ndim == 1:
            return np.asarray(self._phi_vector(v), dtype=float)
        return np.column_stack([self._phi_vector(v[:, c]) for c in range(v.shape[1])])

    def apply(self, v: np.ndarray) -> np.ndarray:
        """M·v = t ⊙ v − φ·v."""
        v = self._check_vector(v)
        if self.graph.m == 0:
            return np.zeros_like(v)
        shift = self.shift.reshape((-1,) + (1,) * (v.ndim - 1))
        return shift * v - self.apply_phi(v)

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.apply(v)

    def _dense_phi_exact(self) -> Optional[np.ndarray]:
        """Точная плотная φ, если семейство её знает (иначе None)."""
        return None

    def dense_phi(self) -> np.ndarray:
        """Плотная φ (кэшируется)."""
        if self._phi_dense is None:
            self._require_dense("dense phi")
            if self.graph.m == 0:
                phi = np.zeros((self.n, self.n))
            else:
                phi = self._dense_phi_exact()
                if phi is None:
                    phi = self.apply_phi(np.eye(self.n))
            phi = 0.5 * (phi + phi.T)
            phi.setflags(write=False)
            self._phi_dense = phi
        return self._phi_dense

    def to_dense(self) -> np.ndarray:
        """Плотная матрица оператора diag(φ𝟏) − φ."""
        phi = self.dense_phi()
        return np.diag(phi.sum(axis=1)) - phi

    def diagonal(self) -> np.ndarray:
        """Точная диагональ t_i − φ_ii (плотный режим)."""
        return np.diag(self.to_dense()).copy()

    def communicability(self) -> np.ndarray:
        """
        Полная коммуникабельность f(A)𝟏 = t + c_0.

        Для семейств без слагаемого c_0·I совпадает со сдвигом t.
        """
        return self.shift + self._identity_coefficient()

    def _identity_coefficient(self) -> float:
        return 0.0

    def linear_operator(self) -> LinearOperator:
        return LinearOperator(
            (self.n, self.n), matvec=self.apply, matmat=self.apply, dtype=float
        )

    def label(self) -> str:
        return self.family

    def _check_vector(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.ndim == 0 or v.shape[0] != self.n:
            raise ParameterError(f"vector length {v.shape[:1]} does not match n={self.n}")
        return v

    def _require_dense(self, what: str) -> None:
        limit = get_settings().dense_limit
        if self.n > limit:
            raise SizeLimitError(self.n, limit, what)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label()}, n={self.n})"


class StandardLaplacian(LaplacianOperator):
    """L = D − A."""

    family = "standard"

    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        return self.graph.adjacency @ v

    def _dense_phi_exact(self) -> np.ndarray:
        return self.graph.dense_adjacency()

    def diagonal(self) -> np.ndarray:
        return np.array(self.graph.degrees)


class KWalkLaplacian(LaplacianOperator):
    """𝕃_{k,μ} = diag(q_k𝟏) − q_k; μ = 0 даёт 𝕃_k, μ = 1 — невозвратный вариант."""

    family = "kwalk"

    def __init__(self, graph: Graph, k: int, mu: float = 0.0):
        if k < 1:
            raise ParameterError(f"k-walk Laplacian requires k >= 1, got {k}")
        self.k = int(k)
        self.mu = validate_mu(mu)
        super().__init__(graph)

    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        return walk_count_apply(self.graph, self.mu, self.k, v)

    def _dense_phi_exact(self) -> np.ndarray:
        return btdw_counts(self.graph, self.mu, self.k)[self.k]

    def label(self) -> str:
        return f"kwalk(k={self.k}, mu={self.mu:g})"


class WalkTransformedLaplacian(LaplacianOperator):
    """
    𝕃(f) = diag(f(A)𝟏) − f(A).

    exponential: f(A)v методом Ланцоша, β по умолчанию 1/ρ(A)
    resolvent:   (I − αA)⁻¹v через PCG, требуется αρ(A) < 1
    series, monomial: схема Горнера по A
    """

    family = "walk"

    def __init__(self, graph: Graph, f: CoefficientFunction):
        rho = spectral_radius_adjacency(graph).value if graph.m else 0.0
        self.rho = rho
        if f.kind == "exponential" and f.beta is None:
            f = f.with_beta(1.0 / rho if rho > 0 else 1.0)
        if f.kind == "resolvent":
            check_resolvent_admissible(f.alpha, rho, "rho(A)")
            self.deformed = deformed_laplacian(graph, f.alpha, mu=0.0)
        self.f = f
        super().__init__(graph)

    def _identity_coefficient(self) -> float:
        return self.f.coefficient(0)

    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        A = self.graph.adjacency
        if self.f.kind == "exponential":
            x, info = lanczos_fun_apply(A, self.f.tail, v)
            ensure_converged(info, self.label())
            return x
        if self.f.kind == "resolvent":
            x, _ = pcg_solve(self.deformed.matrix, v, preconditioner="jacobi")
            return x - v
        return _horner(lambda x: A @ x, _series_tail(self.f), v, v)

    def _dense_phi_exact(self) -> np.ndarray:
        A = self.graph.dense_adjacency()
        if self.f.kind in ("exponential", "resolvent"):
            eigenvalues, U = scipy.linalg.eigh(A)
            return (U * self.f.tail(eigenvalues)) @ U.T
        return _horner(lambda X: A @ X, _series_tail(self.f), np.eye(self.n), np.eye(self.n))

    def label(self) -> str:
        return f"walk-{self.f.label()}"


class BTDWTransformedLaplacian(LaplacianOperator):
    """
    𝕃_μ(f) = diag(φ𝟏) − φ, φ = Σ c_k q_k(A).

    resolvent:   φ − I = (1 − α²μ²)·𝒜_μ(α)⁻¹ − I, требуется αρ(Z) < 1
    exponential: φ − I = [I O]·f₁(Z)·(q₁; q₂), f₁(x) = β·φ₁(βx), β по умолчанию 1/ρ(Z)
    series, monomial: Горнер по Z на составных векторах
    """

    family = "btdw"

    def __init__(self, graph: Graph, mu: float, f: CoefficientFunction):
        self.mu = validate_mu(mu)
        self.z = z_operator(graph, self.mu)
        rho = spectral_radius_Z(self.z).value if graph.m else 0.0
        self.rho = rho
        if f.kind == "exponential" and f.beta is None:
            f = f.with_beta(1.0 / rho if rho > 0 else 1.0)
        if f.kind == "resolvent":
            check_resolvent_admissible(f.alpha, rho, f"rho(Z) (mu={self.mu:g})")
            self.deformed = deformed_laplacian(graph, f.alpha, mu=self.mu)
        self.f = f
        super().__init__(graph)

    def _identity_coefficient(self) -> float:
        return self.f.coefficient(0)

    def _seeds(self, v: np.ndarray) -> np.ndarray:
        """Составной вектор (q₁v; q₂v) = (Av; A²v − μDv)."""
        A = self.graph.adjacency
        Av = A @ v
        return np.concatenate([Av, A @ Av - self.mu * self.graph.degrees * v])

    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        n = self.n
        if self.f.kind == "resolvent":
            x, _ = pcg_solve(self.deformed.matrix, v, preconditioner="jacobi")
            return self.deformed.scale * x - v
        if self.f.kind == "exponential":
            beta = self.f.beta
            x, info = arnoldi_fun_apply(
                lambda w: z_apply(self.z, w),
                lambda H: beta * phi1_matrix(beta * H),
                self._seeds(v),
            )
            ensure_converged(info, self.label())
            return np.real(x[:n])
        w = self._seeds(v)
        s = _horner(lambda x: z_apply(self.z, x), _series_tail(self.f), w, w, outer=False)
        return s[:n]

    def _dense_phi_exact(self) -> np.ndarray:
        if self.f.kind == "resolvent":
            inverse = scipy.linalg.inv(self.deformed.matrix.toarray())
            return self.deformed.scale * inverse - np.eye(self.n)
        if self.f.kind == "exponential":
            return self._dense_exponential()
        coefficients = _series_tail(self.f)
        K = len(coefficients) - 1
        counts = btdw_counts(self.graph, self.mu, K)
        phi = np.zeros((self.n, self.n))
        for k in range(1, K + 1):
            phi += coefficients[k] * counts[k]
        return phi

    def _dense_exponential(self) -> np.ndarray:
        """Σ_{k≥1} β^k/k! q_k, ряд обрывается после пика на пренебрежимых членах."""
        A = self.graph.dense_adjacency()
        d = self.graph.degrees
        lower = self.z.lower_diagonal
        peak = self.f.beta * max(self.rho, 1.0)

        previous = np.eye(self.n)
        current = A.copy()
        total = self.f.coefficient(1) * current
        quiet = 0
        for k in range(2, MAX_SERIES_TERMS):
            if k == 2:
                nxt = A @ current - self.mu * np.diag(d)
            else:
                nxt = A @ current + lower[:, None] * previous
            previous, current = current, nxt
            term = self.f.coefficient(k) * current
            total += term
            if not np.all(np.isfinite(total)):
                break
            if k > peak and np.max(np.abs(term)) <= 1e-17 * np.max(np.abs(total)):
                quiet += 1
                if quiet >= 2:
                    logger.debug(f"Dense BTDW exponential series: {k} terms")
                    return total
            else:
                quiet = 0
        raise ConvergenceError(
            f"dense BTDW exponential series did not settle "
            f"(beta={self.f.beta:.6g}, rho(Z)={self.rho:.6g})",
            iterations=MAX_SERIES_TERMS,
        )

    def label(self) -> str:
        return f"btdw-{self.f.label()}(mu={self.mu:g})"


class KPathTransformedLaplacian(LaplacianOperator):
    """
    ℒ = Σ_k t_k ℒ_k по кратчайшим расстояниям, t_k = exp(−βk) или k^−β.

    Только плотный режим: W_ij = t_{d(i,j)}, пары из разных компонент
    дают 0 (каждая компонента обрабатывается отдельно).
    """

    family = "kpath"

    def __init__(self, graph: Graph, kind: Literal["exp", "pow"] = "exp", beta: float = 1.0):
        if kind not in ("exp", "pow"):
            raise ParameterError(f"unknown k-path weighting: {kind}")
        if not beta > 0:
            raise ParameterError(f"k-path weighting requires beta > 0, got {beta}")
        self.kind = kind
        self.beta = float(beta)
        self.weights = self._weight_matrix(graph)
        super().__init__(graph)

    def _weight_matrix(self, graph: Graph) -> np.ndarray:
        dist = all_pairs_distances(graph)
        reachable = (dist > 0) & (dist != UNREACHABLE)
        W = np.zeros(dist.shape)
        k = dist[reachable].astype(float)
        W[reachable] = np.exp(-self.beta * k) if self.kind == "exp" else k ** (-self.beta)
        return W

    def _phi_vector(self, v: np.ndarray) -> np.ndarray:
        return self.weights @ v

    def _dense_phi_exact(self) -> np.ndarray:
        return self.weights

    def diagonal(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def label(self) -> str:
        return f"kpath-{self.kind}(beta={self.beta:g})"


def _series_tail(f: CoefficientFunction) -> list[float]:
    """Коэффициенты многочлена c_0..c_K с обнулённым c_0."""
    if f.kind == "series":
        coefficients = list(f.coefficients)
    elif f.kind == "monomial":
        coefficients = [0.0] * f.k + [1.0]
    else:
        raise ParameterError(f"{f.kind} is not a polynomial")
    coefficients[0] = 0.0
    return coefficients


def _horner(
    matvec: Callable[[np.ndarray], np.ndarray],
    coefficients: list[float],
    seed: np.ndarray,
    like: np.ndarray,
    outer: bool = True,
) -> np.ndarray:
    """
    Схема Горнера для Σ_{k≥1} c_k M^{k−1}·seed.

    outer=True добавляет внешний множитель M (Σ c_k M^k·seed).
    """
    K = len(coefficients) - 1
    if K < 1 or not any(coefficients[1:]):
        return np.zeros_like(like if outer else seed, dtype=float)
    s = coefficients[K] * seed
    for j in range(K - 1, 0, -1):
        s = matvec(s) + coefficients[j] * seed
    return matvec(s) if outer else s


# ---------------------------------------------------------------------------
# Деформированный лапласиан
# ---------------------------------------------------------------------------


def check_resolvent_admissible(alpha: float, rho: float, what: str = "rho") -> None:
    """
    Требование αρ < 1 с запасом ADMISSIBILITY_MARGIN·power_tol.

    Raises:
        ParameterError: αρ на границе или за ней
    """
    bound = 1.0 - ADMISSIBILITY_MARGIN * get_settings().power_tol
    if alpha * rho >= bound:
        raise ParameterError(
            f"resolvent requires alpha * {what} < 1, got {alpha:.6g} * {rho:.6g} "
            f"= {alpha * rho:.12g}"
        )


def deformed_laplacian(g: Graph, alpha: float, mu: float = 1.0) -> DeformedLaplacian:
    """
    𝒜_μ(α) = I − αA − α²μ(μI − D): диагональ 1 + α²μ(d_i − μ), −α на рёбрах.

    Args:
        g: Граф
        alpha: α ≥ 0 (α = 0 даёт I)
        mu: μ ∈ [0, 1]; μ = 1 — матрица Бете–Гессе
    """
    if alpha < 0:
        raise ParameterError(f"alpha must be nonnegative, got {alpha}")
    mu = validate_mu(mu)
    diagonal = 1.0 + alpha**2 * mu * (g.degrees - mu)
    matrix = sp.csr_matrix(sp.diags(diagonal) - alpha * g.adjacency)
    return DeformedLaplacian(alpha=alpha, mu=mu, matrix=matrix)


# ---------------------------------------------------------------------------
# Функциональный интерфейс (операторы кэшируются по отпечатку графа)
# ---------------------------------------------------------------------------


def _cached(key: tuple, factory: Callable[[], LaplacianOperator]) -> LaplacianOperator:
    if key in operator_cache:
        logger.debug(f"Cache hit for operator {key[1:]}")
        return operator_cache[key]
    op = factory()
    operator_cache[key] = op
    return op


def _function_key(f: CoefficientFunction) -> tuple:
    return (f.kind, f.alpha, f.beta, f.coefficients, f.k)


def standard_apply(g: Graph, v: np.ndarray) -> np.ndarray:
    """Lv = Dv − Av."""
    op = _cached((g.fingerprint, "standard"), lambda: StandardLaplacian(g))
    return op.apply(v)


def k_walk_apply(g: Graph, k: int, mu: float, v: np.ndarray) -> np.ndarray:
    """𝕃_{k,μ}v = diag(q_k𝟏)v − q_k v."""
    op = _cached((g.fingerprint, "kwalk", k, mu), lambda: KWalkLaplacian(g, k, mu))
    return op.apply(v)


def walk_transformed_apply(g: Graph, f: CoefficientFunction, v: np.ndarray) -> np.ndarray:
    """𝕃(f)v = t ⊙ v − f(A)v."""
    op = _cached(
        (g.fingerprint, "walk", _function_key(f)), lambda: WalkTransformedLaplacian(g, f)
    )
    return op.apply(v)


def btdw_transformed_apply(
    g: Graph, mu: float, f: CoefficientFunction, v: np.ndarray
) -> np.ndarray:
    """𝕃_μ(f)v."""
    op = _cached(
        (g.fingerprint, "btdw", mu, _function_key(f)),
        lambda: BTDWTransformedLaplacian(g, mu, f),
    )
    return op.apply(v)


def k_path_transformed_build(
    g: Graph, kind: Literal["exp", "pow"] = "exp", beta: float = 1.0
) -> np.ndarray:
    """Плотная ℒ = Σ t_k ℒ_k."""
    return KPathTransformedLaplacian(g, kind, beta).to_dense()


def laplacian_diagonal(op: LaplacianOperator) -> np.ndarray:
    return op.diagonal()


def materialize(op: LaplacianOperator) -> np.ndarray:
    """Плотная матрица оператора (n ≤ dense_limit)."""
    return op.to_dense()


def m_matrix_sign_pattern(M: np.ndarray, tol: float = 1e-12) -> bool:
    """Внедиагональные элементы ≤ tol, диагональ ≥ −tol."""
    off = M - np.diag(np.diag(M))
    return bool(np.all(off <= tol) and np.all(np.diag(M) >= -tol))


# ---------------------------------------------------------------------------
# Спецификации семейств
# ---------------------------------------------------------------------------

_SPEC_KEYS = {
    "mu": float,
    "alpha": float,
    "beta": float,
    "k": int,
    "K": int,
    "truncation": int,
}


def parse_family(text: str) -> OperatorSpec:
    """
    Разобрать строку вида <family>[:key=value]*.

    Ключи: mu, alpha, beta, k, K (или truncation).

    Raises:
        ParameterError: Неизвестное семейство, ключ или значение
    """
    family, *pairs = text.strip().split(":")
    fields: dict = {"family": family}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or key not in _SPEC_KEYS:
            raise ParameterError(f"bad family parameter '{pair}' in '{text}'")
        try:
            fields["truncation" if key == "K" else key] = _SPEC_KEYS[key](value)
        except ValueError as e:
            raise ParameterError(f"bad value for {key} in '{text}': {value}") from e
    try:
        return OperatorSpec(**fields)
    except ValidationError as e:
        raise ParameterError(f"invalid family spec '{text}': {e.errors()[0]['msg']}") from e


def _default_series(spec: OperatorSpec, rho: float) -> CoefficientFunction:
    """α^k при заданном α, иначе β^k/k! (β = 1/ρ по умолчанию), k = 0..K."""
    K = spec.truncation
    if spec.alpha is not None:
        return CoefficientFunction.series([spec.alpha**k for k in range(K + 1)])
    beta = spec.beta if spec.beta is not None else (1.0 / rho if rho > 0 else 1.0)
    return CoefficientFunction.series(
        [math.exp(k * math.log(beta) - math.lgamma(k + 1)) for k in range(K + 1)]
    )


def build_operator(g: Graph, spec: OperatorSpec) -> LaplacianOperator:
    """
    Построить (или взять из кэша) оператор по спецификации.

    Значения по умолчанию: μ = 0 для kwalk, μ = 1 для btdw-*;
    α = 1/(2ρ(A)) для резольвент; β = 1/ρ(A) или 1/ρ(Z) для экспонент.
    """
    key = (g.fingerprint, "spec", spec.model_dump_json())
    return _cached(key, lambda: _build(g, spec))


def _build(g: Graph, spec: OperatorSpec) -> LaplacianOperator:
    family = spec.family
    if family == "standard":
        return StandardLaplacian(g)
    if family == "kwalk":
        return KWalkLaplacian(g, spec.k, spec.mu if spec.mu is not None else 0.0)
    if family.startswith("kpath"):
        beta = spec.beta if spec.beta is not None else 1.0
        return KPathTransformedLaplacian(g, "exp" if family == "kpath-exp" else "pow", beta)

    rho_a = spectral_radius_adjacency(g).value if g.m else 0.0
    mu = spec.mu if spec.mu is not None else 1.0
    kind = family.split("-", 1)[1]
    if kind == "exp":
        f = CoefficientFunction.exponential(spec.beta)
    elif kind == "res":
        alpha = spec.alpha if spec.alpha is not None else (0.5 / rho_a if rho_a > 0 else 0.5)
        f = CoefficientFunction.resolvent(alpha)
    else:
        rho = rho_a
        if family.startswith("btdw") and g.m:
            rho = spectral_radius_Z(z_operator(g, mu)).value
        f = _default_series(spec, rho)

    if family.startswith("walk"):
        return WalkTransformedLaplacian(g, f)
    return BTDWTransformedLaplacian(g, mu, f)

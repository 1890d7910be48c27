"""
Спектральные оценки.

Этот модуль отвечает за:
1. Спектральный радиус ρ(A) и ρ(Z) степенным методом со сдвигом
2. Плотный запасной вариант и перекрёстную проверку для малых n
3. Полное плотное разложение симметричных операторов
4. Кэширование радиусов по отпечатку графа
"""

from typing import Callable, Optional

import numpy as np
import scipy.linalg
from cachetools import LRUCache
from loguru import logger

from walklap.core.config import get_settings
from walklap.core.exceptions import (
    ConvergenceError,
    OscillationError,
    SizeLimitError,
    SymmetryError,
)
from walklap.models.graph import Graph
from walklap.models.spectral import DenseSpectrum, SpectralEstimate
from walklap.models.walks import ZOperator
from walklap.services.graph_core import component_count
from walklap.services.walk_calculus import z_apply, z_dense

# Кэш радиусов: ключ (отпечаток графа, μ, tol)
radius_cache: LRUCache = LRUCache(maxsize=256)

# Сдвиг разводит пары ±ρ двудольных спектров
POWER_SHIFT = 1.0

# Сколько подряд итераций с чередованием оценок считается колебанием
OSCILLATION_WINDOW = 25


def power_iteration(
    matvec: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: float,
    max_iter: int,
    shift: float = 0.0,
    seed: int = 0,
    positive_start: bool = False,
) -> SpectralEstimate:
    """
    Степенной метод для x ↦ (M + shift·I)x.

    Значение — модуль отношения Рэлея для M (без сдвига), критерий
    остановки — относительная невязка ‖Mx − λx‖ / (|λ|‖x‖).

    Raises:
        OscillationError: Оценки чередуются между двумя значениями
        ConvergenceError: Нет сходимости за max_iter итераций
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim)
    if positive_start:
        x = np.abs(x) + 1.0
    x /= np.linalg.norm(x)

    history: list[float] = []
    alternating = 0
    residual = np.inf
    theta = 0.0
    for iteration in range(1, max_iter + 1):
        y = matvec(x)
        theta = float(x @ y)
        residual = float(np.linalg.norm(y - theta * x))
        scale = abs(theta)
        if scale <= np.finfo(float).tiny:
            if residual <= tol:
                return SpectralEstimate(value=0.0, residual=residual, iterations=iteration)
        else:
            residual /= scale
            if residual <= tol:
                return SpectralEstimate(
                    value=abs(theta), residual=residual, iterations=iteration
                )

        history.append(theta)
        if len(history) >= 3:
            a, b, c = history[-3:]
            if abs(c - a) <= 1e-8 * max(abs(c), 1.0) and abs(c - b) > 1e-4 * max(abs(c), 1.0):
                alternating += 1
                if alternating >= OSCILLATION_WINDOW:
                    raise OscillationError(b, c, iteration)
            else:
                alternating = 0
            history.pop(0)

        w = y + shift * x
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return SpectralEstimate(value=0.0, residual=0.0, iterations=iteration)
        x = w / norm

    raise ConvergenceError(
        f"power iteration did not reach residual {tol:.1e} in {max_iter} iterations "
        f"(last estimate {theta:.12g}, residual {residual:.3e})",
        iterations=max_iter,
        residual=residual,
    )


def spectral_radius_adjacency(
    g: Graph,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> SpectralEstimate:
    """
    ρ(A) степенным методом.

    Args:
        g: Граф (для простого собственного значения Перрона — связный)
        tol: Допуск невязки (по умолчанию power_tol)
        max_iter: Лимит итераций (по умолчанию power_max_iter)
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.power_tol
    max_iter = max_iter if max_iter is not None else settings.power_max_iter

    cache_key = (g.fingerprint, "A", tol)
    if cache_key in radius_cache:
        logger.debug(f"Cache hit for rho(A) of {g}")
        return radius_cache[cache_key]

    if g.m == 0:
        estimate = SpectralEstimate(value=0.0, residual=0.0, iterations=0, method="trivial")
    else:
        A = g.adjacency
        try:
            estimate = power_iteration(
                lambda x: A @ x, g.n, tol, max_iter, shift=POWER_SHIFT, positive_start=True
            )
        except ConvergenceError as e:
            if g.n > settings.dense_limit:
                raise
            logger.warning(f"rho(A) power iteration failed ({e}); using dense eigensolver")
            eigenvalues = scipy.linalg.eigh(g.dense_adjacency(), eigvals_only=True)
            estimate = SpectralEstimate(
                value=float(np.max(np.abs(eigenvalues))), residual=0.0,
                iterations=e.iterations or 0, method="dense",
            )

    logger.debug(
        f"rho(A)={estimate.value:.12g} for {g} ({estimate.method}, {estimate.iterations} it)"
    )
    radius_cache[cache_key] = estimate
    return estimate


def spectral_radius_Z(
    z: ZOperator,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> SpectralEstimate:
    """
    ρ(Z) для несимметричного оператора размера 2n.

    Ниже плотного предела результат сверяется с плотным разложением;
    при расхождении или отказе степенного метода возвращается плотное значение.
    Колебание при n выше предела пробрасывается как OscillationError.
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.power_tol
    max_iter = max_iter if max_iter is not None else settings.power_max_iter
    g = z.graph

    cache_key = (g.fingerprint, z.mu, tol)
    if cache_key in radius_cache:
        logger.debug(f"Cache hit for rho(Z) of {g}, mu={z.mu}")
        return radius_cache[cache_key]

    dense_ok = g.n <= settings.dense_limit
    if z.mu == 0.0:
        # Блочно-треугольная Z: σ(Z) = σ(A) ∪ {0}
        estimate = spectral_radius_adjacency(g, tol, max_iter)
    elif g.m == 0:
        estimate = SpectralEstimate(
            value=_dense_radius(z_dense(z)), residual=0.0, iterations=0, method="dense"
        )
    elif z.mu == 1.0 and g.m == g.n - component_count(g):
        # Лес: невозвратные блуждания обрываются, Z нильпотентна
        estimate = SpectralEstimate(value=0.0, residual=0.0, iterations=0, method="trivial")
    else:
        buffer = np.empty(2 * g.n)
        try:
            estimate = power_iteration(
                lambda x: z_apply(z, x, out=buffer).copy(),
                2 * g.n, tol, max_iter, shift=POWER_SHIFT,
            )
        except ConvergenceError as e:
            if not dense_ok:
                raise
            logger.warning(f"rho(Z) power iteration failed ({e}); using dense eigenvalues")
            estimate = SpectralEstimate(
                value=_dense_radius(z_dense(z)), residual=0.0,
                iterations=e.iterations or 0, method="dense",
            )
        else:
            if dense_ok:
                reference = _dense_radius(z_dense(z))
                if abs(reference - estimate.value) > 1e-6 * max(reference, 1.0):
                    logger.warning(
                        f"rho(Z) power estimate {estimate.value:.12g} disagrees with "
                        f"dense value {reference:.12g}; using dense"
                    )
                    estimate = estimate.model_copy(update={"value": reference, "method": "dense"})

    logger.debug(f"rho(Z)={estimate.value:.12g} for {g}, mu={z.mu} ({estimate.method})")
    radius_cache[cache_key] = estimate
    return estimate


def operator_radius(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float,
    max_iter: int,
) -> float:
    """
    Грубая оценка наибольшего собственного значения симметричного PSD оператора.

    Нужна только граница отрезка, поэтому отсутствие сходимости
    не считается ошибкой: возвращается последняя оценка.
    """
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    theta = 0.0
    for _ in range(max_iter):
        y = matvec(x)
        new_theta = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(new_theta - theta) <= tol * abs(new_theta):
            return new_theta
        theta = new_theta
    logger.debug(f"Operator radius estimate {theta:.6g} after {max_iter} iterations")
    return theta


def dense_spectrum(op) -> DenseSpectrum:
    """
    Собственные значения (по возрастанию) и векторы симметричного оператора.

    Args:
        op: LaplacianOperator (любой объект с n и to_dense()) или плотная матрица

    Raises:
        SizeLimitError: n больше dense_limit
        SymmetryError: Материализованная матрица несимметрична
    """
    limit = get_settings().dense_limit
    n = op.shape[0] if isinstance(op, np.ndarray) else op.n
    if n > limit:
        raise SizeLimitError(n, limit, "dense_spectrum")

    M = op if isinstance(op, np.ndarray) else op.to_dense()
    scale = max(float(np.max(np.abs(M))), 1.0) if M.size else 1.0
    asymmetry = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if asymmetry > 1e-10 * scale:
        raise SymmetryError(f"operator is not symmetric: max |M - M^T| = {asymmetry:.3e}")

    eigenvalues, eigenvectors = scipy.linalg.eigh(0.5 * (M + M.T))
    return DenseSpectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def _dense_radius(Z: np.ndarray) -> float:
    """
    ρ по плотному спектру.

    Кластер вокруг доминирующего значения усредняется: для жорданова
    блока отдельные значения неточны, их среднее точно.
    """
    eigenvalues = scipy.linalg.eigvals(Z)
    dominant = eigenvalues[np.argmax(np.abs(eigenvalues))]
    radius = abs(dominant)
    if radius == 0.0:
        return 0.0
    cluster = eigenvalues[np.abs(eigenvalues - dominant) <= 1e-6 * radius]
    return float(abs(cluster.mean()))

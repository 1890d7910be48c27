"""
Средняя вероятность возврата p̂(t) = tr(exp(−t𝔏)) / n.

Этот модуль отвечает за:
1. Точные кривые через плотное спектральное разложение
2. Рандомизированную оценку XNysTrace-exp: блочный рациональный
   Крылов + оценщик Нистрёма с исключением по одному зонду
3. Базовую линию Хатчинсона с квадратурой Ланцоша на тех же зондах
4. Сравнение семейств и развёртку по μ с общим β
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import scipy.linalg
from loguru import logger

from walklap.core.config import get_settings
from walklap.core.exceptions import (
    NotPositiveSemidefiniteError,
    ParameterError,
    RankDeficiencyError,
)
from walklap.models.functions import CoefficientFunction
from walklap.models.graph import Graph
from walklap.models.krylov import PoleSet
from walklap.models.trace import ReturnProbabilityCurve, TraceEstimate
from walklap.services.krylov import (
    LanczosProcess,
    as_matvec,
    block_rational_arnoldi,
    exp_poles,
    reduced_pencil_expm,
    reduced_pencil_matrix,
)
from walklap.services.operators import (
    BTDWTransformedLaplacian,
    LaplacianOperator,
    build_operator,
    parse_family,
)
from walklap.services.spectral import dense_spectrum, operator_radius, spectral_radius_adjacency

# Запас над грубой оценкой ρ для правого конца отрезка полюсов
RHO_PADDING = 1.05


def time_grid(tmax: float, points: Optional[int] = None, log: bool = False) -> np.ndarray:
    """
    Временная сетка на [0, tmax].

    Логарифмическая сетка: 0 и points − 1 точек на [tmax·10⁻³, tmax].
    """
    points = points if points is not None else get_settings().time_points
    if not tmax > 0:
        raise ParameterError(f"tmax must be positive, got {tmax}")
    if points < 2:
        raise ParameterError(f"time grid needs at least 2 points, got {points}")
    if not log:
        return np.linspace(0.0, tmax, points)
    top = np.log10(tmax)
    return np.concatenate([[0.0], np.logspace(top - 3, top, points - 1)])


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise ParameterError("time grid is empty")
    if np.any(times < 0):
        raise ParameterError(f"times must be nonnegative, got min {times.min()}")
    return times


def exact_return_probability(op: LaplacianOperator, times) -> ReturnProbabilityCurve:
    """p̂(t) = (1/n)·Σ exp(−tλ_i) по плотному спектру."""
    times = _check_times(times)
    eigenvalues = np.maximum(dense_spectrum(op).eigenvalues, 0.0)
    values = np.array([np.mean(np.exp(-t * eigenvalues)) for t in times])
    return ReturnProbabilityCurve(
        times=times,
        values=values,
        error_estimates=np.zeros_like(values),
        method="exact",
        label=op.label(),
    )


# ---------------------------------------------------------------------------
# XNysTrace
# ---------------------------------------------------------------------------


def _normalize_columns(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=0)[None, :]


def _diag_prod(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """diag(XᵀY)."""
    return np.sum(X * Y, axis=0)


def draw_probes(n: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """Изотропные зонды: гауссовы столбцы, нормированные на сферу радиуса √n."""
    return np.sqrt(n) * _normalize_columns(rng.standard_normal((n, M)))


def xnystrace_core(Y: np.ndarray, omega: np.ndarray) -> TraceEstimate:
    """
    Оценка следа симметричной PSD матрицы B по Y = BΩ.

    Нистрём с исключением по одному зонду; точна при rank(B) < M.
    При M ≥ n возвращается tr(YΩ⁺) с нулевой ошибкой.

    Raises:
        RankDeficiencyError: rank(Ω) < M
        NotPositiveSemidefiniteError: Отрицательный ведущий элемент Холецкого
    """
    Y = np.asarray(Y, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if Y.shape != omega.shape or omega.ndim != 2:
        raise ParameterError(f"Y {Y.shape} and Omega {omega.shape} must be equal-shape blocks")
    N, M = omega.shape
    if M < 2:
        raise ParameterError(f"trace estimation needs M >= 2 probes, got {M}")
    if M >= N:
        return TraceEstimate(value=float(np.trace(Y @ np.linalg.pinv(omega))), error_estimate=0.0)
    if np.linalg.matrix_rank(omega) < M:
        raise RankDeficiencyError(f"probe block has rank < M={M}")

    nu = np.finfo(float).eps * np.linalg.norm(Y) / np.sqrt(N)
    Y = Y + nu * omega
    Q, R = np.linalg.qr(Y)
    H = omega.T @ Y
    H = 0.5 * (H + H.T)
    try:
        C = np.linalg.cholesky(H).T
    except np.linalg.LinAlgError as e:
        raise NotPositiveSemidefiniteError(
            "Nystrom core matrix has a negative pivot; the operator is not PSD"
        ) from e
    B = scipy.linalg.solve_triangular(C, R.T, trans="T").T

    QQ, RR = np.linalg.qr(omega)
    WW = QQ.T @ omega
    SS = _normalize_columns(np.linalg.inv(RR).T)
    scale = (N - M + 1) / (
        N - np.linalg.norm(WW, axis=0) ** 2
        + np.abs(_diag_prod(SS, WW) * np.linalg.norm(SS, axis=0)) ** 2
    )

    W = Q.T @ omega
    inverse_diag = np.diag(np.linalg.inv(H))
    if np.any(inverse_diag <= 0):
        raise NotPositiveSemidefiniteError("Nystrom core inverse has a nonpositive diagonal")
    S = scipy.linalg.solve_triangular(C, B.T).T * inverse_diag ** (-0.5)
    dSW = _diag_prod(S, W)
    estimates = (
        np.linalg.norm(B) ** 2
        - np.linalg.norm(S, axis=0) ** 2
        + np.abs(dSW) ** 2 * scale
        - nu * N
    )
    return TraceEstimate(
        value=float(np.mean(estimates)),
        error_estimate=float(np.std(estimates, ddof=1) / np.sqrt(M)),
    )


def _pole_set(op: LaplacianOperator, t_star: float) -> PoleSet:
    """Полюса exp(−x) на [0, t*·ρ], перенесённые делением на t*."""
    settings = get_settings()
    rho = operator_radius(op.apply, op.n, settings.trace_rho_tol, settings.trace_rho_iter)
    rho *= RHO_PADDING
    if t_star <= 0 or rho <= 0:
        logger.info("Degenerate pole interval; using a single infinite pole")
        return PoleSet(poles=np.array([np.inf + 0j]), error=0.0, interval=(0.0, 0.0))
    poles = exp_poles(t_star * rho).scaled(t_star)
    logger.info(f"Rational Krylov poles: {poles.degree} on [0, {t_star * rho:.4g}]")
    return poles


def xnystrace_exp(
    op: LaplacianOperator,
    probes: int,
    times,
    seed: int = 0,
    inner_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> ReturnProbabilityCurve:
    """
    Рандомизированная кривая p̂(t).

    Зонды, полюса, пучок и разложение приведённой матрицы строятся
    один раз; точки по времени считаются параллельно, порядок
    результатов не зависит от числа потоков.

    Args:
        op: Симметричный PSD оператор
        probes: Число зондов M ≥ 2
        times: Временная сетка
        seed: Зерно генератора зондов
        inner_tol: Допуск внутренних решений MINRES
        threads: Число потоков (по умолчанию settings.threads)
    """
    settings = get_settings()
    threads = threads if threads is not None else settings.threads
    times = _check_times(times)
    n = op.n
    if probes < 2:
        raise ParameterError(f"XNysTrace needs M >= 2 probes, got {probes}")
    if probes >= n:
        logger.info(f"M={probes} >= n={n}: evaluating the curve exactly")
        exact = exact_return_probability(op, times)
        return exact.model_copy(update={"probes": probes, "seed": seed})

    omega = draw_probes(n, probes, np.random.default_rng(seed))
    poles = _pole_set(op, float(times.max()))

    if (poles.degree + 1) * probes >= n:
        # Базис заполнил бы всё пространство: exp(−t𝔏)Ω по плотному спектру
        logger.info(f"Krylov basis would reach n={n}; applying exp(-tL) densely")
        spectrum = dense_spectrum(op)
        theta = np.maximum(spectrum.eigenvalues, 0.0)
        U = spectrum.eigenvectors
        projected = U.T @ omega

        def evaluate(t: float) -> TraceEstimate:
            Y = U @ (np.exp(-t * theta)[:, None] * projected) / n
            return xnystrace_core(Y, omega)
    else:
        pencil = block_rational_arnoldi(op, omega, poles, inner_tol)
        eig = scipy.linalg.eigh(reduced_pencil_matrix(pencil))

        def evaluate(t: float) -> TraceEstimate:
            return xnystrace_core(reduced_pencil_expm(pencil, t, omega, eig), omega)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        estimates = list(pool.map(evaluate, times))

    logger.info(f"XNysTrace-exp: {times.size} time points, M={probes}, seed={seed}")
    return ReturnProbabilityCurve(
        times=times,
        values=np.array([e.value for e in estimates]),
        error_estimates=np.array([e.error_estimate for e in estimates]),
        method="stochastic",
        probes=probes,
        seed=seed,
        label=op.label(),
    )


def hutchinson_lanczos(
    op: LaplacianOperator,
    probes: int,
    times,
    seed: int = 0,
    lanczos_dim: int = 50,
) -> ReturnProbabilityCurve:
    """
    Базовая линия: Хатчинсон с квадратурой Ланцоша по каждому зонду.

    Зонды совпадают с xnystrace_exp при том же seed.
    """
    times = _check_times(times)
    n = op.n
    if probes < 2:
        raise ParameterError(f"Hutchinson needs M >= 2 probes, got {probes}")
    omega = draw_probes(n, probes, np.random.default_rng(seed))

    samples = np.zeros((probes, times.size))
    for j in range(probes):
        process = LanczosProcess(as_matvec(op), omega[:, j], lanczos_dim)
        while not process.exhausted:
            process.step()
        theta, weights = process.quadrature()
        theta = np.maximum(theta, 0.0)
        samples[j] = process.norm**2 * (np.exp(-np.outer(times, theta)) @ weights) / n

    logger.info(f"Hutchinson-Lanczos: M={probes}, dim<={lanczos_dim}, seed={seed}")
    return ReturnProbabilityCurve(
        times=times,
        values=samples.mean(axis=0),
        error_estimates=samples.std(axis=0, ddof=1) / np.sqrt(probes),
        method="hutchinson",
        probes=probes,
        seed=seed,
        label=op.label(),
    )


# ---------------------------------------------------------------------------
# Сравнение семейств
# ---------------------------------------------------------------------------


def return_probability(
    op: LaplacianOperator,
    times,
    method: str = "exact",
    probes: int = 4,
    seed: int = 0,
    threads: Optional[int] = None,
) -> ReturnProbabilityCurve:
    """Диспетчер по методу: exact, stochastic или hutchinson; threads — только для stochastic."""
    if method == "exact":
        return exact_return_probability(op, times)
    if method == "stochastic":
        return xnystrace_exp(op, probes, times, seed, threads=threads)
    if method == "hutchinson":
        return hutchinson_lanczos(op, probes, times, seed)
    raise ParameterError(f"unknown return-probability method: {method}")


def compare_families(
    g: Graph,
    families: list[str],
    times,
    method: str = "exact",
    probes: int = 4,
    seed: int = 0,
    threads: Optional[int] = None,
) -> list[ReturnProbabilityCurve]:
    """Кривые для нескольких семейств на одном графе (метки — строки семейств)."""
    curves = []
    for family in families:
        op = build_operator(g, parse_family(family))
        curve = return_probability(op, times, method, probes, seed, threads)
        curves.append(curve.model_copy(update={"label": family}))
    return curves


def mu_sweep(
    g: Graph,
    mus: list[float],
    times,
    beta: Optional[float] = None,
    method: str = "exact",
    probes: int = 4,
    seed: int = 0,
    threads: Optional[int] = None,
) -> list[ReturnProbabilityCurve]:
    """
    Кривые 𝕃_μ(exp) с общим β для всех μ.

    По умолчанию β = 1/ρ(A): ρ(Z) не превосходит ρ(A), поэтому ряд
    сходится при каждом μ, а общий β сохраняет упорядочение кривых.
    """
    if beta is None:
        rho = spectral_radius_adjacency(g).value if g.m else 0.0
        beta = 1.0 / rho if rho > 0 else 1.0
    f = CoefficientFunction.exponential(beta)
    curves = []
    for mu in mus:
        op = BTDWTransformedLaplacian(g, mu, f)
        curve = return_probability(op, times, method, probes, seed, threads)
        curves.append(curve.model_copy(update={"label": f"btdw-exp:mu={mu:g}:beta={beta:.6g}"}))
    return curves

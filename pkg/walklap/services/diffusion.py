"""
Диффузия и цепи Маркова.

Этот модуль отвечает за:
1. Непрерывную диффузию p(t) = p₀·exp(−t𝕃) методом Ланцоша
2. Дискретную цепь P = I − D⁻¹𝕃 и её стационарное распределение
3. Спектральный зазор и историю исследования графа цепью
4. Конвейеры воспроизведения (граф-ловушка G_{5,8}, случайное дерево)
"""

from typing import Literal, Optional

import numpy as np
import scipy.linalg
from loguru import logger

from walklap.core.config import get_settings
from walklap.core.exceptions import ParameterError
from walklap.models.diffusion import MarkovChain, ProbabilityVector
from walklap.services.generators import random_tree, trap_graph
from walklap.services.krylov import ensure_converged, lanczos_fun_apply
from walklap.services.operators import LaplacianOperator, build_operator, parse_family

# Отрицательные элементы меньше этого порога считаются ошибкой округления
ROUNDING_TOL = 1e-9

# Допустимый уход массы Σp от 1 после Ланцоша
MASS_TOL = 1e-8

Weighting = Literal["communicability", "diagonal"]

# Семейства для конвейера "дерево": L, 𝕃(exp), ℒ с t_k = exp(−k), 𝕃₁(exp)
TREE_FAMILIES = ["standard", "walk-exp", "kpath-exp:beta=1", "btdw-exp:mu=1"]

# Семейства для конвейера G_{5,8}: L, 𝕃(res), 𝕃(e^A), ℒ с t_k = exp(−k), 𝕃₁(exp)
TRAP_FAMILIES = [
    "standard",
    "walk-res",
    "walk-exp:beta=1",
    "kpath-exp:beta=1",
    "btdw-exp:mu=1",
]


def diffuse(op: LaplacianOperator, p0: ProbabilityVector, t: float) -> ProbabilityVector:
    """
    p(t) = p₀·exp(−t·op).

    Оператор симметричен, поэтому левое и правое действие совпадают.

    Args:
        op: Оператор с op·𝟏 = 𝟎
        p0: Начальное распределение
        t: Время t ≥ 0

    Raises:
        ParameterError: t < 0, несовпадение размеров или выход из симплекса
            (оператор не M-матрица)
        ConvergenceError: Ланцош исчерпал lanczos_max_dim
    """
    if t < 0:
        raise ParameterError(f"diffusion time must be nonnegative, got {t}")
    if p0.n != op.n:
        raise ParameterError(f"distribution length {p0.n} does not match n={op.n}")
    if t == 0:
        return p0

    p, info = lanczos_fun_apply(op, lambda x: np.exp(-t * x), p0.p)
    ensure_converged(info, f"diffusion with {op.label()} at t={t:g}")
    logger.debug(f"diffuse t={t}: Lanczos dim {info.iterations}, mass {p.sum():.15g}")
    return _to_distribution(p)


def _to_distribution(p: np.ndarray) -> ProbabilityVector:
    """Срезать отрицательный шум округления и перенормировать."""
    mass = float(p.sum())
    if abs(mass - 1.0) > MASS_TOL:
        raise ParameterError(
            f"diffusion lost mass: sum p = {mass:.15g}; the operator rows do not sum to zero"
        )
    if p.min() < -ROUNDING_TOL * max(float(p.max()), 1.0):
        raise ParameterError(
            f"state left the probability simplex (min entry {p.min():.3e}); "
            "the operator is not an M-matrix"
        )
    p = np.clip(p, 0.0, None)
    return ProbabilityVector(p=p / p.sum())


def markov_chain(op: LaplacianOperator, weighting: Weighting = "communicability") -> MarkovChain:
    """
    Цепь P = I − D⁻¹M, π_i = D_ii / Σ D_jj.

    weighting="communicability": D = f(A)𝟏 (сдвиг плюс c_0). Тогда
    P = D⁻¹·f(A) с петлями P_ii = f(A)_ii / D_ii, переходы обратно
    пропорциональны полной коммуникабельности.
    weighting="diagonal": D = diag(M), петли P_ii = 0.

    Для L, 𝕃_{k,μ} и ℒ слагаемого c_0 нет, D = t; у L обе схемы совпадают.
    π сверяется со степенным методом на Pᵀ (кроме периодических цепей).

    Raises:
        SizeLimitError: n > dense_limit
        ParameterError: Нулевой элемент D или неизвестная схема весов
    """
    M = op.to_dense()
    if weighting == "communicability":
        D = np.asarray(op.communicability(), dtype=float).copy()
    elif weighting == "diagonal":
        D = np.diag(M).copy()
    else:
        raise ParameterError(f"unknown chain weighting: {weighting}")
    if np.any(D <= 1e-14 * max(float(np.max(np.abs(D))), 1.0)):
        node = int(np.argmin(D))
        raise ParameterError(
            f"chain weight D vanishes at node {node} ({weighting}); the chain is undefined "
            "(isolated node or degenerate operator)"
        )
    P = np.eye(op.n) - M / D[:, None]
    if weighting == "diagonal":
        np.fill_diagonal(P, 0.0)
    else:
        np.fill_diagonal(P, np.clip(np.diag(P), 0.0, None))
    stationary = ProbabilityVector(p=D / D.sum())
    chain = MarkovChain(
        P=P, diagonal=D, stationary=stationary, provenance=op.label(), weighting=weighting
    )

    gap = spectral_gap(chain)
    if gap > 1e-8:
        _check_stationary(chain)
    logger.info(f"Built Markov chain for {op.label()} ({weighting}): n={op.n}, gap={gap:.6g}")
    return chain


def _check_stationary(chain: MarkovChain) -> None:
    """Перекрёстная проверка π степенным методом на Pᵀ."""
    settings = get_settings()
    p = np.full(chain.n, 1.0 / chain.n)
    for _ in range(settings.power_max_iter):
        nxt = p @ chain.P
        if np.abs(nxt - p).sum() <= 1e-13:
            p = nxt
            break
        p = nxt
    else:
        logger.debug("Stationary cross-check: power iteration did not settle")
        return
    mismatch = float(np.abs(p - chain.stationary.p).max())
    if mismatch > 1e-8:
        logger.warning(
            f"Stationary distribution cross-check mismatch {mismatch:.3e} "
            f"for {chain.provenance}"
        )


def chain_step(chain: MarkovChain, p: ProbabilityVector) -> ProbabilityVector:
    """p_{k+1} = p_k·P."""
    if p.n != chain.n:
        raise ParameterError(f"distribution length {p.n} does not match n={chain.n}")
    return ProbabilityVector(p=p.p @ chain.P)


def chain_eigenvalues(chain: MarkovChain) -> np.ndarray:
    """Собственные значения P через симметричную форму I − D^{-1/2}MD^{-1/2}."""
    root = np.sqrt(chain.diagonal)
    S = root[:, None] * chain.P / root[None, :]
    return scipy.linalg.eigvalsh(0.5 * (S + S.T))


def spectral_gap(chain: MarkovChain) -> float:
    """1 − (второй по модулю собственный элемент P)."""
    if chain.n < 2:
        return 0.0
    moduli = np.sort(np.abs(chain_eigenvalues(chain)))[::-1]
    return float(max(1.0 - moduli[1], 0.0))


def exploration_history(
    chain: MarkovChain,
    start: int,
    checkpoints: Optional[list[int]] = None,
    support_tol: Optional[float] = None,
) -> dict[int, list[int]]:
    """
    Какие вершины цепь посетила к каждой контрольной точке.

    Вершина считается посещённой, если её вероятность хотя бы раз
    превысила support_tol (кумулятивный максимум).

    Returns:
        {шаг: отсортированный список вершин}
    """
    settings = get_settings()
    checkpoints = checkpoints if checkpoints is not None else settings.checkpoints
    support_tol = support_tol if support_tol is not None else settings.support_tol
    if not 0 <= start < chain.n:
        raise ParameterError(f"start node {start} out of range [0, {chain.n})")
    if any(c < 0 for c in checkpoints):
        raise ParameterError(f"checkpoints must be nonnegative, got {checkpoints}")

    p = np.zeros(chain.n)
    p[start] = 1.0
    peak = p.copy()
    history: dict[int, list[int]] = {}
    step = 0
    for checkpoint in sorted(set(checkpoints)):
        while step < checkpoint:
            p = p @ chain.P
            np.maximum(peak, p, out=peak)
            step += 1
        history[checkpoint] = np.flatnonzero(peak > support_tol).tolist()
    return history


def trap_stationary(
    families: Optional[list[str]] = None,
    path_length: int = 5,
    leaves: int = 8,
    weighting: Weighting = "communicability",
) -> dict[str, np.ndarray]:
    """
    Стационарные распределения цепей на графе-ловушке G_{l,m}.

    По умолчанию π ∝ f(A)𝟏: резольвента и экспонента поднимают вес
    конца пути по сравнению с π ∝ d стандартной цепи.

    Returns:
        {метка семейства: π}
    """
    g = trap_graph(path_length, leaves)
    result = {}
    for family in families or TRAP_FAMILIES:
        chain = markov_chain(build_operator(g, parse_family(family)), weighting)
        result[family] = chain.stationary.p
    return result


def tree_exploration(
    n: int = 100,
    seed: int = 0,
    families: Optional[list[str]] = None,
    checkpoints: Optional[list[int]] = None,
    start: int = 0,
    weighting: Weighting = "communicability",
) -> dict[str, dict]:
    """
    Исследование случайного дерева разными цепями.

    Returns:
        {семейство: {"history": {шаг: вершины}, "gap": зазор}}
    """
    g = random_tree(n, seed)
    result = {}
    for family in families or TREE_FAMILIES:
        chain = markov_chain(build_operator(g, parse_family(family)), weighting)
        result[family] = {
            "history": exploration_history(chain, start, checkpoints),
            "gap": spectral_gap(chain),
        }
        logger.info(f"Tree exploration {family}: gap={result[family]['gap']:.6g}")
    return result

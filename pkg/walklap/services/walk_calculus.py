"""
Исчисление блужданий.

Этот модуль отвечает за:
1. Точные матрицы числа блужданий: классические A^k и q_k(A) с
   понижением веса возвратов (μ = 1 даёт невозвратные p_k)
2. Матрично-свободное применение q_k(A)v через рекуррентность
3. Сопровождающий оператор Z и его действие на составные векторы
4. Переборный оракул для проверки рекуррентностей
"""

from typing import Optional

import numpy as np
from loguru import logger
from scipy.sparse.linalg import LinearOperator

from walklap.core.config import get_settings
from walklap.core.exceptions import (
    EnumerationBudgetError,
    ParameterError,
    SizeLimitError,
)
from walklap.models.graph import Graph
from walklap.models.walks import WalkCountSequence, ZOperator, validate_mu


def adjacency_power_counts(g: Graph, max_length: int) -> WalkCountSequence:
    """
    Матрицы A^0..A^K (число блужданий длины k между вершинами).

    Args:
        g: Граф
        max_length: K ≥ 0

    Returns:
        WalkCountSequence с mu = 0
    """
    _check_dense(g, "adjacency_power_counts")
    _check_length(max_length)

    counts = [np.eye(g.n)]
    for _ in range(max_length):
        counts.append(np.asarray(g.adjacency @ counts[-1]))
    return WalkCountSequence(mu=0.0, counts=counts)


def btdw_counts(g: Graph, mu: float, max_length: int) -> WalkCountSequence:
    """
    Матрицы q_0..q_K с понижением веса возвратов.

    Затравки q_0 = I, q_1 = A, q_2 = A² − μD, далее
    q_{k+1} = A q_k + μ(μI − D) q_{k−1}.

    Args:
        g: Граф
        mu: Параметр μ ∈ [0, 1]
        max_length: K ≥ 0
    """
    mu = validate_mu(mu)
    _check_dense(g, "btdw_counts")
    _check_length(max_length)

    A = g.adjacency
    d = g.degrees
    lower = mu * (mu - d)

    counts = [np.eye(g.n)]
    if max_length >= 1:
        counts.append(A.toarray())
    if max_length >= 2:
        counts.append(np.asarray(A @ counts[1]) - mu * np.diag(d))
    for _ in range(3, max_length + 1):
        counts.append(np.asarray(A @ counts[-1]) + lower[:, None] * counts[-2])

    logger.debug(f"BTDW counts: n={g.n}, mu={mu}, K={max_length}")
    return WalkCountSequence(mu=mu, counts=counts)


def walk_count_apply(g: Graph, mu: float, k: int, v: np.ndarray) -> np.ndarray:
    """
    q_k(A)·v без построения матриц (v может быть блоком n×b).

    Стоимость O(k(n + m)) на столбец.
    """
    mu = validate_mu(mu)
    _check_length(k)
    v = np.asarray(v, dtype=float)
    if v.shape[0] != g.n:
        raise ParameterError(f"vector length {v.shape[0]} does not match n={g.n}")

    A = g.adjacency
    d = g.degrees.reshape((-1,) + (1,) * (v.ndim - 1))
    if k == 0:
        return v.copy()
    prev, cur = v, np.asarray(A @ v)
    if k == 1:
        return cur
    prev, cur = cur, np.asarray(A @ cur) - mu * d * v
    lower = mu * (mu - d)
    for _ in range(3, k + 1):
        prev, cur = cur, np.asarray(A @ cur) + lower * prev
    return cur


def z_operator(g: Graph, mu: float) -> ZOperator:
    """Сопровождающий оператор Z для графа и μ."""
    return ZOperator(graph=g, mu=mu)


def z_apply(z: ZOperator, v: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Применить Z к составному вектору (x; y): результат (y; μ(μI − D)x + Ay).

    Args:
        z: Оператор Z
        v: Вектор длины 2n (или блок 2n×b)
        out: Буфер результата той же формы (для повторного использования)

    Raises:
        ParameterError: Несовпадение размерностей
    """
    n = z.n
    v = np.asarray(v)
    if v.shape[0] != 2 * n:
        raise ParameterError(f"stacked vector length {v.shape[0]} does not match 2n={2 * n}")
    if out is None:
        out = np.empty(v.shape, dtype=np.result_type(v, float))
    elif out.shape != v.shape:
        raise ParameterError(f"output buffer shape {out.shape} does not match {v.shape}")

    top, bottom = v[:n], v[n:]
    lower = z.lower_diagonal.reshape((-1,) + (1,) * (v.ndim - 1))
    out[n:] = z.graph.adjacency @ bottom + lower * top
    out[:n] = bottom
    return out


def z_linear_operator(z: ZOperator) -> LinearOperator:
    """Z как scipy LinearOperator размера 2n×2n."""
    return LinearOperator(
        z.shape,
        matvec=lambda x: z_apply(z, np.asarray(x).ravel()),
        matmat=lambda X: z_apply(z, np.asarray(X)),
        dtype=float,
    )


def z_dense(z: ZOperator) -> np.ndarray:
    """Плотная Z (для перекрёстных проверок спектра)."""
    n = z.n
    limit = get_settings().dense_limit
    if n > limit:
        raise SizeLimitError(n, limit, "dense Z")
    Z = np.zeros((2 * n, 2 * n))
    Z[:n, n:] = np.eye(n)
    Z[n:, :n] = np.diag(z.lower_diagonal)
    Z[n:, n:] = z.graph.dense_adjacency()
    return Z


def brute_force_walk_weight(
    g: Graph,
    mu: float,
    k: int,
    i: int,
    j: int,
    budget: Optional[int] = None,
) -> float:
    """
    Переборный оракул: Σ по блужданиям i → … → j длины k от (1 − μ)^b,
    где b — число позиций ℓ с i_ℓ = i_{ℓ+2}.

    Время экспоненциально по k; используется только для проверки.

    Raises:
        EnumerationBudgetError: Превышен лимит частичных блужданий
    """
    mu = validate_mu(mu)
    _check_length(k)
    for node in (i, j):
        if not 0 <= node < g.n:
            raise ParameterError(f"node {node} out of range [0, {g.n})")

    limit = budget if budget is not None else get_settings().enumeration_budget
    damping = 1.0 - mu
    visited = 0
    total = 0.0

    # Стек: (текущая вершина, предыдущая вершина, длина, число возвратов)
    stack = [(i, -1, 0, 0)]
    while stack:
        node, previous, length, backtracks = stack.pop()
        visited += 1
        if visited > limit:
            raise EnumerationBudgetError(
                f"enumeration of length-{k} walks exceeded {limit} partial walks"
            )
        if length == k:
            if node == j:
                total += damping**backtracks
            continue
        for nxt in g.neighbors(node):
            stack.append((int(nxt), node, length + 1, backtracks + (nxt == previous)))
    return total


def _check_dense(g: Graph, what: str) -> None:
    limit = get_settings().dense_limit
    if g.n > limit:
        raise SizeLimitError(g.n, limit, what)


def _check_length(k: int) -> None:
    if k < 0:
        raise ParameterError(f"walk length must be nonnegative, got {k}")

"""
Итерационная линейная алгебра.

Этот модуль отвечает за:
1. f(A)v методом Ланцоша (симметричный случай) и Арнольди (общий)
2. φ-функции малых плотных матриц
3. Предобусловленный CG и MINRES для сдвинутых систем
4. Подбор полюсов алгоритмом AAA
5. Блочный рациональный метод Арнольди и приведённый пучок

Везде используется полная реортогонализация.
"""

from typing import Callable, Literal, Optional, Union

import numpy as np
import scipy.linalg
from loguru import logger
from scipy.sparse.linalg import LinearOperator, aslinearoperator, minres

from walklap.core.config import get_settings
from walklap.core.exceptions import (
    ConvergenceError,
    NegativeCurvatureError,
    ParameterError,
    RankDeficiencyError,
)
from walklap.models.krylov import (
    LanczosDecomposition,
    PoleSet,
    RationalKrylovPencil,
    SolverInfo,
)

Matvec = Callable[[np.ndarray], np.ndarray]


def as_matvec(op) -> Matvec:
    """Привести оператор (LaplacianOperator, LinearOperator, матрицу, функцию) к x ↦ op·x."""
    if hasattr(op, "apply"):
        return op.apply
    if callable(op) and not hasattr(op, "shape"):
        return op
    return lambda x: op @ x


def _operator_size(op, v: np.ndarray) -> int:
    if hasattr(op, "n"):
        return op.n
    if hasattr(op, "shape"):
        return op.shape[0]
    return v.shape[0]


# ---------------------------------------------------------------------------
# Ланцош
# ---------------------------------------------------------------------------


class LanczosProcess:
    """
    Процесс Ланцоша с полной реортогонализацией.

    Каждый step() добавляет один столбец базиса и элемент T_k.
    Счастливый обрыв (β_k ≈ 0) означает, что подпространство инвариантно.
    """

    def __init__(self, matvec: Matvec, v: np.ndarray, capacity: int):
        self.matvec = matvec
        self.norm = float(np.linalg.norm(v))
        self.capacity = max(1, min(capacity, v.shape[0]))
        self.Q = np.zeros((v.shape[0], self.capacity))
        self.Q[:, 0] = v / self.norm
        self.alpha: list[float] = []
        self.beta: list[float] = []
        self.breakdown = False

    @property
    def dimension(self) -> int:
        return len(self.alpha)

    @property
    def exhausted(self) -> bool:
        return self.breakdown or self.dimension >= self.capacity

    def step(self) -> None:
        j = self.dimension
        q = self.Q[:, j]
        w = np.asarray(self.matvec(q), dtype=float).ravel()
        scale = float(np.linalg.norm(w))
        a = float(q @ w)
        w = w - a * q
        if j > 0:
            w -= self.beta[j - 1] * self.Q[:, j - 1]
        basis = self.Q[:, : j + 1]
        for _ in range(2):
            w -= basis @ (basis.T @ w)
        b = float(np.linalg.norm(w))
        self.alpha.append(a)

        if b <= 1e-12 * scale or scale == 0.0:
            self.breakdown = True
            return
        if j + 1 < self.capacity:
            self.beta.append(b)
            self.Q[:, j + 1] = w / b

    def evaluate(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """‖v‖·Q_k·f(T_k)·e₁ для текущей размерности k."""
        k = self.dimension
        alpha = np.asarray(self.alpha)
        if k == 1:
            coeffs = np.atleast_1d(f(alpha))
        else:
            theta, S = scipy.linalg.eigh_tridiagonal(alpha, np.asarray(self.beta[: k - 1]))
            coeffs = S @ (np.asarray(f(theta)) * S[0, :])
        return self.norm * (self.Q[:, :k] @ coeffs)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Узлы и веса гауссовой квадратуры: vᵀf(A)v ≈ ‖v‖² Σ w_i f(θ_i)."""
        alpha = np.asarray(self.alpha)
        if self.dimension == 1:
            return alpha, np.ones(1)
        theta, S = scipy.linalg.eigh_tridiagonal(alpha, np.asarray(self.beta[: self.dimension - 1]))
        return theta, S[0, :] ** 2

    def decomposition(self) -> LanczosDecomposition:
        k = self.dimension
        return LanczosDecomposition(
            basis=self.Q[:, :k].copy(),
            alpha=np.asarray(self.alpha),
            beta=np.asarray(self.beta[: k - 1]),
            norm=self.norm,
        )


def lanczos_decomposition(op, v: np.ndarray, dim: int) -> LanczosDecomposition:
    """k = dim шагов Ланцоша (меньше при обрыве)."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ParameterError("Lanczos start vector must be nonzero")
    process = LanczosProcess(as_matvec(op), v, dim)
    while not process.exhausted:
        process.step()
    return process.decomposition()


def lanczos_fun_apply(
    op,
    f: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    tol: Optional[float] = None,
    max_dim: Optional[int] = None,
) -> tuple[np.ndarray, SolverInfo]:
    """
    f(A)v ≈ ‖v‖·Q_k·f(T_k)·e₁ для симметричного оператора.

    Размерность растёт, пока разность соседних итераций не станет
    ≤ tol·‖результат‖; обрыв считается точной сходимостью.
    При достижении max_dim возвращается последняя итерация с converged=False.

    Args:
        op: Симметричный оператор
        f: Скалярная функция, векторизованная по numpy
        v: Вектор
        tol: Допуск (по умолчанию lanczos_tol)
        max_dim: Максимальная размерность (по умолчанию lanczos_max_dim)

    Returns:
        (f(A)v, SolverInfo)
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.lanczos_tol
    max_dim = max_dim if max_dim is not None else settings.lanczos_max_dim

    v = np.asarray(v, dtype=float)
    if v.shape[0] != _operator_size(op, v):
        raise ParameterError(f"vector length {v.shape[0]} does not match operator size")
    if not np.any(v):
        return np.zeros_like(v), SolverInfo(method="lanczos", iterations=0, residual=0.0, converged=True)

    process = LanczosProcess(as_matvec(op), v, max_dim)
    previous = None
    difference = np.inf
    while True:
        process.step()
        current = process.evaluate(f)
        if previous is not None:
            difference = float(np.linalg.norm(current - previous))
        if process.breakdown or process.dimension == v.shape[0]:
            info = SolverInfo(method="lanczos", iterations=process.dimension, residual=0.0, converged=True)
            break
        if difference <= tol * np.linalg.norm(current):
            info = SolverInfo(
                method="lanczos", iterations=process.dimension, residual=difference, converged=True
            )
            break
        if process.exhausted:
            info = SolverInfo(
                method="lanczos", iterations=process.dimension, residual=difference, converged=False
            )
            logger.warning(
                f"Lanczos reached max_dim={max_dim} without convergence "
                f"(difference {difference:.3e}); returning best iterate"
            )
            break
        previous = current

    logger.debug(f"Lanczos f(A)v: dim={info.iterations}, diff={info.residual:.3e}")
    return current, info


# ---------------------------------------------------------------------------
# Арнольди и φ-функции
# ---------------------------------------------------------------------------


def phi1(x):
    """φ₁(x) = (eˣ − 1)/x поэлементно, φ₁(0) = 1."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nonzero = np.abs(x) > 1e-300
    out[nonzero] = np.expm1(x[nonzero]) / x[nonzero]
    return out


def phi1_matrix(H: np.ndarray) -> np.ndarray:
    """
    φ₁(H) для малой плотной матрицы.

    Верхний правый блок exp([[H, I], [0, 0]]) равен φ₁(H).
    """
    k = H.shape[0]
    augmented = np.zeros((2 * k, 2 * k), dtype=np.result_type(H, float))
    augmented[:k, :k] = H
    augmented[:k, k:] = np.eye(k)
    return scipy.linalg.expm(augmented)[:k, k:]


def arnoldi_fun_apply(
    op,
    matrix_function: Callable[[np.ndarray], np.ndarray],
    w: np.ndarray,
    tol: Optional[float] = None,
    max_dim: Optional[int] = None,
) -> tuple[np.ndarray, SolverInfo]:
    """
    f(M)w ≈ ‖w‖·Q_k·f(H_k)·e₁ для несимметричного оператора (например, Z).

    Args:
        op: Оператор (функция, LinearOperator или матрица)
        matrix_function: H ↦ f(H) для малых плотных матриц
        w: Вектор
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.lanczos_tol
    max_dim = max_dim if max_dim is not None else settings.lanczos_max_dim

    w = np.asarray(w, dtype=float)
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        return np.zeros_like(w), SolverInfo(method="arnoldi", iterations=0, residual=0.0, converged=True)

    matvec = as_matvec(op)
    capacity = max(1, min(max_dim, w.shape[0]))
    Q = np.zeros((w.shape[0], capacity + 1))
    H = np.zeros((capacity + 1, capacity))
    Q[:, 0] = w / norm

    previous = None
    difference = np.inf
    converged = False
    k = 0
    while k < capacity:
        u = np.asarray(matvec(Q[:, k]), dtype=float).ravel()
        scale = float(np.linalg.norm(u))
        for _ in range(2):
            coeffs = Q[:, : k + 1].T @ u
            u -= Q[:, : k + 1] @ coeffs
            H[: k + 1, k] += coeffs
        h = float(np.linalg.norm(u))
        H[k + 1, k] = h
        k += 1

        current = norm * (Q[:, :k] @ matrix_function(H[:k, :k])[:, 0])
        if previous is not None:
            difference = float(np.linalg.norm(current - previous))
        if h <= 1e-12 * scale or scale == 0.0 or k == w.shape[0]:
            converged, difference = True, 0.0
            break
        if difference <= tol * np.linalg.norm(current):
            converged = True
            break
        Q[:, k] = u / h
        previous = current

    if not converged:
        logger.warning(
            f"Arnoldi reached max_dim={max_dim} without convergence "
            f"(difference {difference:.3e}); returning best iterate"
        )
    logger.debug(f"Arnoldi f(M)w: dim={k}, diff={difference:.3e}")
    return current, SolverInfo(method="arnoldi", iterations=k, residual=difference, converged=converged)


def ensure_converged(info: SolverInfo, what: str) -> None:
    """
    Поднять ConvergenceError, если решатель исчерпал подпространство.

    Raises:
        ConvergenceError: info.converged is False
    """
    if not info.converged:
        raise ConvergenceError(
            f"{info.method} did not converge for {what}: dim {info.iterations}, "
            f"difference {info.residual:.3e}",
            iterations=info.iterations,
            residual=info.residual,
        )


# ---------------------------------------------------------------------------
# Линейные системы
# ---------------------------------------------------------------------------


def pcg_solve(
    matrix,
    b: np.ndarray,
    preconditioner: Literal["none", "jacobi"] = "jacobi",
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    diagonal: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, SolverInfo]:
    """
    Предобусловленный метод сопряжённых градиентов.

    Останов при ‖Mx − b‖ ≤ tol·‖b‖. Знаконеопределённость обнаруживается
    апостериори по pᵀMp ≤ 0.

    Args:
        matrix: Разреженная SPD матрица (или оператор)
        b: Правая часть
        preconditioner: "jacobi" (диагональ) или "none"
        diagonal: Диагональ для Якоби, если matrix её не предоставляет

    Raises:
        NegativeCurvatureError: pᵀMp ≤ 0
        ConvergenceError: Превышен max_iter
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.cg_tol
    max_iter = max_iter if max_iter is not None else settings.cg_max_iter

    b = np.asarray(b, dtype=float)
    matvec = as_matvec(matrix)
    b_norm = float(np.linalg.norm(b))
    x = np.zeros_like(b)
    if b_norm == 0.0:
        return x, SolverInfo(method="pcg", iterations=0, residual=0.0, converged=True)

    if preconditioner == "jacobi":
        d = diagonal if diagonal is not None else matrix.diagonal()
        d = np.asarray(d, dtype=float)
        if np.any(d <= 0):
            raise NegativeCurvatureError("Jacobi preconditioner needs a positive diagonal")
        inv_diag = 1.0 / d
    elif preconditioner == "none":
        inv_diag = np.ones_like(b)
    else:
        raise ParameterError(f"unknown preconditioner: {preconditioner}")

    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    res_norm = b_norm
    niter = 0

    while res_norm > tol * b_norm and niter < max_iter:
        v = np.asarray(matvec(p), dtype=float)
        curvature = float(p @ v)
        if curvature <= 0.0:
            raise NegativeCurvatureError(
                f"CG encountered p^T M p = {curvature:.3e} <= 0: matrix is not SPD",
                iterations=niter,
                residual=res_norm / b_norm,
            )
        lam = rz / curvature
        x += lam * p
        r -= lam * v
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        res_norm = float(np.linalg.norm(r))
        niter += 1

    relative = res_norm / b_norm
    if relative > tol:
        raise ConvergenceError(
            f"CG did not reach relative residual {tol:.1e} in {max_iter} iterations "
            f"(residual {relative:.3e})",
            iterations=niter,
            residual=relative,
        )
    logger.debug(f"PCG converged: {niter} iterations, residual {relative:.3e}")
    return x, SolverInfo(method="pcg", iterations=niter, residual=relative, converged=True)


def minres_shifted_solve(
    op,
    shift: Union[float, complex],
    b: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> tuple[np.ndarray, SolverInfo]:
    """
    Решить (op − shift·I)x = b методом MINRES.

    Комплексный сдвиг s = a + ib сводится к вещественной симметричной
    системе размера 2n: [[K, J], [J, −K]] (x_re; −x_im) = (b_re; b_im),
    где K = op − aI, J = −bI.

    Returns:
        (x, SolverInfo); x комплексный при комплексном сдвиге
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.inner_tol
    max_iter = max_iter if max_iter is not None else settings.inner_max_iter

    b = np.asarray(b)
    n = b.shape[0]
    matvec = as_matvec(op)
    b_norm = float(np.linalg.norm(b))
    shift = complex(shift)
    if b_norm == 0.0:
        x = np.zeros(n, dtype=complex if shift.imag else float)
        return x, SolverInfo(method="minres", iterations=0, residual=0.0, converged=True)

    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    if shift.imag == 0.0 and not np.iscomplexobj(b):
        operator = LinearOperator((n, n), matvec=matvec, dtype=float)
        x, info = minres(
            operator, b, shift=shift.real, rtol=0.1 * tol, maxiter=max_iter, callback=count
        )
        residual = np.linalg.norm(matvec(x) - shift.real * x - b) / b_norm
    else:
        a, im = shift.real, shift.imag

        def embedded(u):
            top, bottom = u[:n], u[n:]
            return np.concatenate([
                matvec(top) - a * top - im * bottom,
                -im * top - matvec(bottom) + a * bottom,
            ])

        rhs = np.concatenate([np.real(b), np.imag(b)]).astype(float)
        operator = LinearOperator((2 * n, 2 * n), matvec=embedded, dtype=float)
        u, info = minres(operator, rhs, rtol=0.1 * tol, maxiter=max_iter, callback=count)
        x = u[:n] - 1j * u[n:]
        applied = matvec(u[:n]) - 1j * matvec(u[n:])
        residual = np.linalg.norm(applied - shift * x - b) / b_norm

    residual = float(residual)
    if info != 0 and residual > tol:
        raise ConvergenceError(
            f"MINRES with shift {shift} stagnated at residual {residual:.3e} "
            f"after {iterations} iterations",
            iterations=iterations,
            residual=residual,
        )
    logger.debug(f"MINRES shift={shift}: {iterations} iterations, residual {residual:.3e}")
    return x, SolverInfo(method="minres", iterations=iterations, residual=residual, converged=True)


# ---------------------------------------------------------------------------
# AAA
# ---------------------------------------------------------------------------


class BarycentricRational:
    """
    Рациональная функция в барицентрической форме
    r(x) = Σ w_j f_j / (x − z_j) / Σ w_j / (x − z_j).
    """

    def __init__(self, nodes: np.ndarray, values: np.ndarray, weights: np.ndarray):
        self.nodes = np.asarray(nodes)
        self.values = np.asarray(values)
        self.weights = np.asarray(weights)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        with np.errstate(divide="ignore", invalid="ignore"):
            C = 1.0 / (flat[:, None] - self.nodes[None, :])
            r = (C @ (self.weights * self.values)) / (C @ self.weights)
        hits = np.nonzero(flat[:, None] == self.nodes[None, :])
        r[hits[0]] = self.values[hits[1]]
        return np.real_if_close(r).reshape(x.shape)

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    def poles(self) -> np.ndarray:
        """Полюса из обобщённой задачи на собственные значения (E, B)."""
        m = len(self.weights)
        B = np.eye(m + 1)
        B[0, 0] = 0.0
        E = np.block([
            [np.zeros((1, 1)), self.weights[None, :]],
            [np.ones((m, 1)), np.diag(self.nodes)],
        ])
        try:
            eigenvalues = scipy.linalg.eigvals(E, B)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise ConvergenceError(f"pole eigenproblem failed: {e}") from e
        return eigenvalues[np.isfinite(eigenvalues)]


def aaa(
    x: np.ndarray,
    fx: np.ndarray,
    tol: float,
    max_degree: int,
) -> tuple[BarycentricRational, float]:
    """
    Алгоритм AAA: жадный выбор опорных точек и веса из сингулярного
    вектора матрицы Лёвнера.

    Returns:
        (аппроксимант, максимальная ошибка на выборке)
    """
    Z = np.asarray(x, dtype=float).ravel()
    F = np.asarray(fx, dtype=float).ravel()
    if Z.size != F.size:
        raise ParameterError("sample points and values differ in length")
    if np.unique(Z).size < 2:
        raise ParameterError("AAA needs at least two distinct sample points")

    J = list(range(len(F)))
    zj = np.empty(0)
    fj = np.empty(0)
    wj = np.empty(0)
    reltol = tol * np.linalg.norm(F, np.inf)
    R = np.mean(F) * np.ones_like(F)
    error = np.inf

    for _ in range(max_degree + 1):
        jj = int(np.argmax(np.abs(F - R)))
        zj = np.append(zj, Z[jj])
        fj = np.append(fj, F[jj])
        J.remove(jj)
        if not J:
            wj = np.ones(len(zj)) if wj.size == 0 else np.append(wj, 0.0)
            break

        C = 1.0 / (Z[J, None] - zj[None, :])
        loewner = (F[J, None] - fj[None, :]) * C
        _, _, Vh = np.linalg.svd(loewner)
        wj = Vh[-1, :].conj()

        R = F.copy()
        R[J] = (C @ (wj * fj)) / (C @ wj)
        error = float(np.linalg.norm(F - R, np.inf))
        if error <= reltol:
            break

    return BarycentricRational(zj, fj, wj), error


def aaa_poles(
    x: np.ndarray,
    fx: np.ndarray,
    tol: Optional[float] = None,
    max_degree: Optional[int] = None,
) -> PoleSet:
    """
    Полюса AAA-аппроксимации выборки (x_i, g(x_i)).

    Полюса, попавшие на отрезок выборки (ложные), отбрасываются.
    """
    settings = get_settings()
    tol = tol if tol is not None else settings.aaa_tol
    max_degree = max_degree if max_degree is not None else settings.aaa_max_degree

    x = np.asarray(x, dtype=float)
    approximant, error = aaa(x, fx, tol, max_degree)
    poles = np.asarray(approximant.poles(), dtype=complex)

    a, b = float(x.min()), float(x.max())
    on_interval = (np.abs(poles.imag) <= 1e-10 * np.maximum(np.abs(poles), 1.0)) & (
        poles.real >= a
    ) & (poles.real <= b)
    if np.any(on_interval):
        logger.warning(f"Removing {int(on_interval.sum())} spurious AAA poles on [{a}, {b}]")
        poles = poles[~on_interval]

    real = np.abs(poles.imag) <= 1e-10 * np.maximum(np.abs(poles), 1.0)
    poles = np.where(real, poles.real + 0j, poles)
    logger.debug(f"AAA: degree {approximant.degree}, {poles.size} poles, error {error:.3e}")
    return PoleSet(poles=poles, error=error, interval=(a, b))


def exp_poles(
    upper: float,
    tol: Optional[float] = None,
    max_degree: Optional[int] = None,
    samples: Optional[int] = None,
) -> PoleSet:
    """
    Полюса рациональной аппроксимации exp(−x) на [0, upper].

    Выборка: samples логарифмически распределённых точек на
    [max(1e−8, 0), upper] плюс точка 0.
    """
    samples = samples if samples is not None else get_settings().aaa_samples
    if not upper > 0:
        raise ParameterError(f"pole interval must have positive length, got [0, {upper}]")
    lower = min(1e-8, upper / 10)
    x = np.concatenate([[0.0], np.logspace(np.log10(lower), np.log10(upper), samples)])
    return aaa_poles(x, np.exp(-x), tol, max_degree)


# ---------------------------------------------------------------------------
# Блочный рациональный Арнольди
# ---------------------------------------------------------------------------


def _pole_schedule(poles: np.ndarray, steps: int) -> list[complex]:
    """
    Порядок полюсов для блочных шагов: вещественный полюс — один шаг,
    комплексная пара (представитель с Im > 0) — два шага. Список
    повторяется по кругу, пока не набрано steps шагов.
    """
    base = [complex(p) for p in np.atleast_1d(poles) if complex(p).imag >= 0]
    if not base:
        base = [complex(np.inf)]
    schedule: list[complex] = []
    done = 0
    while done < steps:
        for pole in base:
            schedule.append(pole)
            done += 2 if pole.imag > 0 else 1
            if done >= steps:
                break
    return schedule


def _orthonormal_block(W: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Блочный Грам–Шмидт дважды и QR: W = V C + V_new R.

    Raises:
        RankDeficiencyError: Диагональ R вырождена
    """
    C = np.zeros((V.shape[1], W.shape[1]))
    W = W.copy()
    for _ in range(2):
        if V.shape[1]:
            coeffs = V.T @ W
            W -= V @ coeffs
            C += coeffs
    V_new, R = np.linalg.qr(W)
    scale = max(float(np.max(np.abs(C))) if C.size else 0.0, float(np.max(np.abs(R))), 1e-300)
    if np.min(np.abs(np.diag(R))) <= 1e-10 * scale:
        raise RankDeficiencyError(
            "block Krylov basis lost rank (deflation is not supported)"
        )
    return V_new, C, R


def block_rational_arnoldi(
    op,
    omega: np.ndarray,
    poles: PoleSet,
    inner_tol: Optional[float] = None,
    steps: Optional[int] = None,
) -> RationalKrylovPencil:
    """
    Блочное рациональное разложение Арнольди 𝔏 V 𝒦 = V ℋ.

    Конечный полюс ξ: W = (𝔏 − ξI)⁻¹V_j, столбцы 𝒦 = c, ℋ = E_j + ξc.
    Бесконечный полюс: W = 𝔏V_j, столбцы 𝒦 = E_j, ℋ = c.
    Комплексная пара a ± ib: одно комплексное решение, вещественная
    и мнимая части добавляются двумя блоками.

    Args:
        op: Симметричный оператор
        omega: Блок зондов n×M полного ранга
        poles: Полюса (по умолчанию шагов столько, сколько полюсов)
        inner_tol: Допуск внутренних решений MINRES
        steps: Число блочных шагов k

    Raises:
        RankDeficiencyError: rank(Ω) < M или потеря ранга базиса
    """
    inner_tol = inner_tol if inner_tol is not None else get_settings().inner_tol
    omega = np.asarray(omega, dtype=float)
    if omega.ndim == 1:
        omega = omega[:, None]
    n, M = omega.shape
    matvec = as_matvec(op)
    steps = steps if steps is not None else max(poles.degree, 1)

    V0, R0 = np.linalg.qr(omega)
    if np.min(np.abs(np.diag(R0))) <= 1e-10 * max(float(np.max(np.abs(R0))), 1e-300):
        raise RankDeficiencyError(f"probe block has rank < M={M}")

    schedule = _pole_schedule(poles.poles, steps)
    total = sum(2 if p.imag > 0 else 1 for p in schedule)
    V = np.zeros((n, (total + 1) * M))
    H = np.zeros(((total + 1) * M, total * M))
    K = np.zeros_like(H)
    V[:, :M] = V0
    used: list[complex] = []

    def block(j: int) -> slice:
        return slice(j * M, (j + 1) * M)

    def apply_block(X: np.ndarray) -> np.ndarray:
        return np.column_stack([matvec(X[:, c]) for c in range(X.shape[1])])

    def solve_block(X: np.ndarray, xi: complex) -> np.ndarray:
        columns = [minres_shifted_solve(op, xi, X[:, c], tol=inner_tol)[0] for c in range(X.shape[1])]
        return np.column_stack(columns)

    j = 0
    for xi in schedule:
        Vj = V[:, block(j)]
        filled = (j + 1) * M
        if np.isinf(xi.real):
            W = apply_block(Vj)
            V_new, C, R = _orthonormal_block(W, V[:, :filled])
            V[:, block(j + 1)] = V_new
            K[block(j), block(j)] = np.eye(M)
            H[:filled, block(j)] = C
            H[block(j + 1), block(j)] = R
            used.append(xi)
            j += 1
        elif xi.imag == 0.0:
            W = solve_block(Vj, xi.real).real
            V_new, C, R = _orthonormal_block(W, V[:, :filled])
            V[:, block(j + 1)] = V_new
            K[:filled, block(j)] = C
            K[block(j + 1), block(j)] = R
            H[:, block(j)] = xi.real * K[:, block(j)]
            H[block(j), block(j)] += np.eye(M)
            used.append(xi)
            j += 1
        else:
            a, b = xi.real, xi.imag
            W = solve_block(Vj, xi)
            X_new, C_x, R_x = _orthonormal_block(W.real, V[:, :filled])
            V[:, block(j + 1)] = X_new
            Y_new, C_y, R_y = _orthonormal_block(W.imag, V[:, : filled + M])
            V[:, block(j + 2)] = Y_new

            c_x = np.zeros((H.shape[0], M))
            c_x[:filled] = C_x
            c_x[block(j + 1)] = R_x
            c_y = np.zeros((H.shape[0], M))
            c_y[: filled + M] = C_y
            c_y[block(j + 2)] = R_y

            K[:, block(j)] = c_x
            K[:, block(j + 1)] = c_y
            H[:, block(j)] = a * c_x - b * c_y
            H[block(j), block(j)] += np.eye(M)
            H[:, block(j + 1)] = a * c_y + b * c_x
            used.extend([xi, xi.conjugate()])
            j += 2

    closure = V.T @ apply_block(V[:, block(j)])
    logger.info(f"Block rational Arnoldi: n={n}, M={M}, k={j} block steps")
    return RationalKrylovPencil(
        basis=V,
        H=H,
        K=K,
        poles=np.asarray(used, dtype=complex),
        block_size=M,
        closure=closure,
    )


def reduced_pencil_matrix(pencil: RationalKrylovPencil) -> np.ndarray:
    """
    ℋ̂𝒦̂⁻¹ для приведённого пучка 𝒦̂ = [𝒦 | E_last], ℋ̂ = [ℋ | Vᵀ𝔏V_last].

    Результат совпадает с Vᵀ𝔏V и симметризуется.

    Raises:
        RankDeficiencyError: 𝒦̂ вырождена
    """
    M = pencil.block_size
    size = pencil.H.shape[0]
    last = np.zeros((size, M))
    last[size - M:, :] = np.eye(M)
    K_hat = np.hstack([pencil.K, last])
    H_hat = np.hstack([pencil.H, pencil.closure])

    singular = scipy.linalg.svdvals(K_hat)
    if singular[-1] <= 1e-13 * singular[0]:
        raise RankDeficiencyError("reduced pencil matrix K is singular")
    S = scipy.linalg.solve(K_hat.T, H_hat.T).T
    return 0.5 * (S + S.T)


def reduced_pencil_expm(
    pencil: RationalKrylovPencil,
    t: float,
    omega: np.ndarray,
    eig: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """
    Y(t) = (1/n)·V·exp(−t·ℋ̂𝒦̂⁻¹)·Vᵀ·Ω.

    Args:
        eig: Заранее вычисленное разложение приведённой матрицы
            (общий для всех t)
    """
    V = pencil.basis
    n = V.shape[0]
    if eig is None:
        eig = scipy.linalg.eigh(reduced_pencil_matrix(pencil))
    theta, U = eig
    projected = U.T @ (V.T @ np.asarray(omega, dtype=float))
    return V @ (U @ (np.exp(-t * theta)[:, None] * projected)) / n


def linear_operator(op, n: int) -> LinearOperator:
    """Обёртка любого оператора в scipy LinearOperator."""
    if hasattr(op, "shape") and not hasattr(op, "apply"):
        return aslinearoperator(op)
    return LinearOperator((n, n), matvec=as_matvec(op), dtype=float)

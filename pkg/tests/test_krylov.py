"""
Тесты крыловских методов: Ланцош, Арнольди, PCG, MINRES, AAA и блочный
рациональный Арнольди.
"""

import numpy as np
import pytest
import scipy.linalg

from walklap.core.exceptions import (
    ConvergenceError,
    NegativeCurvatureError,
    ParameterError,
    RankDeficiencyError,
)
from walklap.models.krylov import PoleSet
from walklap.services.krylov import (
    aaa,
    aaa_poles,
    arnoldi_fun_apply,
    block_rational_arnoldi,
    ensure_converged,
    exp_poles,
    lanczos_decomposition,
    lanczos_fun_apply,
    minres_shifted_solve,
    pcg_solve,
    phi1,
    phi1_matrix,
    reduced_pencil_expm,
    reduced_pencil_matrix,
)
from walklap.services.operators import StandardLaplacian, deformed_laplacian


def laplacian(g) -> np.ndarray:
    return np.diag(g.degrees) - g.dense_adjacency()


class TestLanczos:
    """Тесты f(A)v методом Ланцоша."""

    def test_decomposition_orthonormal(self, karate, rng):
        """Тест: Q ортонормирована, QᵀLQ = T."""
        L = laplacian(karate)
        decomposition = lanczos_decomposition(L, rng.standard_normal(karate.n), 10)
        Q = decomposition.basis

        assert np.allclose(Q.T @ Q, np.eye(decomposition.dimension), atol=1e-10)
        assert np.allclose(Q.T @ L @ Q, decomposition.tridiagonal(), atol=1e-8)

    def test_exp_matches_dense(self, karate, rng):
        """Тест: exp(−L)v совпадает с expm."""
        L = laplacian(karate)
        v = rng.standard_normal(karate.n)
        result, info = lanczos_fun_apply(L, lambda x: np.exp(-x), v)

        assert info.converged
        assert np.allclose(result, scipy.linalg.expm(-L) @ v, atol=1e-9)

    def test_operator_object(self, grid, rng):
        """Тест: оператор с методом apply."""
        op = StandardLaplacian(grid)
        v = rng.standard_normal(grid.n)
        result, _ = lanczos_fun_apply(op, lambda x: np.exp(-0.5 * x), v)

        assert np.allclose(result, scipy.linalg.expm(-0.5 * laplacian(grid)) @ v, atol=1e-9)

    def test_zero_vector(self, p3):
        """Тест: нулевой вектор даёт нулевой результат без итераций."""
        result, info = lanczos_fun_apply(laplacian(p3), np.exp, np.zeros(3))

        assert not np.any(result)
        assert info.iterations == 0

    @pytest.mark.parametrize("degree", [0, 1, 2, 3, 4])
    def test_exact_on_polynomials(self, karate, rng, degree):
        """Тест: для многочлена степени < m приближение размерности m точно."""
        L = laplacian(karate)
        v = rng.standard_normal(karate.n)
        coefficients = rng.standard_normal(degree + 1)
        decomposition = lanczos_decomposition(L, v, 5)
        T = decomposition.tridiagonal()
        pT = sum(c * np.linalg.matrix_power(T, j) for j, c in enumerate(coefficients))
        result = decomposition.norm * decomposition.basis @ pT[:, 0]
        expected = sum(c * np.linalg.matrix_power(L, j) @ v for j, c in enumerate(coefficients))

        assert np.linalg.norm(result - expected) <= 1e-9 * np.linalg.norm(expected)

    def test_not_converged_at_max_dim(self, karate, rng):
        """Тест: при исчерпании max_dim возвращается converged=False."""
        L = laplacian(karate)
        _, info = lanczos_fun_apply(L, lambda x: np.exp(-x), rng.standard_normal(karate.n), max_dim=2)

        assert not info.converged
        with pytest.raises(ConvergenceError):
            ensure_converged(info, "exp(-L)v")

    def test_size_mismatch(self, p3):
        """Тест: длина вектора не совпадает с оператором."""
        with pytest.raises(ParameterError):
            lanczos_fun_apply(StandardLaplacian(p3), np.exp, np.ones(4))


class TestArnoldi:
    """Тесты φ₁ и f(M)w методом Арнольди."""

    def test_phi1_scalar(self):
        """Тест: φ₁(0) = 1, φ₁(1) = e − 1."""
        assert np.allclose(phi1(np.array([0.0, 1.0])), [1.0, np.e - 1.0])

    def test_phi1_matrix_diagonal(self):
        """Тест: φ₁ диагональной матрицы поэлементно."""
        H = np.diag([0.0, 1.0, -2.0])

        assert np.allclose(np.diag(phi1_matrix(H)), phi1(np.array([0.0, 1.0, -2.0])))

    def test_nonsymmetric_exp(self, rng):
        """Тест: exp(M)w для несимметричной матрицы."""
        M = 0.3 * rng.standard_normal((12, 12))
        w = rng.standard_normal(12)
        result, info = arnoldi_fun_apply(M, scipy.linalg.expm, w)

        assert info.converged
        assert np.allclose(result, scipy.linalg.expm(M) @ w, atol=1e-9)


class TestLinearSolvers:
    """Тесты PCG и MINRES."""

    def test_pcg_deformed_triangle(self, k3):
        """Тест: 𝒜(K3, 0.2)·x = 1 даёт x = 1/0.64."""
        A = deformed_laplacian(k3, 0.2).matrix
        x, info = pcg_solve(A, np.ones(3))

        assert np.allclose(x, 1 / 0.64)
        assert info.converged

    def test_pcg_without_preconditioner(self, grid, rng):
        """Тест: CG без предобуславливания на SPD матрице."""
        A = deformed_laplacian(grid, 0.2).matrix
        b = rng.standard_normal(grid.n)
        x, _ = pcg_solve(A, b, preconditioner="none")

        assert np.linalg.norm(A @ x - b) <= 1e-9 * np.linalg.norm(b)

    def test_pcg_negative_curvature(self):
        """Тест: знаконеопределённая матрица."""
        M = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NegativeCurvatureError):
            pcg_solve(M, np.array([1.0, -1.0]), preconditioner="none")

    def test_pcg_zero_rhs(self, k3):
        """Тест: b = 0 даёт x = 0."""
        x, info = pcg_solve(deformed_laplacian(k3, 0.2).matrix, np.zeros(3))

        assert not np.any(x)
        assert info.iterations == 0

    def test_minres_real_shift(self, karate, rng):
        """Тест: (L − ξI)x = b при вещественном ξ < 0."""
        L = laplacian(karate)
        b = rng.standard_normal(karate.n)
        x, _ = minres_shifted_solve(L, -0.7, b, tol=1e-10)

        assert np.allclose((L + 0.7 * np.eye(karate.n)) @ x, b, atol=1e-7)

    def test_minres_complex_shift(self, karate, rng):
        """Тест: комплексный сдвиг через вещественное вложение."""
        L = laplacian(karate)
        b = rng.standard_normal(karate.n)
        shift = -1.0 + 2.0j
        x, _ = minres_shifted_solve(L, shift, b, tol=1e-10)

        assert np.iscomplexobj(x)
        assert np.allclose((L - shift * np.eye(karate.n)) @ x, b, atol=1e-7)

    def test_minres_complex_shift_on_operator(self, karate, rng):
        """Тест: комплексный сдвиг с LaplacianOperator, невязка считается по Re и Im."""
        op = StandardLaplacian(karate)
        L = laplacian(karate)
        b = rng.standard_normal(karate.n)
        shift = -1.0 + 2.0j
        x, info = minres_shifted_solve(op, shift, b, tol=1e-10)
        actual = np.linalg.norm((L - shift * np.eye(karate.n)) @ x - b) / np.linalg.norm(b)

        assert actual <= 1e-9
        assert info.residual == pytest.approx(actual, abs=1e-10)


class TestRationalApproximation:
    """Тесты AAA и полюсов exp(−x)."""

    def test_aaa_recovers_simple_pole(self):
        """Тест: 1/(1 + x) на [0, 1] имеет полюс −1."""
        x = np.linspace(0.0, 1.0, 50)
        poles = aaa_poles(x, 1.0 / (1.0 + x))

        assert np.min(np.abs(poles.poles + 1.0)) <= 1e-8
        assert poles.error <= 1e-12

    def test_aaa_interpolates_support(self):
        """Тест: аппроксимант совпадает с функцией в выборке."""
        x = np.linspace(-1.0, 1.0, 200)
        r, error = aaa(x, np.exp(x), tol=1e-12, max_degree=20)

        assert error <= 1e-10
        assert np.allclose(r(x), np.exp(x), atol=1e-10)

    def test_aaa_needs_distinct_points(self):
        """Тест: одна точка выборки."""
        with pytest.raises(ParameterError):
            aaa(np.ones(3), np.ones(3), tol=1e-9, max_degree=4)

    def test_exp_poles_accuracy(self):
        """Тест: полюса exp(−x) на [0, 10] вне отрезка, ошибка мала."""
        poles = exp_poles(10.0)

        assert poles.error <= 1e-9
        assert poles.poles.size <= 14
        assert poles.interval == pytest.approx((0.0, 10.0))
        for pole in poles.poles:
            assert not (abs(pole.imag) <= 1e-10 and 0.0 <= pole.real <= 10.0)

    def test_exp_poles_finer_grid(self):
        """Тест: на сетке в 10 раз мельче выборки ошибка ≤ 10·tol, степень ≤ 14."""
        tol = 1e-9
        x = np.concatenate([[0.0], np.logspace(-8, 1, 500)])
        r, error = aaa(x, np.exp(-x), tol=tol, max_degree=16)
        fine = np.concatenate([[0.0], np.logspace(-8, 1, 5000)])

        assert error <= tol
        assert r.degree <= 14
        assert np.max(np.abs(r(fine) - np.exp(-fine))) <= 10 * tol

    def test_exp_poles_count_on_wide_interval(self):
        """Тест: на отрезке дорожной сети [0, t*ρ] ≈ [0, 240] порядка 13 полюсов."""
        poles = exp_poles(240.0)

        assert poles.error <= 1e-9
        assert 9 <= poles.poles.size <= 15

    def test_exp_poles_interval(self):
        """Тест: отрезок нулевой длины."""
        with pytest.raises(ParameterError):
            exp_poles(0.0)


class TestBlockRationalArnoldi:
    """Тесты блочного рационального разложения."""

    @pytest.fixture
    def pencil_case(self, karate, rng):
        L = laplacian(karate)
        omega = rng.standard_normal((karate.n, 3))
        poles = PoleSet(poles=np.array([-1.0 + 0j, -2.0 + 3.0j, -2.0 - 3.0j]), error=0.0, interval=(0.0, 20.0))
        return L, omega, block_rational_arnoldi(L, omega, poles, inner_tol=1e-12)

    def test_basis_orthonormal(self, pencil_case):
        """Тест: столбцы V ортонормированы."""
        _, _, pencil = pencil_case
        V = pencil.basis

        assert np.allclose(V.T @ V, np.eye(V.shape[1]), atol=1e-8)

    def test_arnoldi_relation(self, pencil_case):
        """Тест: 𝔏 V 𝒦 = V ℋ."""
        L, _, pencil = pencil_case
        V = pencil.basis

        assert np.allclose(L @ V @ pencil.K, V @ pencil.H, atol=1e-7)

    def test_reduced_matrix_is_projection(self, pencil_case):
        """Тест: ℋ̂𝒦̂⁻¹ = Vᵀ𝔏V."""
        L, _, pencil = pencil_case
        V = pencil.basis

        assert np.allclose(reduced_pencil_matrix(pencil), V.T @ L @ V, atol=1e-6)

    def test_expm_exact_on_full_space(self, p3):
        """Тест: при V, покрывающем всё пространство, Y(t) = exp(−tL)Ω / n."""
        L = laplacian(p3)
        omega = np.eye(3)[:, :1]
        poles = PoleSet(poles=np.array([-1.0 + 0j]), error=0.0, interval=(0.0, 3.0))
        pencil = block_rational_arnoldi(L, omega, poles, inner_tol=1e-12, steps=2)

        Y = reduced_pencil_expm(pencil, 0.5, omega)

        assert np.allclose(Y, scipy.linalg.expm(-0.5 * L) @ omega / 3, atol=1e-7)

    def test_rank_deficient_probes(self, karate):
        """Тест: Ω неполного ранга."""
        omega = np.ones((karate.n, 2))
        poles = PoleSet(poles=np.array([-1.0 + 0j]), error=0.0, interval=(0.0, 20.0))
        with pytest.raises(RankDeficiencyError):
            block_rational_arnoldi(laplacian(karate), omega, poles)

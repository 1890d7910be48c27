"""
Тесты семейства лапласианов.

Матрично-свободное действие сверяется с плотной материализацией,
частные случаи — с замкнутыми формулами на малых графах.
"""

import math

import numpy as np
import pytest

from walklap.core.exceptions import ConvergenceError, ParameterError, SizeLimitError
from walklap.models.functions import CoefficientFunction
from walklap.models.graph import Graph
from walklap.services import generators
from walklap.services.operators import (
    BTDWTransformedLaplacian,
    KPathTransformedLaplacian,
    KWalkLaplacian,
    StandardLaplacian,
    WalkTransformedLaplacian,
    build_operator,
    btdw_transformed_apply,
    deformed_laplacian,
    k_path_transformed_build,
    k_walk_apply,
    laplacian_diagonal,
    m_matrix_sign_pattern,
    materialize,
    operator_cache,
    parse_family,
    standard_apply,
    walk_transformed_apply,
)
from walklap.services.spectral import radius_cache
from walklap.services.walk_calculus import btdw_counts, z_dense, z_operator

FAMILIES = [
    "standard",
    "kwalk:k=3:mu=0.5",
    "walk-exp",
    "walk-res",
    "walk-series:K=6",
    "btdw-exp:mu=0.5",
    "btdw-exp:mu=1",
    "btdw-res:mu=1",
    "btdw-series:mu=0.25:K=6",
    "kpath-exp",
    "kpath-pow:beta=2",
]


@pytest.fixture(autouse=True)
def clear_caches():
    operator_cache.clear()
    radius_cache.clear()
    yield
    operator_cache.clear()
    radius_cache.clear()


class TestOperatorInterface:
    """Общие свойства всех семейств."""

    @pytest.mark.parametrize("family", FAMILIES)
    def test_apply_matches_dense(self, karate, rng, family):
        """Тест: M·v совпадает с плотной матрицей."""
        op = build_operator(karate, parse_family(family))
        v = rng.standard_normal(karate.n)

        assert np.allclose(op.apply(v), materialize(op) @ v, rtol=1e-7, atol=1e-7)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_null_vector(self, karate, family):
        """Тест: M·𝟏 = 0."""
        op = build_operator(karate, parse_family(family))

        assert np.allclose(op.apply(np.ones(karate.n)), 0.0, atol=1e-8)
        assert np.allclose(materialize(op).sum(axis=1), 0.0, atol=1e-8)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_symmetric(self, grid, family):
        """Тест: плотная матрица симметрична."""
        M = materialize(build_operator(grid, parse_family(family)))

        assert np.allclose(M, M.T, atol=1e-10)

    @pytest.mark.parametrize("family", ["standard", "walk-exp", "walk-res", "btdw-res:mu=1", "kpath-exp"])
    def test_m_matrix_sign_pattern(self, karate, family):
        """Тест: внедиагональные элементы неположительны."""
        assert m_matrix_sign_pattern(materialize(build_operator(karate, parse_family(family))), tol=1e-10)

    def test_block_apply(self, grid, rng):
        """Тест: блок векторов обрабатывается по столбцам."""
        op = build_operator(grid, parse_family("walk-exp"))
        V = rng.standard_normal((grid.n, 3))

        assert np.allclose(op.apply(V), materialize(op) @ V, atol=1e-8)
        assert np.allclose(op @ V[:, 0], op.apply(V[:, 0]))

    def test_diagonal(self, karate):
        """Тест: диагональ совпадает с плотной матрицей."""
        for family in ("standard", "kpath-exp", "btdw-exp:mu=1"):
            op = build_operator(karate, parse_family(family))
            assert np.allclose(laplacian_diagonal(op), np.diag(materialize(op)))

    def test_edgeless_graph(self):
        """Тест: граф без рёбер даёт нулевой оператор."""
        op = StandardLaplacian(Graph.from_edges(3, []))

        assert not np.any(op.apply(np.arange(3.0)))
        assert not np.any(op.to_dense())

    def test_vector_length(self, p3):
        """Тест: неверная длина вектора."""
        with pytest.raises(ParameterError):
            StandardLaplacian(p3).apply(np.ones(4))

    def test_dense_size_limit(self, small_dense_limit):
        """Тест: материализация ограничена dense_limit."""
        op = StandardLaplacian(generators.path_graph(11))

        assert op.apply(np.ones(11)).shape == (11,)
        with pytest.raises(SizeLimitError):
            materialize(op)


class TestClosedForms:
    """Частные случаи с известным ответом."""

    def test_standard_path(self, p3):
        """Тест: Lv на P3."""
        assert standard_apply(p3, np.array([1.0, 0.0, 0.0])).tolist() == [1.0, -1.0, 0.0]

    def test_two_walk_path(self, p3):
        """Тест: 𝕃₂(P3) — диагональ (1, 0, 1), средняя вершина изолирована."""
        M = materialize(KWalkLaplacian(p3, 2))

        assert np.allclose(np.diag(M), [1.0, 0.0, 1.0])
        assert np.allclose(M, [[1, 0, -1], [0, 0, 0], [-1, 0, 1]])

    def test_k_walk_apply(self, karate, rng):
        """Тест: функциональный интерфейс совпадает с классом."""
        v = rng.standard_normal(karate.n)

        assert np.allclose(k_walk_apply(karate, 2, 0.5, v), KWalkLaplacian(karate, 2, 0.5).apply(v))

    def test_k_walk_requires_positive_k(self, p3):
        """Тест: k = 0."""
        with pytest.raises(ParameterError):
            KWalkLaplacian(p3, 0)

    def test_kpath_exp_path(self, p3):
        """Тест: ℒ для P3 с весами exp(−k)."""
        e1, e2 = math.exp(-1), math.exp(-2)
        expected = np.array([
            [e1 + e2, -e1, -e2],
            [-e1, 2 * e1, -e1],
            [-e2, -e1, e1 + e2],
        ])

        assert np.allclose(k_path_transformed_build(p3, "exp", 1.0), expected)

    def test_kpath_pow_path(self, p3):
        """Тест: ℒ для P3 с весами k^−1."""
        M = k_path_transformed_build(p3, "pow", 1.0)

        assert np.allclose(M[0], [1.5, -1.0, -0.5])

    def test_kpath_invalid(self, p3):
        """Тест: β ≤ 0 и неизвестный вид весов."""
        with pytest.raises(ParameterError):
            KPathTransformedLaplacian(p3, "exp", 0.0)
        with pytest.raises(ParameterError):
            KPathTransformedLaplacian(p3, "log", 1.0)

    def test_deformed_diagonal(self, k3, p3):
        """Тест: диагональ 1 + α²μ(d − μ)."""
        assert np.allclose(deformed_laplacian(k3, 0.2).matrix.diagonal(), 1.04)
        assert np.allclose(deformed_laplacian(p3, 0.5).matrix.diagonal(), [1.0, 1.25, 1.0])

    def test_deformed_inverts_resolvent_series(self, k3):
        """Тест: Σ α^k q_k · 𝒜_μ(α) = (1 − α²μ²)I."""
        alpha, mu = 0.2, 1.0
        counts = btdw_counts(k3, mu, 60)
        series = sum(alpha**k * counts[k] for k in range(61))
        deformed = deformed_laplacian(k3, alpha, mu)

        assert np.allclose(series @ deformed.matrix.toarray(), deformed.scale * np.eye(3))

    def test_deformed_identity_random_graphs(self):
        """Тест: то же тождество на 50 случайных графах при α = 0.9/ρ(Z)."""
        rng = np.random.default_rng(2024)
        for seed in range(50):
            n = int(rng.integers(5, 11))
            mu = float(rng.uniform(0.0, 1.0))
            g = generators.random_connected_graph(n, 0.35, seed=seed)
            rho = float(np.max(np.abs(np.linalg.eigvals(z_dense(z_operator(g, mu))))))
            alpha = 0.9 / rho
            counts = btdw_counts(g, mu, 250)
            series = sum(alpha**k * counts[k] for k in range(251))
            deformed = deformed_laplacian(g, alpha, mu)

            assert np.allclose(
                series @ deformed.matrix.toarray(), deformed.scale * np.eye(n), atol=1e-7
            ), f"seed={seed}, n={n}, mu={mu:.3f}"

    def test_deformed_negative_alpha(self, p3):
        """Тест: α < 0."""
        with pytest.raises(ParameterError):
            deformed_laplacian(p3, -0.1)


class TestConsistency:
    """Согласованность семейств между собой."""

    def test_monomial_one_is_standard(self, karate):
        """Тест: 𝕃(x) = 𝕃_μ(x) = L."""
        L = materialize(StandardLaplacian(karate))
        f = CoefficientFunction.monomial(1)

        assert np.allclose(materialize(WalkTransformedLaplacian(karate, f)), L)
        assert np.allclose(materialize(BTDWTransformedLaplacian(karate, 0.7, f)), L)

    @pytest.mark.parametrize("mu", [0.0, 0.5, 1.0])
    def test_monomial_is_k_walk(self, grid, mu):
        """Тест: 𝕃_μ(x^k) = 𝕃_{k,μ}."""
        for k in (2, 3, 4):
            btdw = BTDWTransformedLaplacian(grid, mu, CoefficientFunction.monomial(k))
            assert np.allclose(materialize(btdw), materialize(KWalkLaplacian(grid, k, mu)))

    @pytest.mark.parametrize("mu", [0.0, 0.5, 1.0])
    def test_series_is_sum_of_k_walks(self, grid, mu):
        """Тест: 𝕃_μ(Σ c_k x^k) = Σ_{k≥1} c_k 𝕃_{k,μ} (действие по Горнеру на Z)."""
        coefficients = [0.3, 1.0, 0.5, 0.25, 0.125]
        op = BTDWTransformedLaplacian(grid, mu, CoefficientFunction.series(coefficients))
        expected = sum(
            c * materialize(KWalkLaplacian(grid, k, mu)) for k, c in enumerate(coefficients) if k
        )

        assert np.allclose(op.apply(np.eye(grid.n)), expected, atol=1e-10)

    def test_series_matches_truncated_exponential(self, karate):
        """Тест: длинный ряд β^k/k! совпадает с экспонентой."""
        beta = 0.1
        coefficients = [beta**k / math.factorial(k) for k in range(40)]
        series = WalkTransformedLaplacian(karate, CoefficientFunction.series(coefficients))
        exponential = WalkTransformedLaplacian(karate, CoefficientFunction.exponential(beta))

        assert np.allclose(materialize(series), materialize(exponential), atol=1e-9)

    @pytest.mark.parametrize("kind", ["exponential", "resolvent"])
    def test_mu_zero_reduces_to_walk(self, karate, rng, kind):
        """Тест: 𝕃₀(f) = 𝕃(f)."""
        f = CoefficientFunction.exponential(0.1) if kind == "exponential" else CoefficientFunction.resolvent(0.1)
        v = rng.standard_normal(karate.n)

        assert np.allclose(
            btdw_transformed_apply(karate, 0.0, f, v), walk_transformed_apply(karate, f, v), atol=1e-8
        )

    def test_exponential_default_beta(self, karate):
        """Тест: β по умолчанию равно 1/ρ."""
        op = WalkTransformedLaplacian(karate, CoefficientFunction.exponential())

        assert op.f.beta == pytest.approx(1.0 / op.rho)

    def test_resolvent_radius_check(self, k3):
        """Тест: αρ(A) ≥ 1 отклоняется."""
        with pytest.raises(ParameterError):
            WalkTransformedLaplacian(k3, CoefficientFunction.resolvent(0.5))
        with pytest.raises(ParameterError):
            BTDWTransformedLaplacian(k3, 1.0, CoefficientFunction.resolvent(1.0))

    def test_resolvent_boundary_margin(self, k3):
        """Тест: αρ = 1 − 1e−10 не отличить от 1 при точности ρ, отклоняется."""
        alpha = (1.0 - 1e-10) / 2.0
        with pytest.raises(ParameterError):
            WalkTransformedLaplacian(k3, CoefficientFunction.resolvent(alpha))
        with pytest.raises(ParameterError):
            BTDWTransformedLaplacian(k3, 0.0, CoefficientFunction.resolvent(alpha))

    def test_resolvent_inside_margin(self, k3):
        """Тест: αρ = 0.98 допустимо, сдвиг конечен."""
        op = WalkTransformedLaplacian(k3, CoefficientFunction.resolvent(0.49))

        assert np.all(np.isfinite(op.shift))
        assert np.allclose(op.apply(np.ones(3)), 0.0, atol=1e-8)


class TestFamilySpecs:
    """Тесты разбора строк семейств и построения операторов."""

    def test_parse(self):
        """Тест: ключи и значения."""
        spec = parse_family("btdw-series:mu=0.5:alpha=0.1:K=8")

        assert spec.family == "btdw-series"
        assert spec.mu == 0.5
        assert spec.alpha == 0.1
        assert spec.truncation == 8

    @pytest.mark.parametrize(
        "text",
        ["fractional", "walk-exp:gamma=1", "kwalk:k=x", "btdw-exp:mu=2", "walk-exp:beta"],
    )
    def test_parse_errors(self, text):
        """Тест: неверные строки семейств."""
        with pytest.raises(ParameterError):
            parse_family(text)

    def test_defaults(self, k3):
        """Тест: μ = 0 для kwalk, μ = 1 для btdw, α = 1/(2ρ(A))."""
        assert build_operator(k3, parse_family("kwalk")).mu == 0.0
        assert build_operator(k3, parse_family("btdw-exp")).mu == 1.0
        assert build_operator(k3, parse_family("walk-res")).f.alpha == pytest.approx(0.25)
        assert build_operator(k3, parse_family("kpath-exp")).beta == 1.0

    def test_cached(self, k3):
        """Тест: одинаковые спецификации дают один объект."""
        a = build_operator(k3, parse_family("walk-exp:beta=0.3"))
        b = build_operator(k3, parse_family("walk-exp:beta=0.3"))

        assert a is b

    def test_invalid_parameters_surface_on_build(self, k3):
        """Тест: слишком большое α."""
        with pytest.raises(ParameterError):
            build_operator(k3, parse_family("walk-res:alpha=1"))

    def test_labels(self, p3):
        """Тест: подписи операторов."""
        assert build_operator(p3, parse_family("kwalk:k=2:mu=0.5")).label() == "kwalk(k=2, mu=0.5)"
        assert build_operator(p3, parse_family("kpath-pow:beta=2")).label() == "kpath-pow(beta=2)"


class TestSpectralBounds:
    """Границы спектра материализованных операторов."""

    @pytest.mark.parametrize("family", FAMILIES)
    def test_gershgorin(self, karate, family):
        """Тест: σ(M) ⊂ [0, 2·max M_ii] для M-матрицы с нулевыми суммами строк."""
        M = materialize(build_operator(karate, parse_family(family)))
        eigenvalues = np.linalg.eigvalsh(M)
        bound = 2.0 * np.max(np.diag(M))

        assert eigenvalues.min() >= -1e-9 * bound
        assert eigenvalues.max() <= bound * (1.0 + 1e-10)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_nullity_one_on_connected_graph(self, karate, family):
        """Тест: ядро связного графа одномерно (только 𝟏)."""
        eigenvalues = np.linalg.eigvalsh(materialize(build_operator(karate, parse_family(family))))

        assert np.sum(eigenvalues <= 1e-9 * eigenvalues.max()) == 1


class TestSolverFailures:
    """Исчерпание подпространства Крылова при построении."""

    def test_lanczos_exhausted(self, karate, short_krylov):
        """Тест: Ланцош размерности 2 не даёт exp(A)𝟏 с точностью lanczos_tol."""
        with pytest.raises(ConvergenceError) as exc_info:
            WalkTransformedLaplacian(karate, CoefficientFunction.exponential(1.0))

        assert exc_info.value.iterations == short_krylov

    def test_arnoldi_exhausted(self, karate, short_krylov):
        """Тест: то же для Арнольди на Z."""
        with pytest.raises(ConvergenceError):
            BTDWTransformedLaplacian(karate, 0.5, CoefficientFunction.exponential(0.2))

"""
Тесты для Pydantic моделей.

Проверяем что модели правильно валидируют данные.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from walklap.core.exceptions import GraphFormatError, ParameterError
from walklap.models import (
    CoefficientFunction,
    Graph,
    OperatorSpec,
    PoleSet,
    ProbabilityVector,
    ReturnProbabilityCurve,
    RunConfig,
    SpectralEstimate,
    WalkCountSequence,
)


class TestGraphModel:
    """Тесты модели Graph."""

    def test_from_edges_simplifies(self):
        """Тест: петли отбрасываются, повторы и обратные рёбра схлопываются."""
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2), (2, 2)])

        assert g.n == 3
        assert g.m == 2
        assert g.degrees.tolist() == [1.0, 2.0, 1.0]
        assert g.neighbors(1).tolist() == [0, 2]

    def test_edge_out_of_bounds(self):
        """Тест: индекс вне [0, n) — ошибка формата."""
        with pytest.raises(GraphFormatError):
            Graph.from_edges(2, [(0, 2)])

    def test_asymmetric_structure_rejected(self):
        """Тест: несимметричная CSR-структура отклоняется валидатором."""
        with pytest.raises(ValidationError):
            Graph(n=2, row_ptr=np.array([0, 1, 1]), col_idx=np.array([1]))

    def test_self_loop_rejected(self):
        """Тест: петля в CSR отклоняется."""
        with pytest.raises(ValidationError):
            Graph(n=2, row_ptr=np.array([0, 2, 2]), col_idx=np.array([0, 1]))

    def test_arrays_are_read_only(self):
        """Тест: граф неизменяем после создания."""
        g = Graph.from_edges(2, [(0, 1)])

        with pytest.raises(ValueError):
            g.col_idx[0] = 0
        with pytest.raises(ValueError):
            g.degrees[0] = 5.0

    def test_fingerprint_equality(self):
        """Тест: одинаковые графы имеют одинаковый отпечаток."""
        a = Graph.from_edges(3, [(0, 1), (1, 2)])
        b = Graph.from_edges(3, [(2, 1), (1, 0)])
        c = Graph.from_edges(3, [(0, 1), (0, 2)])

        assert a == b
        assert hash(a) == hash(b)
        assert a != c

    def test_single_node(self):
        """Тест: граф из одной вершины без рёбер допустим."""
        g = Graph.from_edges(1, [])

        assert g.n == 1
        assert g.m == 0
        assert g.degrees.tolist() == [0.0]


class TestCoefficientFunctionModel:
    """Тесты модели CoefficientFunction."""

    def test_resolvent_coefficients(self):
        """Тест: c_k = α^k и f(x) = 1/(1 − αx)."""
        f = CoefficientFunction.resolvent(0.25)

        assert f.coefficient(3) == pytest.approx(0.25**3)
        assert f(2.0) == pytest.approx(2.0)
        assert f.tail(2.0) == pytest.approx(1.0)
        assert f.radius_of_convergence == pytest.approx(4.0)

    def test_exponential_coefficients(self):
        """Тест: c_k = β^k / k!."""
        f = CoefficientFunction.exponential(2.0)

        assert f.coefficient(4) == pytest.approx(16 / 24)
        assert f.tail(1.0) == pytest.approx(math.e**2 - 1)
        assert f.in_class_p

    def test_unresolved_exponential(self):
        """Тест: экспонента без β не вычисляется."""
        f = CoefficientFunction.exponential()

        assert not f.resolved
        with pytest.raises(ParameterError):
            f.coefficient(1)
        assert f.with_beta(0.5).beta == 0.5

    def test_monomial_outside_class_p(self):
        """Тест: моном помечен как функция вне класса 𝒫."""
        f = CoefficientFunction.monomial(2)

        assert not f.in_class_p
        assert f.degree == 2
        assert f.coefficient(2) == 1.0
        assert f.coefficient(1) == 0.0

    def test_series_tail_drops_constant(self):
        """Тест: tail(x) = f(x) − c_0."""
        f = CoefficientFunction.series([5.0, 1.0, 0.5])

        assert f(2.0) == pytest.approx(5.0 + 2.0 + 2.0)
        assert f.tail(2.0) == pytest.approx(4.0)
        assert f.in_class_p

    def test_invalid_parameters(self):
        """Тест: α ≤ 0, β ≤ 0 и отрицательные коэффициенты отклоняются."""
        with pytest.raises(ValidationError):
            CoefficientFunction.resolvent(0.0)
        with pytest.raises(ValidationError):
            CoefficientFunction.exponential(-1.0)
        with pytest.raises(ValidationError):
            CoefficientFunction.series([1.0, -0.5])
        with pytest.raises(ValidationError):
            CoefficientFunction.monomial(-1)


class TestProbabilityVectorModel:
    """Тесты модели ProbabilityVector."""

    def test_point_mass(self):
        """Тест: дельта-распределение."""
        p = ProbabilityVector.point_mass(4, 2)

        assert p.p.tolist() == [0.0, 0.0, 1.0, 0.0]
        assert p.n == 4

    def test_tolerates_rounding(self):
        """Тест: элементы ≥ −1e−12 допускаются."""
        p = ProbabilityVector(p=[0.5 + 1e-13, 0.5, -1e-13])

        assert p.n == 3

    def test_rejects_bad_mass(self):
        """Тест: сумма не равна 1."""
        with pytest.raises(ValidationError):
            ProbabilityVector(p=[0.5, 0.4])

    def test_rejects_negative_entry(self):
        """Тест: заметно отрицательный элемент."""
        with pytest.raises(ValidationError):
            ProbabilityVector(p=[1.1, -0.1])

    def test_point_mass_out_of_range(self):
        """Тест: вершина вне диапазона."""
        with pytest.raises(ParameterError):
            ProbabilityVector.point_mass(3, 3)


class TestOperatorSpecModel:
    """Тесты модели OperatorSpec."""

    def test_label(self):
        """Тест: подпись включает заданные параметры."""
        spec = OperatorSpec(family="btdw-exp", mu=0.5, beta=0.2)

        assert spec.label() == "btdw-exp:mu=0.5:beta=0.2"

    def test_mu_range(self):
        """Тест: μ вне [0, 1] отклоняется."""
        with pytest.raises(ValidationError):
            OperatorSpec(family="kwalk", mu=1.5)

    def test_unknown_family(self):
        """Тест: неизвестное семейство."""
        with pytest.raises(ValidationError):
            OperatorSpec(family="fractional")


class TestSmallModels:
    """Тесты вспомогательных моделей."""

    def test_walk_count_sequence_mu(self):
        """Тест: μ валидируется в WalkCountSequence."""
        with pytest.raises(ValidationError):
            WalkCountSequence(mu=-0.1, counts=[np.eye(2)])

    def test_spectral_estimate_nonnegative(self):
        """Тест: оценка ρ неотрицательна."""
        with pytest.raises(ValidationError):
            SpectralEstimate(value=-1.0, residual=0.0, iterations=1)

    def test_pole_set_rejects_interval_pole(self):
        """Тест: вещественный полюс внутри отрезка запрещён."""
        with pytest.raises(ValidationError):
            PoleSet(poles=np.array([0.5 + 0j]), error=0.0, interval=(0.0, 1.0))

    def test_pole_set_scaled(self):
        """Тест: перенос полюсов делением на множитель."""
        poles = PoleSet(poles=np.array([-2.0 + 1j, -2.0 - 1j]), error=1e-10, interval=(0.0, 10.0))
        scaled = poles.scaled(2.0)

        assert scaled.interval == (0.0, 5.0)
        assert np.allclose(scaled.poles, [-1.0 + 0.5j, -1.0 - 0.5j])
        assert scaled.degree == 2

    def test_curve_rows(self):
        """Тест: строки CSV (t, p_hat, err_est)."""
        curve = ReturnProbabilityCurve(
            times=np.array([0.0, 1.0]),
            values=np.array([1.0, 0.5]),
            error_estimates=np.zeros(2),
            method="exact",
        )

        assert curve.rows() == [(0.0, 1.0, 0.0), (1.0, 0.5, 0.0)]

    def test_run_config_header(self):
        """Тест: заголовок содержит версию, командную строку и зерно."""
        config = RunConfig(command="info", seed=7, argv=["walklap", "info", "-g", "builtin:complete:3"])

        assert config.header("1.0.0") == "# walklap 1.0.0 | walklap info -g builtin:complete:3 | seed=7"

    def test_run_config_negative_seed(self):
        """Тест: зерно не может быть отрицательным."""
        with pytest.raises(ValidationError):
            RunConfig(command="info", seed=-1)

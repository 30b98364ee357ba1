"""Tests for the measure nu_d, its Gauss rule and nodal functions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import roots_jacobi, roots_legendre

from sharpsphere import (
    DimensionMismatchError,
    DomainError,
    NodalFn,
    PositivityError,
    integrate,
    moment,
    norm,
    normalization_Zd,
    quadrature_rule,
)
from sharpsphere.measure import require_positive


class TestNormalization:
    @pytest.mark.parametrize(
        "d, expected",
        [(1, math.pi), (2, 2.0), (3, math.pi / 2)],
    )
    def test_closed_forms(self, d, expected):
        assert normalization_Zd(d) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("d", [1.5, 5.0, 7.3])
    def test_normalizes_weight(self, d):
        total, _ = quad(lambda x: (1 - x * x) ** (d / 2 - 1), -1, 1)
        assert total / normalization_Zd(d) == pytest.approx(1.0, rel=1e-10)

    def test_rejects_small_dimension(self):
        with pytest.raises(DomainError):
            normalization_Zd(0.5)


class TestQuadratureRule:
    @pytest.mark.parametrize("d", [1, 1.5, 2, 3, 5, 10])
    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_weights_and_moments(self, d, n):
        rule = quadrature_rule(d, n)
        assert abs(rule.weights.sum() - 1.0) < 1e-14
        assert np.all(rule.weights > 0)
        assert np.all(np.diff(rule.nodes) > 0)
        for j in range(n):
            exact = moment(d, j)
            approx = float(np.dot(rule.weights, rule.nodes ** (2 * j)))
            assert approx == pytest.approx(exact, rel=1e-12, abs=1e-13)

    @pytest.mark.parametrize("d", [1, 2.5, 3])
    def test_symmetry(self, d):
        rule = quadrature_rule(d, 16)
        assert np.array_equal(rule.nodes, -rule.nodes[::-1])
        assert np.array_equal(rule.weights, rule.weights[::-1])

    def test_d2_is_halved_legendre(self):
        rule = quadrature_rule(2, 12)
        x, w = roots_legendre(12)
        np.testing.assert_allclose(rule.nodes, x, atol=1e-14)
        np.testing.assert_allclose(rule.weights, w / 2, atol=1e-14)

    def test_matches_scipy_gauss_jacobi(self):
        d = 3
        x, w = roots_jacobi(20, d / 2 - 1, d / 2 - 1)
        rule = quadrature_rule(d, 20)
        np.testing.assert_allclose(rule.nodes, x, atol=1e-13)
        np.testing.assert_allclose(rule.weights, w / w.sum(), atol=1e-13)

    def test_second_moment_d3(self):
        rule = quadrature_rule(3, 4)
        assert float(np.dot(rule.weights, rule.nodes**2)) == pytest.approx(0.25, rel=1e-14)

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            quadrature_rule(0.9, 8)
        with pytest.raises(DomainError):
            quadrature_rule(3, 1)

    def test_cached_and_read_only(self):
        rule = quadrature_rule(3, 16)
        assert quadrature_rule(3, 16) is rule
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0

    def test_record(self):
        record = quadrature_rule(2, 4).as_record()
        payload = record.model_dump()
        assert set(payload) == {"d", "n", "nodes", "weights"}
        assert len(payload["nodes"]) == 4


class TestIntegrateAndNorm:
    def test_integrate_basics(self):
        rule = quadrature_rule(2, 16)
        assert integrate(NodalFn.constant(rule, 1.0)) == pytest.approx(1.0, abs=1e-15)
        assert abs(integrate(NodalFn.from_callable(rule, lambda x: x))) < 1e-15
        assert integrate(NodalFn.from_callable(rule, lambda x: x**2)) == pytest.approx(1 / 3, rel=1e-14)

    @pytest.mark.parametrize("p", [1, 1.5, 2, 4, 7.5])
    def test_norm_of_constant(self, p):
        rule = quadrature_rule(3, 16)
        assert norm(NodalFn.constant(rule, -2.5), p) == pytest.approx(2.5, rel=1e-14)

    def test_norm_of_x(self):
        rule = quadrature_rule(3, 16)
        assert norm(NodalFn.from_callable(rule, lambda x: x), 2) == pytest.approx(0.5, rel=1e-14)

    def test_norm_monotone_in_p(self):
        rule = quadrature_rule(3, 32)
        rng = np.random.default_rng(3)
        for _ in range(20):
            f = NodalFn(rule, rng.uniform(0.1, 3.0, size=rule.n))
            values = [norm(f, p) for p in (1, 1.5, 2, 3, 6, 10)]
            assert all(a <= b * (1 + 1e-14) for a, b in zip(values, values[1:]))

    def test_norm_rejects_small_p(self):
        rule = quadrature_rule(3, 8)
        with pytest.raises(DomainError):
            norm(NodalFn.constant(rule, 1.0), 0.5)


class TestNodalFn:
    def test_shape_is_checked(self):
        rule = quadrature_rule(3, 8)
        with pytest.raises(DimensionMismatchError):
            NodalFn(rule, np.ones(7))

    def test_values_are_read_only(self):
        f = NodalFn.constant(quadrature_rule(3, 8), 1.0)
        with pytest.raises(ValueError):
            f.values[0] = 2.0

    def test_power_and_parity(self):
        rule = quadrature_rule(3, 8)
        f = NodalFn.from_callable(rule, lambda x: x)
        assert not f.is_even()
        assert f.power(2).is_even()
        np.testing.assert_array_equal(f.power(2).values, rule.nodes**2)

    def test_require_positive(self):
        rule = quadrature_rule(3, 8)
        require_positive(NodalFn.constant(rule, 0.5))
        with pytest.raises(PositivityError):
            require_positive(NodalFn.from_callable(rule, lambda x: x))

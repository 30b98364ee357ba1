"""Tests for critical exponents, the discriminant, alpha and the pointwise h."""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import linear
from sharpsphere import (
    DomainError,
    Exponent,
    NodalFn,
    PositivityError,
    alpha_improved,
    basis_for,
    critical_exponents,
    derivative,
    discriminant,
    feasibility_boundary,
    figure_curves,
    find_beta,
    h_density,
    improved_constant,
    pointwise_h,
    quadratic_form_determinant,
    second_derivative,
    sos_check,
    sos_split,
)
from sharpsphere.certificates import discriminant_coefficients


class TestCriticalExponents:
    def test_exact_d3(self):
        assert critical_exponents(3) == (Fraction(6), Fraction(19, 4))

    def test_low_dimensions(self):
        two_star, two_sharp = critical_exponents(2)
        assert two_star == math.inf
        assert two_sharp == 9
        assert critical_exponents(1) == (math.inf, math.inf)

    def test_float_input(self):
        two_star, two_sharp = critical_exponents(4.0)
        assert isinstance(two_star, float)
        assert two_star == 4.0
        assert two_sharp == pytest.approx(33 / 9)

    def test_two_sharp_below_two_star_above_two(self):
        for d in np.linspace(2.1, 20, 50):
            two_star, two_sharp = critical_exponents(float(d))
            assert 2 < two_sharp < two_star

    def test_rejects_small_dimension(self):
        with pytest.raises(DomainError):
            critical_exponents(Fraction(1, 2))


class TestDiscriminant:
    def test_reference_point(self):
        report = discriminant(4, 3, 1)
        assert report.exact
        assert report.lam == Fraction(3, 2)
        assert report.a == 1
        assert report.b == Fraction(-6, 5)
        assert report.c == Fraction(9, 5)
        assert report.A == Fraction(-14, 25)
        assert report.B == Fraction(-4, 5)
        assert report.delta == Fraction(-9, 25)
        assert report.feasible

    def test_float_inputs(self):
        report = discriminant(4.0, 3.0, 1.0)
        assert not report.exact
        assert report.delta == pytest.approx(-0.36, abs=1e-12)
        assert report.as_dict()["delta"] == pytest.approx(-0.36)

    @pytest.mark.parametrize(
        "p", [Fraction(3, 2), Fraction(5, 2), Fraction(4), Fraction(19, 4), Fraction(7)]
    )
    @pytest.mark.parametrize("d", [2, 3, Fraction(7, 2), 5, 10])
    @pytest.mark.parametrize("beta", [Fraction(-2), Fraction(1, 3), Fraction(1), Fraction(5, 2)])
    def test_delta_is_quadratic_in_beta(self, p, d, beta):
        report = discriminant(p, d, beta)
        assert report.delta == report.delta_quadratic

    @pytest.mark.parametrize("p", [Fraction(3, 2), Fraction(3), Fraction(9, 2), Fraction(8)])
    @pytest.mark.parametrize("d", [2, 3, 4, Fraction(11, 2), 10])
    def test_reduced_discriminant_identity(self, p, d):
        A, B = discriminant_coefficients(p, d)
        q = p - 1
        assert B**2 - 4 * A == 4 * q * d / (d + 2) * (1 - q * (d - 2) / (d + 2))

    def test_errors(self):
        with pytest.raises(DomainError):
            discriminant(2, 3, 1)
        with pytest.raises(DomainError):
            discriminant(4, 3, 0)


class TestFindBeta:
    def test_negative_leading_coefficient(self):
        beta = find_beta(4, 3)
        assert beta is not None
        assert discriminant(4, 3, beta).delta < 0

    def test_vertex_case(self):
        A, B = discriminant_coefficients(2.4, 10)
        assert A == pytest.approx(0.7025, abs=1e-4)
        assert B**2 > 4 * A
        beta = find_beta(2.4, 10)
        assert beta == pytest.approx(-B / (2 * A))
        assert discriminant(2.4, 10, beta).delta < 0

    @pytest.mark.parametrize("p", [1.2, 1.5, 3.0, 4.5])
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_found_beta_is_feasible(self, p, d):
        beta = find_beta(p, d)
        if beta is not None:
            assert discriminant(p, d, beta).delta < 0

    def test_negative_leading_coefficient_gives_positive_integer(self):
        cases = [
            (p, d)
            for d in (2, 3, 5, 10)
            for p in np.linspace(1.05, 6.0, 34)
            if discriminant_coefficients(float(p), d)[0] < 0
        ]
        assert cases
        for p, d in cases:
            beta = find_beta(float(p), d)
            assert isinstance(beta, int)
            assert beta >= 1
            assert discriminant(float(p), d, beta).delta < 0

    def test_infeasible_beyond_boundary(self):
        boundary = feasibility_boundary(3)
        assert find_beta(boundary - 1e-6, 3) is not None
        assert find_beta(boundary + 1e-6, 3) is None

    def test_boundary_matches_discriminant_root(self):
        # B^2 = 4A exactly when q (d - 2) = d + 2 for A > 0
        d = 6
        boundary = feasibility_boundary(d)
        A, B = discriminant_coefficients(boundary, d)
        assert B**2 - 4 * A == pytest.approx(0.0, abs=1e-8)

    def test_p2_rejected(self):
        with pytest.raises(DomainError):
            find_beta(2, 3)


class TestAlpha:
    def test_vanishes_at_two_sharp(self):
        for d in (2, 3, 5, 9):
            two_sharp = critical_exponents(d)[1]
            assert alpha_improved(two_sharp, d) == 0

    def test_exact_value(self):
        assert alpha_improved(4, 3) == Fraction(1, 5)
        assert improved_constant(4, 3) == Fraction(4)

    def test_improvement_is_void_past_two_sharp(self):
        with pytest.raises(DomainError):
            improved_constant(5, 3)

    @pytest.mark.parametrize("d", [2, 3, 4, 7])
    def test_determinant_sign(self, d):
        two_sharp = critical_exponents(d)[1]
        assert quadratic_form_determinant(two_sharp, d) == 0
        assert quadratic_form_determinant(two_sharp - Fraction(1, 10), d) > 0
        assert quadratic_form_determinant(two_sharp + Fraction(1, 10), d) < 0

    def test_sos_split_weights(self):
        split = sos_split(4, 3)
        assert split.alpha == Fraction(1, 5)
        assert split.residual_weight == Fraction(3, 5)


class TestPointwiseH:
    def test_linear_closed_form(self, rule3):
        f = linear(rule3, eps=0.5)
        h = pointwise_h(f, Exponent(4, 3), basis_for(rule3, 4))
        y = 0.25 / f.values
        expected = 3 * 3 / 5 * y**2
        np.testing.assert_allclose(h.values, expected, rtol=1e-10)

    def test_h_density_matches_nodal(self, basis3, corpus3):
        f = corpus3[0]
        df = derivative(f, basis3).values
        d2f = second_derivative(f, basis3).values
        h = pointwise_h(f, Exponent(3, 3), basis3)
        np.testing.assert_allclose(h.values, h_density(f.values, df, d2f, 3, 3), rtol=1e-12)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0, 4.75])
    def test_sos_reconstruction(self, basis3, corpus3, p):
        exponent = Exponent(p, 3)
        for f in corpus3[:30]:
            h = pointwise_h(f, exponent, basis3).values
            rebuilt = sos_check(f, exponent, basis3).values
            np.testing.assert_allclose(rebuilt, h, rtol=1e-9, atol=1e-9)

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.75])
    def test_nonnegative_up_to_two_sharp(self, basis3, corpus3, p):
        for f in corpus3:
            assert pointwise_h(f, Exponent(p, 3), basis3).values.min() >= -1e-9

    def test_can_be_negative_beyond_two_sharp(self):
        # f = x^-2 at x = 1: f = 1, f' = -2, f'' = 6, so h = 36 - 9.6 (p - 1) vanishes at p = 2#
        d = 3
        f2, f1, f0 = 6.0, -2.0, 1.0
        assert h_density(np.array([f0]), np.array([f1]), np.array([f2]), 4.75, d)[0] == pytest.approx(
            0.0, abs=1e-12
        )
        assert h_density(np.array([f0]), np.array([f1]), np.array([f2]), 5.5, d)[0] < 0

    def test_requires_positive(self, basis3, rule3):
        with pytest.raises(PositivityError):
            pointwise_h(NodalFn.from_callable(rule3, lambda x: x), Exponent(3, 3), basis3)


class TestFigure:
    def test_rows(self):
        rows = figure_curves(2.2, 10, 100)
        assert len(rows) == 100
        assert rows[0].d == pytest.approx(2.2)
        assert rows[-1].d == pytest.approx(10.0)
        assert rows[0].two_star == pytest.approx(22.0)
        assert rows[-1].two_sharp == pytest.approx(201 / 81)

    def test_two_star_omitted_up_to_two(self):
        rows = figure_curves(1.5, 3, 4)
        assert rows[0].two_star is None
        assert rows[-1].two_star == pytest.approx(6.0)

    def test_errors(self):
        with pytest.raises(DomainError):
            figure_curves(2, 10, 1)
        with pytest.raises(DomainError):
            figure_curves(5, 3, 10)


class TestExactReferenceValues:
    def test_coefficients_vanish_at_critical_point(self):
        assert discriminant_coefficients(6, 3) == (0, 0)

    def test_alpha_at_two_sharp_d3(self):
        assert alpha_improved(Fraction(19, 4), 3) == 0

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_boundary_is_two_star(self, d):
        assert feasibility_boundary(d) == pytest.approx(float(critical_exponents(d)[0]), abs=1e-6)

    @pytest.mark.parametrize("d", [2, 3, 5, 9])
    def test_determinant_flips_sharply(self, d):
        two_sharp = float(critical_exponents(d)[1])
        assert abs(quadratic_form_determinant(two_sharp, float(d))) < 1e-12
        assert quadratic_form_determinant(two_sharp - 1e-9, float(d)) > 0
        assert quadratic_form_determinant(two_sharp + 1e-9, float(d)) < 0

    @pytest.mark.parametrize("d, p", [(3, 4.0), (2, 8.0), (5, 2.2)])
    def test_h_and_fisher_form_on_corpus(self, d, p):
        from sharpsphere import basis_for, fisher_form, polynomial_corpus, quadrature_rule

        basis = basis_for(quadrature_rule(d, 64), 20)
        exponent = Exponent(p, d)
        for f in polynomial_corpus(basis, 100, seed=13):
            assert pointwise_h(f, exponent, basis).values.min() >= -1e-10
            assert fisher_form(f, exponent, basis) >= -1e-9

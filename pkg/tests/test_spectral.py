"""Tests for the Gegenbauer basis, transforms, L and the carre du champ identities."""

import logging

import numpy as np
import pytest
from scipy.special import eval_legendre

from conftest import eigenfunction, linear
from sharpsphere import (
    DegreeOverflowError,
    DimensionMismatchError,
    DomainError,
    NodalFn,
    PositivityError,
    SpectralFn,
    apply_L,
    basis_for,
    build_basis,
    commutator_defect,
    derivative,
    eigenvalue,
    gamma2_sides,
    heat_semigroup,
    l_gamma_sides,
    oversampled,
    quadrature_rule,
    second_derivative,
    to_nodal,
    to_spectral,
)
from sharpsphere.spectral import dirichlet_form


class TestEigenvalues:
    def test_values(self):
        assert [eigenvalue(k, 3) for k in range(4)] == [0.0, 3.0, 8.0, 15.0]
        assert eigenvalue(2, 1.5) == pytest.approx(5.0)

    def test_negative_index(self):
        with pytest.raises(DomainError):
            eigenvalue(-1, 3)


class TestBasis:
    @pytest.mark.parametrize("d", [1, 2, 3, 5.5])
    def test_orthonormal(self, d):
        basis = basis_for(quadrature_rule(d, 64), 20)
        gram = basis.values.T @ (basis.rule.weights[:, None] * basis.values)
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-12)

    def test_d2_is_normalized_legendre(self):
        basis = basis_for(quadrature_rule(2, 32), 10)
        x = basis.rule.nodes
        for k in range(11):
            expected = np.sqrt(2 * k + 1) * eval_legendre(k, x)
            np.testing.assert_allclose(basis.values[:, k], expected, atol=1e-11)

    @pytest.mark.parametrize("d", [1, 2, 3, 7])
    def test_eigen_residual(self, d):
        basis = basis_for(quadrature_rule(d, 64), 20)
        x = basis.rule.nodes
        for k in range(basis.K + 1):
            residual = (
                (1 - x**2) * basis.d2[:, k]
                - d * x * basis.d1[:, k]
                + basis.eigenvalues[k] * basis.values[:, k]
            )
            scale = (1 + basis.eigenvalues[k]) * np.max(np.abs(basis.values[:, k]))
            assert np.max(np.abs(residual)) < 1e-9 * scale

    def test_degree_overflow(self):
        with pytest.raises(DegreeOverflowError):
            build_basis(3, 33, quadrature_rule(3, 64))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            build_basis(2, 4, quadrature_rule(3, 16))

    def test_default_degree_and_cache(self, rule3):
        basis = basis_for(rule3)
        assert basis.K == 32
        assert basis_for(rule3) is basis

    def test_function_on_other_rule(self, basis3):
        f = linear(quadrature_rule(3, 32))
        with pytest.raises(DimensionMismatchError):
            to_spectral(f, basis3)

    def test_evaluate_off_nodes(self, basis3, rule3):
        coeffs = to_spectral(linear(rule3, eps=0.5), basis3).coeffs
        x = np.array([-0.7, 0.0, 0.3])
        np.testing.assert_allclose(basis3.evaluate(coeffs, x), 1 + 0.5 * x, atol=1e-13)
        np.testing.assert_allclose(basis3.evaluate(coeffs, x, order=1), 0.5, atol=1e-12)
        with pytest.raises(DomainError):
            basis3.evaluate(coeffs, x, order=3)

    def test_under_resolved_input_warns(self, basis3, caplog):
        f = eigenfunction(basis3, 20, eps=0.5, shift=1.0)
        with caplog.at_level(logging.WARNING, logger="sharpsphere.spectral"):
            derivative(f, basis3)
        assert "[SPECTRAL]" in caplog.text
        assert not basis3.is_resolved(to_spectral(f, basis3).coeffs)

    def test_resolved_input_is_quiet(self, basis3, rule3, caplog):
        with caplog.at_level(logging.WARNING, logger="sharpsphere.spectral"):
            derivative(linear(rule3), basis3)
        assert caplog.text == ""

    @pytest.mark.parametrize("op", [derivative, second_derivative, apply_L])
    def test_resolution_flag_on_result(self, basis3, rule3, op):
        rough = eigenfunction(basis3, 20, eps=0.5, shift=1.0)
        assert op(rough, basis3).resolved is False
        assert op(linear(rule3), basis3).resolved is True


class TestTransforms:
    def test_round_trip_of_polynomial(self, basis3, corpus3):
        f = corpus3[0]
        back = to_nodal(to_spectral(f, basis3), basis3)
        np.testing.assert_allclose(back.values, f.values, atol=1e-12)

    def test_coefficients_of_linear(self, basis3, rule3):
        # x = c_1 / sqrt(d + 1)
        coeffs = to_spectral(linear(rule3, eps=1.0, shift=0.0), basis3).coeffs
        assert coeffs[1] == pytest.approx(0.5, abs=1e-14)
        assert np.max(np.abs(np.delete(coeffs, 1))) < 1e-14

    def test_parseval(self, basis3, corpus3):
        f = corpus3[3]
        spectral = to_spectral(f, basis3)
        assert spectral.norm2_squared() == pytest.approx(
            float(np.dot(f.rule.weights, f.values**2)), rel=1e-13
        )

    def test_to_nodal_mismatch(self, basis3):
        with pytest.raises(DimensionMismatchError):
            to_nodal(SpectralFn(3.0, np.ones(5)), basis3)

    def test_record(self):
        assert SpectralFn(3, [1.0, 0.5]).as_record().model_dump() == {"d": 3, "coeffs": [1.0, 0.5]}


class TestDerivatives:
    def test_cubic(self, basis3, rule3):
        f = NodalFn.from_callable(rule3, lambda x: x**3 - 2 * x)
        x = rule3.nodes
        np.testing.assert_allclose(derivative(f, basis3).values, 3 * x**2 - 2, atol=1e-11)
        np.testing.assert_allclose(second_derivative(f, basis3).values, 6 * x, atol=1e-10)

    def test_L_of_linear(self, basis3, rule3):
        f = linear(rule3, eps=1.0, shift=0.0)
        np.testing.assert_allclose(apply_L(f, basis3).values, -3 * rule3.nodes, atol=1e-12)

    def test_L_matches_nodal_formula(self, basis3, corpus3):
        x = basis3.rule.nodes
        for f in corpus3[:10]:
            expected = (1 - x**2) * second_derivative(f, basis3).values - 3 * x * derivative(f, basis3).values
            np.testing.assert_allclose(apply_L(f, basis3).values, expected, atol=1e-9)

    def test_dirichlet_form_of_x(self):
        for d in (1, 2, 3, 6):
            rule = quadrature_rule(d, 32)
            f = linear(rule, eps=1.0, shift=0.0)
            assert dirichlet_form(f, basis_for(rule, 16)) == pytest.approx(d / (d + 1), rel=1e-13)

    def test_integration_by_parts(self, basis3, corpus3):
        for f in corpus3[:20]:
            minus_fLf = -float(np.dot(f.rule.weights, f.values * apply_L(f, basis3).values))
            assert minus_fLf == pytest.approx(dirichlet_form(f, basis3), rel=1e-10)

    def test_self_adjoint(self, basis3, corpus3):
        f, g = corpus3[1], corpus3[2]
        w = basis3.rule.weights
        fLg = float(np.dot(w, f.values * apply_L(g, basis3).values))
        gLf = float(np.dot(w, g.values * apply_L(f, basis3).values))
        assert fLg == pytest.approx(gLf, rel=1e-11)


class TestHeatSemigroup:
    def test_identity_at_zero(self, basis3, corpus3):
        a = to_spectral(corpus3[0], basis3)
        np.testing.assert_array_equal(heat_semigroup(a, 0.0, basis3).coeffs, a.coeffs)

    def test_semigroup_property(self, basis3, corpus3):
        a = to_spectral(corpus3[0], basis3)
        once = heat_semigroup(a, 0.3, basis3)
        twice = heat_semigroup(heat_semigroup(a, 0.1, basis3), 0.2, basis3)
        np.testing.assert_allclose(once.coeffs, twice.coeffs, rtol=1e-14, atol=1e-16)

    def test_eigenfunction_decay(self, basis3):
        a = SpectralFn(3.0, np.eye(21)[2])
        out = heat_semigroup(a, 0.5)
        assert out.coeffs[2] == pytest.approx(np.exp(-8 * 0.5), rel=1e-14)

    def test_mass_preserved_and_energy_decreases(self, basis3, corpus3):
        a = to_spectral(corpus3[5], basis3)
        later = heat_semigroup(a, 0.2, basis3)
        assert later.coeffs[0] == a.coeffs[0]
        assert later.norm2_squared() < a.norm2_squared()

    def test_negative_time(self, basis3):
        with pytest.raises(DomainError):
            heat_semigroup(SpectralFn(3.0, np.ones(21)), -0.1, basis3)


class TestOversampled:
    def test_matches_evaluate_on_fine_nodes(self, basis3, corpus3):
        coeffs = to_spectral(corpus3[0], basis3).coeffs
        fine = oversampled(coeffs, basis3)
        assert fine.rule.n == 4 * basis3.rule.n
        x = fine.rule.nodes
        np.testing.assert_allclose(fine.u, basis3.evaluate(coeffs, x), rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(fine.du, basis3.evaluate(coeffs, x, 1), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(fine.d2u, basis3.evaluate(coeffs, x, 2), rtol=1e-12, atol=1e-11)
        Lu = (1 - x**2) * fine.d2u - 3 * x * fine.du
        np.testing.assert_allclose(fine.Lu, Lu, rtol=1e-10, atol=1e-9)

    def test_integrates_polynomials_like_the_coarse_rule(self, basis3, corpus3):
        f = corpus3[1]
        fine = oversampled(to_spectral(f, basis3).coeffs, basis3)
        coarse = float(np.dot(basis3.rule.weights, f.values**2))
        assert fine.integrate(fine.u**2) == pytest.approx(coarse, rel=1e-12)

    def test_nonpositive_values_are_rejected(self, basis3):
        coeffs = np.zeros(basis3.K + 1)
        coeffs[1] = 1.0
        with pytest.raises(PositivityError):
            oversampled(coeffs, basis3).require_positive("test")

    def test_factor_must_be_positive(self, basis3):
        with pytest.raises(DomainError):
            oversampled(np.ones(basis3.K + 1), basis3, factor=0)


class TestCarreDuChamp:
    def test_commutator_defect_vanishes(self, basis3, corpus3):
        for f in corpus3[:20]:
            assert np.max(np.abs(commutator_defect(f, basis3).values)) < 1e-8

    def test_commutator_on_eigenfunctions(self, basis3):
        for k in (1, 4, 9):
            assert np.max(np.abs(commutator_defect(eigenfunction(basis3, k), basis3).values)) < 1e-7

    def test_gamma2_identity(self, basis3, corpus3):
        for f in corpus3:
            lhs, rhs = gamma2_sides(f, basis3)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)

    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_gamma2_identity_other_dimensions(self, d):
        from sharpsphere import polynomial_corpus

        basis = basis_for(quadrature_rule(d, 64), 20)
        for f in polynomial_corpus(basis, 20, seed=11):
            lhs, rhs = gamma2_sides(f, basis)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)

    def test_l_gamma_identity(self, basis3, corpus3):
        for f in corpus3:
            lhs, rhs = l_gamma_sides(f, basis3)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)

    def test_l_gamma_requires_positive(self, basis3, rule3):
        with pytest.raises(PositivityError):
            l_gamma_sides(linear(rule3, eps=1.0, shift=0.0), basis3)

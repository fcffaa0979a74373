import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import shared_basis
from dini.basis import (
    apply_operator,
    build_basis,
    build_jacobi_basis,
    default_coefficient_rule,
    dini_coefficients,
    eval_phi,
    eval_psi,
    gram_matrix,
)
from dini.errors import RegimeMismatchError, SpectrumNotPositiveError
from dini.numerics import gauss_legendre
from dini.specfun import JacobiParams, SpectralParams


class TestPsiClosedForms:
    def test_neumann_constant_mode(self):
        b = shared_basis(-0.5)
        x = np.linspace(0.01, 0.99, 101)
        assert np.max(np.abs(eval_psi(b, 0, x) - 1.0)) < 1e-13

    def test_neumann_cosines(self):
        b = shared_basis(-0.5)
        x = np.linspace(0.01, 0.99, 101)
        ref = math.sqrt(2.0) * np.cos(3.0 * math.pi * x)
        assert np.max(np.abs(eval_psi(b, 3, x) - ref)) < 1e-12

    def test_dirichlet_sines(self):
        # The normalization constants force sqrt(2) sin(pi(n-1/2)x); the bare
        # sine has L2 norm 1/sqrt(2) and could not be part of an orthonormal
        # system.
        b = shared_basis(0.5)
        x = np.linspace(0.01, 0.99, 101)
        ref = math.sqrt(2.0) * np.sin(1.5 * math.pi * x)
        assert np.max(np.abs(eval_psi(b, 2, x) - ref)) < 1e-12
        assert eval_psi(b, 2, 0.5) == pytest.approx(math.sqrt(2.0) * math.sin(0.75 * math.pi))

    def test_zero_regime_monomial_mode(self):
        b = shared_basis(0.0, h=0.0, n_max=10)
        x = np.linspace(0.01, 0.99, 50)
        ref = math.sqrt(2.0) * np.sqrt(x)
        assert np.max(np.abs(eval_psi(b, 0, x) - ref)) < 1e-13

    def test_plus_regime_has_no_zero_mode(self):
        b = shared_basis(0.5)
        with pytest.raises(RegimeMismatchError):
            eval_psi(b, 0, 0.5)


class TestOrthonormality:
    @pytest.mark.parametrize("nu", [-0.9, -0.5, 0.0, 0.5, 1.5, 3.0])
    def test_gram_identity_default_h(self, nu):
        b = shared_basis(nu, n_max=40)
        gram = gram_matrix(b, 512)
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-8

    @pytest.mark.parametrize("h", [-1.0, 0.0, 2.0])
    def test_gram_identity_h_sweep(self, h):
        b = build_basis(SpectralParams(0.5, h), 25)
        gram = gram_matrix(b, 512)
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-8

    def test_jacobi_gram_identity(self):
        for a, bta in ((-0.5, -0.5), (0.7, -0.5), (1.2, 0.3), (-0.9, -0.2)):
            jb = build_jacobi_basis(JacobiParams(a, bta), 30)
            gram = gram_matrix(jb, 1024)
            assert np.max(np.abs(gram - np.eye(31))) < 1e-9


class TestPhi:
    def test_chebyshev_case_constant(self):
        jb = build_jacobi_basis(JacobiParams(-0.5, -0.5), 5)
        x = np.linspace(0.01, 0.99, 40)
        assert np.max(np.abs(eval_phi(jb, 0, x) - 1.0)) < 1e-14

    def test_half_order_normalization(self):
        # For k=0 the quadrature normalization fixes C_0; cross-check the
        # closed-form value against an explicit norm integral.
        jb = build_jacobi_basis(JacobiParams(0.5, -0.5), 3)
        rule = gauss_legendre(512)
        sq = rule.integrate(lambda x: eval_phi(jb, 0, x) ** 2)
        assert sq == pytest.approx(1.0, abs=1e-12)
        assert eval_phi(jb, 0, 0.5) == pytest.approx(
            jb.C[0] * math.sin(math.pi / 4.0), rel=1e-14
        )

    def test_eigenvalues(self):
        jb = build_jacobi_basis(JacobiParams(0.7, -0.5), 4)
        k = np.arange(5)
        ref = math.pi**2 * (k + (0.7 - 0.5 + 1.0) / 2.0) ** 2
        assert np.allclose(jb.Lambda, ref, rtol=1e-15)


class TestCoefficients:
    def test_reproduces_basis_delta(self):
        b = shared_basis(0.7, n_max=30)
        quad = default_coefficient_rule(b, 512)
        coeffs = dini_coefficients(b, lambda x: eval_psi(b, 2, x), quad)
        ref = np.zeros(31)
        ref[2] = 1.0
        assert np.max(np.abs(coeffs - ref)) < 1e-9

    def test_zero_function(self):
        b = shared_basis(0.7, n_max=10)
        quad = default_coefficient_rule(b, 256)
        coeffs = dini_coefficients(b, lambda x: 0.0 * x, quad)
        assert np.all(coeffs == 0.0)

    def test_constant_function_neumann(self):
        b = shared_basis(-0.5, n_max=20)
        quad = default_coefficient_rule(b, 512)
        coeffs = dini_coefficients(b, lambda x: np.ones_like(x), quad)
        assert coeffs[0] == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(coeffs[1:])) < 1e-9

    def test_parseval(self):
        b = shared_basis(0.7, n_max=200)
        quad = default_coefficient_rule(b, 1024)
        f = lambda x: np.exp(-1.0 / np.clip(x * (1.0 - x), 1e-12, None)) * 50.0
        coeffs = dini_coefficients(b, f, quad)
        norm_sq = float(np.dot(quad.weights, f(quad.nodes) ** 2))
        assert abs(np.sum(coeffs**2) - norm_sq) < 1e-6


class TestEigenRelation:
    @pytest.mark.parametrize("nu,h", [(-0.75, 0.5), (0.5, 0.5), (1.5, 0.5)])
    def test_differential_residual(self, nu, h):
        # -psi'' - (1/4-nu^2)/x^2 psi = sign * z^2 psi by centered differences.
        b = shared_basis(nu, h=h, n_max=5)
        x = np.linspace(0.2, 0.8, 31)
        step = 1e-4
        for n in range(b.n_min, 5):
            lam = b.eigen[n]
            psi = lambda xs: eval_psi(b, n, xs)
            second = (psi(x + step) - 2.0 * psi(x) + psi(x - step)) / step**2
            lhs = -second - (0.25 - nu * nu) / x**2 * psi(x)
            # Relative to the mode scale: eigenfunctions oscillate through 0,
            # so pointwise-relative is floored at a twentieth of |lam|.
            scale = np.maximum(np.abs(lam * psi(x)), 0.05 * max(abs(lam), 1.0))
            assert np.max(np.abs(lhs - lam * psi(x)) / scale) < 1e-5

    def test_robin_boundary_condition(self):
        # (H - 1/2) psi_n(1) + psi_n'(1) = 0, derivative via the recurrences.
        for nu, h in ((-0.8, 0.5), (0.3, 2.0), (1.5, -1.0)):
            b = build_basis(SpectralParams(nu, h), 12)
            x1 = np.array([1.0 - 1e-14])
            vals = (h - 0.5) * b.psi_matrix(x1) + b.psi_prime_matrix(x1)
            assert np.max(np.abs(vals[b.n_min :])) < 1e-8


class TestApplyOperator:
    def test_eigen_relation(self):
        b = shared_basis(0.7, n_max=10)
        coeffs = np.zeros(11)
        coeffs[1] = 1.0
        out = apply_operator(b, coeffs, power=1.0)
        assert out[1] == pytest.approx(b.eigen[1], rel=1e-15)
        assert np.count_nonzero(out) == 1

    def test_identity_power(self):
        b = shared_basis(-0.75, n_max=6)
        coeffs = np.arange(7.0)
        assert np.array_equal(apply_operator(b, coeffs, 0.0), coeffs)

    def test_negative_power_needs_positive_spectrum(self):
        b = shared_basis(-0.75, n_max=6)
        coeffs = np.ones(7)
        with pytest.raises(SpectrumNotPositiveError):
            apply_operator(b, coeffs, power=-1.0)

    def test_shift_heals_spectrum(self):
        b = shared_basis(-0.75, n_max=6)
        coeffs = np.ones(7)
        out = apply_operator(b, coeffs, power=-1.0, shift=1.0)
        assert np.all(np.isfinite(out[b.n_min :]))

    @given(st.floats(0.25, 2.0), st.floats(0.25, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_power_addition(self, p1, p2):
        b = shared_basis(0.7, n_max=8)
        coeffs = np.ones(9)
        once = apply_operator(b, apply_operator(b, coeffs, p1, shift=1.0), p2, shift=1.0)
        both = apply_operator(b, coeffs, p1 + p2, shift=1.0)
        assert np.allclose(once[1:], both[1:], rtol=1e-12)


class TestNormalizationConstants:
    def test_positive(self):
        for nu, h in ((-0.9, 0.5), (0.0, -0.3), (2.0, 1.0)):
            b = build_basis(SpectralParams(nu, h), 15)
            assert np.all(b.c[b.n_min :] > 0.0)

    def test_eigenvalue_sign_per_regime(self):
        assert build_basis(SpectralParams(-0.75, 0.5), 5).eigen[0] < 0.0
        assert build_basis(SpectralParams(-0.5, 0.5), 5).eigen[0] == 0.0
        b = build_basis(SpectralParams(0.5, 0.5), 5)
        assert np.all(np.diff(b.eigen[b.n_min :]) > 0.0)

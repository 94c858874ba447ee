# core/tests/test_teukolsky.py
import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.exceptions import KdsError
from core.frames import frame_at
from core.geometry import aux_scalars, make_params
from core.horizontal import PatchField
from core.teukolsky import (
    chandrasekhar_q,
    factorization_identities,
    factorization_residual,
    grw_residual,
    nl_leading_coefficient,
    rw_coeffs,
    rw_potential,
    scalar_wave_bl,
    spin2_harmonic,
    teukolsky_apply,
    teukolsky_potential,
    transform_coeffs,
    w_decay_orders,
)


class ChandrasekharTransformTest(SimpleTestCase):
    """
    Coefficients of the factorized transform A ↦ 𝔮
    """

    def setUp(self):
        self.r = np.array([3.0, 7.0, 15.0])
        self.theta = np.array([0.6, math.pi / 2, 2.4])

    def test_schwarzschild_reduction(self):
        """C₁ = 2trχ̲ and C₂ = ½trχ̲² when a = 0"""
        params = make_params(1.0, 0.0, 1e-3)
        coeffs = transform_coeffs(params, self.r, self.theta)
        t = frame_at(params, 'global', self.r, self.theta).ricci.tr_chib
        np.testing.assert_allclose(coeffs.C1, 2.0 * t, rtol=1e-14)
        np.testing.assert_allclose(coeffs.C2, 0.5 * t ** 2, rtol=1e-14)

    def test_factorization_identities(self):
        params = make_params(1.0, 0.05, 1e-3)
        for name, value in factorization_identities(params, self.r, self.theta).items():
            self.assertLess(float(np.max(value)), 1e-6, name)


class ReggeWheelerCoefficientsTest(SimpleTestCase):
    """
    Potential and coupling coefficients of the generalized Regge–Wheeler equation
    """

    def test_schwarzschild_potential(self):
        """V = 4(1 − 2M/r)/r² when a = Λ = 0"""
        r = np.array([3.0, 5.0, 20.0])
        V = rw_potential(make_params(1.0, 0.0, 0.0), r, 1.0)
        np.testing.assert_allclose(V, 4.0 * (1.0 - 2.0 / r) / r ** 2, rtol=1e-14)

    def test_lambda_shift(self):
        r = np.array([3.0, 5.0])
        V0 = rw_potential(make_params(1.0, 0.0, 0.0), r, 1.0)
        V1 = rw_potential(make_params(1.0, 0.0, 1e-3), r, 1.0)
        np.testing.assert_allclose(V1 - V0, 2e-3 - 4.0 * 1e-3 / 3.0, rtol=1e-10)

    def test_potential_is_real(self):
        params = make_params(1.0, 0.05, 1e-3)
        coeffs = rw_coeffs(params, np.array([4.0, 9.0]), np.array([0.8, 1.9]))
        self.assertLess(float(np.max(np.abs(np.imag(coeffs.V_tilde)))), 1e-10)

    def test_closed_form_potential_at_zero_spin(self):
        """Ṽ reduces to V when a = 0"""
        params = make_params(1.0, 0.0, 1e-3)
        coeffs = rw_coeffs(params, np.array([4.0, 9.0]), np.array([0.8, 1.9]))
        self.assertLess(float(np.max(coeffs.V0_bound)), 1e-12)
        self.assertEqual(float(np.max(np.abs(coeffs.Z))), 0.0)

    @pytest.mark.slow
    def test_w_samples_are_order_a(self):
        orders = w_decay_orders(1.0, 1e-3, 6.0, math.pi / 3)
        self.assertGreaterEqual(min(orders.values()), 0.9)


class ResidualTest(SimpleTestCase):
    """
    The gRW residual of stored mode solutions
    """

    def _solution(self, **overrides):
        solution = {
            'psi': np.zeros((12, 20)), 'tau': np.linspace(0.0, 1.1, 12), 'r': np.linspace(3.0, 8.0, 20),
            'lambda_ang': 2.0, 'M': 1.0, 'a': 0.0, 'Lambda': 1e-3,
        }
        solution.update(overrides)
        return solution

    def test_zero_solution(self):
        self.assertEqual(grw_residual(self._solution()), 0.0)

    def test_rotating_solution_is_refused(self):
        with self.assertRaises(KdsError) as ctx:
            grw_residual(self._solution(a=0.05))
        self.assertEqual(ctx.exception.code, 'support')

    def test_harmonic(self):
        """λ_ang = 2 is ℓ = 2, whose harmonic is sin²θ"""
        theta = np.linspace(0.1, 3.0, 7)
        np.testing.assert_allclose(spin2_harmonic(2.0, theta), np.sin(theta) ** 2)
        with self.assertRaises(KdsError):
            spin2_harmonic(3.0, theta)


class TeukolskyOperatorTest(SimpleTestCase):
    """
    ℒ(A), the transform 𝔮 and the scalar wave operator on patch fields
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.point = (0.0, 6.0, 1.0, 0.3)

    def _field(self, fn, spin=2, weight=2, kind='global'):
        return PatchField(self.params, fn, spin=spin, weight=weight, kind=kind)

    def test_zero_field(self):
        zero = self._field(lambda tau, r, theta, phi: np.zeros(np.shape(r)))
        self.assertEqual(float(np.abs(teukolsky_apply(zero)(*self.point))), 0.0)
        transform = chandrasekhar_q(zero)
        self.assertEqual(float(np.abs(transform['Psi'](*self.point))), 0.0)
        self.assertEqual(float(np.abs(transform['qfrak'](*self.point))), 0.0)
        self.assertEqual((transform['Psi'].weight, transform['qfrak'].weight), (1, 0))

    def test_spin_and_frame_are_checked(self):
        ones = lambda tau, r, theta, phi: np.ones(np.shape(r))
        for field in (self._field(ones, spin=1), self._field(ones, weight=0), self._field(ones, kind='ingoing')):
            with self.assertRaises(KdsError) as ctx:
                teukolsky_apply(field)
            self.assertEqual(ctx.exception.code, 'support')

    def test_potential_without_rotation(self):
        """−tr̄X trX̲ + 2P̄ − 2Λ/3 + 2H·H̲̄ with H = H̲ = 0 and P = −2M/r³"""
        params = make_params(1.0, 0.0, 1e-3)
        r = np.array([3.0, 6.0, 15.0])
        frame = frame_at(params, 'global', r, 1.0)
        ricci = frame.ricci
        expected = -ricci.tr_chi * ricci.tr_chib - 4.0 / r ** 3 - 2e-3 / 3.0
        np.testing.assert_allclose(teukolsky_potential(params, frame), expected, rtol=1e-12)

    def test_factorized_transform(self):
        """f(∇₃∇₃A + C₁∇₃A + C₂A) agrees with (q/q̄)r²∇₃∇₃((q̄⁴/r²)A)"""
        field = self._field(
            lambda tau, r, theta, phi: np.exp(-0.2 * (r - 6.0) ** 2 - 0.1j * tau + 2j * phi) * np.sin(theta) ** 2
        )
        qfrak = chandrasekhar_q(field)['qfrak'](*self.point)
        residual = factorization_residual(field, *self.point)
        self.assertLess(float(residual / max(abs(qfrak), 1.0)), 1e-5)

    def test_nl_leading_coefficient(self):
        """|c| = 8(1+γ)Δ/(λr²) since q̄²/|q|² is a phase"""
        r = np.array([3.0, 6.0, 15.0])
        theta = np.array([0.5, 1.2, 2.0])
        c = nl_leading_coefficient(self.params, r, theta)
        frame = frame_at(self.params, 'global', r, theta)
        delta = aux_scalars(self.params, r, theta).delta
        expected = 8.0 * (1.0 + self.params.gamma) * delta / (frame.conformal_factor * r ** 2)
        np.testing.assert_allclose(np.abs(c), expected, rtol=1e-12)
        self.assertEqual(float(np.max(np.abs(np.imag(nl_leading_coefficient(make_params(1.0, 0.0, 1e-3), r, theta))))), 0.0)

    def test_scalar_wave_of_a_radial_function(self):
        """|q|²□(1/r) = ∂_r(Δ∂_r r⁻¹) = −2M/r² on Schwarzschild"""
        value = scalar_wave_bl(make_params(1.0, 0.0, 0.0), lambda t, r, theta, phi: 1.0 / r, 0.0, 6.0, 1.0, 0.0)
        self.assertAlmostEqual(float(np.real(value)), -2.0 / 36.0, delta=1e-7)

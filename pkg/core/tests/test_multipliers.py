# core/tests/test_multipliers.py
import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from core.coords import sigma_decomposition
from core.exceptions import KdsError
from core.frames import frame_at
from core.geometry import delta_of, make_params
from core.horizontal import PatchField
from core.multipliers import (
    NORM,
    MultiplierTriple,
    a_identity_residual,
    certify,
    current_JK,
    divergence_identity,
    em_tensor,
    energy_boundary_constant,
    energy_multiplier,
    hardy_scalar,
    jet_from_vector,
    morawetz_borrow,
    preliminary_bulk,
    random_jet,
    redshift_coercivity,
    rp_boundary_margin,
    rp_bulk_check,
    rp_lambda_damping,
    rp_lambda_form,
    rp_lambda_leading,
    rp_multiplier,
    tilde_T_current_check,
    tilde_T_defect,
    transport_divergence_check,
    w_consistency,
)
from core.teukolsky import rw_potential


class EnergyMomentumTest(SimpleTestCase):
    """
    Null components of the energy–momentum tensor
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.frame = frame_at(self.params, 'global', 6.0, 1.0)
        self.jet = jet_from_vector(self.frame, np.array([0.3 + 0.1j, 1.0 - 2.0j, 0.5j, 0.2, -0.7 + 0.4j]))
        self.V = float(rw_potential(self.params, 6.0, 1.0))

    def test_null_components(self):
        T = em_tensor(self.jet, self.V)
        grad = 2.0 * (abs(self.jet.dh[0]) ** 2 + abs(self.jet.dh[1]) ** 2)
        self.assertAlmostEqual(T[2, 2], 2.0 * abs(self.jet.d3) ** 2, places=12)
        self.assertAlmostEqual(T[3, 3], 2.0 * abs(self.jet.d4) ** 2, places=12)
        self.assertAlmostEqual(T[2, 3], grad + 2.0 * self.V * abs(self.jet.psi) ** 2, places=12)

    def test_horizontal_trace(self):
        T = em_tensor(self.jet, self.V)
        expected = 2.0 * np.real(self.jet.d3 * np.conj(self.jet.d4)) - 2.0 * self.V * abs(self.jet.psi) ** 2
        self.assertAlmostEqual(T[0, 0] + T[1, 1], expected, places=12)


class CurrentTest(SimpleTestCase):
    """
    J and K currents of a multiplier at one jet
    """

    def setUp(self):
        self.params = make_params(1.0, 0.0, 1e-3)
        self.rng = np.random.default_rng(41)
        self.killing = MultiplierTriple(
            name='T', X=lambda r, theta: np.broadcast_to([1.0, 0.0, 0.0, 0.0], np.shape(r) + (4,)),
        )

    def test_killing_field_without_rotation(self):
        """K vanishes for X = T and w = m = 0 when a = 0"""
        jet = random_jet(self.params, 6.0, 1.0, self.rng)
        sample = current_JK(self.params, self.killing, jet)
        scale = float(np.sum(np.abs(em_tensor(jet, float(rw_potential(self.params, 6.0, 1.0))))))
        self.assertLess(abs(float(sample.K)), 1e-6 * scale)
        self.assertEqual(sample.J.shape, (4,))
        self.assertEqual(set(sample.boundary_flux), {'Sigma_tau', 'Sigma_star'})

    def test_frame_kinds_must_match(self):
        jet = random_jet(self.params, 6.0, 1.0, self.rng, kind='ingoing')
        with self.assertRaises(KdsError) as ctx:
            current_JK(self.params, self.killing, jet)
        self.assertEqual(ctx.exception.code, 'support')


class EnergyMultiplierTest(SimpleTestCase):
    """
    T̃ multiplier: boundary positivity, the current identity and the A one-form
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.rng = np.random.default_rng(23)

    def test_boundary_constant_is_positive(self):
        for r in (3.0, 8.0, 20.0):
            self.assertGreater(energy_boundary_constant(self.params, r, math.pi / 3), 0.0)

    def test_tilde_T_current(self):
        """𝕋·π^{T̃} is exactly the χ′ cross term"""
        r = np.array([2.6, 3.55, 6.0])
        theta = np.array([0.9, 1.5, 2.0])
        jet = random_jet(self.params, r, theta, self.rng, kind='ingoing', size=3)
        self.assertLess(float(np.max(np.abs(tilde_T_current_check(self.params, jet)))), 1e-8)

    def test_a_one_form(self):
        """The assembled A one-form equals −dΦ_A"""
        r = np.array([3.0, 5.0, 14.0])
        theta = np.array([0.7, 1.6, 2.5])
        self.assertLess(a_identity_residual(self.params, r, theta), 1e-6)

    def test_tilde_T_agrees_with_T_hat_away_from_trapping(self):
        """T̃ − T̂ vanishes for |r − 3M| ≥ 2δ_trap r and is a/(r²+a²) at r = 3M"""
        a = self.params.a
        self.assertEqual(float(tilde_T_defect(self.params, 30.0)), 0.0)
        self.assertAlmostEqual(float(tilde_T_defect(self.params, 3.0)), a / (9.0 + a ** 2), places=14)

    def test_support(self):
        triple = energy_multiplier(self.params)
        with self.assertRaises(KdsError) as ctx:
            triple.check_support(0.5 * self.params.r_min)
        self.assertEqual(ctx.exception.code, 'support')

    @pytest.mark.slow
    def test_divergence_identity(self):
        """div J = K + ⟨□ψ − Vψ, ∇_Xψ + wψ⟩ for a smooth spin-2 field"""
        field = PatchField(
            self.params,
            lambda tau, r, theta, phi: np.exp(-0.25 * (r - 6.0) ** 2 - 0.3j * tau + 1j * phi) * np.sin(theta) ** 2,
            spin=2,
        )
        result = divergence_identity(energy_multiplier(self.params), field, 0.0, 6.0, 1.0, 0.0)
        self.assertLess(float(result['residual']), 1e-3)


class MorawetzTest(SimpleTestCase):

    def test_hardy_scalar_on_the_horizon(self):
        """r³E = 1/3 at r = 2M when a = Λ = 0"""
        params = make_params(1.0, 0.0, 0.0)
        self.assertAlmostEqual(float(hardy_scalar(params, 2.0)) * 8.0, 1.0 / 3.0, places=12)

    def test_w_consistency_without_rotation(self):
        params = make_params(1.0, 0.0, 1e-3)
        r = np.array([2.5, 4.0, 7.0])
        np.testing.assert_allclose(w_consistency(params, r, np.full(3, 1.2)), 0.0, atol=1e-6)

    def test_lagrangian_borrow(self):
        """α² vanishes at the photon sphere and β² stays positive"""
        params = make_params(1.0, 0.05, 1e-3)
        r = np.array([2.5, 3.0, 6.0, 20.0])
        borrow = morawetz_borrow(params, r, delta=0.1)
        self.assertEqual(float(borrow['alpha_sq'][1]), 0.0)
        self.assertTrue(np.all(borrow['beta_sq'] > 0.0))
        np.testing.assert_allclose(borrow['c0'], borrow['beta_sq'])


class RedshiftTest(SimpleTestCase):

    def test_margin_at_the_horizon(self):
        """K^{Y₀} beats ∂_rΔ(r_H)/(64r_H²) on the event horizon"""
        report = redshift_coercivity(make_params(1.0, 0.0, 1e-3))
        self.assertGreater(report['margin'], 0.0)


class RpTest(SimpleTestCase):
    """
    r^p hierarchy: exponent range, Λ damping, the far-region bulk and the Σ* flux
    """

    def test_displayed_lambda_damping_sign(self):
        """The displayed Λ form is positive for p near 2, indefinite for small p and degenerate at p = 1"""
        self.assertGreater(rp_lambda_damping(1.95), 0.0)
        self.assertLess(rp_lambda_damping(0.05), 0.0)
        self.assertAlmostEqual(rp_lambda_damping(1.0), 0.0, places=14)

    def test_lambda_form_is_the_check_derivative_only(self):
        """K_Λ − K_0 ≈ Λr^{p+1}(2−p)/6·|∇̌₄ψ|² with no r⁻¹ψ content"""
        params = make_params(1.0, 0.0, 1e-6)
        for p in (0.05, 1.0, 1.95):
            Q = rp_lambda_form(params, p, 100.0, 1.0)
            deviation = float(np.max(np.abs(Q - rp_lambda_leading(p)))) / ((2.0 - p) / 6.0)
            self.assertLess(deviation, 5e-2, msg=f'p={p}')

    def test_lambda_form_needs_lambda(self):
        with self.assertRaises(KdsError) as ctx:
            rp_lambda_form(make_params(1.0, 0.0, 0.0), 1.0, 100.0, 1.0)
        self.assertEqual(ctx.exception.code, 'regime')

    def test_exponent_range(self):
        with self.assertRaises(KdsError) as ctx:
            rp_multiplier(make_params(1.0, 0.0, 0.0), 2.5)
        self.assertEqual(ctx.exception.code, 'p-range')

    def _nabla4_ratio(self, params, p, r):
        jet = jet_from_vector(frame_at(params, 'global', r, 1.0), np.array([0.0, 0.0, 1.0, 0.0, 0.0]))
        return float(rp_bulk_check(params, p, r, 1.0, jet=jet)['ratio'])

    def test_nabla4_bulk_without_lambda(self):
        """A pure ∇₄ψ jet leaves K − display = −M(p+1)r^{p−2}|∇₄ψ|², twice the weight at p = 1"""
        params = make_params(1.0, 0.0, 0.0)
        for r in (40.0, 160.0, 640.0):
            self.assertAlmostEqual(self._nabla4_ratio(params, 1.0, r), 2.0, delta=2e-4)

    def test_nabla4_bulk_with_lambda(self):
        """The Λ-linear display cancels the Λ terms of K along ∇₄ψ"""
        params = make_params(1.0, 0.0, 1e-4)
        for r in (30.0, 60.0, 90.0):
            expected = 1.05 / (1.0 + params.Lambda * r ** 2)
            self.assertAlmostEqual(self._nabla4_ratio(params, 0.05, r), expected, delta=2e-4)

    def test_bulk_matches_the_display(self):
        """|K − display| stays within a bounded multiple of the error weight for random jets"""
        params = make_params(1.0, 0.05, 1e-4)
        rng = np.random.default_rng(29)
        r = np.linspace(25.0, 80.0, 6)
        theta = np.linspace(0.3, 2.8, 6)
        for p in (0.05, 1.0, 1.95):
            result = rp_bulk_check(params, p, r, theta, rng=rng)
            self.assertEqual(result['ratio'].shape, r.shape)
            self.assertLess(float(np.max(result['ratio'])), 50.0, msg=f'p={p}')

    def test_star_margin_of_a_pure_psi_jet(self):
        """Without rotation the Σ* margin of ψ alone is −¼r^{p−2}λDV − (2−p)Λr^p/6 − (4+p)Mr^{p−3}"""
        params = make_params(1.0, 0.0, 1e-3)
        r, theta = params.r_max, 1.0
        lam = float(sigma_decomposition(params, r, theta)['lambda'])
        D = float(delta_of(params, r)) / r ** 2
        V = float(rw_potential(params, r, theta))
        jet = jet_from_vector(frame_at(params, 'global', r, theta), np.array([1.0, 0.0, 0.0, 0.0, 0.0]))
        for p in (0.05, 1.0, 1.95):
            result = rp_boundary_margin(params, p, r, theta, jet)
            expected = (
                -0.25 * r ** (p - 2) * lam * D * V
                - (2.0 - p) / 6.0 * params.Lambda * r ** p
                - (4.0 + p) * params.M * r ** (p - 3)
            )
            self.assertAlmostEqual(float(result['margin']) / NORM, expected, delta=1e-5 * abs(expected))

    def test_star_flux_is_positive(self):
        params = make_params(1.0, 0.05, 1e-3)
        rng = np.random.default_rng(31)
        r = np.full(200, params.r_max)
        theta = rng.uniform(0.2, math.pi - 0.2, r.shape)
        jet = random_jet(params, r, theta, rng, size=r.size)
        for p in (0.05, 1.0, 1.95):
            flux = rp_boundary_margin(params, p, r, theta, jet)['flux']
            self.assertGreater(float(np.min(flux)), 0.0, msg=f'p={p}')

    def test_no_far_region(self):
        """With ΛM² = 1e-2 the cosmological horizon leaves no room beyond R"""
        with self.assertRaises(KdsError) as ctx:
            certify(make_params(1.0, 0.0, 1e-2), 'rp')
        self.assertEqual(ctx.exception.code, 'support')


class PreliminaryTest(SimpleTestCase):
    """
    Bulk of X = r^{−δ}T and the e₃ transport divergence
    """

    def test_null_coefficients(self):
        """¼δr^{−1−δ} on |∇₃ψ|² and −¼Υ²δr^{−1−δ} on |∇₄ψ|²"""
        params = make_params(1.0, 0.0, 1e-3)
        result = preliminary_bulk(params, 0.1, params.r0 + 2.0 * params.M, 1.0)
        self.assertAlmostEqual(result['c33'] / result['expected33'], 1.0, places=5)
        self.assertAlmostEqual(result['c44'] / result['expected44'], 1.0, places=5)

    def test_transport_divergence(self):
        params = make_params(1.0, 0.05, 1e-3)
        fn = lambda r, theta: np.asarray(r) ** 2 * np.sin(theta)
        residual = transport_divergence_check(params, fn, np.array([4.0, 15.0]), np.array([0.8, 2.0]))
        np.testing.assert_allclose(residual, 0.0, atol=1e-6)

    def test_unknown_family(self):
        with self.assertRaises(KdsError) as ctx:
            certify(make_params(1.0, 0.0, 0.0), 'bogus')
        self.assertEqual(ctx.exception.code, 'support')

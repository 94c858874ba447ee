# core/tests/test_geometry.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import KdsError
from core.fd import fitted_order
from core.geometry import (
    carter_residual,
    delta_of,
    exterior_samples,
    inverse_metric_bl,
    make_params,
    metric_bl,
    sds_horizon_taylor,
    sds_horizons_closed_form,
)


class MakeParamsTest(SimpleTestCase):
    """
    Horizon solving and regime validation in make_params
    """

    def test_kerr_horizons_match_closed_form(self):
        """Λ = 0 horizons are M ± √(M² − a²)"""
        params = make_params(1.0, 0.05, 0.0)
        root = math.sqrt(1.0 - 0.05 ** 2)
        self.assertAlmostEqual(params.r_event, 1.0 + root, places=12)
        self.assertAlmostEqual(params.r_inner, 1.0 - root, places=10)
        self.assertFalse(params.has_cosmological_horizon)
        self.assertEqual(params.r_max, math.inf)

    def test_sds_horizons_match_trigonometric_solution(self):
        """Schwarzschild–de Sitter roots agree with the cubic's closed form"""
        for Lambda in (1e-4, 1e-3, 1e-2):
            params = make_params(1.0, 0.0, Lambda)
            r_event, r_cosmo = sds_horizons_closed_form(1.0, Lambda)
            self.assertAlmostEqual(params.r_event, r_event, places=10)
            self.assertAlmostEqual(params.r_cosmo / r_cosmo, 1.0, places=12)

    def test_delta_vanishes_at_both_horizons(self):
        """Δ(r_event) = Δ(r_cosmo) = 0 and Δ > 0 in between"""
        params = make_params(1.0, 0.05, 1e-3)
        self.assertLess(abs(float(delta_of(params, params.r_event))), 1e-10)
        self.assertLess(abs(float(delta_of(params, params.r_cosmo))), 1e-8)
        r = np.linspace(params.r_event, params.r_cosmo, 50)[1:-1]
        self.assertTrue(np.all(delta_of(params, r) > 0))

    def test_default_r0(self):
        """r0 defaults to 10M and moves inside the window for large Λ"""
        self.assertEqual(make_params(1.0, 0.0, 0.0).r0, 10.0)
        params = make_params(1.0, 0.0, 1e-2)
        self.assertLess(params.r_event, params.r0 - params.M)
        self.assertLess(params.r0 + params.M, 0.5 * params.r_cosmo)

    def test_fast_rotation_is_rejected(self):
        """|a| > 0.1M is outside the slow-rotation regime"""
        with self.assertRaises(KdsError) as ctx:
            make_params(1.0, 0.2, 0.0)
        self.assertEqual(ctx.exception.code, 'regime')

    def test_large_lambda_is_rejected(self):
        """ΛM² > 0.05 is outside the small-Λ regime"""
        with self.assertRaises(KdsError) as ctx:
            make_params(1.0, 0.0, 0.1)
        self.assertEqual(ctx.exception.code, 'regime')

    def test_negative_mass_is_rejected(self):
        with self.assertRaises(KdsError) as ctx:
            make_params(-1.0, 0.0, 0.0)
        self.assertEqual(ctx.exception.code, 'regime')

    def test_no_horizon(self):
        """9ΛM² > 1 leaves Δ without a pair of positive roots"""
        with self.assertRaises(KdsError) as ctx:
            make_params(1.0, 0.0, 0.2)
        self.assertEqual(ctx.exception.code, 'no-horizon')

    def test_in_mass_units(self):
        """Rescaling by M gives the M = 1 black hole with the same ratios"""
        scaled = make_params(2.0, 0.1, 1e-3 / 4.0).in_mass_units()
        unit = make_params(1.0, 0.05, 1e-3)
        self.assertEqual(scaled.M, 1.0)
        self.assertAlmostEqual(scaled.r_event, unit.r_event, places=11)
        self.assertAlmostEqual(scaled.r_cosmo, unit.r_cosmo, places=8)
        self.assertAlmostEqual(scaled.r0, unit.r0)


class HorizonTaylorTest(SimpleTestCase):
    """
    Small-Λ expansions of the SdS horizons
    """

    def setUp(self):
        self.lambdas = np.array([1e-4, 2e-4, 4e-4, 8e-4])

    def _errors(self, index):
        return [
            abs(sds_horizon_taylor(1.0, L)[index] - sds_horizons_closed_form(1.0, L)[index])
            for L in self.lambdas
        ]

    def test_event_horizon_remainder_is_second_order(self):
        """r_event − (2M + 8M³Λ/3) = O(Λ²)"""
        self.assertGreater(fitted_order(self.lambdas, self._errors(0)), 1.8)

    def test_cosmological_horizon_remainder_is_first_order(self):
        """r_cosmo − (√(3/Λ) − M − (√3/2)M²√Λ) = O(Λ), i.e. O((√Λ)²)"""
        order = fitted_order(np.sqrt(self.lambdas), self._errors(1))
        self.assertGreater(order, 1.8)

    def test_lambda_zero(self):
        self.assertEqual(sds_horizon_taylor(1.0, 0.0), (2.0, math.inf))


class MetricTest(SimpleTestCase):
    """
    Boyer–Lindquist metric, its inverse and the Carter decomposition
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.r, self.theta = exterior_samples(self.params, 40, np.random.default_rng(3))

    def test_schwarzschild_limit(self):
        """a = Λ = 0 gives g_tt = −(1 − 2M/r)"""
        g = metric_bl(make_params(1.0, 0.0, 0.0), 4.0, math.pi / 2)
        self.assertAlmostEqual(g[0, 0], -0.5, places=14)
        self.assertAlmostEqual(g[1, 1], 2.0, places=14)

    def test_inverse_metric(self):
        """g · g⁻¹ is the identity at exterior points"""
        product = np.einsum('...ij,...jk->...ik', metric_bl(self.params, self.r, self.theta),
                            inverse_metric_bl(self.params, self.r, self.theta))
        np.testing.assert_allclose(product, np.broadcast_to(np.eye(4), product.shape), atol=1e-8)

    def test_carter_decomposition(self):
        """The Carter form reassembles g⁻¹"""
        self.assertLess(np.max(carter_residual(self.params, self.r, self.theta)), 1e-10)

    def test_singular_on_horizon(self):
        """BL components are refused where Δ = 0"""
        with self.assertRaises(KdsError) as ctx:
            metric_bl(self.params, self.params.r_event, 1.0)
        self.assertEqual(ctx.exception.code, 'coordinate-singular')

    def test_samples_stay_in_exterior(self):
        self.assertTrue(np.all(self.r > self.params.r_event))
        self.assertTrue(np.all(self.r < self.params.r_cosmo))
        self.assertTrue(np.all((self.theta > 0) & (self.theta < math.pi)))

# core/tests/test_coords.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.coords import (
    coord_functions,
    coords_dump,
    far_region_asymptotics,
    grad_tau_relation,
    normal,
    normal_decay,
    nu_divergence,
    nu_tangents,
    region_flags,
    sigma_decomposition,
    simpson_ell,
    timelikeness_violations,
    volume_weights,
)
from core.exceptions import KdsError
from core.frames import metric_global
from core.geometry import delta_of, domain_samples, make_params


class CoordFunctionsTest(SimpleTestCase):
    """
    Antiderivatives k, h, ℓ of the global coordinates
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 0.0)
        self.coords = coord_functions(self.params)

    def test_base_points(self):
        self.assertEqual(self.coords.k(self.params.r0), 0.0)
        self.assertEqual(self.coords.h(self.params.r0), 0.0)
        self.assertEqual(self.coords.ell(2.0 * self.params.r0), 0.0)

    def test_ell_integral(self):
        """ℓ′ rises over [2r₀, 3r₀] with mean ½, so ℓ(4r₀) = 1.5r₀"""
        r0 = self.params.r0
        self.assertAlmostEqual(self.coords.ell(4.0 * r0), 1.5 * r0, places=10)
        self.assertAlmostEqual(simpson_ell(self.params, 2.0 * r0, 4.0 * r0), 1.5 * r0, places=8)

    def test_k_diverges_at_the_horizon(self):
        for r in (self.params.r_event * (1.0 + 1e-10), 0.5 * self.params.r_event):
            with self.assertRaises(KdsError) as ctx:
                self.coords.k(r)
            self.assertEqual(ctx.exception.code, 'quadrature')

    def test_tau_from_bl(self):
        self.assertAlmostEqual(self.coords.tau_from_bl(5.0, self.params.r0), 5.0)

    def test_dump(self):
        payload = coords_dump(self.params, 6.0, 1.0)
        self.assertIn('k', payload)
        self.assertEqual(set(payload['frame_action']), {'e1', 'e2', 'e3', 'e4'})


class SliceGeometryTest(SimpleTestCase):
    """
    Timelikeness of the slices, normals and tangent fields
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.rng = np.random.default_rng(11)

    def test_no_timelikeness_violations(self):
        """Every slice inequality holds on random points of the whole domain"""
        counts = timelikeness_violations(self.params, *domain_samples(self.params, 2000, self.rng))
        self.assertEqual(sum(counts.values()), 0, counts)

    def test_grad_tau_relation(self):
        """∇τ = aRe𝔍 when γ = 0"""
        params = make_params(1.0, 0.05, 0.0)
        lhs, rhs = grad_tau_relation(params, *domain_samples(params, 100, self.rng))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_sigma_decomposition(self):
        r, theta = domain_samples(self.params, 50, self.rng)
        self.assertLess(float(np.max(sigma_decomposition(self.params, r, theta)['residual'])), 1e-10)

    def test_nu_star_norm(self):
        """g(ν_Σ*, ν_Σ*) = −Δ/|q|²"""
        r = np.array([3.0, 8.0, 15.0])
        theta = np.array([0.5, 1.5, 2.5])
        nu = nu_tangents(self.params, r, theta)['nu_star']
        g = metric_global(self.params, r, theta)
        norm = np.einsum('...i,...ij,...j->...', nu, g, nu)
        expected = -delta_of(self.params, r) / (r ** 2 + self.params.a ** 2 * np.cos(theta) ** 2)
        np.testing.assert_allclose(norm, expected, atol=1e-10)

    def test_nu_divergence_is_tr_chi(self):
        r = np.array([4.0, 12.0])
        theta = np.array([1.0, 2.0])
        div, tr_chi = nu_divergence(self.params, r, theta)
        self.assertLess(float(np.max(np.abs(div - tr_chi)) / np.max(np.abs(tr_chi))), 1e-4)

    def test_normal_decay(self):
        """Both normals approach their limits like r⁻² when Λ = 0"""
        orders = normal_decay(make_params(1.0, 0.05, 0.0))
        self.assertGreater(orders['sigma_order'], 1.9)
        self.assertGreater(orders['star_order'], 1.9)

    def test_far_region_asymptotics(self):
        """e₃(τ) ≍ 1 and e₄(τ) ≍ M²/r² beyond r₀ + M"""
        result = far_region_asymptotics(make_params(1.0, 0.05, 0.0))
        self.assertGreater(float(np.min(result['e3_tau'])), 0.0)
        self.assertGreater(float(np.min(result['e4_tau_scaled'])), 0.0)
        self.assertLess(result['spread'], 100.0)

    def test_volume_weights(self):
        """√|g| of the global chart is r² sinθ when a = Λ = 0"""
        theta = np.array([0.5, 1.5, 2.5])
        flat = volume_weights(make_params(1.0, 0.0, 0.0), 6.0, theta)
        np.testing.assert_allclose(flat['sqrt_g'], flat['round'], rtol=1e-10)
        rotating = volume_weights(make_params(1.0, 0.05, 1e-3), np.array([3.0, 8.0, 20.0]), theta)
        self.assertTrue(np.all(rotating['sqrt_g'] > 0.0))

    def test_unknown_hypersurface(self):
        with self.assertRaises(KdsError) as ctx:
            normal(self.params, 'Sigma_bogus', 5.0, 1.0)
        self.assertEqual(ctx.exception.code, 'support')


class RegionFlagsTest(SimpleTestCase):

    def setUp(self):
        self.params = make_params(1.0, 0.0, 0.0)

    def test_photon_sphere_is_trapped(self):
        flags = region_flags(self.params, 0.0, 3.0)
        self.assertTrue(flags.in_trap)
        self.assertTrue(flags.in_M)
        self.assertTrue(flags.in_M_e)
        self.assertFalse(flags.in_red)

    def test_near_horizon_is_redshift(self):
        flags = region_flags(self.params, 1.0, 2.05)
        self.assertTrue(flags.in_red)
        self.assertFalse(flags.in_trap)
        self.assertFalse(flags.in_M_e)

    def test_outside_the_domain(self):
        self.assertFalse(region_flags(self.params, 0.0, 1.0).in_M_tot)
        self.assertTrue(math.isinf(self.params.r_max))

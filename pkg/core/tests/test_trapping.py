# core/tests/test_trapping.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import KdsError
from core.fd import derivative
from core.geometry import make_params
from core.trapping import (
    escape_rate,
    geodesic_flow,
    make_state,
    null_state_at,
    photon_orbit_period,
    trapped_radius,
    trapped_scan,
    trapping_function,
    trapping_function_unsquared,
    unsquared_critical_radius,
)


class TrappedRadiusTest(SimpleTestCase):
    """
    Critical points of the radial trapping function
    """

    def test_photon_sphere_without_rotation(self):
        """r_trap = 3M for every Λ when a = 0"""
        for Lambda in (0.0, 1e-4, 1e-2):
            sample = trapped_radius(make_params(1.0, 0.0, Lambda), -1.0, 1.0)
            self.assertAlmostEqual(sample.r_trap, 3.0, places=10)
            self.assertGreater(sample.phi_second_derivative, 0.0)

    def test_rotation_moves_the_orbit(self):
        params = make_params(1.0, 0.05, 1e-3)
        prograde = trapped_radius(params, -1.0, 3.0).r_trap
        retrograde = trapped_radius(params, -1.0, -3.0).r_trap
        self.assertNotAlmostEqual(prograde, retrograde, places=3)
        self.assertLess(abs(prograde - 3.0), 0.2)
        self.assertLess(abs(retrograde - 3.0), 0.2)

    def test_unsquared_function_has_the_same_critical_point(self):
        params = make_params(1.0, 0.05, 1e-3)
        self.assertAlmostEqual(unsquared_critical_radius(params, -1.0, 2.0),
                               trapped_radius(params, -1.0, 2.0).r_trap, places=9)

    def test_unsquared_function(self):
        """Φ = (P/√Δ)² and P/√Δ is stationary at its critical radius"""
        params = make_params(1.0, 0.05, 1e-3)
        r = np.array([2.5, 4.0, 9.0])
        np.testing.assert_allclose(trapping_function(params, r, -1.0, 2.0),
                                   trapping_function_unsquared(params, r, -1.0, 2.0) ** 2, rtol=1e-12)
        r_crit = unsquared_critical_radius(params, -1.0, 2.0)
        slope = derivative(lambda x: trapping_function_unsquared(params, x, -1.0, 2.0), r_crit, 1e-4, order=4)
        self.assertLess(abs(float(slope)), 1e-8)

    def test_zero_covector(self):
        with self.assertRaises(KdsError) as ctx:
            trapped_radius(make_params(1.0, 0.0, 0.0), 0.0, 0.0)
        self.assertEqual(ctx.exception.code, 'no-trapping')

    def test_scan_rows(self):
        rows = trapped_scan(make_params(1.0, 0.05, 0.0), (-1.0,), np.linspace(-2.0, 2.0, 5))
        self.assertEqual(len(rows), 5)
        self.assertTrue(all(len(row) == 5 for row in rows))


class GeodesicFlowTest(SimpleTestCase):
    """
    Hamiltonian integration of null geodesics
    """

    def setUp(self):
        self.kerr = make_params(1.0, 0.0, 0.0)

    def _circular(self, r):
        eta = math.sqrt(trapping_function(self.kerr, 3.0, -1.0, 0.0))
        return make_state(self.kerr, (0.0, r, math.pi / 2, 0.0), (-1.0, 0.0, 0.0, eta))

    def test_photon_orbit_period(self):
        """One revolution of the photon sphere takes 2π√27 M of coordinate time"""
        exact = 2.0 * math.pi * math.sqrt(27.0)
        self.assertLess(abs(photon_orbit_period(self.kerr) - exact) / exact, 1e-8)

    def test_trapped_orbit_stays(self):
        trajectory = geodesic_flow(self.kerr, self._circular(3.0), 20.0, rtol=1e-13, atol=1e-14)
        self.assertLess(float(np.max(np.abs(trajectory.r - 3.0))), 1e-3)

    def test_perturbed_orbit_escapes(self):
        trajectory = geodesic_flow(self.kerr, self._circular(3.003), 200.0)
        self.assertGreater(escape_rate(trajectory, 3.0), 0.0)

    def test_carter_constant_is_conserved(self):
        params = make_params(1.0, 0.05, 1e-3)
        state = null_state_at(params, 6.0, math.pi / 3, -1.0, 2.0)
        trajectory = geodesic_flow(params, state, 100.0, dense_points=201)
        self.assertLess(trajectory.drift()['Q'], 1e-9)
        self.assertAlmostEqual(state.conserved['H'], 0.0, places=12)

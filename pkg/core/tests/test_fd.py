# core/tests/test_fd.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.cutoffs import band, chi_zero, smoothstep
from core.fd import derivative, diff_axis, diff_full, fitted_order, kreiss_oliger, partial


class StencilTest(SimpleTestCase):
    """
    Finite-difference stencils and the order fit
    """

    def test_centered_derivative_converges(self):
        """Second- and fourth-order stencils show their nominal order on sin"""
        steps = np.array([0.1, 0.05, 0.025])
        for order in (2, 4):
            errors = [abs(derivative(np.sin, 0.7, h, order=order) - math.cos(0.7)) for h in steps]
            self.assertAlmostEqual(fitted_order(steps, errors), order, delta=0.2)

    def test_partial_picks_the_argument(self):
        value = partial(lambda x, y: x ** 2 * y, (3.0, 2.0), 1, 1e-3)
        self.assertAlmostEqual(float(value), 9.0, places=8)

    def test_diff_full_is_exact_on_quartics(self):
        """Every node, edges included, differentiates degree-4 polynomials exactly"""
        x = np.linspace(0.0, 1.0, 11)
        h = x[1] - x[0]
        values = 1.0 + x - 2.0 * x ** 2 + x ** 3 - 0.5 * x ** 4
        expected = 1.0 - 4.0 * x + 3.0 * x ** 2 - 2.0 * x ** 3
        np.testing.assert_allclose(diff_full(values, h), expected, atol=1e-11)

    def test_diff_axis_trims(self):
        values = np.tile(np.arange(10.0), (3, 1))
        out = diff_axis(values, 1.0, axis=1)
        self.assertEqual(out.shape, (3, 6))
        np.testing.assert_allclose(out, 1.0)

    def test_too_few_points(self):
        with self.assertRaises(ValueError):
            diff_full(np.arange(4.0), 1.0)

    def test_kreiss_oliger_annihilates_quintics(self):
        """The sixth difference vanishes on polynomials of degree ≤ 5 and at the edges"""
        x = np.linspace(-1.0, 1.0, 15)
        out = kreiss_oliger(x ** 5 - x ** 2, 0.02, x[1] - x[0])
        np.testing.assert_allclose(out, 0.0, atol=1e-10)

    def test_kreiss_oliger_damps_the_grid_mode(self):
        """The sawtooth mode is pushed back towards zero"""
        u = (-1.0) ** np.arange(20)
        out = kreiss_oliger(u, 0.1, 1.0)
        self.assertTrue(np.all(out[3:-3] * u[3:-3] < 0))

    def test_fitted_order_of_exact_data(self):
        self.assertEqual(fitted_order([0.1, 0.05], [0.0, 0.0]), math.inf)


class CutoffTest(SimpleTestCase):
    """
    Quintic smoothstep and the bands built from it
    """

    def test_smoothstep_endpoints(self):
        value, d1, d2 = smoothstep(np.array([-1.0, 0.0, 0.5, 1.0, 2.0]))
        np.testing.assert_allclose(value, [0.0, 0.0, 0.5, 1.0, 1.0])
        np.testing.assert_allclose(d1[[0, 1, 3, 4]], 0.0)
        np.testing.assert_allclose(d2[[0, 1, 3, 4]], 0.0)
        self.assertAlmostEqual(float(d1[2]), 1.875)

    def test_band_derivative(self):
        """∂_rχ matches a centered difference of χ"""
        r = np.linspace(9.2, 10.8, 9)
        _, d1, _ = band(r, 9.0, 11.0)
        numeric = (band(r + 1e-6, 9.0, 11.0)[0] - band(r - 1e-6, 9.0, 11.0)[0]) / 2e-6
        np.testing.assert_allclose(d1, numeric, atol=1e-7)

    def test_chi_zero_is_even(self):
        x = np.array([0.5, 1.5, 2.5])
        np.testing.assert_allclose(chi_zero(x)[0], chi_zero(-x)[0])
        np.testing.assert_allclose(chi_zero(x)[0], [0.0, 0.5, 1.0])

# core/tests/test_kerrlimit.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.geometry import make_params
from core.kerrlimit import (
    compact_sets,
    compare,
    kerr_counterpart,
    non_uniformity_witness,
    pi_lambda,
    random_traceless,
    transition_determinant,
    transition_inverse_residual,
)


class ProjectionTest(SimpleTestCase):
    """
    Π_Λ carries traceless Kerr tensors to traceless Kerr–de Sitter tensors
    """

    def setUp(self):
        self.rng = np.random.default_rng(31)
        self.params = make_params(1.0, 0.05, 1e-3)
        self.r = np.array([3.0, 6.0, 12.0])
        self.theta = np.array([0.4, 1.5, 2.7])

    def test_counterpart(self):
        kerr = kerr_counterpart(self.params)
        self.assertEqual(kerr.Lambda, 0.0)
        self.assertEqual(kerr.r0, self.params.r0)
        self.assertEqual((kerr.M, kerr.a), (self.params.M, self.params.a))

    def test_random_tensors_are_normalized(self):
        psi = random_traceless(self.rng, (5,))
        np.testing.assert_allclose(psi[..., 0, 0] + psi[..., 1, 1], 0.0, atol=1e-15)
        np.testing.assert_allclose(np.linalg.norm(psi, axis=(-2, -1)), 1.0)

    def test_identity_without_lambda(self):
        kerr = make_params(1.0, 0.05, 0.0)
        psi = random_traceless(self.rng, (3,))
        np.testing.assert_array_equal(pi_lambda(psi, kerr, self.r, self.theta), psi)

    def test_image_is_symmetric_and_traceless(self):
        out = pi_lambda(random_traceless(self.rng, (3,)), self.params, self.r, self.theta)
        np.testing.assert_allclose(out[..., 0, 0] + out[..., 1, 1], 0.0, atol=1e-14)
        np.testing.assert_allclose(out[..., 0, 1], out[..., 1, 0], atol=1e-14)


class ComparisonTest(SimpleTestCase):
    """
    Differences between Kerr–de Sitter and Kerr in the shared chart
    """

    def test_compact_sets(self):
        self.assertEqual(compact_sets([1, 2]), [(2.0, (-1.0, 1.0)), (4.0, (-2.0, 2.0))])

    def test_transition_matrix_is_invertible(self):
        params = make_params(1.0, 0.05, 1e-3)
        self.assertLess(transition_inverse_residual(params, np.array([3.0, 8.0, 20.0])), 1e-10)

    def test_first_order_in_lambda(self):
        """On a fixed compact set every difference is O(Λ)"""
        result = compare(1.0, 0.05, [1e-5, 1e-4, 1e-3])
        for field in ('metric_diff', 'frame_transition_residual'):
            self.assertGreaterEqual(min(result['orders'][field]), 0.9, field)
        self.assertEqual(len(result['rows']), 3)
        self.assertEqual(sorted(result['reports']), [1e-5, 1e-4, 1e-3])

    def test_convergence_is_not_uniform(self):
        """‖C_Λ − C_0‖ up to r = Λ^{−1/2} does not shrink with Λ"""
        for Lambda in (1e-4, 1e-5):
            self.assertGreaterEqual(non_uniformity_witness(1.0, 0.05, Lambda), 0.1, Lambda)
        self.assertTrue(math.isfinite(non_uniformity_witness(1.0, 0.0, 1e-3)))

    def test_transition_determinant_is_continuous_in_lambda(self):
        r = np.array([3.0, 8.0])
        det0 = transition_determinant(make_params(1.0, 0.05, 0.0), r)
        det = transition_determinant(make_params(1.0, 0.05, 1e-6), r)
        self.assertTrue(np.all(np.abs(det0) > 0.0))
        np.testing.assert_allclose(det, det0, rtol=1e-3)

# core/tests/test_frames.py
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import KdsError
from core.fd import fitted_order
from core.frames import (
    FRAME_KINDS,
    NULL_PAIRING,
    connection_fd_oracle,
    deformation,
    deformation_fd,
    frak_j_identities,
    frame_at,
    frame_table,
    frame_vectors_bl,
    inverse_metric_global,
    metric_global,
    null_pairing,
    tilde_T_vector,
    weyl_P,
)
from core.geometry import make_params, metric_bl
from core.multipliers import redshift_multiplier

RICCI_KEYS = ('tr_chi', 'atr_chi', 'tr_chib', 'atr_chib', 'eta', 'etab', 'zeta', 'xi', 'xib', 'omega', 'omegab')


class FrameVectorsTest(SimpleTestCase):
    """
    Null frames of the three kinds in the global chart
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.r = np.array([3.0, 6.0, 9.5, 14.0, 25.0])
        self.theta = np.array([0.4, 1.0, math.pi / 2, 2.0, 2.7])

    def test_null_pairing_of_every_kind(self):
        """g(e_μ, e_ν) is the standard null pairing in the exterior"""
        for kind in FRAME_KINDS:
            frame = frame_at(self.params, kind, self.r, self.theta)
            pairing = null_pairing(self.params, frame)
            np.testing.assert_allclose(pairing, np.broadcast_to(NULL_PAIRING, pairing.shape), atol=1e-9)

    def test_global_frame_crosses_the_horizons(self):
        """The global chart metric is regular and invertible on the whole domain"""
        r = np.linspace(self.params.r_min, self.params.r_max, 41)
        g = metric_global(self.params, r, 1.1)
        product = np.einsum('...ij,...jk->...ik', g, inverse_metric_global(self.params, r, 1.1))
        np.testing.assert_allclose(product, np.broadcast_to(np.eye(4), product.shape), atol=1e-8)

    def test_outgoing_frame_is_singular_inside_the_event_horizon(self):
        with self.assertRaises(KdsError) as ctx:
            frame_at(self.params, 'outgoing', 0.98 * self.params.r_event, 1.0)
        self.assertEqual(ctx.exception.code, 'frame-singular')

    def test_ingoing_frame_is_singular_beyond_the_cosmological_horizon(self):
        with self.assertRaises(KdsError) as ctx:
            frame_at(self.params, 'ingoing', 1.02 * self.params.r_cosmo, 1.0)
        self.assertEqual(ctx.exception.code, 'frame-singular')

    def test_frame_table_is_plain_data(self):
        table = frame_table(self.params, 'global', 6.0, 1.0)
        self.assertEqual(table['kind'], 'global')
        self.assertEqual(len(table['e4']), 4)
        self.assertIsInstance(table['ricci']['tr_chi'], float)

    def test_boyer_lindquist_components(self):
        """Outgoing and ingoing frames keep the null pairing in Boyer–Lindquist components"""
        g = metric_bl(self.params, self.r, self.theta)
        for kind in ('outgoing', 'ingoing'):
            E = np.stack(frame_vectors_bl(self.params, kind, self.r, self.theta), axis=-2)
            pairing = np.einsum('...mi,...ij,...nj->...mn', E, g, E)
            np.testing.assert_allclose(pairing, np.broadcast_to(NULL_PAIRING, pairing.shape), atol=1e-9)
        with self.assertRaises(KdsError) as ctx:
            frame_vectors_bl(self.params, 'global', self.r, self.theta)
        self.assertEqual(ctx.exception.code, 'coordinate-singular')

    def test_weyl_P(self):
        """P = −2M/q³ in every frame"""
        q = self.r + 1j * self.params.a * np.cos(self.theta)
        np.testing.assert_allclose(weyl_P(self.params, self.r, self.theta), -2.0 / q ** 3, rtol=1e-14)
        weyl = frame_at(self.params, 'ingoing', self.r, self.theta).weyl
        np.testing.assert_array_equal(weyl['rho_dual'], weyl['P'].imag)


class ConnectionOracleTest(SimpleTestCase):
    """
    Closed-form Ricci coefficients against finite differences of the metric
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.r = np.array([3.5, 8.0, 10.3, 20.0])
        self.theta = np.array([0.7, 1.3, 2.2, math.pi / 2])

    def _error(self, kind, h):
        closed = frame_at(self.params, kind, self.r, self.theta).ricci
        oracle = connection_fd_oracle(self.params, kind, self.r, self.theta, h)
        return max(float(np.max(np.abs(getattr(closed, key) - oracle[key]))) for key in RICCI_KEYS)

    def test_global_frame_coefficients(self):
        self.assertLess(self._error('global', 1e-4), 1e-6)

    def test_outgoing_frame_coefficients(self):
        self.assertLess(self._error('outgoing', 1e-4), 1e-6)

    def test_second_order(self):
        """Halving the step quarters the oracle error"""
        steps = np.array([1e-3, 5e-4, 2.5e-4])
        errors = [self._error('global', h) for h in steps]
        if min(errors) > 1e-11:
            self.assertGreater(fitted_order(steps, errors), 1.8)


class FrakJTest(SimpleTestCase):
    """
    The 𝔍 one-form identities
    """

    def test_identities_hold(self):
        params = make_params(1.0, 0.08, 1e-3)
        residuals = frak_j_identities(params, np.array([4.0, 12.0]), np.array([0.9, 2.1]))
        for name, value in residuals.items():
            self.assertLess(float(np.max(value)), 1e-6, name)


class DeformationTest(SimpleTestCase):
    """
    Closed-form deformation tensors against the Lie-derivative oracle
    """

    def setUp(self):
        self.params = make_params(1.0, 0.05, 1e-3)
        self.r = np.array([2.55, 3.5, 3.6, 6.0])
        self.theta = np.array([0.8, 1.4, math.pi / 2, 2.3])

    def test_killing_field_has_no_deformation(self):
        """∂_τ is Killing"""
        T = lambda r, theta: np.broadcast_to([1.0, 0.0, 0.0, 0.0], np.shape(r) + (4,))
        pi = deformation_fd(self.params, T, self.r, self.theta)
        self.assertLess(float(np.max(np.abs(pi))), 1e-7)

    def test_tilde_T(self):
        """T̃ deforms only through the r-dependence of its Φ coefficient"""
        closed = deformation(self.params, 'T-tilde', self.r, self.theta)
        oracle = deformation_fd(self.params, lambda x, y: tilde_T_vector(self.params, x, y), self.r, self.theta,
                                h=1e-5)
        np.testing.assert_allclose(closed, oracle, atol=1e-6)

    def test_unknown_spec(self):
        with self.assertRaises(KdsError) as ctx:
            deformation(self.params, 'Z', self.r, self.theta)
        self.assertEqual(ctx.exception.code, 'support')

    def test_redshift_field(self):
        """Y0 matches the Lie derivative of the uncut redshift vector field"""
        r = np.array([2.2, 3.0])
        theta = np.array([1.0, 2.0])
        closed = deformation(self.params, 'Y0', r, theta, kind='ingoing')
        Y = redshift_multiplier(self.params, cutoff=False).X
        oracle = deformation_fd(self.params, Y, r, theta, kind='ingoing', h=1e-5)
        self.assertLess(float(np.max(np.abs(closed - oracle)) / np.max(np.abs(oracle))), 1e-6)

    def test_redshift_field_needs_the_ingoing_frame(self):
        with self.assertRaises(KdsError) as ctx:
            deformation(self.params, 'Y0', self.r, self.theta, kind='global')
        self.assertEqual(ctx.exception.code, 'support')

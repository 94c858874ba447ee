# core/management/commands/teukolsky.py
import math

import numpy as np

from core.evolve import load_solution
from core.management.suite_command import SuiteCommand
from core.teukolsky import grw_residual, rw_coeffs


class Command(SuiteCommand):
    """
    Teukolsky operator, the factorized transform and the gRW equation.

    Run with:
    python manage.py teukolsky verify
    python manage.py teukolsky rw-coeffs --a 0.05 --lambda 1e-3 --r 6 --theta 1.0
    python manage.py teukolsky grw-residual --from out/solution.npz
    """

    help = 'Teukolsky / generalized Regge-Wheeler coefficients and residuals'
    suite = 'teukolsky'

    def add_actions(self, actions):
        coeffs = actions.add_parser('rw-coeffs', help='gRW coefficients at one point')
        self.add_background(coeffs)
        coeffs.add_argument('--r', type=float, default=6.0)
        coeffs.add_argument('--theta', type=float, default=math.pi / 3)
        residual = actions.add_parser('grw-residual', help='Residual of a saved mode solution')
        residual.add_argument('--from', dest='source', required=True, help='.npz written by "evolve run"')
        residual.add_argument('--theta', type=float, default=1.0)

    def action_rw_coeffs(self, config, options):
        params = self.background(options)
        c = rw_coeffs(params, options['r'], options['theta'])
        as_pair = lambda z: [float(np.real(z)), float(np.imag(z))]
        payload = {
            'V': float(np.real(c.V)),
            'V_tilde': as_pair(c.V_tilde),
            'V_tilde_closed': as_pair(c.V_tilde_closed),
            'V0_bound': float(np.real(c.V0_bound)),
            'Z': np.real(c.Z).tolist(),
            'W': {key: np.abs(getattr(c, key)).tolist() for key in ('W3', 'W4', 'Wh', 'W0')},
        }
        self.emit_json(payload, options.get('out'), 'rw_coeffs')

    def action_grw_residual(self, config, options):
        value = grw_residual(load_solution(options['source']), theta=options['theta'])
        self.stdout.write(self.style.SUCCESS(f'gRW residual {value:.6e}'))

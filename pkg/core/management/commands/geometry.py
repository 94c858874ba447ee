# core/management/commands/geometry.py
import math

import numpy as np

from core.geometry import aux_scalars, carter_residual, metric_bl
from core.frames import inverse_metric_global, metric_global
from core.management.suite_command import SuiteCommand


class Command(SuiteCommand):
    """
    Black-hole parameters, horizons and metric data.

    Run with:
    python manage.py geometry dump --M 1 --a 0.05 --lambda 1e-3 --r 4 --theta 1.0
    python manage.py geometry verify
    """

    help = 'Kerr-de Sitter horizons, metric and Carter decomposition'
    suite = 'geometry'

    def add_actions(self, actions):
        dump = actions.add_parser('dump', help='Horizons and metric at one point')
        self.add_background(dump)
        dump.add_argument('--r', type=float, default=4.0)
        dump.add_argument('--theta', type=float, default=math.pi / 3)

    def action_dump(self, config, options):
        params = self.background(options)
        r, theta = options['r'], options['theta']
        aux = aux_scalars(params, r, theta)
        payload = {
            'params': params.as_dict(),
            'aux': {
                'Delta': float(aux.delta), 'q_abs2': float(aux.q_abs2),
                'kappa': float(aux.kappa), 'upsilon': float(aux.upsilon),
            },
            'metric_global': np.asarray(metric_global(params, r, theta)).tolist(),
            'inverse_metric_global': np.asarray(inverse_metric_global(params, r, theta)).tolist(),
        }
        if aux.delta > 0:
            payload['metric_bl'] = np.asarray(metric_bl(params, r, theta)).tolist()
            payload['carter_residual'] = float(carter_residual(params, r, theta))
        self.emit_json(payload, options.get('out'), 'geometry_dump')

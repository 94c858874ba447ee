# core/management/commands/trapping.py
import json
from pathlib import Path

from core.management.suite_command import SuiteCommand, float_list
from core.trapping import geodesic_flow, make_state, trapped_scan


class Command(SuiteCommand):
    """
    Trapped null geodesics.

    Run with:
    python manage.py trapping scan --a 0.05 --lambda 1e-3 --sigma-grid=-1 --etaphi-grid=-4,-2,0,2,4
    python manage.py trapping trace --init orbit.json
    """

    help = 'Trapping function scans and Hamiltonian geodesic flow'
    suite = 'trapping'

    def add_actions(self, actions):
        scan = actions.add_parser('scan', help='Trapped radius over a frequency grid')
        self.add_background(scan)
        scan.add_argument('--sigma-grid', type=float_list, default=[-1.0])
        scan.add_argument('--etaphi-grid', type=float_list, default=[-4.0, -2.0, 0.0, 2.0, 4.0])
        trace = actions.add_parser('trace', help='Integrate one geodesic')
        trace.add_argument('--init', required=True,
                           help='JSON with M, a, Lambda, position [t,r,θ,φ], momentum [σ,p_r,p_θ,η_φ], length')

    def action_scan(self, config, options):
        params = self.background(options)
        rows = trapped_scan(params, options['sigma_grid'], options['etaphi_grid'])
        self.emit_rows(self.out_dir(config), 'trapping_scan',
                       ('sigma', 'eta_phi', 'r_trap', 'margin', 'hyperbolicity_sign'), rows)

    def action_trace(self, config, options):
        spec = json.loads(Path(options['init']).read_text(encoding='utf-8'))
        params = self.background({'M': spec.get('M', 1.0), 'a': spec.get('a', 0.0), 'Lambda': spec.get('Lambda', 0.0)})
        state = make_state(params, spec['position'], spec['momentum'])
        trajectory = geodesic_flow(params, state, spec.get('length', 100.0 * params.M))
        self.emit_rows(self.out_dir(config), 'trapping_trace',
                       ('s', 't', 'r', 'theta', 'phi', 'p_r', 'p_theta'), trajectory.rows())
        drift = trajectory.drift()
        self.stdout.write(f"event={trajectory.event} Q drift={drift['Q']:.3e} H drift={drift['H']:.3e}")

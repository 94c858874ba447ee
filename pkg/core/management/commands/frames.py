# core/management/commands/frames.py
import math

from core.frames import FRAME_KINDS, frame_table
from core.management.suite_command import SuiteCommand


class Command(SuiteCommand):
    """
    Null frames and their Ricci / connection tables.

    Run with:
    python manage.py frames table --kind global --r 4 --theta 1.0
    python manage.py frames verify --samples 200
    """

    help = 'Principal null frames, Ricci coefficients and finite-difference oracles'
    suite = 'frames'

    def add_actions(self, actions):
        table = actions.add_parser('table', help='Frame tables at one point')
        self.add_background(table)
        table.add_argument('--kind', choices=FRAME_KINDS, default='global')
        table.add_argument('--r', type=float, default=4.0)
        table.add_argument('--theta', type=float, default=math.pi / 3)

    def action_table(self, config, options):
        params = self.background(options)
        self.emit_json(frame_table(params, options['kind'], options['r'], options['theta']),
                       options.get('out'), 'frames_table')

# core/management/commands/coords.py
import math

from core.coords import coords_dump
from core.management.suite_command import SuiteCommand


class Command(SuiteCommand):
    """
    Global coordinates τ, φ̃ and the slice normals.

    Run with:
    python manage.py coords dump --r 4 --theta 1.0
    python manage.py coords verify
    """

    help = 'Horizon-penetrating coordinates, slice timelikeness and normals'
    suite = 'coords'

    def add_actions(self, actions):
        dump = actions.add_parser('dump', help='Coordinate data at one point')
        self.add_background(dump)
        dump.add_argument('--r', type=float, default=4.0)
        dump.add_argument('--theta', type=float, default=math.pi / 3)

    def action_dump(self, config, options):
        params = self.background(options)
        self.emit_json(coords_dump(params, options['r'], options['theta']), options.get('out'), 'coords_dump')

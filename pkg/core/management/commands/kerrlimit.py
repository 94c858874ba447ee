# core/management/commands/kerrlimit.py
from core.kerrlimit import compare
from core.management.suite_command import SuiteCommand, float_list


class Command(SuiteCommand):
    """
    Kerr limit of the global objects on compact sets.

    Run with:
    python manage.py kerrlimit compare --lambdas 1e-5,1e-4,1e-3 --rmax 10
    """

    help = 'Differences between Kerr-de Sitter and Kerr as Lambda goes to zero'
    suite = 'kerrlimit'

    def add_actions(self, actions):
        cmp = actions.add_parser('compare', help='Fitted orders of the Lambda → 0 differences')
        cmp.add_argument('--M', type=float, default=1.0)
        cmp.add_argument('--a', type=float, default=0.0)
        cmp.add_argument('--lambdas', type=float_list, default=[1e-5, 1e-4, 1e-3])
        cmp.add_argument('--rmax', type=float, default=10.0)

    def action_compare(self, config, options):
        result = compare(options['M'], options['a'], options['lambdas'], r_max=options['rmax'] * options['M'],
                         seed=config['run']['seed'])
        self.emit_rows(self.out_dir(config), 'kerrlimit_compare',
                       ('Lambda', 'r_max', 'metric_diff', 'frame_transition_residual', 'projection_defect',
                        'ricci_diff'), result['rows'])
        for field, orders in result['orders'].items():
            self.stdout.write(f'  {field:<28} order {min(orders):.3f}')

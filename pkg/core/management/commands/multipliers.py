# core/management/commands/multipliers.py
from core.geometry import make_params
from core.management.suite_command import SuiteCommand, float_list
from core.multipliers import CERTIFY_COLUMNS, FAMILIES, certify


class Command(SuiteCommand):
    """
    Multiplier certification: energy, Morawetz, redshift and r^p.

    Run with:
    python manage.py multipliers certify --family morawetz --lambda-grid 0,1e-4,1e-3,1e-2
    python manage.py multipliers verify
    """

    help = 'Pointwise coercivity of the multiplier currents'
    suite = 'multipliers'

    def add_actions(self, actions):
        cert = actions.add_parser('certify', help='Certification rows for one family')
        cert.add_argument('--family', choices=FAMILIES, required=True)
        cert.add_argument('--p', type=float, default=1.0)
        cert.add_argument('--M', type=float, default=1.0)
        cert.add_argument('--a', type=float, default=0.0)
        cert.add_argument('--lambda-grid', type=float_list, default=[0.0, 1e-4, 1e-3, 1e-2])
        cert.add_argument('--n-r', type=int, default=12)

    def action_certify(self, config, options):
        rows, worst = [], float('inf')
        for Lambda in sorted(options['lambda_grid']):
            params = make_params(options['M'], options['a'], Lambda)
            certified = certify(params, options['family'], n_r=options['n_r'], p=options['p'])
            rows.extend((Lambda, *row) for row in certified)
            worst = min([worst] + [row[2] for row in certified])
        out = self.out_dir(config)
        self.emit_rows(out, f"certify_{options['family']}", ('Lambda',) + CERTIFY_COLUMNS, rows)
        style = self.style.SUCCESS if worst >= 0 else self.style.ERROR
        self.stdout.write(style(f'Worst margin {worst:.4e}'))

# core/management/suite_command.py
import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import KdsError
from core.geometry import make_params
from core.reports import write_csv, write_json
from core.serializers import load_run_config
from core.suites import run_suite

logger = logging.getLogger('core.commands')


class SuiteCommand(BaseCommand):
    """
    Base for the per-module commands.

    Adds the global flags (--config, --out, --seed, --threads) and the
    ``verify`` action, which runs the module's suite. Subclasses set
    ``suite`` and add their own actions in ``add_actions``; an action
    ``foo-bar`` is handled by ``action_foo_bar(config, options)``.
    Run-config problems exit with status 2, failed checks with status 1.
    """

    suite = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help='TOML run configuration')
        parser.add_argument('--out', help='Output directory (default KDS_OUTPUT_DIR)')
        parser.add_argument('--seed', type=int, help='Random seed')
        parser.add_argument('--threads', type=int, help='Worker threads for sweeps')
        actions = parser.add_subparsers(dest='action', required=True)
        verify = actions.add_parser('verify', help=f'Run the {self.suite} suite')
        verify.add_argument('--samples', type=int, help='Random samples per background')
        self.add_actions(actions)

    def add_actions(self, actions):
        pass

    @staticmethod
    def add_background(parser, lambda_default=0.0):
        parser.add_argument('--M', type=float, default=1.0)
        parser.add_argument('--a', type=float, default=0.0)
        parser.add_argument('--lambda', dest='Lambda', type=float, default=lambda_default)

    @staticmethod
    def background(options):
        return make_params(options['M'], options['a'], options['Lambda'])

    def load_config(self, options):
        config = load_run_config(options.get('config'))
        for key in ('out', 'seed', 'threads'):
            if options.get(key) is not None:
                config['run'][key] = options[key]
        if options.get('samples'):
            config['grid']['samples'] = options['samples']
        return config

    def out_dir(self, config):
        out = Path(config['run']['out'])
        out.mkdir(parents=True, exist_ok=True)
        return out

    def handle(self, *args, **options):
        try:
            config = self.load_config(options)
        except KdsError as exc:
            raise CommandError(str(exc), returncode=2)
        action = options['action'].replace('-', '_')
        try:
            getattr(self, f'action_{action}')(config, options)
        except KdsError as exc:
            logger.warning("%s %s failed: %s", self.suite or 'all', action, exc)
            raise CommandError(str(exc), returncode=2 if exc.code == 'config' else 1)

    # ── Actions ─────────────────────────────────────────────────────────

    def action_verify(self, config, options):
        self.run_and_report(config, [self.suite])

    def run_and_report(self, config, names):
        reports = run_suite(config, names)
        self.summarize(config, reports)
        return reports

    def summarize(self, config, reports):
        """Print one line per check; CommandError(returncode=1) if any failed."""
        self.stdout.write('\n' + self.style.SUCCESS('═' * 60))
        failed = 0
        for report in reports:
            for check in report.checks:
                style = self.style.SUCCESS if check.passed else self.style.ERROR
                self.stdout.write(style(f"  {'PASS' if check.passed else 'FAIL'}  {check.name:<40} {check.value:.4e}"))
            failed += sum(not check.passed for check in report.checks)
        self.stdout.write(self.style.SUCCESS('═' * 60))
        self.stdout.write(f"• Reports written to {config['run']['out']}")
        if failed:
            raise CommandError(f"{failed} check(s) failed", returncode=1)
        self.stdout.write(self.style.SUCCESS('  All checks passed  ') + '\n')

    def emit_json(self, data, out=None, name=None):
        """Print ``data`` and, with an output directory, write it to ``name``.json."""
        text = json.dumps(data, indent=2, sort_keys=True, default=str)
        self.stdout.write(text)
        if out and name:
            path = write_json(Path(out) / f'{name}.json', data)
            self.stdout.write(self.style.SUCCESS(f'Wrote {path}'))

    def emit_rows(self, out, name, columns, rows):
        path = write_csv(Path(out) / f'{name}.csv', columns, rows)
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(rows)} rows to {path}'))
        return path


def float_list(text):
    """Comma-separated floats for argparse."""
    return [float(item) for item in text.split(',') if item.strip()]

# core/management/commands/all.py
from core.management.suite_command import SuiteCommand
from core.reports import write_json
from core.serializers import SUITE_ORDER, SuiteReportSerializer
from core.suites import run_suite


class Command(SuiteCommand):
    """
    Every suite in dependency order with an aggregate summary.

    Run with:
    python manage.py all --config run.toml --out out/
    """

    help = 'Run all verification suites'

    def add_arguments(self, parser):
        parser.add_argument('--config', help='TOML run configuration')
        parser.add_argument('--out', help='Output directory (default KDS_OUTPUT_DIR)')
        parser.add_argument('--seed', type=int, help='Random seed')
        parser.add_argument('--threads', type=int, help='Worker threads for sweeps')
        parser.add_argument('--suites', nargs='*', choices=SUITE_ORDER, help='Subset of suites')

    def handle(self, *args, **options):
        options['action'] = 'all'
        return super().handle(*args, **options)

    def action_all(self, config, options):
        reports = run_suite(config, options.get('suites') or config['suite']['names'])
        aggregate = {
            'passed': all(report.passed for report in reports),
            'suites': [SuiteReportSerializer(report).data for report in reports],
        }
        for report in reports:
            if 'uniformity_ratio' in report.summary:
                aggregate['uniformity_ratio'] = report.summary['uniformity_ratio']
        path = write_json(self.out_dir(config) / 'all.json', aggregate)
        self.stdout.write(self.style.SUCCESS(f'Aggregate written to {path}'))
        self.summarize(config, reports)

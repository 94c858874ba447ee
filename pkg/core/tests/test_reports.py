# core/tests/test_reports.py
import json
import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.decorators import timed_check
from core.exceptions import KdsError
from core.models import CheckRecord, SuiteReport
from core.reports import emit_tables, format_cell, write_csv, write_json
from core.serializers import (
    ACCEPTANCE_LAMBDAS,
    SUITE_ORDER,
    SuiteReportSerializer,
    load_run_config,
    locate_key,
    validate_run_config,
)
from core.signals import suite_completed
from core.suites import run_suite


class RunConfigTest(SimpleTestCase):
    """
    Validation of the TOML run configuration
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _write(self, text):
        path = Path(self.tmp.name) / 'run.toml'
        path.write_text(text, encoding='utf-8')
        return path

    def test_defaults(self):
        config = load_run_config()
        self.assertEqual(config['params']['lambdas'], list(ACCEPTANCE_LAMBDAS))
        self.assertEqual(config['params']['Lambda'], 0.0)
        self.assertEqual(config['suite']['names'], list(SUITE_ORDER))
        self.assertEqual(config['grid']['n_r'], 201)

    def test_single_lambda(self):
        config = validate_run_config({'params': {'Lambda': 1e-3}})
        self.assertEqual(config['params']['lambdas'], [1e-3])

    def test_spin_must_be_below_mass(self):
        with self.assertRaises(KdsError) as ctx:
            validate_run_config({'params': {'M': 1.0, 'a': 1.0}})
        self.assertEqual(ctx.exception.code, 'config')
        self.assertIn('params.a', str(ctx.exception))

    def test_lambdas_must_be_sorted(self):
        with self.assertRaises(KdsError) as ctx:
            validate_run_config({'params': {'lambdas': [1e-3, 0.0]}})
        self.assertIn('params.lambdas', str(ctx.exception))

    def test_error_names_the_line(self):
        path = self._write('[params]\nM = 1.0\na = 2.0\n\n[grid]\nn_r = 201\n')
        with self.assertRaises(KdsError) as ctx:
            load_run_config(path)
        self.assertIn('params.a (line 3)', str(ctx.exception))

    def test_malformed_toml(self):
        with self.assertRaises(KdsError) as ctx:
            load_run_config(self._write('[params\nM = 1\n'))
        self.assertEqual(ctx.exception.code, 'config')

    def test_suites_run_in_dependency_order(self):
        config = validate_run_config({'suite': {'names': ['kerrlimit', 'geometry', 'evolve']}})
        self.assertEqual(config['suite']['names'], ['geometry', 'evolve', 'kerrlimit'])

    def test_unknown_suite(self):
        with self.assertRaises(KdsError):
            validate_run_config({'suite': {'names': ['bogus']}})
        with self.assertRaises(KdsError) as ctx:
            run_suite(load_run_config(), ['bogus'])
        self.assertEqual(ctx.exception.code, 'config')

    def test_locate_key(self):
        text = '[run]\nseed = 1\n[params]\nseed = 2\n'
        self.assertEqual(locate_key(text, 'params.seed'), 4)
        self.assertIsNone(locate_key(text, 'grid.n_r'))


class TableWriterTest(SimpleTestCase):
    """
    CSV, gnuplot and JSON output
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = Path(self.tmp.name)

    def test_format_cell(self):
        self.assertEqual(format_cell(True), 'true')
        self.assertEqual(format_cell(1.5), '1.500000000000e+00')
        self.assertEqual(format_cell(3), '3.000000000000e+00')
        self.assertEqual(format_cell('geometry.carter'), 'geometry.carter')
        self.assertEqual(format_cell(float('nan')), 'nan')

    def test_write_csv(self):
        path = write_csv(self.out / 't.csv', ('a', 'b'), [(1.0, False)])
        self.assertEqual(path.read_text(encoding='utf-8'), 'a,b\n1.000000000000e+00,false\n')

    def test_write_json(self):
        path = write_json(self.out / 't.json', {'b': np.arange(2), 'a': math.inf, 'c': [math.nan]})
        text = path.read_text(encoding='utf-8')
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(json.loads(text), {'a': 'inf', 'b': [0, 1], 'c': ['nan']})

    def test_emit_tables(self):
        report = SuiteReport(suite='evolve', tables={
            'sweep': (('Lambda', 'C'), [(1e-2, 2.0), (0.0, 1.0)]),
        })
        report.add(CheckRecord('evolve.zero_data', 0.0, 0.0, True))
        names = sorted(path.name for path in emit_tables(report, self.out))
        self.assertEqual(names, ['evolve_checks.csv', 'sweep.csv', 'sweep.dat'])
        lines = (self.out / 'sweep.dat').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], '# Lambda C')
        self.assertTrue(lines[1].startswith('0.000000000000e+00'))


class CheckRecordingTest(SimpleTestCase):
    """
    timed_check, the report serializer and the suite_completed receiver
    """

    def test_pass_and_fail(self):
        self.assertTrue(timed_check('x', 1.0)(lambda: 0.5)().passed)
        self.assertFalse(timed_check('x', 1.0, 'ge')(lambda: 0.5)().passed)
        record = timed_check('x', 1.0)(lambda: (2.0, 'too big'))()
        self.assertEqual((record.passed, record.detail), (False, 'too big'))

    def test_error_becomes_nan(self):
        def failing():
            raise KdsError('resolution', "Not enough nodes")

        record = timed_check('x', 1.0)(failing)()
        self.assertTrue(math.isnan(record.value))
        self.assertFalse(record.passed)
        self.assertTrue(record.detail.startswith('resolution'))

    def test_unknown_comparison(self):
        with self.assertRaises(ValueError):
            timed_check('x', 1.0, 'eq')

    def test_serializer_renders_nan(self):
        report = SuiteReport(suite='trapping', summary={'rate': math.nan}, tables={'b': ((), []), 'a': ((), [])})
        report.add(CheckRecord('trapping.escape_rate', math.nan, 0.0, False, 'no-trapping: x'))
        data = SuiteReportSerializer(report).data
        self.assertEqual(data['checks'][0]['value'], 'nan')
        self.assertEqual(data['summary']['rate'], 'nan')
        self.assertEqual(data['tables'], ['a', 'b'])
        self.assertFalse(data['passed'])

    def test_suite_completed_writes_json(self):
        report = SuiteReport(suite='geometry')
        report.add(CheckRecord('geometry.carter', 1e-14, 1e-10, True))
        with tempfile.TemporaryDirectory() as tmp:
            suite_completed.send(sender=None, report=report, out=tmp)
            data = json.loads((Path(tmp) / 'geometry.json').read_text(encoding='utf-8'))
            self.assertTrue((Path(tmp) / 'geometry_checks.csv').exists())
        self.assertTrue(data['passed'])
        self.assertEqual(data['checks'][0]['name'], 'geometry.carter')


class CommandTest(SimpleTestCase):
    """
    Management command surface and exit statuses
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.stdout = StringIO()

    def test_geometry_dump(self):
        call_command('geometry', '--out', self.tmp.name, 'dump', '--a', '0.05', '--lambda', '1e-3',
                     '--r', '5', stdout=self.stdout)
        data = json.loads((Path(self.tmp.name) / 'geometry_dump.json').read_text(encoding='utf-8'))
        self.assertGreater(data['aux']['Delta'], 0.0)
        self.assertIn('carter_residual', data)

    def test_negative_mass_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('geometry', 'dump', '--M', '-1', stdout=self.stdout)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('[regime]', str(ctx.exception))

    def test_bad_config_exits_with_two(self):
        path = Path(self.tmp.name) / 'run.toml'
        path.write_text('[grid]\nn_r = 3\n', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            call_command('geometry', '--config', str(path), 'verify', stdout=self.stdout)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('grid.n_r (line 2)', str(ctx.exception))

    @pytest.mark.slow
    def test_geometry_verify(self):
        call_command('geometry', '--out', self.tmp.name, 'verify', '--samples', '20', stdout=self.stdout)
        data = json.loads((Path(self.tmp.name) / 'geometry.json').read_text(encoding='utf-8'))
        self.assertTrue(data['passed'])
        self.assertIn('All checks passed', self.stdout.getvalue())

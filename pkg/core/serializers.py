# core/serializers.py
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from rest_framework import serializers

from .conf import kds_setting
from .exceptions import KdsError

SUITE_ORDER = (
    'geometry', 'frames', 'coords', 'horizontal', 'teukolsky',
    'multipliers', 'trapping', 'evolve', 'kerrlimit',
)

# ΛM² values of the acceptance grid
ACCEPTANCE_LAMBDAS = (0.0, 1e-4, 1e-3, 1e-2)


def _positive(value):
    if not value > 0:
        raise serializers.ValidationError("Must be positive.")
    return value


class ParamsSerializer(serializers.Serializer):
    """
    Background block ``[params]``.

    Either ``Lambda`` (one background) or ``lambdas`` (a sweep, sorted
    ascending) may be given; with neither, the acceptance grid
    ΛM² ∈ {0, 1e-4, 1e-3, 1e-2} is used. ``a`` also selects the spin grid
    {0, a} of the identity suites.
    """

    M = serializers.FloatField(default=1.0, validators=[_positive])
    a = serializers.FloatField(default=0.05, min_value=0.0)
    Lambda = serializers.FloatField(required=False, min_value=0.0)
    lambdas = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)
    delta_H = serializers.FloatField(required=False, validators=[_positive])
    delta_red = serializers.FloatField(required=False, validators=[_positive])
    delta_trap = serializers.FloatField(required=False, validators=[_positive])
    r0 = serializers.FloatField(required=False, validators=[_positive])

    def validate_lambdas(self, value):
        if list(value) != sorted(value):
            raise serializers.ValidationError("Lambda list must be sorted ascending.")
        return value

    def validate(self, data):
        if data['a'] >= data['M']:
            raise serializers.ValidationError({'a': "Must be smaller than M."})
        if 'lambdas' not in data:
            if 'Lambda' in data:
                data['lambdas'] = [data['Lambda']]
            else:
                data['lambdas'] = [x / data['M'] ** 2 for x in ACCEPTANCE_LAMBDAS]
        data.setdefault('Lambda', data['lambdas'][0])
        return data


class SuiteSerializer(serializers.Serializer):
    names = serializers.ListField(
        child=serializers.ChoiceField(choices=SUITE_ORDER + ('all',)), default=lambda: ['all'],
    )

    def validate_names(self, value):
        if 'all' in value:
            return list(SUITE_ORDER)
        # dependency order
        return [name for name in SUITE_ORDER if name in value]


class GridSerializer(serializers.Serializer):
    samples = serializers.IntegerField(default=200, min_value=1)
    fd_step = serializers.FloatField(default=lambda: kds_setting('FD_STEP'), validators=[_positive])
    n_theta = serializers.IntegerField(default=24, min_value=4)
    n_phi = serializers.IntegerField(default=48, min_value=8)
    n_r = serializers.IntegerField(default=201, min_value=9)
    radial_variable = serializers.ChoiceField(choices=('r', 'inverse'), default=lambda: kds_setting('RADIAL_VARIABLE'))
    tau_max = serializers.FloatField(default=40.0, validators=[_positive])
    report_every = serializers.IntegerField(default=10, min_value=1)
    refinements = serializers.IntegerField(default=3, min_value=2)


class RunSerializer(serializers.Serializer):
    seed = serializers.IntegerField(default=lambda: kds_setting('SEED'))
    threads = serializers.IntegerField(default=lambda: kds_setting('THREADS'), min_value=1)
    out = serializers.CharField(default=lambda: kds_setting('OUTPUT_DIR'), allow_blank=True)


class RunConfigSerializer(serializers.Serializer):
    """
    Validates a parsed TOML run configuration.

    ``tolerances`` maps check names to positive floats that override the
    suite defaults.
    """

    params = ParamsSerializer(default=dict)
    suite = SuiteSerializer(default=dict)
    grid = GridSerializer(default=dict)
    tolerances = serializers.DictField(child=serializers.FloatField(validators=[_positive]), default=dict)
    run = RunSerializer(default=dict)

    def to_internal_value(self, data):
        # nested defaults are validated too
        data = {key: value for key, value in data.items()}
        for block in ('params', 'suite', 'grid', 'run'):
            data.setdefault(block, {})
        return super().to_internal_value(data)


def _flatten_errors(errors, prefix=''):
    if isinstance(errors, dict):
        for key, value in errors.items():
            yield from _flatten_errors(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(errors, list) and errors and not isinstance(errors[0], (dict, list)):
        yield prefix, '; '.join(str(e) for e in errors)
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            yield from _flatten_errors(value, f"{prefix}[{index}]")
    else:
        yield prefix, str(errors)


def locate_key(text, dotted):
    """1-based TOML line defining the last component of ``dotted``, or None."""
    parts = dotted.split('.')
    section = parts[0] if len(parts) > 1 else None
    key = re.escape(parts[1] if len(parts) > 1 else parts[0])
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.match(r'^\[([^\]]+)\]', stripped)
        if header:
            current = header.group(1).strip()
            continue
        if current == section and re.match(rf'^{key}\s*=', stripped):
            return number
    return None


def validate_run_config(data, text=''):
    """
    Validate ``data`` and return the cleaned config dict.

    Raises:
        KdsError('config'): with one ``path (line N): message`` entry per
            invalid key.
    """
    serializer = RunConfigSerializer(data=data)
    if serializer.is_valid():
        return serializer.validated_data
    problems = []
    for path, message in _flatten_errors(serializer.errors):
        line = locate_key(text, path) if text else None
        where = f"{path} (line {line})" if line else path
        problems.append(f"{where}: {message}")
    raise KdsError('config', "Invalid run configuration: " + ' | '.join(problems), errors=problems)


def load_run_config(path=None):
    """Parse and validate a TOML run configuration; no path gives the defaults."""
    if path is None:
        return validate_run_config({})
    text = Path(path).read_text(encoding='utf-8')
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise KdsError('config', f"Malformed TOML in {path}: {exc}", line=getattr(exc, 'lineno', None))
    return validate_run_config(data, text)


class CheckRecordSerializer(serializers.Serializer):
    name = serializers.CharField()
    value = serializers.SerializerMethodField()
    bound = serializers.SerializerMethodField()
    passed = serializers.BooleanField()
    detail = serializers.CharField(allow_blank=True)
    wall_time = serializers.FloatField()

    @staticmethod
    def _number(value):
        value = float(value)
        return value if math.isfinite(value) else str(value)

    def get_value(self, obj):
        return self._number(obj.value)

    def get_bound(self, obj):
        return self._number(obj.bound)


class SuiteReportSerializer(serializers.Serializer):
    """
    JSON-ready rendering of a ``SuiteReport``.

    Non-finite check values are rendered as the strings "nan" / "inf".
    Tables are written separately by ``emit_tables``; only their names
    appear here.
    """

    suite = serializers.CharField()
    passed = serializers.BooleanField()
    wall_time = serializers.FloatField()
    environment = serializers.DictField()
    summary = serializers.SerializerMethodField()
    checks = CheckRecordSerializer(many=True)
    tables = serializers.SerializerMethodField()

    def get_summary(self, obj):
        return {key: CheckRecordSerializer._number(value) if isinstance(value, float) else value
                for key, value in obj.summary.items()}

    def get_tables(self, obj):
        return sorted(obj.tables)

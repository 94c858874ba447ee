# core/reports.py
"""
Table writers for suite reports.

Every CSV is UTF-8 with ``\\n`` line endings, a fixed column order and
floats formatted ``%.12e``; every table is also written as a
whitespace-separated ``.dat`` file with a ``#`` header for gnuplot.
"""
import csv
import json
import logging
import math
from pathlib import Path

from .models import NORM_COLUMNS

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12e'
CHECK_COLUMNS = ('name', 'value', 'bound', 'passed', 'wall_time')


def format_cell(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, str):
        return value
    try:
        return FLOAT_FORMAT % float(value)
    except (TypeError, ValueError):
        return str(value)


def write_csv(path, columns, rows):
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
    return Path(path)


def write_dat(path, columns, rows):
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('# ' + ' '.join(columns) + '\n')
        for row in rows:
            handle.write(' '.join(format_cell(cell) for cell in row) + '\n')
    return Path(path)


def write_json(path, data):
    def default(value):
        if hasattr(value, 'tolist'):
            return value.tolist()
        raise TypeError(f"Not JSON serializable: {type(value).__name__}")

    def finite(value):
        if isinstance(value, float) and not math.isfinite(value):
            return str(value)
        if isinstance(value, dict):
            return {k: finite(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [finite(v) for v in value]
        return value

    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        json.dump(finite(data), handle, indent=2, sort_keys=True, default=default)
        handle.write('\n')
    return Path(path)


def norm_rows(norms):
    """NormReport series as rows in ``NORM_COLUMNS`` order."""
    return [report.row() for report in norms]


def _sorted_rows(name, columns, rows):
    # sweep tables are ordered by Λ
    if columns and columns[0] == 'Lambda':
        return sorted(rows, key=lambda row: float(row[0]))
    return list(rows)


def emit_tables(report, out):
    """
    Write the checks table and every attached table of ``report`` into
    ``out``; returns the written paths.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = [write_csv(
        out / f"{report.suite}_checks.csv", CHECK_COLUMNS,
        [(c.name, c.value, c.bound, c.passed, c.wall_time) for c in report.checks],
    )]
    for name, (columns, rows) in sorted(report.tables.items()):
        rows = _sorted_rows(name, columns, rows)
        written.append(write_csv(out / f"{name}.csv", columns, rows))
        written.append(write_dat(out / f"{name}.dat", columns, rows))
    logger.debug("emit_tables %s: %d files", report.suite, len(written))
    return written


def norm_table(norms):
    """(columns, rows) for a NormReport series."""
    return NORM_COLUMNS, norm_rows(norms)

# core/signals.py
import logging
from pathlib import Path

from django.dispatch import Signal, receiver

from .reports import emit_tables, write_json
from .serializers import SuiteReportSerializer

logger = logging.getLogger(__name__)

# Sent by run_suite once per finished suite with ``report`` and ``out``.
suite_completed = Signal()


@receiver(suite_completed)
def write_suite_tables(sender, report, out, **kwargs):
    """Write <out>/<suite>.json, <out>/<suite>_checks.csv and the attached tables."""
    if not out:
        return
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / f"{report.suite}.json", SuiteReportSerializer(report).data)
    written = emit_tables(report, out)
    logger.info("Suite %s: wrote %d files to %s", report.suite, len(written) + 1, out)

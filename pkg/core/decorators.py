# core/decorators.py
import logging
import time
from functools import wraps

from .exceptions import KdsError
from .models import CheckRecord

logger = logging.getLogger('core.suites')


def timed_check(name, bound, compare='le'):
    """
    Decorator that turns a check function into a ``CheckRecord``.

    The wrapped function returns the measured value (or ``(value, detail)``).
    The check passes when ``value <= bound`` (``compare='le'``) or
    ``value >= bound`` (``compare='ge'``). A ``KdsError`` raised by the check
    is recorded as a failure carrying its code instead of propagating.
    """
    if compare not in ('le', 'ge'):
        raise ValueError(f"Unknown comparison {compare!r}")

    def decorator(check_func):
        @wraps(check_func)
        def _wrapped_check(*args, **kwargs):
            start = time.perf_counter()
            detail = ''
            try:
                result = check_func(*args, **kwargs)
            except KdsError as exc:
                value, detail = float('nan'), f"{exc.code}: {exc.messages[0]}"
            else:
                value, detail = result if isinstance(result, tuple) else (result, '')
                value = float(value)
            passed = value <= bound if compare == 'le' else value >= bound
            record = CheckRecord(
                name=name, value=value, bound=float(bound), passed=bool(passed),
                detail=detail, wall_time=time.perf_counter() - start,
            )
            log = logger.info if record.passed else logger.warning
            log("%-40s %s value=%.4e bound=%.4e (%.2fs)", name, 'PASS' if passed else 'FAIL',
                value, bound, record.wall_time)
            return record
        return _wrapped_check
    return decorator

# core/exceptions.py
from django.core.exceptions import ValidationError


ERROR_CODES = frozenset({
    'no-horizon',
    'regime',
    'coordinate-singular',
    'frame-singular',
    'quadrature',
    'resolution',
    'stencil',
    'not-a-solution',
    'support',
    'p-range',
    'degenerate-surface-gravity',
    'no-trapping',
    'escaped-domain',
    'instability',
    'cfl-transport',
    'config',
})


class KdsError(ValidationError):
    """
    Error raised by every numerical routine of the toolkit.

    Subclasses Django's ValidationError so the same object can travel
    through serializer validation, ``clean()`` hooks and management
    commands. ``code`` is always one of ``ERROR_CODES``; ``params`` keeps
    the numbers that triggered the failure for diagnostics.
    """

    def __init__(self, code, message, **params):
        if code not in ERROR_CODES:
            raise ValueError(f"Unknown error code: {code}")
        super().__init__(message, code=code, params=params or None)

    def __str__(self):
        return f"[{self.code}] {self.message}"

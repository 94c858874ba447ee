"""
Django settings for kds_project project.

The project has no web surface and no database: Django provides the
settings layer, application registry, signals and management commands
that drive the verification suites.

Every tunable below can be overridden from the environment (or a .env
file next to manage.py) through python-decouple, e.g.

    KDS_SEED=7 KDS_LOG_LEVEL=DEBUG python manage.py all
"""

from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='kds-insecure-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',
    'core.apps.CoreConfig',
]

DATABASES = {}

REST_FRAMEWORK = {
    # Run-config validation errors are reported per TOML key
    'NON_FIELD_ERRORS_KEY': 'config',
    'COERCE_DECIMAL_TO_STRING': False,
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ────────────────────────────────────────────────
# Kerr–de Sitter verification defaults
# ────────────────────────────────────────────────

KDS = {
    'OUTPUT_DIR': config('KDS_OUTPUT_DIR', default=str(BASE_DIR / 'out')),
    'SEED': config('KDS_SEED', default=20240917, cast=int),
    'THREADS': config('KDS_THREADS', default=1, cast=int),
    'FD_STEP': config('KDS_FD_STEP', default=1e-4, cast=float),

    # Small parameters (the analysis only asks for "sufficiently small/large")
    'DELTA_H': config('KDS_DELTA_H', default=0.05, cast=float),
    'DELTA_RED': config('KDS_DELTA_RED', default=0.1, cast=float),
    'DELTA_TRAP': config('KDS_DELTA_TRAP', default=0.1, cast=float),
    'R0_OVER_M': config('KDS_DEFAULT_R0_OVER_M', default=10.0, cast=float),

    # Multiplier constants
    'REDSHIFT_C1': config('KDS_REDSHIFT_C1', default=100.0, cast=float),
    'MORAWETZ_DELTA': config('KDS_MORAWETZ_DELTA', default=0.1, cast=float),
    'MORAWETZ_DELTA1': config('KDS_MORAWETZ_DELTA1', default=1e-2, cast=float),
    'RP_DELTA': config('KDS_RP_DELTA', default=0.05, cast=float),

    # Evolution
    'R_OUTER_KERR': config('KDS_R_OUTER_KERR', default=60.0, cast=float),
    'RADIAL_VARIABLE': config('KDS_RADIAL_VARIABLE', default='inverse'),
    'INSTABILITY_FACTOR': config('KDS_INSTABILITY_FACTOR', default=1e6, cast=float),
}


# ────────────────────────────────────────────────
# Logging
# ────────────────────────────────────────────────

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['console'],
            'level': config('KDS_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}

# core/apps.py
from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'core'
    verbose_name = 'Kerr-de Sitter verification suites'

    def ready(self):
        # Import signals only when the app is ready
        import core.signals  # noqa: F401  connects write_suite_tables

# core/conf.py
from django.conf import settings


def kds_setting(name):
    """Return one entry of the ``KDS`` settings dict (KeyError if unknown)."""
    return settings.KDS[name]

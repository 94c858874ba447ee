# core/management/commands/horizontal.py
from core.management.suite_command import SuiteCommand


class Command(SuiteCommand):
    """
    Horizontal tensor calculus on the spheres S(τ, r).

    Run with:
    python manage.py horizontal verify --seed 7
    """

    help = 'Sphere quadrature, Hodge operators, duality and Bochner identities'
    suite = 'horizontal'

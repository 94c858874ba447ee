# core/suites.py
"""
Verification suites, one per module, and the ``run_suite`` orchestrator.

Every check is a ``timed_check``-decorated closure returning the measured
value; bounds come from ``CHECK_BOUNDS`` and may be overridden through the
``[tolerances]`` block of the run configuration.
"""
import logging
import math
import platform
import time

import numpy as np

from . import coords, evolve, fd, frames, geometry, horizontal, kerrlimit, multipliers, teukolsky, trapping
from .decorators import timed_check
from .exceptions import KdsError
from .models import SuiteReport
from .reports import norm_table
from .serializers import ACCEPTANCE_LAMBDAS, SUITE_ORDER
from .signals import suite_completed

logger = logging.getLogger(__name__)

RP_EXPONENTS = (0.05, 1.0, 1.95)

# name → (bound, 'le' | 'ge')
CHECK_BOUNDS = {
    'geometry.metric_inverse': (1e-10, 'le'),
    'geometry.carter': (1e-10, 'le'),
    'geometry.frame_null': (1e-10, 'le'),
    'geometry.event_taylor_order': (1.9, 'ge'),
    'geometry.cosmo_taylor_order': (1.9, 'ge'),
    'frames.oracle_residual': (1e-6, 'le'),
    'frames.oracle_order': (1.9, 'ge'),
    'frames.frak_j': (1e-6, 'le'),
    'frames.deformation': (1e-6, 'le'),
    'frames.a_identity': (1e-6, 'le'),
    'coords.timelikeness_violations': (0, 'le'),
    'coords.grad_tau': (1e-10, 'le'),
    'coords.nu_divergence': (1e-4, 'le'),
    'coords.normal_decay_order': (1.9, 'ge'),
    'coords.far_region_spread': (100.0, 'le'),
    'horizontal.quadrature': (1e-12, 'le'),
    'horizontal.duality': (1e-12, 'le'),
    'horizontal.adjointness': (1e-8, 'le'),
    'horizontal.bochner': (1e-8, 'le'),
    'horizontal.frak_j': (1e-8, 'le'),
    'horizontal.commutator': (1e-6, 'le'),
    'teukolsky.factorization': (1e-6, 'le'),
    'teukolsky.imag_potential': (1e-10, 'le'),
    'teukolsky.w_decay_order': (0.9, 'ge'),
    'teukolsky.transform_patch': (1e-5, 'le'),
    'multipliers.energy': (0.0, 'ge'),
    'multipliers.morawetz': (0.0, 'ge'),
    'multipliers.redshift': (0.0, 'ge'),
    'multipliers.rp': (0.0, 'ge'),
    'multipliers.hardy_r3E': (1e-3, 'le'),
    'multipliers.rp_damping': (5e-2, 'le'),
    'multipliers.rp_bulk': (50.0, 'le'),
    'multipliers.rp_star_flux': (0.0, 'ge'),
    'multipliers.redshift_boundary': (0.0, 'ge'),
    'multipliers.tilde_T_current': (1e-6, 'le'),
    'trapping.r_trap': (1e-10, 'le'),
    'trapping.photon_period': (1e-8, 'le'),
    'trapping.trapped_deviation': (1e-3, 'le'),
    'trapping.escape_rate': (0.0, 'ge'),
    'trapping.carter_drift': (1e-9, 'le'),
    'evolve.zero_data': (0.0, 'le'),
    'evolve.T_balance': (1e-6, 'le'),
    'evolve.balance_order': (1.9, 'ge'),
    'evolve.self_convergence': (3.5, 'ge'),
    'evolve.uniformity_ratio': (2.0, 'le'),
    'evolve.window_order': (0.9, 'ge'),
    'evolve.sigma_star_flux': (0.0, 'ge'),
    'evolve.transport_constant': (10.0, 'le'),
    'evolve.transport_ode': (1e-8, 'le'),
    'evolve.grw_residual': (1e-3, 'le'),
    'evolve.grw_residual_spread': (3.0, 'le'),
    'kerrlimit.metric_order': (0.9, 'ge'),
    'kerrlimit.transition_order': (0.9, 'ge'),
    'kerrlimit.witness': (0.1, 'ge'),
}


class SuiteContext:
    """Validated run configuration plus the seeded generator of one suite."""

    def __init__(self, config, suite):
        self.config = config
        self.params_block = config['params']
        self.grid = config['grid']
        self.tolerances = config.get('tolerances', {})
        self.seed = config['run']['seed']
        self.rng = np.random.default_rng([self.seed, SUITE_ORDER.index(suite)])
        self.report = SuiteReport(suite=suite, environment={
            'python': platform.python_version(),
            'numpy': np.__version__,
            'seed': self.seed,
            'threads': config['run']['threads'],
        })

    @property
    def M(self):
        return self.params_block['M']

    @property
    def lambdas(self):
        return tuple(self.params_block['lambdas'])

    @property
    def spins(self):
        return tuple(sorted({0.0, self.params_block['a'] / self.M}))

    def backgrounds(self, spins=None, lambdas=None):
        for a in spins or self.spins:
            for Lambda in lambdas or self.lambdas:
                yield geometry.make_params(self.M, a * self.M, Lambda)

    def check(self, name):
        bound, compare = CHECK_BOUNDS[name]
        bound = self.tolerances.get(name, bound)

        def register(func):
            record = timed_check(name, bound, compare)(func)()
            self.report.add(record)
            return record
        return register


def _relative(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


def _patch_scalar(params, weight=0):
    M = params.M
    return horizontal.PatchField(
        params,
        lambda tau, r, theta, phi: (
            np.exp(-0.1 * ((r - 6.0 * M) / M) ** 2 - 0.2j * tau / M) * (1.0 + 0.3 * np.cos(theta)) * np.cos(phi)
        ),
        weight=weight,
    )


def _patch_spin2(params):
    M = params.M
    return horizontal.PatchField(
        params,
        lambda tau, r, theta, phi: (
            np.exp(-0.2 * ((r - 6.0 * M) / M) ** 2 - 0.1j * tau / M + 2j * phi) * np.sin(theta) ** 2
        ),
        spin=2, weight=2,
    )


# ── Suites ──────────────────────────────────────────────────────────────


def geometry_suite(ctx):
    n = ctx.grid['samples']

    @ctx.check('geometry.metric_inverse')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.domain_samples(params, n, ctx.rng)
            product = np.einsum('...ij,...jk->...ik', frames.metric_global(params, r, theta),
                                frames.inverse_metric_global(params, r, theta))
            worst = max(worst, float(np.max(np.abs(product - np.eye(4)))))
        return worst

    @ctx.check('geometry.carter')
    def _():
        return max(float(np.max(geometry.carter_residual(params, *geometry.exterior_samples(params, n, ctx.rng))))
                   for params in ctx.backgrounds())

    @ctx.check('geometry.frame_null')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.domain_samples(params, n, ctx.rng)
            frame = frames.frame_at(params, 'global', r, theta)
            g = frames.metric_global(params, r, theta)
            scale = np.max(np.abs(g)) * max(np.max(np.abs(frame.e3)), 1.0) * max(np.max(np.abs(frame.e4)), 1.0)
            for u, v, target in ((frame.e3, frame.e3, 0.0), (frame.e4, frame.e4, 0.0), (frame.e3, frame.e4, -2.0)):
                worst = max(worst, float(np.max(np.abs(geometry.metric_norm(g, u, v) - target))) / scale)
        return worst

    lambdas = np.array([1e-4, 2e-4, 4e-4, 8e-4]) / ctx.M ** 2
    horizons = [geometry.make_params(ctx.M, 0.0, L) for L in lambdas]
    taylor = [geometry.sds_horizon_taylor(ctx.M, L) for L in lambdas]

    @ctx.check('geometry.event_taylor_order')
    def _():
        return fd.fitted_order(lambdas, [abs(p.r_event - t[0]) for p, t in zip(horizons, taylor)])

    @ctx.check('geometry.cosmo_taylor_order')
    def _():
        # remainder is O(Λ), i.e. second order in √Λ
        return fd.fitted_order(np.sqrt(lambdas), [abs(p.r_cosmo - t[1]) for p, t in zip(horizons, taylor)])

    ctx.report.tables['geometry_horizons'] = (
        ('a', 'Lambda', 'r_event', 'r_cosmo', 'r0'),
        [(p.a, p.Lambda, p.r_event, p.r_cosmo, p.r0) for p in ctx.backgrounds()],
    )


def frames_suite(ctx):
    n = max(ctx.grid['samples'] // 10, 5)
    keys = ('tr_chi', 'atr_chi', 'tr_chib', 'atr_chib', 'eta', 'etab', 'zeta', 'xi', 'xib', 'omega', 'omegab')

    def oracle_error(params, r, theta, h):
        closed = frames.frame_at(params, 'global', r, theta).ricci
        oracle = frames.connection_fd_oracle(params, 'global', r, theta, h)
        return max(float(np.max(np.abs(getattr(closed, key) - oracle[key]))) for key in keys)

    samples = [(params, geometry.exterior_samples(params, n, ctx.rng, r_max=30.0 * params.M))
               for params in ctx.backgrounds()]

    @ctx.check('frames.oracle_residual')
    def _():
        return max(oracle_error(params, r, theta, 1e-4 * params.M) for params, (r, theta) in samples)

    @ctx.check('frames.oracle_order')
    def _():
        steps = np.array([1e-3, 5e-4, 2.5e-4])
        orders = []
        for params, (r, theta) in samples:
            errors = [oracle_error(params, r, theta, h * params.M) for h in steps]
            if min(errors) > 1e-11:
                orders.append(fd.fitted_order(steps, errors))
        return min(orders) if orders else math.inf

    @ctx.check('frames.frak_j')
    def _():
        return max(max(float(np.max(np.abs(value))) for value in frames.frak_j_identities(params, r, theta).values())
                   for params, (r, theta) in samples)

    @ctx.check('frames.deformation')
    def _():
        worst = 0.0
        for params, (r, theta) in samples:
            closed = frames.deformation(params, 'T-tilde', r, theta, kind='ingoing')
            oracle = frames.deformation_fd(params, lambda x, y: frames.tilde_T_vector(params, x, y), r, theta,
                                           kind='ingoing', h=1e-5 * params.M)
            worst = max(worst, float(np.max(np.abs(closed - oracle))))
        return worst

    @ctx.check('frames.a_identity')
    def _():
        return max(float(np.max(multipliers.a_identity_residual(params, r, theta)))
                   for params, (r, theta) in samples)

    params, (r, theta) = samples[0]
    ctx.report.summary['frame_table'] = frames.frame_table(params, 'global', float(r[0]), float(theta[0]))


def coords_suite(ctx):
    n = ctx.grid['samples'] * 10

    @ctx.check('coords.timelikeness_violations')
    def _():
        total = 0
        for params in ctx.backgrounds():
            counts = coords.timelikeness_violations(params, *geometry.domain_samples(params, n, ctx.rng))
            total += sum(counts.values())
        return total

    @ctx.check('coords.grad_tau')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            if params.gamma != 0.0:
                continue
            lhs, rhs = coords.grad_tau_relation(params, *geometry.domain_samples(params, n // 10, ctx.rng))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    @ctx.check('coords.nu_divergence')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.exterior_samples(params, 20, ctx.rng, r_max=30.0 * params.M)
            div, tr_chi = coords.nu_divergence(params, r, theta)
            worst = max(worst, float(_relative(div, tr_chi)))
        return worst

    @ctx.check('coords.normal_decay_order')
    def _():
        orders = coords.normal_decay(geometry.make_params(ctx.M, ctx.spins[-1] * ctx.M, 0.0))
        return min(orders.values())

    @ctx.check('coords.far_region_spread')
    def _():
        return max(coords.far_region_asymptotics(params)['spread'] for params in ctx.backgrounds(lambdas=(0.0,)))


def horizontal_suite(ctx):
    grid = horizontal.SphereGrid(ctx.grid['n_theta'], ctx.grid['n_phi'])

    @ctx.check('horizontal.quadrature')
    def _():
        return horizontal.quadrature_exactness(grid)

    @ctx.check('horizontal.duality')
    def _():
        return max(horizontal.duality_residuals(ctx.rng).values())

    @ctx.check('horizontal.adjointness')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            sphere = horizontal.SphereSection(params, 4.0 * params.M, grid)
            worst = max(worst, max(horizontal.adjointness_residuals(sphere, ctx.rng).values()))
        return worst

    @ctx.check('horizontal.bochner')
    def _():
        worst = 0.0
        for params in ctx.backgrounds(spins=(0.0,)):
            sphere = horizontal.SphereSection(params, 4.0 * params.M, grid)
            for spin in (0, 1, 2):
                field = sphere.field(horizontal.random_field(grid, spin, ctx.rng), spin=spin)
                result = horizontal.laplacian_bochner_check(field)
                worst = max(worst, abs(result['err']) / max(abs(result['lhs']), 1e-300))
        return worst

    @ctx.check('horizontal.frak_j')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            sphere = horizontal.SphereSection(params, 5.0 * params.M, grid)
            worst = max(worst, max(horizontal.frak_j_checks(sphere).values()))
        return worst

    @ctx.check('horizontal.commutator')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            for weight in (0, 2):
                field = _patch_scalar(params, weight=weight)
                for pair in horizontal.COMMUTATOR_PAIRS:
                    for r in (4.0, 6.0, 9.0):
                        residual = horizontal.commutator_check(field, pair, 0.5 * params.M, r * params.M, 1.0, 0.3)
                        worst = max(worst, float(np.abs(residual)))
        return worst

    params = geometry.make_params(ctx.M, ctx.spins[-1] * ctx.M, ctx.lambdas[0])
    field = _patch_scalar(params, weight=2)
    ctx.report.summary['commutator_residuals'] = {
        pair: float(np.abs(horizontal.commutator_check(field, pair, 0.0, 6.0 * ctx.M, 1.0, 0.3)))
        for pair in horizontal.COMMUTATOR_PAIRS
    }


def teukolsky_suite(ctx):
    n = max(ctx.grid['samples'] // 10, 5)

    @ctx.check('teukolsky.factorization')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.exterior_samples(params, n, ctx.rng, r_max=30.0 * params.M)
            worst = max(worst, max(float(np.max(np.abs(v))) for v in teukolsky.factorization_identities(params, r, theta).values()))
        return worst

    @ctx.check('teukolsky.imag_potential')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.exterior_samples(params, n, ctx.rng, r_max=30.0 * params.M)
            worst = max(worst, float(np.max(np.abs(np.imag(teukolsky.rw_coeffs(params, r, theta).V_tilde)))))
        return worst

    @ctx.check('teukolsky.w_decay_order')
    def _():
        orders = [min(teukolsky.w_decay_orders(ctx.M, L, 6.0 * ctx.M, math.pi / 3).values())
                  for L in ctx.lambdas]
        return min(orders)

    @ctx.check('teukolsky.transform_patch')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            A = _patch_spin2(params)
            point = (0.0, 6.0 * params.M, 1.0, 0.3)
            qfrak = teukolsky.chandrasekhar_q(A)['qfrak'](*point)
            worst = max(worst, float(teukolsky.factorization_residual(A, *point) / max(abs(qfrak), 1.0)))
        return worst

    params = geometry.make_params(ctx.M, ctx.spins[-1] * ctx.M, ctx.lambdas[0])
    ctx.report.summary['teukolsky_operator_sample'] = float(
        np.abs(teukolsky.teukolsky_apply(_patch_spin2(params))(0.0, 6.0 * ctx.M, 1.0, 0.3))
    )


def multipliers_suite(ctx):
    thetas = (math.pi / 4, math.pi / 2)
    n_r = max(ctx.grid['samples'] // 20, 6)
    rows = []
    for family in ('energy', 'morawetz', 'redshift'):
        @ctx.check(f'multipliers.{family}')
        def _(family=family):
            worst = math.inf
            for params in ctx.backgrounds():
                certified = multipliers.certify(params, family, thetas, n_r)
                rows.extend((family, params.a, params.Lambda, *row) for row in certified)
                worst = min(worst, min(row[2] for row in certified))
            return worst

    @ctx.check('multipliers.rp')
    def _():
        worst = math.inf
        for params in ctx.backgrounds():
            for p in RP_EXPONENTS:
                try:
                    certified = multipliers.certify(params, 'rp', thetas, n_r, p=p)
                except KdsError as exc:
                    if exc.code != 'support':
                        raise
                    continue
                rows.extend(('rp', params.a, params.Lambda, *row) for row in certified)
                worst = min(worst, min(row[2] for row in certified))
        return worst

    @ctx.check('multipliers.hardy_r3E')
    def _():
        params = geometry.make_params(ctx.M, 0.0, 0.0)
        r = 2.0 * ctx.M
        return abs(float(multipliers.hardy_scalar(params, r)) * r ** 3 - 1.0 / 3.0)

    @ctx.check('multipliers.rp_bulk')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            R = multipliers.rp_radius(params)
            hi = min(10.0 * R, 0.5 * params.r_cosmo)
            if hi <= R:
                continue
            r = ctx.rng.uniform(R, hi, 1000)
            theta = ctx.rng.uniform(0.2, math.pi - 0.2, r.shape)
            for p in RP_EXPONENTS:
                ratio = multipliers.rp_bulk_check(params, p, r, theta, rng=ctx.rng)['ratio']
                worst = max(worst, float(np.max(ratio)))
        return worst

    damping_params = geometry.make_params(ctx.M, 0.0, 1e-6 / ctx.M ** 2)
    damping_r = 5.0 * multipliers.rp_radius(damping_params)
    damping_forms = {p: multipliers.rp_lambda_form(damping_params, p, damping_r, 1.0) for p in RP_EXPONENTS}

    @ctx.check('multipliers.rp_damping')
    def _():
        return max(
            float(np.max(np.abs(Q - multipliers.rp_lambda_leading(p)))) / ((2.0 - p) / 6.0)
            for p, Q in damping_forms.items()
        )

    ctx.report.summary['rp_lambda_damping'] = {
        f'{p:g}': {
            'displayed_min_eigenvalue': multipliers.rp_lambda_damping(p),
            'check_coefficient': float(Q[0, 0]),
            'min_eigenvalue': float(np.linalg.eigvalsh(Q)[0]),
        }
        for p, Q in damping_forms.items()
    }

    star_margins = {f'{p:g}': math.inf for p in RP_EXPONENTS}

    @ctx.check('multipliers.rp_star_flux')
    def _():
        worst = math.inf
        for params in ctx.backgrounds():
            if not params.has_cosmological_horizon or multipliers.rp_radius(params) >= params.r_max:
                continue
            r = np.full(200, params.r_max)
            theta = ctx.rng.uniform(0.2, math.pi - 0.2, r.shape)
            jet = multipliers.random_jet(params, r, theta, ctx.rng, size=r.size)
            for p in RP_EXPONENTS:
                result = multipliers.rp_boundary_margin(params, p, r, theta, jet)
                worst = min(worst, float(np.min(result['flux'])))
                star_margins[f'{p:g}'] = min(star_margins[f'{p:g}'], float(np.min(result['margin'])))
        return worst

    ctx.report.summary['rp_star_margin'] = star_margins

    @ctx.check('multipliers.redshift_boundary')
    def _():
        return min(float(np.min(multipliers.redshift_boundary_samples(params, ctx.rng)))
                   for params in ctx.backgrounds())

    @ctx.check('multipliers.tilde_T_current')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            r, theta = geometry.exterior_samples(params, 5, ctx.rng, r_max=30.0 * params.M)
            jet = multipliers.random_jet(params, r, theta, ctx.rng, kind='ingoing')
            worst = max(worst, float(np.max(np.abs(multipliers.tilde_T_current_check(params, jet)))))
        return worst

    ctx.report.tables['multipliers_certify'] = (('family', 'a', 'Lambda') + multipliers.CERTIFY_COLUMNS, rows)


def trapping_suite(ctx):
    @ctx.check('trapping.r_trap')
    def _():
        return max(abs(trapping.trapped_radius(params, -1.0, 1.0).r_trap - 3.0 * params.M)
                   for params in ctx.backgrounds(spins=(0.0,)))

    @ctx.check('trapping.photon_period')
    def _():
        params = geometry.make_params(ctx.M, 0.0, 0.0)
        exact = 2.0 * math.pi * math.sqrt(27.0) * ctx.M
        return abs(trapping.photon_orbit_period(params) - exact) / exact

    kerr = geometry.make_params(ctx.M, 0.0, 0.0)
    r_trap = trapping.trapped_radius(kerr, -1.0, 1.0).r_trap

    def circular(r):
        eta = math.sqrt(trapping.trapping_function(kerr, r_trap, -1.0, 0.0))
        return trapping.make_state(kerr, (0.0, r, math.pi / 2, 0.0), (-1.0, 0.0, 0.0, eta))

    @ctx.check('trapping.trapped_deviation')
    def _():
        trajectory = trapping.geodesic_flow(kerr, circular(r_trap), 20.0 * ctx.M, rtol=1e-13, atol=1e-14)
        return float(np.max(np.abs(trajectory.r - r_trap))) / ctx.M

    @ctx.check('trapping.escape_rate')
    def _():
        trajectory = trapping.geodesic_flow(kerr, circular(r_trap * (1.0 + 1e-3)), 200.0 * ctx.M)
        return trapping.escape_rate(trajectory, r_trap)

    @ctx.check('trapping.carter_drift')
    def _():
        worst = 0.0
        for params in ctx.backgrounds():
            state = trapping.null_state_at(params, 6.0 * params.M, math.pi / 3, -1.0, 2.0 * params.M)
            trajectory = trapping.geodesic_flow(params, state, 100.0 * params.M, dense_points=201)
            worst = max(worst, trajectory.drift()['Q'])
        return worst

    scan_params = next(iter(ctx.backgrounds()))
    ctx.report.tables['trapping_scan'] = (
        ('sigma', 'eta_phi', 'r_trap', 'margin', 'hyperbolicity_sign'),
        trapping.trapped_scan(scan_params, (-1.0,), np.linspace(-4.0, 4.0, 9) * scan_params.M),
    )


def evolve_suite(ctx):
    grid = ctx.grid
    kwargs = {
        'n_r': grid['n_r'], 'radial_variable': grid['radial_variable'],
        'tau_max': grid['tau_max'] * ctx.M, 'report_every': grid['report_every'],
    }
    summary = ctx.report.summary

    base = evolve.ModeProblem(geometry.make_params(ctx.M, 0.0, 1e-3 / ctx.M ** 2), **kwargs)

    @ctx.check('evolve.zero_data')
    def _():
        zero = np.zeros_like(base.r)
        record = evolve.evolve(base, zero, zero, tau_max=10.0 * base.step)
        return max(max(abs(v) for v in n.row()[1:]) for n in record.norms)

    record = evolve.evolve(base, *evolve.gaussian_pulse(base, center=6.0 * ctx.M))
    ctx.report.tables['evolve_norms'] = norm_table(record.norms)

    @ctx.check('evolve.T_balance')
    def _():
        return abs(record.balance[-1]['residual']) / record.balance[0]['E_T']

    @ctx.check('evolve.balance_order')
    def _():
        steps = []
        coarse = evolve.ModeProblem(base.params, **{**kwargs, 'n_r': (grid['n_r'] - 1) // 2 + 1})
        triples = (
            multipliers.energy_multiplier(base.params),
            multipliers.morawetz_multiplier(base.params),
            multipliers.rp_multiplier(base.params, 1.0),
        )
        residuals = {triple.name: [] for triple in triples}
        for level in range(grid['refinements']):
            problem = coarse.refined(level)
            run = evolve.evolve(problem, *evolve.gaussian_pulse(problem, center=6.0 * ctx.M))
            steps.append(problem.dy)
            for triple in triples:
                residuals[triple.name].append(evolve.multiplier_balance(run, triple, problem)['residual'])
        orders = {name: fd.fitted_order(steps, values) for name, values in residuals.items()}
        summary['balance_orders'] = orders
        return min(orders.values())

    @ctx.check('evolve.grw_residual')
    def _():
        return teukolsky.grw_residual(record.as_solution())

    @ctx.check('evolve.transport_constant')
    def _():
        result = evolve.transport_integrate(record, base, source='zero', initial=record.psi[0])
        return result['constant']

    @ctx.check('evolve.transport_ode')
    def _():
        return evolve.transport_ode_check(base.params)['difference']

    @ctx.check('evolve.self_convergence')
    def _():
        coarse = evolve.ModeProblem(base.params, **{
            **kwargs, 'n_r': (grid['n_r'] - 1) // 2 + 1, 'tau_max': 1.0 * ctx.M, 'dissipation': 0.0,
        })
        summary['self_convergence_order'] = evolve.self_convergence(coarse)
        return summary['self_convergence_order']

    lambdas = ctx.lambdas if len(ctx.lambdas) > 1 else [L / ctx.M ** 2 for L in ACCEPTANCE_LAMBDAS]
    sweeps = {}
    for p in RP_EXPONENTS:
        sweeps[p] = evolve.lambda_sweep(lambdas, p=p, M=ctx.M, problem_kwargs=kwargs,
                                        threads=ctx.config['run']['threads'])

    @ctx.check('evolve.uniformity_ratio')
    def _():
        return max(sweep['ratio'] for sweep in sweeps.values())

    @ctx.check('evolve.window_order')
    def _():
        return sweeps[1.0]['window_order']

    @ctx.check('evolve.sigma_star_flux')
    def _():
        return min(rec.norms[-1].F_Sstar_cum for rec in sweeps[1.0]['records'].values()
                   if rec.params.has_cosmological_horizon)

    @ctx.check('evolve.grw_residual_spread')
    def _():
        residuals = [teukolsky.grw_residual(rec.as_solution()) for rec in sweeps[1.0]['records'].values()]
        summary['grw_residuals'] = residuals
        return max(residuals) / max(min(residuals), 1e-300)

    summary['uniformity_ratio'] = max(sweep['ratio'] for sweep in sweeps.values())
    for p, sweep in sweeps.items():
        ctx.report.tables[f'evolve_sweep_p{p:g}'] = (sweep['columns'], sweep['rows'])


def kerrlimit_suite(ctx):
    a = ctx.spins[-1] * ctx.M
    result = kerrlimit.compare(ctx.M, a, np.array([1e-5, 1e-4, 1e-3]) / ctx.M ** 2, seed=ctx.seed)

    @ctx.check('kerrlimit.metric_order')
    def _():
        return min(result['orders']['metric_diff'])

    @ctx.check('kerrlimit.transition_order')
    def _():
        return min(result['orders']['frame_transition_residual'])

    @ctx.check('kerrlimit.witness')
    def _():
        return min(kerrlimit.non_uniformity_witness(ctx.M, a, L / ctx.M ** 2) for L in (1e-4, 1e-5))

    ctx.report.tables['kerrlimit_compare'] = (
        ('Lambda', 'r_max', 'metric_diff', 'frame_transition_residual', 'projection_defect', 'ricci_diff'),
        result['rows'],
    )


SUITES = {
    'geometry': geometry_suite,
    'frames': frames_suite,
    'coords': coords_suite,
    'horizontal': horizontal_suite,
    'teukolsky': teukolsky_suite,
    'multipliers': multipliers_suite,
    'trapping': trapping_suite,
    'evolve': evolve_suite,
    'kerrlimit': kerrlimit_suite,
}


def run_suite(config, names=None):
    """
    Run the selected suites in dependency order and send
    ``suite_completed`` after each one.

    Returns:
        list of SuiteReport, one per suite.
    """
    names = names or config['suite']['names']
    unknown = set(names) - set(SUITES)
    if unknown:
        raise KdsError('config', f"Unknown suites: {', '.join(sorted(unknown))}", choices=SUITE_ORDER)
    reports = []
    for name in (suite for suite in SUITE_ORDER if suite in names):
        ctx = SuiteContext(config, name)
        start = time.perf_counter()
        logger.info("Running suite %s", name)
        SUITES[name](ctx)
        ctx.report.wall_time = time.perf_counter() - start
        suite_completed.send(sender=run_suite, report=ctx.report, out=config['run']['out'])
        reports.append(ctx.report)
    return reports

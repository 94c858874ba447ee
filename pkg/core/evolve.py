# core/evolve.py
"""
Mode-reduced evolution of the model equation (□₂ − V)ψ = 0 on the
a = 0 background, in the global chart (τ, r).

A mode ψ = u(τ, r)·Y with Δ₂Y = −λ_ang r⁻²Y reduces the equation to

    g^{ττ}∂_τΠ + g^{τr}∂_rΠ + r⁻²∂_r(r²(g^{rτ}Π + g^{rr}∂_r u))
        − (λ_ang/r² + V)u = 0,        Π = ∂_τu,

solved by the method of lines: fourth-order differences in a uniform
radial variable (r itself or x = −M/r) and classical RK4 in τ. The
boundaries r_event(1−δ_H) and r_cosmo(1+δ_H) are spacelike and carry no
boundary condition; a Λ = 0 run is cut at r_outer with the outgoing
condition e₄(ru) = 0.

Norms are the sphere-integrated densities of the mode with the measure
r²dr; see ``NormReport`` for the columns.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy import integrate

from . import fd
from .conf import kds_setting
from .exceptions import KdsError
from .frames import NULL_PAIRING, deformation_fd, frame_at, inverse_metric_global, metric_global
from .geometry import delta_of, make_params
from .models import BlackHoleParams, NormReport, SolutionRecord
from .multipliers import FRAME_INVERSE, rp_profile, rp_radius, scalar_wave, stationary_divergence
from .teukolsky import rw_potential

logger = logging.getLogger(__name__)

EQUATOR = math.pi / 2
DEFAULT_LAMBDA_ANG = 2.0  # ℓ = 2
RADIAL_VARIABLES = ('r', 'inverse')
MAX_CFL = 0.5


# ── 1+1 reduction ───────────────────────────────────────────────────────


def characteristic_speeds(g_inv):
    """
    dr/dτ of the two characteristics of the (τ, r) principal symbol,
    sorted ascending; ``g_inv`` is the (..., 2, 2) inverse-metric block.
    """
    gtt, gtr, grr = g_inv[..., 0, 0], g_inv[..., 0, 1], g_inv[..., 1, 1]
    root = np.sqrt(gtr ** 2 - gtt * grr)
    speeds = np.stack([(gtr + root) / gtt, (gtr - root) / gtt], axis=-1)
    return np.sort(speeds, axis=-1)


def reduce_1p1(params, lambda_ang, r):
    """
    Coefficient tables of the reduced operator over the radial nodes ``r``.

    Returns:
        dict with the (τ, r) blocks 'g' and 'g_inv', the potential 'V',
        the effective potential 'V_eff' = λ_ang/r² + V, the (τ, r)
        components of the global frame vectors 'e3', 'e4', the conformal
        factor 'lambda' and the characteristic 'speeds'.

    Raises:
        KdsError('support'): a ≠ 0.
    """
    if params.a != 0.0:
        raise KdsError('support', "The mode reduction needs a = 0", a=params.a)
    r = np.asarray(r, float)
    g_inv = inverse_metric_global(params, r, EQUATOR)[..., :2, :2]
    frame = frame_at(params, 'global', r, EQUATOR)
    V = rw_potential(params, r, EQUATOR)
    return {
        'g': metric_global(params, r, EQUATOR)[..., :2, :2],
        'g_inv': g_inv,
        'V': V,
        'V_eff': lambda_ang / r ** 2 + V,
        'e3': frame.e3[..., :2],
        'e4': frame.e4[..., :2],
        'lambda': frame.conformal_factor,
        'speeds': characteristic_speeds(g_inv),
    }


def coefficient_jump(params, lambda_ang, r):
    """max|g^{τr}(r_{i+1}) − g^{τr}(r_i)| over the nodes, for smoothness scans."""
    g_inv = reduce_1p1(params, lambda_ang, r)['g_inv']
    return float(np.max(np.abs(np.diff(g_inv[..., 0, 1]))))


# ── Problem ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ModeProblem:
    """
    One mode evolution: background, angular constant and discretization.

    ``n_r`` nodes are uniform in ``radial_variable``; ``dt`` defaults to
    ``cfl`` times the smallest characteristic crossing time, shortened so
    that ``tau_max`` is a whole number of steps. ``dissipation`` is the
    Kreiss–Oliger coefficient (0 disables it).
    """

    params: BlackHoleParams
    lambda_ang: float = DEFAULT_LAMBDA_ANG
    n_r: int = 401
    radial_variable: str = ''
    cfl: float = 0.4
    tau_max: float = 40.0
    report_every: int = 10
    p: float = 1.0
    dissipation: float = 0.02
    dt: float = 0.0

    def __post_init__(self):
        if self.params.a != 0.0:
            raise KdsError('support', "Mode evolution runs on a = 0 backgrounds", a=self.params.a)
        if not self.radial_variable:
            object.__setattr__(self, 'radial_variable', kds_setting('RADIAL_VARIABLE'))
        if self.radial_variable not in RADIAL_VARIABLES:
            raise KdsError('config', f"Unknown radial variable {self.radial_variable!r}", choices=RADIAL_VARIABLES)
        if self.n_r < 9:
            raise KdsError('resolution', "At least 9 radial nodes are needed", n_r=self.n_r)
        if not 0 < self.cfl <= MAX_CFL:
            raise KdsError('resolution', "CFL factor must lie in (0, 0.5]", cfl=self.cfl)

    @property
    def sommerfeld(self):
        return not self.params.has_cosmological_horizon

    @property
    def r_lo(self):
        return self.params.r_min

    @property
    def r_hi(self):
        if self.sommerfeld:
            return kds_setting('R_OUTER_KERR') * self.params.M
        return self.params.r_max

    def _to_y(self, r):
        return r if self.radial_variable == 'r' else -self.params.M / r

    @cached_property
    def y(self):
        return np.linspace(self._to_y(self.r_lo), self._to_y(self.r_hi), self.n_r)

    @cached_property
    def dy(self):
        return float(self.y[1] - self.y[0])

    @cached_property
    def r(self):
        return self.y if self.radial_variable == 'r' else -self.params.M / self.y

    @cached_property
    def dy_dr(self):
        return np.ones_like(self.r) if self.radial_variable == 'r' else self.params.M / self.r ** 2

    @cached_property
    def table(self):
        return reduce_1p1(self.params, self.lambda_ang, self.r)

    @cached_property
    def crossing_time(self):
        speed = np.max(np.abs(self.table['speeds']), axis=-1) * self.dy_dr
        return float(self.dy / np.max(speed))

    @cached_property
    def step(self):
        limit = MAX_CFL * self.crossing_time
        if self.dt:
            if self.dt > limit:
                raise KdsError('resolution', "Time step violates the CFL bound", dt=self.dt, limit=limit)
            return float(self.dt)
        n_steps = max(1, math.ceil(self.tau_max / (self.cfl * self.crossing_time)))
        return self.tau_max / n_steps

    @property
    def n_steps(self):
        return int(round(self.tau_max / self.step))

    def d_r(self, values):
        return fd.diff_full(values, self.dy) * self.dy_dr

    def refined(self, level):
        """Same problem with 2^level times as many radial intervals."""
        return replace(self, n_r=(self.n_r - 1) * 2 ** level + 1, report_every=self.report_every * 2 ** level)


def gaussian_pulse(problem, center=None, width=None, amplitude=1.0):
    """Time-symmetric data u = A·exp(−(r − r_c)²/(2w²)), Π = 0."""
    M = problem.params.M
    if center is None:
        center = min(10.0 * M, 0.5 * (problem.params.r_event + problem.r_hi))
    width = M if width is None else width
    u = amplitude * np.exp(-0.5 * ((problem.r - center) / width) ** 2)
    return u, np.zeros_like(u)


# ── Norm densities ──────────────────────────────────────────────────────


class _Densities:
    """Quadratic densities of (u, Π) on the nodes of one problem."""

    def __init__(self, problem):
        self.problem = problem
        params = problem.params
        table = problem.table
        r = problem.r
        self.r = r
        self.weight = r ** 2
        self.g, self.g_inv = table['g'], table['g_inv']
        self.e3, self.e4 = table['e3'], table['e4']
        self.V_eff = table['V_eff']
        self.angular = problem.lambda_ang / r ** 2
        delta = delta_of(params, r)
        lam = table['lambda']
        self.c3 = 0.5 * lam
        self.c4 = delta / (2.0 * r ** 2 * lam)
        self.exterior = (r >= params.r_event) & (r <= params.r_cosmo)
        trap = (1.0 - 3.0 * params.M / r) ** 2 / params.delta_trap ** 2
        self.trap_weight = np.minimum(1.0, trap)
        R = rp_radius(params)
        self.f_p, self.df_p, _ = rp_profile(problem.p, R, r)
        # S·r^{p−1} for the r^p bulk
        self.s_p = np.where(r > 0, self.f_p / r, 0.0)

    def integrate(self, density):
        return float(integrate.simpson(density * self.weight, x=self.r))

    def gradient(self, u, Pi):
        return np.stack([Pi, self.problem.d_r(u)], axis=-1)

    def lagrangian(self, du, u):
        return np.einsum('...a,...ab,...b->...', du, self.g_inv, du) + self.V_eff * u ** 2

    def T_current(self, u, Pi):
        """(J^τ, J^r) of the Killing T = ∂_τ."""
        du = self.gradient(u, Pi)
        L = self.lagrangian(du, u)
        T_tau = du * du[..., 0:1] - 0.5 * self.g[..., :, 0] * L[..., None]
        return np.einsum('...ab,...b->...a', self.g_inv, T_tau)

    def evaluate(self, u, Pi):
        du = self.gradient(u, Pi)
        e3u = np.einsum('...a,...a->...', self.e3, du)
        e4u = np.einsum('...a,...a->...', self.e4, du)
        ang = self.angular * u ** 2
        check4 = e4u + self.e4[..., 1] / self.r * u
        J = self.T_current(u, Pi)
        energy = 0.5 * (e3u ** 2 + e4u ** 2) + ang + u ** 2 / self.r ** 2
        R_hat = self.c4 * e4u - self.c3 * e3u
        M = self.problem.params.M
        mor = M / self.r ** 2 * (R_hat ** 2 + u ** 2 / self.r ** 2) + self.trap_weight / self.r * (Pi ** 2 + ang)
        p = self.problem.p
        return {
            'E_T': self.integrate(-J[..., 0]),
            'E_deg': self.integrate(np.where(self.exterior, np.maximum(-J[..., 0], 0.0), 0.0)),
            'E': self.integrate(energy),
            'E_p': self.integrate(energy + self.f_p * (check4 ** 2 + ang)),
            'mor': self.integrate(mor),
            'bulk_p': self.integrate(self.s_p * (p * check4 ** 2 + (2.0 - p) * ang)),
            'flux_in': float(self.weight[0] * J[0, 1]),
            'flux_out': float(self.weight[-1] * J[-1, 1]),
        }


# ── Evolution ───────────────────────────────────────────────────────────


def _rhs(problem, state):
    u, Pi = state
    table = problem.table
    g_inv = table['g_inv']
    r2 = problem.r ** 2
    u_r = problem.d_r(u)
    if problem.sommerfeld:
        e4 = table['e4'][-1]
        Pi = Pi.copy()
        Pi[-1] = -e4[1] / e4[0] * (u[-1] / problem.r[-1] + u_r[-1])
    flux = r2 * (g_inv[..., 1, 0] * Pi + g_inv[..., 1, 1] * u_r)
    dPi = -(g_inv[..., 0, 1] * problem.d_r(Pi) + problem.d_r(flux) / r2 - table['V_eff'] * u) / g_inv[..., 0, 0]
    du = Pi.copy()
    if problem.dissipation:
        speed = float(np.max(np.abs(table['speeds']) * problem.dy_dr[..., None]))
        du = du + fd.kreiss_oliger(u, problem.dissipation * speed, problem.dy)
        dPi = dPi + fd.kreiss_oliger(state[1], problem.dissipation * speed, problem.dy)
    if problem.sommerfeld:
        dPi[-1] = 0.0
    return np.stack([du, dPi])


def _rk4(problem, state, dt):
    k1 = _rhs(problem, state)
    k2 = _rhs(problem, state + 0.5 * dt * k1)
    k3 = _rhs(problem, state + 0.5 * dt * k2)
    k4 = _rhs(problem, state + dt * k3)
    out = state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if problem.sommerfeld:
        e4 = problem.table['e4'][-1]
        u = out[0]
        out[1, -1] = -e4[1] / e4[0] * (u[-1] / problem.r[-1] + problem.d_r(u)[-1])
    return out


def evolve(problem, u0, pi0, tau_max=None):
    """
    Run ``problem`` from the data (u0, Π0) on Σ(0) to ``tau_max``.

    Norms are recorded every ``report_every`` steps and at the final step;
    the cumulative entries (Mor, B_p, fluxes) are trapezoidal sums over
    every step.

    Raises:
        KdsError('instability'): E or E_p exceeds INSTABILITY_FACTOR times
            its initial value.
    """
    if tau_max is not None and tau_max != problem.tau_max:
        problem = replace(problem, tau_max=float(tau_max))
    dt, n_steps = problem.step, problem.n_steps
    state = np.stack([np.asarray(u0, float), np.asarray(pi0, float)])
    densities = _Densities(problem)
    factor = kds_setting('INSTABILITY_FACTOR')
    logger.debug("evolve Lambda=%g: n_r=%d dt=%.4g steps=%d", problem.params.Lambda, problem.n_r, dt, n_steps)

    record = SolutionRecord(
        params=problem.params, lambda_ang=problem.lambda_ang, r=problem.r,
        tau=[], psi=[], dtau_psi=[],
    )
    current = densities.evaluate(*state)
    initial = current
    cumulative = {'mor': 0.0, 'bulk_p': 0.0, 'flux_in': 0.0, 'flux_out': 0.0}

    def report(step):
        tau = step * dt
        record.tau.append(tau)
        record.psi.append(state[0].copy())
        record.dtau_psi.append(state[1].copy())
        record.norms.append(NormReport(
            tau=tau, E_deg=current['E_deg'], E=current['E'], E_p=current['E_p'],
            Mor=cumulative['mor'], B_p_cum=cumulative['bulk_p'],
            F_A_cum=cumulative['flux_in'], F_Sstar_cum=-cumulative['flux_out'], p=problem.p,
        ))
        record.balance.append({
            'tau': tau,
            'E_T': current['E_T'],
            'residual': current['E_T'] - initial['E_T'] + cumulative['flux_in'] - cumulative['flux_out'],
        })

    report(0)
    for step in range(1, n_steps + 1):
        state = _rk4(problem, state, dt)
        previous, current = current, densities.evaluate(*state)
        for key in cumulative:
            cumulative[key] += 0.5 * dt * (previous[key] + current[key])
        for name in ('E', 'E_p'):
            if not np.isfinite(current[name]) or (initial[name] > 0 and current[name] > factor * initial[name]):
                raise KdsError('instability', f"Norm {name} blew up", tau=step * dt, value=current[name],
                               initial=initial[name], Lambda=problem.params.Lambda, n_r=problem.n_r)
        if step % problem.report_every == 0 or step == n_steps:
            report(step)

    record.tau = np.asarray(record.tau)
    record.psi = np.asarray(record.psi)
    record.dtau_psi = np.asarray(record.dtau_psi)
    record.clean()
    logger.info("evolve Lambda=%g done: E %.4e -> %.4e, balance residual %.3e", problem.params.Lambda,
                initial['E'], current['E'], record.balance[-1]['residual'])
    return record


def self_convergence(problem, data=gaussian_pulse, levels=3):
    """
    Self-convergence order log₂(‖u₀ − u₁‖/‖u₁ − u₂‖) of the final slice
    over ``levels`` doubled grids, on the coarse nodes.
    """
    finals = []
    for level in range(levels):
        refined = problem.refined(level)
        record = evolve(refined, *data(refined))
        finals.append(record.psi[-1][:: 2 ** level])
    diffs = [np.max(np.abs(finals[k] - finals[k + 1])) for k in range(levels - 1)]
    if diffs[-1] == 0.0:
        return math.inf
    return float(np.log2(diffs[-2] / diffs[-1]))


# ── Multiplier balance on mode solutions ────────────────────────────────


def multiplier_balance(record, triple, problem):
    """
    E_X(τ_end) − E_X(0) + F_in − F_out + ∫∫K for a stationary triple on
    the report slices of ``record``, relative to the largest of |E_X|
    and the bulk integral. ``problem`` supplies the differentiation.
    """
    params = record.params
    r = np.asarray(record.r)
    theta = np.full_like(r, EQUATOR)
    table = problem.table
    g, g_inv = table['g'], table['g_inv']
    V = table['V']
    X = triple.X(r, theta)
    w = np.asarray(triple.w(r, theta), float) * np.ones_like(r)
    m = triple.m(r, theta)
    pi = deformation_fd(params, triple.X, r, theta, kind='global')
    pi_up = np.einsum('am,...mn,nb->...ab', FRAME_INVERSE, pi, FRAME_INVERSE)
    h = 1e-4 * params.M
    dV = fd.derivative(lambda x: rw_potential(params, x, EQUATOR), r, h, order=4)
    dw = fd.derivative(lambda x: np.asarray(triple.w(x, np.full_like(x, EQUATOR)), float), r, h, order=4)
    box_w = scalar_wave(params, triple.w, r, theta)
    div_m = stationary_divergence(params, triple.m, r, theta)
    m_low = np.einsum('...ab,...b->...a', g, m[..., :2])
    weight = r ** 2
    angular = record.lambda_ang / r ** 2

    def slice_terms(u, Pi):
        du = np.stack([Pi, problem.d_r(u)], axis=-1)
        e3u = np.einsum('...a,...a->...', table['e3'], du)
        e4u = np.einsum('...a,...a->...', table['e4'], du)
        grad = angular * u ** 2
        L = grad - e3u * e4u + V * u ** 2
        T = np.zeros(r.shape + (4, 4))
        T[..., 0, 0] = T[..., 1, 1] = 0.5 * grad
        T[..., 2, 2], T[..., 3, 3] = e3u ** 2, e4u ** 2
        T[..., 2, 3] = T[..., 3, 2] = e3u * e4u
        T = T - 0.5 * NULL_PAIRING * L[..., None, None]
        nabla_m = m[..., 0] * Pi + m[..., 1] * du[..., 1]
        K = (
            np.einsum('...mn,...mn->...', T, pi_up)
            - 0.5 * X[..., 1] * dV * u ** 2
            + w * L - 0.5 * u ** 2 * box_w + u * nabla_m + 0.5 * u ** 2 * div_m
        )
        T_chart = du[..., :, None] * du[..., None, :] - 0.5 * g * L[..., None, None]
        J_low = np.einsum('...ab,...b->...a', T_chart, X[..., :2]) + (w * u)[..., None] * du
        J_low[..., 1] -= 0.5 * u ** 2 * dw
        J_low = J_low + 0.5 * (u ** 2)[..., None] * m_low
        J = np.einsum('...ab,...b->...a', g_inv, J_low)
        simpson = lambda f: float(integrate.simpson(f * weight, x=r))
        return simpson(-J[..., 0]), weight[0] * J[0, 1], weight[-1] * J[-1, 1], simpson(K)

    terms = np.array([slice_terms(u, Pi) for u, Pi in zip(record.psi, record.dtau_psi)])
    tau = np.asarray(record.tau)
    E, f_in, f_out, bulk = terms.T
    trapz = lambda f: float(integrate.trapezoid(f, tau))
    residual = E[-1] - E[0] + trapz(f_in) - trapz(f_out) + trapz(bulk)
    scale = max(np.max(np.abs(E)), trapz(np.abs(bulk)), 1e-300)
    return {'E': E, 'bulk': bulk, 'residual': abs(residual) / scale}


# ── Transport ───────────────────────────────────────────────────────────


def _source_values(record, source):
    r = np.asarray(record.r)
    if source == 'zero':
        return np.zeros_like(record.psi)
    if source == 'qfrak':
        # q̄/(q r²)𝔮 with q real at a = 0
        return np.asarray(record.psi) / r ** 2
    if callable(source):
        return np.array([source(tau, r) for tau in record.tau])
    raise KdsError('support', f"Unknown transport source {source!r}")


def transport_integrate(record, problem, source='zero', weight=0, p=1.0, initial=None, dt=None):
    """
    Integrate ∇⁽ᶜ⁾₃Φ₁ = Φ₂ (weight s: e₃Φ₁ − 2sω̲Φ₁ = Φ₂) over the slices
    of ``record`` by second-order upwinding along e₃ and Heun steps.

    Returns:
        dict with 'tau', 'phi1' (per record slice) and the two sides of the
        integrated inequality
            LHS = ∫∫r^{p−3}|Φ₁|² + ∫_{Σ(τ)}r^{p−2}|Φ₁|²,
            RHS = ∫∫r^{p−1}|Φ₂|² + ∫_{Σ(0)}r^{p−2}|Φ₁|²,
        and their ratio 'constant'.

    Raises:
        KdsError('cfl-transport'): the Courant number along e₃ exceeds 1.
    """
    params = record.params
    r = np.asarray(record.r)
    tau = np.asarray(record.tau)
    phi2 = _source_values(record, source)
    frame = frame_at(params, 'global', r, EQUATOR)
    e3t, e3r = frame.e3[..., 0], frame.e3[..., 1]
    omegab = frame.ricci.omegab
    speed = e3r / e3t * problem.dy_dr
    limit = problem.dy / float(np.max(np.abs(speed)))
    report_dt = float(np.min(np.diff(tau))) if len(tau) > 1 else problem.step
    if dt is None:
        dt = min(0.5 * limit, report_dt)
    if dt > limit:
        raise KdsError('cfl-transport', "Transport step exceeds the Courant bound", dt=dt, limit=limit)

    upwind_inward = speed < 0
    n = len(r)

    def d_upwind(phi):
        out = np.zeros_like(phi)
        i = np.arange(n)
        fwd = upwind_inward & (i <= n - 3)
        bwd = ~upwind_inward & (i >= 2)
        out[fwd] = (-3.0 * phi[i[fwd]] + 4.0 * phi[i[fwd] + 1] - phi[i[fwd] + 2]) / (2.0 * problem.dy)
        out[bwd] = (3.0 * phi[i[bwd]] - 4.0 * phi[i[bwd] - 1] + phi[i[bwd] - 2]) / (2.0 * problem.dy)
        near_in = upwind_inward & (i == n - 2)
        near_out = ~upwind_inward & (i == 1)
        out[near_in] = (phi[n - 1] - phi[n - 2]) / problem.dy
        out[near_out] = (phi[1] - phi[0]) / problem.dy
        return out

    inflow = np.zeros(n, bool)
    inflow[-1] = upwind_inward[-1]
    inflow[0] = not upwind_inward[0]

    def rhs(phi, source_now):
        out = (source_now + 2.0 * weight * omegab * phi) / e3t - speed * d_upwind(phi)
        out[inflow] = 0.0
        return out

    def source_at(t):
        k = np.clip(np.searchsorted(tau, t) - 1, 0, len(tau) - 2) if len(tau) > 1 else 0
        if len(tau) == 1:
            return phi2[0]
        s = (t - tau[k]) / (tau[k + 1] - tau[k])
        return (1.0 - s) * phi2[k] + s * phi2[k + 1]

    rw = r ** 2
    simpson = lambda f: float(integrate.simpson(f * rw, x=r))
    phi = np.zeros(n) if initial is None else np.asarray(initial, float).copy()
    slices = [phi.copy()]
    lhs_bulk = rhs_bulk = 0.0
    t = tau[0]
    bulk_now = (simpson(r ** (p - 3) * phi ** 2), simpson(r ** (p - 1) * source_at(t) ** 2))
    for k in range(1, len(tau)):
        n_sub = max(1, math.ceil((tau[k] - t) / dt))
        h = (tau[k] - t) / n_sub
        for _ in range(n_sub):
            s0, s1 = source_at(t), source_at(t + h)
            k1 = rhs(phi, s0)
            k2 = rhs(phi + h * k1, s1)
            phi = phi + 0.5 * h * (k1 + k2)
            t += h
            bulk_next = (simpson(r ** (p - 3) * phi ** 2), simpson(r ** (p - 1) * s1 ** 2))
            lhs_bulk += 0.5 * h * (bulk_now[0] + bulk_next[0])
            rhs_bulk += 0.5 * h * (bulk_now[1] + bulk_next[1])
            bulk_now = bulk_next
        slices.append(phi.copy())

    lhs = lhs_bulk + simpson(r ** (p - 2) * phi ** 2)
    rhs_total = rhs_bulk + simpson(r ** (p - 2) * slices[0] ** 2)
    if rhs_total > 0:
        constant = lhs / rhs_total
    else:
        constant = 0.0 if lhs == 0 else math.inf
    logger.debug("transport p=%g: LHS %.4e RHS %.4e", p, lhs, rhs_total)
    return {'tau': tau, 'phi1': np.asarray(slices), 'lhs': lhs, 'rhs': rhs_total, 'constant': constant}


def transport_ode_check(params, weight=2, r_start=None, r_end=None):
    """
    Homogeneous transport e₃Φ = 2sω̲Φ along one ingoing characteristic, as
    a quadrature in r and as a Radau solve of the (τ, r, Φ) system.

    Returns:
        dict with both values of Φ(r_end)/Φ(r_start) and their relative
        'difference'.
    """
    if params.a != 0.0:
        raise KdsError('support', "The transport ODE check runs at a = 0", a=params.a)
    M = params.M
    r_start = 0.5 * (params.r_event + params.r0 - M) if r_start is None else r_start
    r_end = params.r_event * (1.0 - 0.5 * params.delta_H) if r_end is None else r_end

    def coefficients(r):
        frame = frame_at(params, 'global', r, EQUATOR)
        return float(frame.e3[0]), float(frame.e3[1]), float(frame.ricci.omegab)

    def integrand(r):
        _, e3r, omegab = coefficients(r)
        return 2.0 * weight * omegab / e3r

    log_ratio, _ = integrate.quad(integrand, r_start, r_end, epsabs=1e-13, epsrel=1e-12, limit=200)

    def system(t, y):
        e3t, e3r, omegab = coefficients(y[0])
        return [e3r / e3t, 2.0 * weight * omegab * y[1] / e3t]

    def reached(t, y):
        return y[0] - r_end

    reached.terminal = True
    solution = integrate.solve_ivp(system, (0.0, 1e4 * M), [r_start, 1.0], method='Radau',
                                   events=reached, rtol=1e-12, atol=1e-14)
    if not solution.t_events[0].size:
        raise KdsError('escaped-domain', "The characteristic did not reach r_end", r_end=r_end)
    radau = float(solution.y_events[0][0][1])
    quad = math.exp(log_ratio)
    return {'quad': quad, 'radau': radau, 'difference': abs(quad - radau) / abs(quad)}


# ── Λ sweep ─────────────────────────────────────────────────────────────


def uniformity_constant(record):
    """C = (sup_τ E_p + B_p(0, τ_max) + F_A + F_Σ*)/E_p(0)."""
    norms = record.norms
    E_p0 = norms[0].E_p
    if E_p0 == 0:
        raise KdsError('resolution', "Initial E_p vanishes; the data is zero")
    last = norms[-1]
    return (max(n.E_p for n in norms) + last.B_p_cum + last.F_A_cum + last.F_Sstar_cum) / E_p0


def _sweep_one(M, Lambda, p, problem_kwargs, center, width):
    params = make_params(M, 0.0, Lambda)
    problem = ModeProblem(params, p=p, **problem_kwargs)
    record = evolve(problem, *gaussian_pulse(problem, center=center, width=width))
    return Lambda, problem, record


def lambda_sweep(lambdas, p=1.0, M=1.0, problem_kwargs=None, threads=None, window=10.0, center=None, width=None):
    """
    Evolve the same pulse for each Λ and compare the uniformity constants.

    Returns:
        dict with 'rows' (Λ, C, E_p(0), sup E_p, B_p, F, window difference)
        sorted by Λ, the spread 'ratio' = max C/min C, the fitted order of
        the window difference in Λ and the records by Λ.
    """
    lambdas = sorted(float(x) for x in lambdas)
    problem_kwargs = dict(problem_kwargs or {})
    threads = kds_setting('THREADS') if threads is None else threads
    center = 6.0 * M if center is None else center
    width = M if width is None else width
    jobs = [(M, L, p, problem_kwargs, center, width) for L in lambdas]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _sweep_one(*job), jobs))
    else:
        results = [_sweep_one(*job) for job in jobs]

    records = {L: record for L, _, record in results}
    lo = max(record.r[0] for record in records.values())
    probe = np.linspace(max(lo, 2.5 * M), window * M, 200)
    final = {L: np.interp(probe, record.r, record.psi[-1]) for L, record in records.items()}
    base = final.get(0.0)

    rows = []
    for L, _, record in results:
        norms = record.norms
        diff = float(np.max(np.abs(final[L] - base))) if base is not None else math.nan
        rows.append((
            L, uniformity_constant(record), norms[0].E_p, max(n.E_p for n in norms),
            norms[-1].B_p_cum, norms[-1].F_A_cum + norms[-1].F_Sstar_cum, diff,
        ))
    constants = [row[1] for row in rows]
    positive = [(row[0], row[6]) for row in rows if row[0] > 0]
    order = fd.fitted_order([L for L, _ in positive], [d for _, d in positive]) if base is not None else math.nan
    report = {
        'rows': rows,
        'columns': ('Lambda', 'C', 'E_p0', 'sup_E_p', 'B_p', 'F', 'window_diff'),
        'ratio': max(constants) / min(constants),
        'window_order': order,
        'records': records,
    }
    logger.info("lambda sweep p=%g over %d values: C ratio %.3f", p, len(lambdas), report['ratio'])
    return report


# ── Persistence ─────────────────────────────────────────────────────────


def save_solution(record, path):
    """Write a compressed .npz with the slices, norms and background."""
    np.savez_compressed(
        path,
        psi=record.psi, dtau_psi=record.dtau_psi, tau=record.tau, r=record.r,
        lambda_ang=record.lambda_ang, M=record.params.M, a=record.params.a, Lambda=record.params.Lambda,
        norms=np.array([n.row() for n in record.norms]),
    )


def load_solution(path):
    """Read a file written by ``save_solution`` into the mapping used by grw_residual."""
    with np.load(path) as data:
        solution = {key: data[key] for key in data.files}
    for key in ('lambda_ang', 'M', 'a', 'Lambda'):
        solution[key] = float(solution[key])
    return solution

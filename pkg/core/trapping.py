# core/trapping.py
"""
Trapped null geodesics of slowly-rotating Kerr–de Sitter.

For time frequency σ = p_t and azimuthal frequency η = p_φ the radial
potential of the null Hamiltonian is Φ(r) = P²/Δ with
P = (r²+a²)σ + aη; the trapped radius is the interior critical point of
Φ, i.e. the root of 4rσΔ − PΔ′. A Hamiltonian integrator of the full
geodesic flow is the independent oracle.
"""
import logging
import math

import numpy as np
from scipy import integrate, optimize

from .exceptions import KdsError
from .geometry import d2_delta_dr2, d_delta_dr, delta_of
from .models import GeodesicState, TrappedSample

logger = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14


# ── Trapped radius ──────────────────────────────────────────────────────


def _P(params, r, sigma, eta_phi):
    return (r ** 2 + params.a ** 2) * sigma + params.a * eta_phi


def trapping_function(params, r, sigma, eta_phi):
    """Φ(r) = ((r²+a²)σ + aη_φ)²/Δ."""
    return _P(params, r, sigma, eta_phi) ** 2 / delta_of(params, r)


def trapping_function_unsquared(params, r, sigma, eta_phi):
    """P/√Δ; shares its critical points with Φ wherever P ≠ 0."""
    return _P(params, r, sigma, eta_phi) / np.sqrt(delta_of(params, r))


def _critical(params, r, sigma, eta_phi):
    """g(r) = 4rσΔ − PΔ′ and g′(r); Φ′ = P·g/Δ²."""
    delta = delta_of(params, r)
    d1 = d_delta_dr(params, r)
    P = _P(params, r, sigma, eta_phi)
    g = 4.0 * r * sigma * delta - P * d1
    dg = 4.0 * sigma * delta + 2.0 * r * sigma * d1 - P * d2_delta_dr2(params, r)
    return g, dg


def phi_prime(params, r, sigma, eta_phi):
    g, _ = _critical(params, r, sigma, eta_phi)
    return _P(params, r, sigma, eta_phi) * g / delta_of(params, r) ** 2


def _bracket(params):
    lo = params.r_event * (1.0 + 1e-9)
    hi = params.r_cosmo * (1.0 - 1e-9) if params.has_cosmological_horizon else 1e3 * params.M
    return lo, hi


def trapped_radius(params, sigma, eta_phi):
    """
    Interior critical point of Φ for the frequencies (σ, η_φ).

    Newton on 4rσΔ − PΔ′ seeded at 3M, with a bracketing fallback.

    Raises:
        KdsError('no-trapping'): no interior critical point, or no
            angular turning set admits a trapped null covector.
    """
    sigma, eta_phi = float(sigma), float(eta_phi)
    if sigma == 0.0 and eta_phi == 0.0:
        raise KdsError('no-trapping', "Zero covector has no trapped set")
    M = params.M
    fn = lambda r: _critical(params, r, sigma, eta_phi)[0]
    dfn = lambda r: _critical(params, r, sigma, eta_phi)[1]
    lo, hi = _bracket(params)
    r_trap = None
    try:
        candidate = optimize.newton(fn, 3.0 * M, fprime=dfn, tol=1e-15 * M, maxiter=100)
        if lo < candidate < hi:
            r_trap = float(candidate)
    except (RuntimeError, OverflowError):
        logger.debug("Newton failed for sigma=%g eta=%g; falling back to brentq", sigma, eta_phi)
    if r_trap is None:
        grid = np.linspace(lo, min(hi, 20.0 * M), 400)
        values = fn(grid)
        flips = np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
        if flips.size == 0:
            raise KdsError('no-trapping', "Φ has no interior critical point", sigma=sigma, eta_phi=eta_phi)
        i = flips[0]
        r_trap = float(optimize.brentq(fn, grid[i], grid[i + 1], xtol=1e-15 * M))

    if _P(params, r_trap, sigma, eta_phi) == 0.0:
        raise KdsError('no-trapping', "P vanishes at the critical radius", sigma=sigma, eta_phi=eta_phi)
    if not admits_trapped_covector(params, r_trap, sigma, eta_phi):
        raise KdsError('no-trapping', "No θ admits a null covector at the critical radius",
                       sigma=sigma, eta_phi=eta_phi)

    _, dg = _critical(params, r_trap, sigma, eta_phi)
    second = float(_P(params, r_trap, sigma, eta_phi) * dg / delta_of(params, r_trap) ** 2)
    eps = 1e-4 * M
    signs = tuple('+' if phi_prime(params, x, sigma, eta_phi) > 0 else '-'
                  for x in (r_trap - eps, r_trap + eps))
    return TrappedSample(
        sigma=sigma,
        eta_phi=eta_phi,
        r_trap=r_trap,
        second_deriv_sign=signs,
        margin=abs(r_trap - 3.0 * M),
        phi_second_derivative=second,
    )


def admits_trapped_covector(params, r, sigma, eta_phi, n_theta=721):
    """Θ(θ) = (1+γ)²(Φ(r) − S²/(κ sin²θ)) ≥ 0 for some θ, with S = a sin²θ σ + η_φ."""
    theta = np.linspace(1e-3, math.pi - 1e-3, n_theta)
    sin2 = np.sin(theta) ** 2
    kappa = 1.0 + params.gamma * np.cos(theta) ** 2
    S = params.a * sin2 * sigma + eta_phi
    return bool(np.max(trapping_function(params, r, sigma, eta_phi) - S ** 2 / (kappa * sin2)) >= 0)


def unsquared_critical_radius(params, sigma, eta_phi):
    """Critical radius of P/√Δ found by bracketing its derivative."""
    lo, hi = _bracket(params)
    hi = min(hi, 20.0 * params.M)

    def derivative(r):
        delta = delta_of(params, r)
        P = _P(params, r, sigma, eta_phi)
        return (2.0 * r * sigma * delta - 0.5 * P * d_delta_dr(params, r)) / delta ** 1.5

    grid = np.linspace(lo * (1 + 1e-6), hi, 400)
    values = np.array([derivative(x) for x in grid])
    flips = np.nonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
    if flips.size == 0:
        raise KdsError('no-trapping', "P/√Δ has no interior critical point", sigma=sigma, eta_phi=eta_phi)
    i = flips[0]
    return float(optimize.brentq(derivative, grid[i], grid[i + 1], xtol=1e-15 * params.M))


def trapped_scan(params, sigmas, eta_phis):
    """Rows (sigma, eta_phi, r_trap, margin, hyperbolicity_sign) over a frequency grid."""
    rows = []
    for sigma in sigmas:
        for eta_phi in eta_phis:
            try:
                sample = trapped_radius(params, sigma, eta_phi)
            except KdsError as exc:
                logger.debug("No trapping at sigma=%g eta=%g: %s", sigma, eta_phi, exc)
                continue
            rows.append([sample.sigma, sample.eta_phi, sample.r_trap, sample.margin,
                         1.0 if sample.phi_second_derivative > 0 else -1.0])
    return rows


# ── Hamiltonian flow ────────────────────────────────────────────────────


def _radial_parts(params, r, p_r, sigma, eta_phi):
    xi2 = (1.0 + params.gamma) ** 2
    delta = delta_of(params, r)
    d1 = d_delta_dr(params, r)
    P = _P(params, r, sigma, eta_phi)
    F_r = delta * p_r ** 2 - xi2 * P ** 2 / delta
    dF_r = d1 * p_r ** 2 - xi2 * (4.0 * r * sigma * P / delta - P ** 2 * d1 / delta ** 2)
    return F_r, dF_r, P, delta


def _polar_parts(params, theta, p_theta, sigma, eta_phi):
    xi2 = (1.0 + params.gamma) ** 2
    s, c = math.sin(theta), math.cos(theta)
    kappa = 1.0 + params.gamma * c ** 2
    dkappa = -2.0 * params.gamma * c * s
    S = params.a * s ** 2 * sigma + eta_phi
    dS = 2.0 * params.a * s * c * sigma
    ks2 = kappa * s ** 2
    dks2 = dkappa * s ** 2 + 2.0 * kappa * s * c
    F_th = kappa * p_theta ** 2 + xi2 * S ** 2 / ks2
    dF_th = dkappa * p_theta ** 2 + xi2 * (2.0 * S * dS / ks2 - S ** 2 * dks2 / ks2 ** 2)
    return F_th, dF_th, S, kappa


def conserved_quantities(params, position, momentum):
    """E = −p_t, L = p_φ, Carter Q = |q|²O(p, p) and H = ½g⁻¹(p, p)."""
    _, r, theta, _ = position
    sigma, p_r, p_theta, eta_phi = momentum
    F_r, _, _, _ = _radial_parts(params, r, p_r, sigma, eta_phi)
    F_th, _, _, _ = _polar_parts(params, theta, p_theta, sigma, eta_phi)
    q2 = r ** 2 + params.a ** 2 * math.cos(theta) ** 2
    return {'E': -sigma, 'L': eta_phi, 'Q': F_th, 'H': (F_r + F_th) / (2.0 * q2)}


def make_state(params, position, momentum):
    position = np.asarray(position, float)
    momentum = np.asarray(momentum, float)
    return GeodesicState(position, momentum, conserved_quantities(params, position, momentum))


def null_state_at(params, r, theta, sigma, eta_phi, p_r=0.0, sign_theta=1.0):
    """
    Null initial state at (r, θ) with p_θ solved from H = 0.

    Raises:
        KdsError('no-trapping'): the polar potential is negative at θ.
    """
    xi2 = (1.0 + params.gamma) ** 2
    delta = delta_of(params, r)
    P = _P(params, r, sigma, eta_phi)
    F_r = delta * p_r ** 2 - xi2 * P ** 2 / delta
    s, c = math.sin(theta), math.cos(theta)
    kappa = 1.0 + params.gamma * c ** 2
    S = params.a * s ** 2 * sigma + eta_phi
    p_theta2 = (-F_r - xi2 * S ** 2 / (kappa * s ** 2)) / kappa
    if p_theta2 < -1e-14 * max(1.0, abs(F_r)):
        raise KdsError('no-trapping', "No null covector at this (r, θ) for the frequencies", theta=theta)
    p_theta = sign_theta * math.sqrt(max(p_theta2, 0.0))
    return make_state(params, (0.0, r, theta, 0.0), (sigma, p_r, p_theta, eta_phi))


def _rhs(params, sigma, eta_phi):
    xi2 = (1.0 + params.gamma) ** 2
    a, a2 = params.a, params.a ** 2
    rr_of = lambda r: r ** 2 + a2

    def rhs(_, y):
        t, r, theta, phi, p_r, p_theta = y
        F_r, dF_r, P, delta = _radial_parts(params, r, p_r, sigma, eta_phi)
        F_th, dF_th, S, kappa = _polar_parts(params, theta, p_theta, sigma, eta_phi)
        s, c = math.sin(theta), math.cos(theta)
        q2 = r ** 2 + a2 * c ** 2
        F = F_r + F_th
        return [
            (-xi2 * P * rr_of(r) / delta + xi2 * S * a / kappa) / q2,
            delta * p_r / q2,
            kappa * p_theta / q2,
            (-xi2 * P * a / delta + xi2 * S / (kappa * s ** 2)) / q2,
            -(dF_r / (2.0 * q2) - F * r / q2 ** 2),
            -(dF_th / (2.0 * q2) + F * a2 * c * s / q2 ** 2),
        ]

    return rhs


class Trajectory:
    """Samples of a geodesic with its conserved-quantity drifts and exit event."""

    def __init__(self, params, solution, sigma, eta_phi, event=None):
        self.params = params
        self.s = solution.t
        self.t, self.r, self.theta, self.phi, self.p_r, self.p_theta = solution.y
        self.sigma = sigma
        self.eta_phi = eta_phi
        self.event = event
        self.status = solution.status

    def conserved_series(self):
        rows = [conserved_quantities(self.params, (t, r, th, ph), (self.sigma, pr, pth, self.eta_phi))
                for t, r, th, ph, pr, pth in zip(self.t, self.r, self.theta, self.phi, self.p_r, self.p_theta)]
        return {key: np.array([row[key] for row in rows]) for key in ('E', 'L', 'Q', 'H')}

    def drift(self):
        """Relative drift of Q and absolute drift of H over the whole run."""
        series = self.conserved_series()
        Q0 = series['Q'][0]
        return {
            'Q': float(np.max(np.abs(series['Q'] - Q0)) / max(abs(Q0), 1e-300)),
            'H': float(np.max(np.abs(series['H'] - series['H'][0]))),
            'E': 0.0,
            'L': 0.0,
        }

    def rows(self):
        return np.column_stack([self.s, self.t, self.r, self.theta, self.phi, self.p_r, self.p_theta]).tolist()


def geodesic_flow(params, state, affine_length, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, max_step=np.inf,
                  dense_points=2001, stop_at_phi=None):
    """
    Integrate Hamilton's equations of H = ½g⁻¹(p, p) with DOP853.

    p_t and p_φ are constants of the motion; (t, r, θ, φ, p_r, p_θ) are
    integrated. Leaving [r_event(1−δ_H), r_cosmo(1+δ_H)] stops the run and
    is recorded as ``trajectory.event == 'escaped-domain'``.
    ``stop_at_phi`` ends the run when φ reaches that value.
    """
    sigma, p_r, p_theta, eta_phi = state.momentum
    t0, r0, th0, ph0 = state.position
    H0 = conserved_quantities(params, state.position, state.momentum)['H']
    if abs(H0) > 1e-12 * max(1.0, abs(sigma) ** 2):
        logger.debug("Renormalizing p_θ for H=%g", H0)
        state = null_state_at(params, r0, th0, sigma, eta_phi, p_r=p_r, sign_theta=math.copysign(1.0, p_theta))
        p_theta = state.momentum[2]

    r_lo = params.r_min
    r_hi = params.r_max if params.has_cosmological_horizon else 1e4 * params.M

    def leave_low(_, y):
        return y[1] - r_lo

    def leave_high(_, y):
        return r_hi - y[1]

    leave_low.terminal = leave_high.terminal = True
    events = [leave_low, leave_high]
    if stop_at_phi is not None:
        def revolution(_, y):
            return y[3] - stop_at_phi
        revolution.terminal = True
        revolution.direction = 1
        events.append(revolution)

    solution = integrate.solve_ivp(
        _rhs(params, sigma, eta_phi),
        (0.0, float(affine_length)),
        [t0, r0, th0, ph0, p_r, p_theta],
        method='DOP853',
        rtol=rtol,
        atol=atol,
        max_step=max_step,
        events=events,
        t_eval=np.linspace(0.0, float(affine_length), dense_points),
    )
    event = None
    if solution.status == 1:
        if solution.t_events[0].size or solution.t_events[1].size:
            event = 'escaped-domain'
            logger.info("Geodesic left the domain at s=%g", solution.t[-1])
        else:
            event = 'revolution'
    if event == 'revolution':
        s_end = float(solution.t_events[2][0])
        y_end = solution.y_events[2][0]
        solution.t = np.append(solution.t, s_end)
        solution.y = np.column_stack([solution.y, y_end])
    return Trajectory(params, solution, sigma, eta_phi, event=event)


def photon_orbit_period(params, rtol=1e-13, atol=1e-14):
    """
    Coordinate time per revolution of the equatorial circular photon orbit
    of Schwarzschild(-de Sitter), integrated at E = 1. The exact value for
    Λ = 0 is 2π√27 M.
    """
    r = trapped_radius(params, -1.0, 1.0).r_trap
    eta = math.sqrt(trapping_function(params, r, -1.0, 0.0))
    state = make_state(params, (0.0, r, math.pi / 2, 0.0), (-1.0, 0.0, 0.0, eta))
    trajectory = geodesic_flow(params, state, 100.0 * params.M, rtol=rtol, atol=atol, stop_at_phi=2.0 * math.pi)
    if trajectory.event != 'revolution':
        raise KdsError('escaped-domain', "Photon orbit did not complete a revolution")
    return float(trajectory.t[-1])


def escape_rate(trajectory, r_trap):
    """Least-squares slope of log|r(s) − r_trap| over the run (positive for instability)."""
    dev = np.abs(trajectory.r - r_trap)
    keep = dev > 0
    if keep.sum() < 2:
        return 0.0
    slope, _ = np.polyfit(trajectory.s[keep], np.log(dev[keep]), 1)
    return float(slope)

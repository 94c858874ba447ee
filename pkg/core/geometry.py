# core/geometry.py
"""
Closed-form Kerr–de Sitter background.

Horizon function, auxiliary scalars, the Boyer–Lindquist metric and its
inverse, the Hawking-type vectorfields T̂, R̂ and the Carter decomposition
of the inverse metric. All evaluators broadcast over numpy arrays of r
and θ; tensor outputs carry two trailing axes of length 4 in the
(t, r, θ, φ) ordering.
"""
import logging
import math

import numpy as np

from .conf import kds_setting
from .exceptions import KdsError
from .models import AuxScalars, BlackHoleParams

logger = logging.getLogger(__name__)


# ── Horizon function ────────────────────────────────────────────────────


def delta_coefficients(M, a, Lambda):
    """Coefficients of Δ(r) = −(Λ/3)r⁴ + (1−γ)r² − 2Mr + a², highest first."""
    gamma = Lambda * a ** 2 / 3.0
    return np.array([-Lambda / 3.0, 0.0, 1.0 - gamma, -2.0 * M, a ** 2])


def delta_of(params, r):
    """Δ = (r²+a²)(1 − Λr²/3) − 2Mr."""
    r = np.asarray(r, dtype=float)
    return (r ** 2 + params.a ** 2) * (1.0 - params.Lambda * r ** 2 / 3.0) - 2.0 * params.M * r


def d_delta_dr(params, r):
    r = np.asarray(r, dtype=float)
    return -4.0 * params.Lambda * r ** 3 / 3.0 + 2.0 * (1.0 - params.gamma) * r - 2.0 * params.M


def d2_delta_dr2(params, r):
    r = np.asarray(r, dtype=float)
    return -4.0 * params.Lambda * r ** 2 + 2.0 * (1.0 - params.gamma)


def redshift_slope(params, c1=None):
    """c₁/∂_rΔ + ∂_rΔ/(32r²) at r_event."""
    c1 = kds_setting('REDSHIFT_C1') if c1 is None else c1
    rH = params.r_event
    k = float(d_delta_dr(params, rH))
    if k <= 0:
        raise KdsError('degenerate-surface-gravity', "∂_rΔ must be positive at the event horizon", value=k)
    return c1 / k + k / (32.0 * rH ** 2)


def sds_horizons_closed_form(M, Lambda):
    """
    Event and cosmological radii of Schwarzschild–de Sitter from the
    trigonometric solution of the cubic.
    """
    if Lambda <= 0:
        return 2.0 * M, math.inf
    s = math.sqrt(Lambda)
    phase = math.acos(3.0 * s * M) / 3.0
    return 2.0 / s * math.cos(phase + math.pi / 3.0), 2.0 / s * math.cos(phase - math.pi / 3.0)


def sds_horizon_taylor(M, Lambda):
    """Leading Taylor expansions of the two SdS horizons in Λ."""
    r_event = 2.0 * M + 8.0 * M ** 3 * Lambda / 3.0
    if Lambda <= 0:
        return r_event, math.inf
    r_cosmo = math.sqrt(3.0 / Lambda) - M - math.sqrt(3.0) / 2.0 * M ** 2 * math.sqrt(Lambda)
    return r_event, r_cosmo


def _positive_roots(M, a, Lambda):
    coeffs = delta_coefficients(M, a, Lambda)
    coeffs = np.trim_zeros(coeffs, 'f')
    roots = np.roots(coeffs)
    scale = max(M, 1e-300)
    real = roots[np.abs(roots.imag) <= 1e-7 * scale].real
    positive = np.sort(real[real > 1e-10 * scale])

    # Newton polish on the quartic
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    polished = []
    for root in positive:
        for _ in range(50):
            slope = dpoly(root)
            if slope == 0:
                break
            step = poly(root) / slope
            root -= step
            if abs(step) <= 1e-15 * max(abs(root), scale):
                break
        polished.append(float(root))
    return polished


def make_params(M, a, Lambda, delta_H=None, delta_red=None, delta_trap=None, r0=None):
    """
    Build a validated BlackHoleParams, solving Δ = 0 for the horizons.

    Roots come from the companion-matrix eigenvalues of the quartic Δ
    (numpy.roots) polished by Newton. When ``r0`` is omitted it defaults
    to ``KDS['R0_OVER_M']``·M, moved to the middle of the admissible window
    (r_event + M, ½r_cosmo − M) when Λ makes that default infeasible.

    Raises:
        KdsError('regime'): slow-rotation or small-Λ bounds violated, or no
            admissible r0.
        KdsError('no-horizon'): Δ has fewer positive roots than a
            subextremal black hole.
    """
    M, a, Lambda = float(M), float(a), float(Lambda)
    delta_H = kds_setting('DELTA_H') if delta_H is None else float(delta_H)
    delta_red = kds_setting('DELTA_RED') if delta_red is None else float(delta_red)
    delta_trap = kds_setting('DELTA_TRAP') if delta_trap is None else float(delta_trap)

    if not M > 0:
        raise KdsError('regime', "Mass must be positive", M=M)
    if Lambda < 0:
        raise KdsError('regime', "Negative cosmological constant is not supported", Lambda=Lambda)

    roots = _positive_roots(M, a, Lambda)
    expected = 2 if Lambda > 0 else 1
    if len(roots) < expected:
        raise KdsError('no-horizon', "Δ has too few positive roots", M=M, a=a, Lambda=Lambda)

    if Lambda > 0:
        r_event, r_cosmo = roots[-2], roots[-1]
        r_inner = roots[-3] if len(roots) >= 3 else None
    else:
        r_event, r_cosmo = roots[-1], math.inf
        r_inner = roots[-2] if len(roots) >= 2 else None

    probe = BlackHoleParams(M, a, Lambda, delta_H, delta_red, delta_trap, 0.0, r_event, r_cosmo)
    r_mid = 0.5 * (r_event + (r_cosmo if Lambda > 0 else 4.0 * r_event))
    if not float(delta_of(probe, r_mid)) > 0:
        raise KdsError('no-horizon', "Δ is not positive between the horizons", M=M, a=a, Lambda=Lambda)

    if r0 is None:
        r0 = kds_setting('R0_OVER_M') * M
        if Lambda > 0 and not r0 + M < 0.5 * r_cosmo:
            r0 = 0.5 * (r_event + 0.5 * r_cosmo)
            logger.debug("r0 moved to %.6g for Lambda=%.3g", r0, Lambda)

    params = BlackHoleParams(
        M=M, a=a, Lambda=Lambda,
        delta_H=delta_H, delta_red=delta_red, delta_trap=delta_trap,
        r0=float(r0), r_event=r_event, r_cosmo=r_cosmo, r_inner=r_inner,
    )
    params.clean()
    logger.debug("Horizons for M=%g a=%g Lambda=%g: r_event=%.15g r_cosmo=%s",
                 M, a, Lambda, r_event, r_cosmo)
    return params


# ── Auxiliary scalars ───────────────────────────────────────────────────


def aux_scalars(params, r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    a = params.a
    cos = np.cos(theta)
    delta = delta_of(params, r)
    q = r + 1j * a * cos
    q_abs2 = r ** 2 + a ** 2 * cos ** 2
    kappa = 1.0 + params.gamma * cos ** 2
    return AuxScalars(
        delta=delta,
        q_complex=q,
        q_abs2=q_abs2,
        kappa=kappa,
        gamma=params.gamma,
        upsilon=delta / (r ** 2 + a ** 2),
    )


def _check_regular(delta, r):
    if np.any(np.abs(delta) <= 1e-14 * np.maximum(np.asarray(r) ** 2, 1.0)):
        raise KdsError('coordinate-singular', "Boyer–Lindquist components are singular where Δ = 0")


# ── Metric ──────────────────────────────────────────────────────────────


def metric_bl(params, r, theta):
    """Covariant KdS metric in (t, r, θ, φ)."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    aux = aux_scalars(params, r, theta)
    _check_regular(aux.delta, r)
    a = params.a
    xi2 = (1.0 + params.gamma) ** 2
    sin2 = np.sin(theta) ** 2
    A = aux.delta / (xi2 * aux.q_abs2)
    B = aux.kappa * sin2 / (xi2 * aux.q_abs2)
    rr = r ** 2 + a ** 2

    g = np.zeros(r.shape + (4, 4))
    g[..., 0, 0] = -A + B * a ** 2
    g[..., 0, 3] = g[..., 3, 0] = A * a * sin2 - B * a * rr
    g[..., 3, 3] = -A * a ** 2 * sin2 ** 2 + B * rr ** 2
    g[..., 1, 1] = aux.q_abs2 / aux.delta
    g[..., 2, 2] = aux.q_abs2 / aux.kappa
    return g


def inverse_metric_bl(params, r, theta):
    """Contravariant KdS metric in (t, r, θ, φ), assembled from the Carter form."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    aux = aux_scalars(params, r, theta)
    _check_regular(aux.delta, r)
    parts = carter_decomposition(params, r, theta)
    rr = r ** 2 + params.a ** 2
    That, Rvec = parts['That'], np.zeros(r.shape + (4,))
    Rvec[..., 1] = 1.0
    scaled = (
        -(rr ** 2 / aux.delta)[..., None, None] * _outer(That, That)
        + aux.delta[..., None, None] * _outer(Rvec, Rvec)
        + aux.q_abs2[..., None, None] * parts['O']
    )
    return scaled / aux.q_abs2[..., None, None]


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


def hawking_vectorfields(params, r, theta):
    """T̂ = (1+γ)(T + a/(r²+a²)Φ) and R̂ = Δ/(r²+a²)∂_r in BL components."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    a = params.a
    That = np.zeros(r.shape + (4,))
    That[..., 0] = 1.0 + params.gamma
    That[..., 3] = (1.0 + params.gamma) * a / (r ** 2 + a ** 2)
    Rhat = np.zeros(r.shape + (4,))
    Rhat[..., 1] = delta_of(params, r) / (r ** 2 + a ** 2)
    return That, Rhat


def carter_decomposition(params, r, theta):
    """
    T̂, R̂ and the Carter block O with
    |q|²g⁻¹ = −((r²+a²)²/Δ)T̂⊗T̂ + Δ∂_r⊗∂_r + |q|²O.

    O has no ∂_r component; |q|²O(p, p) is the Carter constant of a null
    covector p.
    """
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    aux = aux_scalars(params, r, theta)
    That, Rhat = hawking_vectorfields(params, r, theta)
    sin = np.sin(theta)
    xi2 = (1.0 + params.gamma) ** 2

    axial = np.zeros(r.shape + (4,))
    axial[..., 0] = params.a * sin ** 2
    axial[..., 3] = 1.0
    polar = np.zeros(r.shape + (4,))
    polar[..., 2] = 1.0
    O = (
        (xi2 / (aux.kappa * sin ** 2))[..., None, None] * _outer(axial, axial)
        + aux.kappa[..., None, None] * _outer(polar, polar)
    ) / aux.q_abs2[..., None, None]
    return {'That': That, 'Rhat': Rhat, 'O': O}


def carter_residual(params, r, theta):
    """Max-abs residual of the Carter decomposition against g⁻¹ = inv(g)."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    aux = aux_scalars(params, r, theta)
    parts = carter_decomposition(params, r, theta)
    rr = r ** 2 + params.a ** 2
    Rvec = np.zeros(r.shape + (4,))
    Rvec[..., 1] = 1.0
    assembled = (
        -(rr ** 2 / aux.delta)[..., None, None] * _outer(parts['That'], parts['That'])
        + aux.delta[..., None, None] * _outer(Rvec, Rvec)
        + aux.q_abs2[..., None, None] * parts['O']
    )
    direct = aux.q_abs2[..., None, None] * np.linalg.inv(metric_bl(params, r, theta))
    scale = np.max(np.abs(direct), axis=(-2, -1), keepdims=True)
    return np.max(np.abs(assembled - direct) / scale, axis=(-2, -1))


def metric_norm(g, u, v=None):
    """g(u, v) for covariant g and vectors (or g⁻¹ and covectors)."""
    v = u if v is None else v
    return np.einsum('...i,...ij,...j->...', u, g, v)


# ── Sampling ────────────────────────────────────────────────────────────


def exterior_samples(params, n, rng, r_max=None, theta_margin=0.05):
    """
    n random (r, θ) points with r_event < r < min(r_cosmo, r_max) and θ
    kept ``theta_margin`` away from the poles.
    """
    upper = params.r_cosmo if params.has_cosmological_horizon else 50.0 * params.M
    if r_max is not None:
        upper = min(upper, r_max)
    lower = params.r_event
    span = upper - lower
    r = lower + span * (0.001 + 0.998 * rng.random(n))
    theta = theta_margin + (math.pi - 2 * theta_margin) * rng.random(n)
    return r, theta


def domain_samples(params, n, rng, r_far=None, theta_margin=0.05):
    """n random (r, θ) points over the whole domain [r_min, r_max]."""
    upper = params.r_max if params.has_cosmological_horizon else (r_far or 50.0 * params.M)
    r = params.r_min + (upper - params.r_min) * rng.random(n)
    theta = theta_margin + (math.pi - 2 * theta_margin) * rng.random(n)
    return r, theta

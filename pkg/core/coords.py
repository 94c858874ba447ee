# core/coords.py
"""
Global coordinates τ, φ̃, t̄ of Kerr–de Sitter, the regions of the
spacetime, hypersurface normals and the tangent fields ν_Σ, ν_Σ*.

    τ = t + k(r),   φ̃ = φ + h(r),   t̄ = τ + ℓ(r)

k and h are log-divergent at both horizons (their derivatives carry 1/Δ)
so they are tabulated only on the open exterior; the frame action on τ
and φ̃ is nevertheless regular everywhere because it is read off the
global-chart components of the frame.
"""
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import fd
from .cutoffs import chi_ell, chi_glo
from .exceptions import KdsError
from .frames import frame_at, inverse_metric_global, metric_global
from .geometry import delta_of
from .models import RegionFlags, SliceNormal

logger = logging.getLogger(__name__)

NORMAL_KINDS = ('Sigma_tau', 'Sigma_star', 'A_boundary', 'Sigma_in_hat')


# ── Coordinate functions ────────────────────────────────────────────────


def k_prime(params, r):
    """k′ = (1+γ)(1−2χ_glo)((r²+a²)/Δ − M²/r²)."""
    r = np.asarray(r, float)
    chi, _, _ = chi_glo(params, r)
    rr = r ** 2 + params.a ** 2
    return (1.0 + params.gamma) * (1.0 - 2.0 * chi) * (rr / delta_of(params, r) - params.M ** 2 / r ** 2)


def h_prime(params, r):
    """h′ = (1−2χ_glo)a(1+γ)/Δ."""
    r = np.asarray(r, float)
    chi, _, _ = chi_glo(params, r)
    return (1.0 - 2.0 * chi) * params.a * (1.0 + params.gamma) / delta_of(params, r)


def ell_prime(params, r):
    """ℓ′ = χ_ell ∈ [0, 1]."""
    value, _, _ = chi_ell(params, r)
    return value


@dataclass(frozen=True)
class CoordFunctions:
    """
    Antiderivatives k, h, ℓ with base points k(r₀) = h(r₀) = 0 and
    ℓ(2r₀) = 0, evaluated by adaptive quadrature on demand.
    """

    params: object

    def _quad(self, integrand, lo, hi):
        with warnings.catch_warnings():
            warnings.simplefilter('error', integrate.IntegrationWarning)
            try:
                value, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
            except integrate.IntegrationWarning as exc:
                raise KdsError('quadrature', f"Quadrature failed on [{lo:.6g}, {hi:.6g}]: {exc}")
        return value

    def _check_exterior(self, r):
        p = self.params
        if not (p.r_event < r < p.r_cosmo):
            raise KdsError('quadrature', "k and h diverge at the horizons; r must lie strictly between them", r=r)
        margin = 1e-8 * p.M
        if r - p.r_event < margin or (p.has_cosmological_horizon and p.r_cosmo - r < margin):
            raise KdsError('quadrature', "r too close to a horizon for k, h quadrature", r=r)

    def k(self, r):
        self._check_exterior(r)
        return self._quad(lambda x: float(k_prime(self.params, x)), self.params.r0, r)

    def h(self, r):
        self._check_exterior(r)
        return self._quad(lambda x: float(h_prime(self.params, x)), self.params.r0, r)

    def ell(self, r):
        base = 2.0 * self.params.r0
        return self._quad(lambda x: float(ell_prime(self.params, x)), base, r)

    def tau_from_bl(self, t, r):
        return t + self.k(r)

    def tbar(self, tau, r):
        return tau + self.ell(r)


def coord_functions(params):
    return CoordFunctions(params)


def simpson_ell(params, lo, hi, n=2001):
    """Composite Simpson value of ∫ℓ′ over [lo, hi], the quadrature cross-check."""
    x = np.linspace(lo, hi, n)
    return float(integrate.simpson(ell_prime(params, x), x=x))


# ── Frame action ────────────────────────────────────────────────────────


def frame_action_on_coords(params, r, theta, kind='global'):
    """
    Table of e_μ(x) for x ∈ {τ, r, θ, φ̃, t̄} and μ ∈ {1, 2, 3, 4}.

    Returns a dict keyed by 'e1'..'e4', each a dict of coordinate name to
    value. e(t̄) = e(τ) + ℓ′e(r).
    """
    frame = frame_at(params, kind, r, theta)
    ell = ell_prime(params, frame.r)
    table = {}
    for name, vec in zip(('e1', 'e2', 'e3', 'e4'), (frame.e1, frame.e2, frame.e3, frame.e4)):
        table[name] = {
            'tau': vec[..., 0],
            'r': vec[..., 1],
            'theta': vec[..., 2],
            'phi': vec[..., 3],
            'tbar': vec[..., 0] + ell * vec[..., 1],
        }
    return table


def grad_tau_relation(params, r, theta):
    """
    e₂(τ) against a(1+γ)/κ·Re𝔍₂; both sides of ∇τ = (a(1+γ)/κ)Re𝔍, which
    reduces to ∇τ = aRe𝔍 when γ = 0.
    """
    frame = frame_at(params, 'global', r, theta)
    kappa = 1.0 + params.gamma * np.cos(frame.theta) ** 2
    lhs = frame.e2[..., 0]
    rhs = params.a * (1.0 + params.gamma) / kappa * frame.frak_j.J2.real
    return lhs, rhs


def timelikeness_report(params, r, theta):
    """
    The five scalars of the slice-timelikeness inequalities:
    g(Dτ, Dτ), g(Dt̄, Dt̄), e₄(τ), e₃(τ) and |∇τ|² − (8/9)e₄(τ)e₃(τ).
    """
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    g_inv = inverse_metric_global(params, r, theta)
    frame = frame_at(params, 'global', r, theta)
    ell = ell_prime(params, r)
    g_tau = g_inv[..., 0, 0]
    g_tbar = g_inv[..., 0, 0] + 2.0 * ell * g_inv[..., 0, 1] + ell ** 2 * g_inv[..., 1, 1]
    e4_tau = frame.e4[..., 0]
    e3_tau = frame.e3[..., 0]
    grad_tau2 = frame.e1[..., 0] ** 2 + frame.e2[..., 0] ** 2
    return {
        'g_dtau': g_tau,
        'g_dtbar': g_tbar,
        'e4_tau': e4_tau,
        'e3_tau': e3_tau,
        'angular_margin': grad_tau2 - 8.0 / 9.0 * e4_tau * e3_tau,
    }


def far_region_asymptotics(params, theta=math.pi / 3, radii=None):
    """
    e₃(τ) and (r²/M²)e₄(τ) over r ≥ r₀ + M; both stay between positive
    constants.

    Returns:
        dict with the two profiles and their max/min 'spread'.
    """
    if radii is None:
        r_hi = 50.0 * params.r0 if math.isinf(params.r_max) else 0.9 * params.r_cosmo
        radii = np.geomspace(params.r0 + params.M, r_hi, 40)
    radii = np.asarray(radii, float)
    rep = timelikeness_report(params, radii, np.full_like(radii, theta))
    e3 = rep['e3_tau']
    e4 = rep['e4_tau'] * radii ** 2 / params.M ** 2
    spread = max(float(np.max(e3) / np.min(e3)), float(np.max(e4) / np.min(e4)))
    if np.min(e3) <= 0 or np.min(e4) <= 0:
        spread = math.inf
    return {'r': radii, 'e3_tau': e3, 'e4_tau_scaled': e4, 'spread': spread}


def timelikeness_violations(params, r, theta):
    """Count of points violating each slice inequality."""
    rep = timelikeness_report(params, r, theta)
    r = np.asarray(r, float)
    return {
        'g_dtau': int(np.sum(rep['g_dtau'] > -params.M ** 2 / (8.0 * r ** 2))),
        'e4_tau': int(np.sum(rep['e4_tau'] <= 0)),
        'e3_tau': int(np.sum(rep['e3_tau'] <= 0)),
        'angular_margin': int(np.sum(rep['angular_margin'] > 0)),
        'g_dtbar': int(np.sum(rep['g_dtbar'] >= 0)),
    }


# ── Regions ─────────────────────────────────────────────────────────────


def region_flags(params, tau, r, coords=None):
    """
    Membership of (τ, r) in 𝓜_tot, 𝓜, 𝓜_e and in the trapping and
    redshift regions. Boundaries are included.
    """
    coords = coords or coord_functions(params)
    in_tot = params.r_min <= r <= params.r_max
    tbar = tau + coords.ell(r)
    return RegionFlags(
        in_M_tot=bool(in_tot),
        in_M=bool(in_tot and tau >= 0 and tbar >= 0),
        in_M_e=bool(in_tot and tau <= 0 and tbar >= 0),
        in_trap=bool(abs(1.0 - 3.0 * params.M / r) <= params.delta_trap),
        in_red=bool(r <= params.r_event * (1.0 + params.delta_red)),
    )


# ── Normals ─────────────────────────────────────────────────────────────


def normal(params, which, r, theta):
    """
    Normal of the named hypersurface from the global inverse metric:
    N_Σ = −∇τ, N_Σ* = −∇r, N_A = +∇r, N_Σ̂in = −∇t̄.
    """
    g_inv = inverse_metric_global(params, r, theta)
    if which == 'Sigma_tau':
        comps = -g_inv[..., 0, :]
    elif which == 'Sigma_star':
        comps = -g_inv[..., 1, :]
    elif which == 'A_boundary':
        comps = g_inv[..., 1, :]
    elif which == 'Sigma_in_hat':
        ell = ell_prime(params, r)
        comps = -(g_inv[..., 0, :] + np.asarray(ell)[..., None] * g_inv[..., 1, :])
    else:
        raise KdsError('support', f"Unknown hypersurface {which!r}")
    return SliceNormal(which=which, components=comps)


def sigma_decomposition(params, r, theta):
    """
    N_Σ = N⁴(e₄ + ½r⁻²λ e₃ + Y^b e_b) in the global frame.

    Returns λ, Y (shape (..., 2)), the normalization N⁴ and the
    reconstruction residual.
    """
    frame = frame_at(params, 'global', r, theta)
    N = normal(params, 'Sigma_tau', frame.r, frame.theta).components
    g = metric_global(params, frame.r, frame.theta)
    dot = lambda u, v: np.einsum('...i,...ij,...j->...', u, g, v)
    n3 = -0.5 * dot(N, frame.e4)
    n4 = -0.5 * dot(N, frame.e3)
    Y = np.stack([dot(N, frame.e1), dot(N, frame.e2)], axis=-1) / n4[..., None]
    lam = 2.0 * frame.r ** 2 * n3 / n4
    rebuilt = n4[..., None] * (
        frame.e4 + (0.5 * lam / frame.r ** 2)[..., None] * frame.e3
        + Y[..., 0, None] * frame.e1 + Y[..., 1, None] * frame.e2
    )
    residual = np.max(np.abs(rebuilt - N), axis=-1) / np.max(np.abs(N), axis=-1)
    return {'lambda': lam, 'Y': Y, 'N4': n4, 'residual': residual}


def nu_tangents(params, r, theta):
    """
    ν_Σ = e₄ − ½r⁻²λe₃ (tangent to Σ(τ), g(ν_Σ, ν_Σ) = 2λr⁻²) and
    ν_Σ* = ½(λ_glo⁻¹Δ/|q|² e₄ + λ_glo e₃) (tangent to {r = const},
    g(ν_Σ*, ν_Σ*) = −Δ/|q|²), in global-chart components.
    """
    frame = frame_at(params, 'global', r, theta)
    lam_sigma = sigma_decomposition(params, r, theta)['lambda']
    nu_sigma = frame.e4 - (0.5 * lam_sigma / frame.r ** 2)[..., None] * frame.e3
    lam = frame.conformal_factor
    q2 = frame.r ** 2 + params.a ** 2 * np.cos(frame.theta) ** 2
    D = delta_of(params, frame.r) / q2
    nu_star = 0.5 * ((D / lam)[..., None] * frame.e4 + lam[..., None] * frame.e3)
    return {'nu_sigma': nu_sigma, 'nu_star': nu_star, 'lambda': lam_sigma}


def normal_decay(params, theta=math.pi / 3, radii=None):
    """
    Fitted decay orders of N_Σ(r) − 0 and N_Σ*(τ) − 1 in r over the far
    region of a Λ = 0 black hole; both are O(r⁻²).
    """
    radii = np.geomspace(40.0 * params.M, 400.0 * params.M, 8) if radii is None else np.asarray(radii)
    g_inv = inverse_metric_global(params, radii, np.full_like(radii, theta))
    n_sigma_r = -g_inv[..., 0, 1]
    n_star_tau = -g_inv[..., 1, 0]
    # N_Σ(r) and N_Σ*(τ) both tend to (1+γ); the deviation carries the decay
    xi = 1.0 + params.gamma
    dev_sigma = np.abs(n_sigma_r - xi)
    dev_star = np.abs(n_star_tau - xi)
    return {
        'sigma_order': -fd.fitted_order(radii, dev_sigma),
        'star_order': -fd.fitted_order(radii, dev_star),
    }


def nu_divergence(params, r, theta, h=1e-3):
    """
    Spacetime divergence of ν_Σ by centered differences of √|g|ν^α in
    (r, θ), against trχ. Returns (div, tr_chi).
    """
    def density(x, y):
        g = metric_global(params, x, y)
        sqrt_g = np.sqrt(np.abs(np.linalg.det(g)))
        return sqrt_g[..., None] * nu_tangents(params, x, y)['nu_sigma']

    r = np.asarray(r, float)
    theta = np.asarray(theta, float)
    sqrt_g = np.sqrt(np.abs(np.linalg.det(metric_global(params, r, theta))))
    d_r = fd.derivative(lambda x: density(x, theta)[..., 1], r, h, order=4)
    d_th = fd.derivative(lambda y: density(r, y)[..., 2], theta, h, order=4)
    div = (d_r + d_th) / sqrt_g
    return div, frame_at(params, 'global', r, theta).ricci.tr_chi


def volume_weights(params, r, theta):
    """√|g| of the global chart and the coordinate measure r² sinθ of the integration convention."""
    g = metric_global(params, r, theta)
    return {
        'sqrt_g': np.sqrt(np.abs(np.linalg.det(g))),
        'round': np.asarray(r) ** 2 * np.sin(theta),
    }


def coords_dump(params, r, theta):
    """JSON-ready dump of coordinate data at one point."""
    table = frame_action_on_coords(params, r, theta)
    rep = timelikeness_report(params, r, theta)
    coords = coord_functions(params)
    payload = {
        'r': float(r), 'theta': float(theta),
        'k_prime': float(k_prime(params, r)), 'h_prime': float(h_prime(params, r)),
        'ell_prime': float(ell_prime(params, r)),
        'frame_action': {e: {x: float(v) for x, v in row.items()} for e, row in table.items()},
        'timelikeness': {k: float(v) for k, v in rep.items()},
    }
    if params.r_event < r < params.r_cosmo:
        try:
            payload['k'] = coords.k(r)
            payload['h'] = coords.h(r)
        except KdsError as exc:
            logger.warning("Skipping k, h at r=%g: %s", r, exc)
    payload['ell'] = coords.ell(r)
    return payload

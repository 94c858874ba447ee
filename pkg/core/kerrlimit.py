# core/kerrlimit.py
"""
Λ → 0 comparison of Kerr–de Sitter with Kerr in the shared chart.

Points are identified by their (τ, r, θ, φ̃) coordinate values, so the
comparison is between the component arrays of the two geometries. The
convergence is first order in Λ on every compact set but not uniform on
r ≲ Λ^{−1/2}.
"""
import logging
import math

import numpy as np

from . import fd
from .coords import frame_action_on_coords
from .frames import frame_at, frame_vectors, metric_global
from .geometry import make_params
from .models import ComparisonReport

logger = logging.getLogger(__name__)

RICCI_KEYS = ('tr_chi', 'atr_chi', 'tr_chib', 'atr_chib', 'eta', 'etab', 'omega', 'omegab')


def kerr_counterpart(params):
    """The Kerr black hole with the same M, a, small parameters and r₀."""
    return make_params(params.M, params.a, 0.0, params.delta_H, params.delta_red, params.delta_trap, r0=params.r0)


def compact_sets(n_values):
    """
    K_n = {|τ| ≤ n} ∩ {τ + 3r/2 ≤ 2n}, described by (r_max, τ_window).

    On K_n, r ≤ (2n − τ)·2/3 ≤ 2n, the bound reached at τ = −n.
    """
    return [(2.0 * n, (-float(n), float(n))) for n in n_values]


# ── Traceless projection ────────────────────────────────────────────────


def _horizontal_covectors(params, r, theta):
    e1, e2, _, _ = frame_vectors(params, 'global', r, theta)
    g = metric_global(params, r, theta)
    return np.einsum('...ij,...j->...i', g, e1), np.einsum('...ij,...j->...i', g, e2)


def pi_lambda(psi, params, r, theta, kerr=None):
    """
    Map a Kerr 𝔰₂ tensor to its Kerr–de Sitter counterpart.

    ``psi`` holds the 2×2 frame components (ψ_ab) in the Kerr horizontal
    frame (trailing axes). The tensor ψ_μν = ψ_ab e^a_μ e^b_ν is evaluated
    on the Kerr–de Sitter horizontal frame and its trace removed:
    Π_Λψ = ψ − ½(g_Λ^{cd}ψ_cd)g_Λ.

    Returns the 2×2 components in the Kerr–de Sitter frame.
    """
    psi = np.asarray(psi, float)
    if params.Lambda == 0:
        return psi.copy()
    kerr = kerr or kerr_counterpart(params)
    f1, f2 = _horizontal_covectors(kerr, r, theta)
    flats = np.stack([f1, f2], axis=-2)
    tensor = np.einsum('...ab,...ai,...bj->...ij', psi, flats, flats)
    e1, e2, _, _ = frame_vectors(params, 'global', r, theta)
    frame = np.stack([e1, e2], axis=-2)
    projected = np.einsum('...ij,...ci,...dj->...cd', tensor, frame, frame)
    trace = projected[..., 0, 0] + projected[..., 1, 1]
    projected[..., 0, 0] -= 0.5 * trace
    projected[..., 1, 1] -= 0.5 * trace
    return projected


def random_traceless(rng, shape=()):
    """Symmetric traceless 2×2 components with unit Frobenius norm."""
    u = rng.standard_normal(shape + (2,))
    psi = np.zeros(shape + (2, 2))
    psi[..., 0, 0], psi[..., 1, 1] = u[..., 0], -u[..., 0]
    psi[..., 0, 1] = psi[..., 1, 0] = u[..., 1]
    return psi / np.linalg.norm(psi, axis=(-2, -1), keepdims=True)


def projection_defect(params, r, theta, rng, kerr=None):
    """max ‖Π_Λψ − ψ‖/‖ψ‖ over random traceless ψ at the given points."""
    r = np.asarray(r, float)
    psi = random_traceless(rng, r.shape)
    out = pi_lambda(psi, params, r, theta, kerr=kerr)
    return float(np.max(np.linalg.norm(out - psi, axis=(-2, -1))))


# ── Transition matrix ───────────────────────────────────────────────────


def transition_matrix(params, r, theta=math.pi / 2):
    """
    C_Λ with rows re₄, re₃, re₂, re₁ expanded in r∂_t̄, r∂_r, ∂_φ̃, ∂_θ.

    In the (t̄, r, θ, φ̃) chart ∂_t̄ = ∂_τ and e(t̄) = e(τ) + ℓ′e(r), so the
    row of re_μ is (e_μ(t̄), e_μ(r), r e_μ(φ̃), r e_μ(θ)).
    """
    table = frame_action_on_coords(params, r, theta, kind='global')
    r = np.asarray(r, float)
    rows = []
    for name in ('e4', 'e3', 'e2', 'e1'):
        action = table[name]
        rows.append(np.stack([action['tbar'], action['r'], r * action['phi'], r * action['theta']], axis=-1))
    return np.stack(rows, axis=-2)


def transition_inverse_residual(params, r, theta=math.pi / 2):
    C = transition_matrix(params, r, theta)
    identity = np.broadcast_to(np.eye(4), C.shape)
    return float(np.max(np.abs(C @ np.linalg.inv(C) - identity)))


def transition_determinant(params, r, theta=math.pi / 2):
    return np.linalg.det(transition_matrix(params, r, theta))


# ── Comparison ──────────────────────────────────────────────────────────


def _sample_grid(params, kerr, r_max, n_r, n_theta):
    lo = 1.05 * max(params.r_event, kerr.r_event)
    r = np.linspace(lo, r_max, n_r)
    theta = np.linspace(0.1, math.pi - 0.1, n_theta)
    return np.meshgrid(r, theta, indexing='ij')


def compare_once(params, r_max=None, tau_window=(0.0, 0.0), n_r=60, n_theta=9, rng=None):
    """Differences between ``params`` and its Kerr counterpart on r ≤ r_max."""
    rng = rng or np.random.default_rng(0)
    kerr = kerr_counterpart(params)
    r_max = 10.0 * params.M if r_max is None else r_max
    R, TH = _sample_grid(params, kerr, r_max, n_r, n_theta)

    metric_diff = float(np.max(np.abs(metric_global(params, R, TH) - metric_global(kerr, R, TH))))
    transition = float(np.max(np.linalg.norm(
        transition_matrix(params, R, TH) - transition_matrix(kerr, R, TH), axis=(-2, -1))))
    ricci_l, ricci_0 = frame_at(params, 'global', R, TH).ricci, frame_at(kerr, 'global', R, TH).ricci
    ricci_diff = max(float(np.max(np.abs(getattr(ricci_l, key) - getattr(ricci_0, key)))) for key in RICCI_KEYS)
    defect = projection_defect(params, R, TH, rng, kerr=kerr)
    return ComparisonReport(
        compact_set=(float(r_max), tuple(tau_window)),
        metric_diff=metric_diff,
        frame_transition_residual=transition,
        projection_defect=defect,
        ricci_diff=ricci_diff,
    )


def compare(M, a, lambdas, r_max=None, n_values=None, seed=0):
    """
    Sweep Λ and fit the order of every difference in Λ.

    All black holes share the r₀ chosen for the largest Λ so the frames
    use the same transition band.

    Returns:
        dict with 'reports' (Λ → [ComparisonReport per compact set]),
        'orders' (field → fitted order per compact set) and 'rows'.
    """
    lambdas = sorted(float(x) for x in lambdas if x > 0)
    r0 = make_params(M, a, lambdas[-1]).r0
    if n_values is None:
        sets = [(10.0 * M if r_max is None else r_max, (0.0, 0.0))]
    else:
        sets = compact_sets(n_values)
    reports, rows = {}, []
    for Lambda in lambdas:
        params = make_params(M, a, Lambda, r0=r0)
        per_set = []
        for set_r_max, window in sets:
            report = compare_once(params, min(set_r_max, 0.9 * params.r_cosmo), window,
                                  rng=np.random.default_rng(seed))
            per_set.append(report)
            rows.append([Lambda, report.compact_set[0], report.metric_diff,
                         report.frame_transition_residual, report.projection_defect, report.ricci_diff])
        reports[Lambda] = per_set
        logger.info("Lambda=%.3g metric_diff=%.3e transition=%.3e", Lambda,
                    per_set[0].metric_diff, per_set[0].frame_transition_residual)

    orders = {}
    for field in ('metric_diff', 'frame_transition_residual', 'projection_defect', 'ricci_diff'):
        orders[field] = [
            fd.fitted_order(lambdas, [getattr(reports[L][k], field) for L in lambdas])
            for k in range(len(sets))
        ]
    return {'reports': reports, 'orders': orders, 'rows': rows}


def non_uniformity_witness(M, a, Lambda, c=1.0, n_r=200):
    """
    sup over r₀ + M ≤ r ≤ cΛ^{−1/2} of ‖C_Λ − C_0‖ at the equator.

    The null block of C_Λ carries Λr²/3 corrections, so the supremum stays
    of order c²/3 however small Λ is.
    """
    params = make_params(M, a, Lambda)
    kerr = kerr_counterpart(params)
    r_hi = min(c / math.sqrt(Lambda), 0.95 * params.r_cosmo)
    r = np.linspace(params.r0 + params.M, r_hi, n_r)
    diff = np.linalg.norm(transition_matrix(params, r) - transition_matrix(kerr, r), axis=(-2, -1))
    return float(np.max(diff))

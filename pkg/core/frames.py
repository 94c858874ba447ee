# core/frames.py
"""
Principal null frames of Kerr–de Sitter.

Three frame kinds are supported, all conformally related to the
principal outgoing frame by e₄ ↦ λe₄, e₃ ↦ λ⁻¹e₃:

    outgoing   λ = 1
    ingoing    λ = Δ/|q|²
    global     λ = (1 − χ_glo)Δ/|q|² + χ_glo

Frame vectors are returned as coordinate components in the global chart
(τ, r, θ, φ̃) where the global frame is regular across both horizons.
The Ricci coefficients of each kind are the outgoing closed forms pushed
through the conformal transformation laws, written so that every ratio
that is finite in the limit is evaluated without dividing by Δ.

Conventions: χ_ab = g(D_a e₄, e_b), ζ_a = ½g(D_a e₄, e₃),
η_a = ½g(D₃e₄, e_a), η̲_a = ½g(D₄e₃, e_a), ω = ¼g(D₄e₄, e₃),
ω̲ = ¼g(D₃e₃, e₄), (Λ_μ)₁₂ = g(D_μ e₂, e₁), and ASD one-forms are stored
as (F₁, F₂) with F₂ = −iF₁.
"""
import logging

import numpy as np

from . import fd
from .cutoffs import chi_glo, chi_zero
from .exceptions import KdsError
from .geometry import aux_scalars, d_delta_dr, redshift_slope
from .models import FrakJ, FramePoint, RicciTable

logger = logging.getLogger(__name__)

FRAME_KINDS = ('outgoing', 'ingoing', 'global')


def _safe_ratio(num, den):
    """num/den with 0 wherever num vanishes identically."""
    num, den = np.broadcast_arrays(np.asarray(num, float), np.asarray(den, float))
    out = np.zeros(num.shape)
    mask = num != 0
    out[mask] = num[mask] / den[mask]
    return out


class _Point:
    """Scalars shared by every closed form at (r, θ)."""

    def __init__(self, params, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        self.params = params
        self.r, self.theta = r, theta
        aux = aux_scalars(params, r, theta)
        self.delta = aux.delta
        self.q = aux.q_complex
        self.q2 = aux.q_abs2
        self.qabs = np.sqrt(aux.q_abs2)
        self.kappa = aux.kappa
        self.sqk = np.sqrt(aux.kappa)
        self.xi = 1.0 + params.gamma
        self.rr = r ** 2 + params.a ** 2
        self.sin, self.cos = np.sin(theta), np.cos(theta)
        self.D = self.delta / self.q2
        self.dD = d_delta_dr(params, r) / self.q2 - 2.0 * r * self.delta / self.q2 ** 2
        self.chi, self.dchi, _ = chi_glo(params, r)


def _conformal(pt, kind):
    """
    The conformal data of ``kind`` relative to the outgoing frame.

    Returns λ, λ(1−χ)/Δ, χ/λ, Δ/λ, ω, ω̲ and ∂_θ log λ.
    """
    chi, delta, q2 = pt.chi, pt.delta, pt.q2
    if kind == 'outgoing':
        if np.any((delta <= 0) & (chi < 1)):
            raise KdsError('frame-singular', "Outgoing e4 is singular where Δ <= 0")
        lam = np.ones_like(pt.r)
        L1 = _safe_ratio(1.0 - chi, delta)
        L3 = chi
        delta_over_lam = delta
        omega = np.zeros_like(pt.r)
        omegab = 0.5 * pt.dD
        dth_log_lam = np.zeros_like(pt.r)
    elif kind == 'ingoing':
        if np.any((delta <= 0) & (chi > 0)):
            raise KdsError('frame-singular', "Ingoing e3 is singular where Δ <= 0 beyond the transition band")
        lam = pt.D
        L1 = (1.0 - chi) / q2
        L3 = _safe_ratio(chi * q2, delta)
        delta_over_lam = q2
        omega = -0.5 * pt.dD
        omegab = np.zeros_like(pt.r)
        dth_log_lam = 2.0 * pt.params.a ** 2 * pt.cos * pt.sin / q2
    elif kind == 'global':
        lam = (1.0 - chi) * pt.D + chi
        lam_q2 = (1.0 - chi) * delta + chi * q2
        L1 = (1.0 - chi) ** 2 / q2 + _safe_ratio(chi * (1.0 - chi), delta)
        L3 = _safe_ratio(chi * q2, lam_q2)
        delta_over_lam = np.where(chi == 0, q2, _safe_ratio(delta * q2, lam_q2))
        dlam = (1.0 - chi) * pt.dD + pt.dchi * (1.0 - pt.D)
        omega = -0.5 * dlam
        omegab = _safe_ratio(chi * pt.dD - pt.dchi * pt.D * (1.0 - pt.D), 2.0 * lam ** 2)
        dth_log_lam = (1.0 - chi) * delta_over_lam * 2.0 * pt.params.a ** 2 * pt.cos * pt.sin / q2 ** 2
    else:
        raise KdsError('frame-singular', f"Unknown frame kind {kind!r}")
    return {
        'lam': lam, 'L1': L1, 'L3': L3, 'delta_over_lam': delta_over_lam,
        'omega': omega, 'omegab': omegab, 'dth_log_lam': dth_log_lam,
    }


# ── Frame vectors ───────────────────────────────────────────────────────


def _vectors(pt, conf):
    p = pt.params
    a, M, r = p.a, p.M, pt.r
    shape = r.shape + (4,)
    lam, L1, L3, dl = conf['lam'], conf['L1'], conf['L3'], conf['delta_over_lam']

    e4 = np.zeros(shape)
    e4[..., 0] = pt.xi * (2.0 * pt.rr * L1 - lam * (1.0 - 2.0 * pt.chi) * M ** 2 / r ** 2)
    e4[..., 1] = lam
    e4[..., 3] = 2.0 * a * pt.xi * L1

    e3 = np.zeros(shape)
    e3[..., 0] = pt.xi / pt.q2 * (2.0 * pt.rr * L3 + (1.0 - 2.0 * pt.chi) * dl * M ** 2 / r ** 2)
    e3[..., 1] = -dl / pt.q2
    e3[..., 3] = 2.0 * a * pt.xi * L3 / pt.q2

    e1 = np.zeros(shape)
    e1[..., 2] = pt.sqk / pt.qabs

    e2 = np.zeros(shape)
    e2[..., 0] = a * pt.xi * pt.sin / (pt.qabs * pt.sqk)
    e2[..., 3] = pt.xi / (pt.qabs * pt.sqk * pt.sin)
    return e1, e2, e3, e4


def frame_vectors(params, kind, r, theta):
    """(e₁, e₂, e₃, e₄) of ``kind`` in global-chart components."""
    pt = _Point(params, r, theta)
    return _vectors(pt, _conformal(pt, kind))


def frame_vectors_bl(params, kind, r, theta):
    """Outgoing or ingoing frame in Boyer–Lindquist components (singular at Δ = 0)."""
    pt = _Point(params, r, theta)
    if np.any(pt.delta == 0):
        raise KdsError('coordinate-singular', "Boyer–Lindquist frame components are singular where Δ = 0")
    a = params.a
    shape = pt.r.shape + (4,)
    e4 = np.zeros(shape)
    e4[..., 0] = pt.xi * pt.rr / pt.delta
    e4[..., 1] = 1.0
    e4[..., 3] = a * pt.xi / pt.delta
    e3 = np.zeros(shape)
    e3[..., 0] = pt.xi * pt.rr / pt.q2
    e3[..., 1] = -pt.D
    e3[..., 3] = a * pt.xi / pt.q2
    if kind == 'ingoing':
        e4, e3 = pt.D[..., None] * e4, e3 / pt.D[..., None]
    elif kind != 'outgoing':
        raise KdsError('coordinate-singular', "Only outgoing and ingoing frames have BL components")
    e1, e2, _, _ = _vectors(pt, _conformal(pt, 'global'))
    return e1, e2, e3, e4


def inverse_metric_global(params, r, theta):
    """g⁻¹ in (τ, r, θ, φ̃) from the global frame: −½(e₃e₄ + e₄e₃) + e₁e₁ + e₂e₂."""
    e1, e2, e3, e4 = frame_vectors(params, 'global', r, theta)
    outer = lambda u, v: u[..., :, None] * v[..., None, :]
    return -0.5 * (outer(e3, e4) + outer(e4, e3)) + outer(e1, e1) + outer(e2, e2)


def metric_global(params, r, theta):
    """Covariant metric in (τ, r, θ, φ̃); regular across both horizons."""
    return np.linalg.inv(inverse_metric_global(params, r, theta))


def null_pairing(params, frame):
    """Matrix g(e_μ, e_ν) in the order (e₁, e₂, e₃, e₄)."""
    g = metric_global(params, frame.r, frame.theta)
    E = frame.vectors
    return np.einsum('...mi,...ij,...nj->...mn', E, g, E)


NULL_PAIRING = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -2.0],
    [0.0, 0.0, -2.0, 0.0],
])


def frame_components(params, frame, X):
    """
    Frame components (X¹, X², X³, X⁴) of a vector X given in global-chart
    components: X³ = −½g(X, e₄), X⁴ = −½g(X, e₃), X^a = g(X, e_a).
    """
    g = metric_global(params, frame.r, frame.theta)
    dot = lambda e: np.einsum('...i,...ij,...j->...', X, g, e)
    return np.stack([dot(frame.e1), dot(frame.e2), -0.5 * dot(frame.e4), -0.5 * dot(frame.e3)], axis=-1)


# ── Tables ──────────────────────────────────────────────────────────────


def _ricci(pt, conf):
    a = pt.params.a
    c, s, q2, qabs, sqk, r = pt.cos, pt.sin, pt.q2, pt.qabs, pt.sqk, pt.r
    lam, dl = conf['lam'], conf['delta_over_lam']
    zeros1 = np.zeros(r.shape + (2,))
    zeros2 = np.zeros(r.shape + (2, 2))

    eta = np.stack([-a ** 2 * sqk * c * s, a * r * sqk * s], axis=-1) / qabs[..., None] ** 3
    etab = np.stack([-a ** 2 * sqk * c * s, -a * r * sqk * s], axis=-1) / qabs[..., None] ** 3
    zeta_out = np.stack([a ** 2 * sqk * c * s, a * r * sqk * s], axis=-1) / qabs[..., None] ** 3
    grad_log_lam = np.stack([sqk / qabs * conf['dth_log_lam'], np.zeros_like(r)], axis=-1)

    return RicciTable(
        tr_chi=lam * 2.0 * r / q2,
        atr_chi=lam * 2.0 * a * c / q2,
        tr_chib=-2.0 * r * dl / q2 ** 2,
        atr_chib=2.0 * a * dl * c / q2 ** 2,
        eta=eta,
        etab=etab,
        zeta=zeta_out - grad_log_lam,
        xi=zeros1,
        xib=zeros1.copy(),
        omega=conf['omega'],
        omegab=conf['omegab'],
        chih=zeros2,
        chibh=zeros2.copy(),
    )


def _lambda_connection(pt, conf):
    a, p = pt.params.a, pt.params
    c, s, q2, qabs, sqk = pt.cos, pt.sin, pt.q2, pt.qabs, pt.sqk
    lam2 = (c / s) * (p.gamma * s ** 2 * q2 - a ** 2 * s ** 2 * pt.kappa - pt.kappa * q2) / (sqk * qabs ** 3)
    return {
        1: np.zeros_like(pt.r),
        2: lam2,
        3: -a * conf['delta_over_lam'] * c / q2 ** 2,
        4: -conf['lam'] * a * c / q2,
    }


def weyl_P(params, r, theta):
    """P = ρ + i*ρ = −2M/q³."""
    q = np.asarray(r) + 1j * params.a * np.cos(theta)
    return -2.0 * params.M / q ** 3


def frak_j(params, r, theta):
    """𝔍 = j + i*j with j = (0, √κ sinθ/|q|)."""
    pt = _Point(params, r, theta)
    j2 = pt.sqk * pt.sin / pt.qabs
    return FrakJ(J1=1j * j2, J2=j2 + 0j)


def frame_at(params, kind, r, theta):
    """
    The FramePoint of ``kind`` at (r, θ) (arrays broadcast).

    Raises:
        KdsError('frame-singular'): outgoing frame where Δ ≤ 0 with
            χ_glo < 1, or ingoing frame where Δ ≤ 0 with χ_glo > 0.
    """
    pt = _Point(params, r, theta)
    conf = _conformal(pt, kind)
    e1, e2, e3, e4 = _vectors(pt, conf)
    P = weyl_P(params, pt.r, pt.theta)
    zero = np.zeros_like(pt.r)
    return FramePoint(
        kind=kind,
        chart='global',
        r=pt.r,
        theta=pt.theta,
        e1=e1, e2=e2, e3=e3, e4=e4,
        ricci=_ricci(pt, conf),
        weyl={'P': P, 'rho': P.real, 'rho_dual': P.imag, 'A': zero, 'B': zero, 'Bbar': zero, 'Abar': zero},
        lambda_connection=_lambda_connection(pt, conf),
        conformal_factor=conf['lam'],
        frak_j=frak_j(params, r, theta),
    )


def frame_table(params, kind, r, theta):
    """JSON-ready dump of a single FramePoint."""
    frame = frame_at(params, kind, float(r), float(theta))
    ricci = frame.ricci
    as_list = lambda x: np.asarray(x).tolist()
    cplx = lambda z: [float(np.real(z)), float(np.imag(z))]
    return {
        'kind': kind, 'chart': frame.chart, 'r': float(r), 'theta': float(theta),
        'e1': as_list(frame.e1), 'e2': as_list(frame.e2),
        'e3': as_list(frame.e3), 'e4': as_list(frame.e4),
        'ricci': {
            'tr_chi': float(ricci.tr_chi), 'atr_chi': float(ricci.atr_chi),
            'tr_chib': float(ricci.tr_chib), 'atr_chib': float(ricci.atr_chib),
            'eta': as_list(ricci.eta), 'etab': as_list(ricci.etab), 'zeta': as_list(ricci.zeta),
            'xi': as_list(ricci.xi), 'xib': as_list(ricci.xib),
            'omega': float(ricci.omega), 'omegab': float(ricci.omegab),
        },
        'weyl': {'P': cplx(frame.weyl['P'])},
        'lambda_connection': {str(k): float(v) for k, v in frame.lambda_connection.items()},
        'conformal_factor': float(frame.conformal_factor),
        'frak_j': {'J1': cplx(frame.frak_j.J1), 'J2': cplx(frame.frak_j.J2)},
        'H': [cplx(z) for z in frame.H], 'Hb': [cplx(z) for z in frame.Hb], 'Z': [cplx(z) for z in frame.Z],
    }


# ── Finite-difference oracles ───────────────────────────────────────────


def christoffel_global(params, r, theta, h):
    """Γ^α_{βγ} in the global chart by centered differences of g in r and θ."""
    g_inv = inverse_metric_global(params, r, theta)
    dg = np.zeros(np.shape(r) + (4, 4, 4))  # dg[..., d, i, j] = ∂_d g_ij
    dg[..., 1, :, :] = fd.derivative(lambda x: metric_global(params, x, theta), r, h)
    dg[..., 2, :, :] = fd.derivative(lambda x: metric_global(params, r, x), theta, h)
    lowered = 0.5 * (
        np.einsum('...bdg->...dbg', dg)
        + np.einsum('...gdb->...dbg', dg)
        - np.einsum('...dbg->...dbg', dg)
    )
    # lowered[..., d, b, g] = ½(∂_b g_dg + ∂_g g_db − ∂_d g_bg)
    return np.einsum('...ad,...dbg->...abg', g_inv, lowered)


def connection_fd_oracle(params, kind, r, theta, h=1e-4):
    """
    Second-order finite-difference estimate of the connection of ``kind``.

    Builds C[μ, ν, λ] = g(D_{e_μ} e_ν, e_λ) from metric Christoffel symbols
    and differentiated frame components, then extracts the same named
    coefficients as the closed-form tables.
    """
    if not 1e-6 <= h / params.M <= 1e-3:
        logger.warning("FD step %g outside the recommended [1e-6, 1e-3]·M", h)
    r = np.asarray(r, float)
    theta = np.asarray(theta, float)
    vectors = lambda x, y: np.stack(frame_vectors(params, kind, x, y), axis=-2)
    E = vectors(r, theta)
    dE_dr = fd.derivative(lambda x: vectors(x, theta), r, h)
    dE_dth = fd.derivative(lambda y: vectors(r, y), theta, h)
    gamma = christoffel_global(params, r, theta, h)
    g = metric_global(params, r, theta)

    # (D_{e_μ} e_ν)^α = e_μ(e_ν^α) + Γ^α_{βγ} e_μ^β e_ν^γ
    directional = E[..., :, 1, None, None] * dE_dr[..., None, :, :] + E[..., :, 2, None, None] * dE_dth[..., None, :, :]
    cov = directional + np.einsum('...abg,...mb,...ng->...mna', gamma, E, E)
    C = np.einsum('...mna,...ab,...lb->...mnl', cov, g, E)

    e1, e2, e3, e4 = 0, 1, 2, 3
    chi = C[..., [e1, e2], e4, :][..., :, [e1, e2]]
    chib = C[..., [e1, e2], e3, :][..., :, [e1, e2]]
    return {
        'tr_chi': chi[..., 0, 0] + chi[..., 1, 1],
        'atr_chi': chi[..., 0, 1] - chi[..., 1, 0],
        'tr_chib': chib[..., 0, 0] + chib[..., 1, 1],
        'atr_chib': chib[..., 0, 1] - chib[..., 1, 0],
        'chih': 0.5 * (chi + np.swapaxes(chi, -1, -2)) - 0.5 * (chi[..., 0, 0] + chi[..., 1, 1])[..., None, None] * np.eye(2),
        'eta': 0.5 * C[..., e3, e4, :][..., [e1, e2]],
        'etab': 0.5 * C[..., e4, e3, :][..., [e1, e2]],
        'zeta': 0.5 * C[..., [e1, e2], e4, e3],
        'xi': 0.5 * C[..., e4, e4, :][..., [e1, e2]],
        'xib': 0.5 * C[..., e3, e3, :][..., [e1, e2]],
        'omega': 0.25 * C[..., e4, e4, e3],
        'omegab': 0.25 * C[..., e3, e3, e4],
        'lambda_connection': {mu + 1: C[..., mu, e2, e1] for mu in range(4)},
    }


# ── 𝔍 identities ───────────────────────────────────────────────────────


def _dJ1(pt):
    """Analytic ∂_r J₁ and ∂_θ J₁."""
    p = pt.params
    dr = -1j * pt.sqk * pt.sin * pt.r / pt.qabs ** 3
    dsqk = -p.gamma * pt.cos * pt.sin / pt.sqk
    dqabs = -p.a ** 2 * pt.cos * pt.sin / pt.qabs
    dth = 1j * ((dsqk * pt.sin + pt.sqk * pt.cos) / pt.qabs - pt.sqk * pt.sin * dqabs / pt.q2)
    return dr, dth


def frak_j_identities(params, r, theta, kind='global', h=1e-4):
    """
    Residuals of the 𝔍 identities at (r, θ).

    Transports along e₃, e₄ use the analytic chain rule; the horizontal
    identities (D⊗̂𝔍 = 0, D̄·𝔍 closed form, D(q) = −a𝔍) use a
    fourth-order centered θ-difference.
    """
    pt = _Point(params, r, theta)
    frame = frame_at(params, kind, r, theta)
    J = frame.frak_j
    lam = frame.lambda_connection
    ricci = frame.ricci
    dJ_dr, dJ_dth = _dJ1(pt)

    e4J = frame.e4[..., 1] * dJ_dr + frame.e4[..., 2] * dJ_dth
    e3J = frame.e3[..., 1] * dJ_dr + frame.e3[..., 2] * dJ_dth
    nabla4 = e4J - 1j * lam[4] * J.J1
    nabla3 = e3J - 1j * lam[3] * J.J1

    J1_of = lambda y: frak_j(params, r, y).J1
    e1J = frame.e1[..., 2] * fd.derivative(J1_of, np.asarray(theta, float), h, order=4)
    nabla1 = e1J - 1j * lam[1] * J.J1
    nabla2 = -1j * lam[2] * J.J1

    q_of = lambda y: np.asarray(r) + 1j * params.a * np.cos(y)
    Dq1 = frame.e1[..., 2] * fd.derivative(q_of, np.asarray(theta, float), h, order=4)

    c = pt.cos
    dbar_target = (
        4j * pt.rr * c / pt.q2 ** 2
        + (4.0 / 3.0) * 1j * params.Lambda * c * (1.0 - pt.r ** 2 * pt.rr / pt.q2 ** 2)
    )
    return {
        'norm': np.abs(J.J1) ** 2 + np.abs(J.J2) ** 2 - 2.0 * pt.kappa * pt.sin ** 2 / pt.q2,
        'dual': np.abs(J.J2 + 1j * J.J1),
        'transport_4': np.abs(nabla4 + 0.5 * ricci.trX * J.J1),
        'transport_3': np.abs(nabla3 + 0.5 * ricci.trXb * J.J1),
        'D_hat_otimes': np.abs(2.0 * (nabla1 + 1j * nabla2)),
        'Dbar_dot': np.abs(2.0 * (nabla1 - 1j * nabla2) - dbar_target),
        'D_q': np.abs(Dq1 + params.a * J.J1),
    }


# ── Deformation tensors ─────────────────────────────────────────────────


def _sym(table):
    return 0.5 * (table + np.swapaxes(table, -1, -2))


def _null_deformation(frame, which):
    """Closed-form π^{(e₃)} or π^{(e₄)} in frame order (e₁, e₂, e₃, e₄)."""
    ricci = frame.ricci
    shape = np.shape(frame.r)
    pi = np.zeros(shape + (4, 4))
    if which == 'e4':
        pi[..., 2, 2] = -4.0 * ricci.omegab
        pi[..., 2, 3] = pi[..., 3, 2] = 2.0 * ricci.omega
        pi[..., 2, 0:2] = pi[..., 0:2, 2] = ricci.eta + ricci.zeta
        pi[..., 3, 0:2] = pi[..., 0:2, 3] = ricci.xi
        half_tr = 0.5 * ricci.tr_chi
    else:
        pi[..., 3, 3] = -4.0 * ricci.omega
        pi[..., 2, 3] = pi[..., 3, 2] = 2.0 * ricci.omegab
        pi[..., 3, 0:2] = pi[..., 0:2, 3] = ricci.etab - ricci.zeta
        pi[..., 2, 0:2] = pi[..., 0:2, 2] = ricci.xib
        half_tr = 0.5 * ricci.tr_chib
    pi[..., 0, 0] = pi[..., 1, 1] = half_tr
    return pi


def _radial_gradient_term(frame, f_prime, which):
    """Frame components of ½(df⊗e♭ + e♭⊗df) for f = f(r) and e ∈ {e₃, e₄}."""
    shape = np.shape(frame.r)
    er = {3: frame.e3[..., 1], 4: frame.e4[..., 1]}
    # e♭ pairs only with the opposite null vector: g(e₃, e₄) = −2
    partner = 2 if which == 4 else 3
    df = np.stack([np.zeros(shape), np.zeros(shape), er[3] * f_prime, er[4] * f_prime], axis=-1)
    flat = np.zeros(shape + (4,))
    flat[..., partner] = -2.0
    out = 0.5 * (df[..., :, None] * flat[..., None, :] + flat[..., :, None] * df[..., None, :])
    return out


def tilde_T_coefficient(params, r):
    """χ_δtrap = a/(r²+a²)·χ₀((r − 3M)/(δ_trap r)) and its r-derivative."""
    r = np.asarray(r, float)
    a, M, d = params.a, params.M, params.delta_trap
    x = (r - 3.0 * M) / (d * r)
    chi0, dchi0 = chi_zero(x)
    base = a / (r ** 2 + a ** 2)
    dbase = -2.0 * a * r / (r ** 2 + a ** 2) ** 2
    return base * chi0, dbase * chi0 + base * dchi0 * 3.0 * M / (d * r ** 2)


def tilde_T_vector(params, r, theta):
    """T̃ = T + χ_δtrap Φ in global-chart components."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    chi, _ = tilde_T_coefficient(params, r)
    X = np.zeros(r.shape + (4,))
    X[..., 0] = 1.0
    X[..., 3] = chi
    return X


def deformation(params, spec, r, theta, kind='ingoing'):
    """
    Symmetric deformation tensor π = ½L_Y g in frame components.

    ``spec`` is either a name in {'e3', 'e4', 'T-tilde', 'T', 'Y0'} or a dict
    {'db': f, 'd': f} of radial functions returning (value, derivative)
    for Y = d̲e₃ + de₄ in the frame of ``kind``. 'Y0' is the uncut redshift
    field d̲e₃ + de₄ + 2T with d = s(r − r_H), d̲ = 1 + s(r − r_H) and
    s = ``redshift_slope``; it lives in the ingoing frame and 2T adds nothing.

    Returns an array (..., 4, 4) in frame order (e₁, e₂, e₃, e₄).
    """
    if isinstance(spec, str) and spec == 'Y0':
        if kind != 'ingoing':
            raise KdsError('support', "Y0 is defined in the ingoing frame", kind=kind)
        s, rH = redshift_slope(params), params.r_event
        spec = {
            'db': lambda x: (1.0 + s * (x - rH), np.full_like(x, s)),
            'd': lambda x: (s * (x - rH), np.full_like(x, s)),
        }
    frame = frame_at(params, kind, r, theta)
    if spec == 'e3':
        return _null_deformation(frame, 'e3')
    if spec == 'e4':
        return _null_deformation(frame, 'e4')
    if spec == 'T':
        return np.zeros(np.shape(frame.r) + (4, 4))
    if spec == 'T-tilde':
        _, dchi = tilde_T_coefficient(params, frame.r)
        g = metric_global(params, frame.r, frame.theta)
        E = frame.vectors
        phi_flat = np.einsum('...j,...mj->...m', g[..., 3, :], E)
        er = E[..., :, 1]
        return _sym(dchi[..., None, None] * er[..., :, None] * phi_flat[..., None, :])
    if isinstance(spec, dict):
        db_val, db_der = spec['db'](frame.r)
        d_val, d_der = spec['d'](frame.r)
        pi = (
            db_val[..., None, None] * _null_deformation(frame, 'e3')
            + d_val[..., None, None] * _null_deformation(frame, 'e4')
            + _radial_gradient_term(frame, db_der, 3)
            + _radial_gradient_term(frame, d_der, 4)
        )
        return pi
    raise KdsError('support', f"Unknown deformation spec {spec!r}")


def deformation_fd(params, vector_field, r, theta, kind='ingoing', h=1e-4):
    """
    Finite-difference π_{αβ} = ½(X^λ∂_λg_{αβ} + g_{λβ}∂_αX^λ + g_{αλ}∂_βX^λ)
    for a stationary axisymmetric vector field given by global-chart
    components ``vector_field(r, θ)``, contracted with the frame of ``kind``.
    """
    r = np.asarray(r, float)
    theta = np.asarray(theta, float)
    X = vector_field(r, theta)
    g = metric_global(params, r, theta)
    dg_dr = fd.derivative(lambda x: metric_global(params, x, theta), r, h)
    dg_dth = fd.derivative(lambda y: metric_global(params, r, y), theta, h)
    dX = np.zeros(np.shape(r) + (4, 4))  # dX[..., a, l] = ∂_a X^l
    dX[..., 1, :] = fd.derivative(lambda x: vector_field(x, theta), r, h)
    dX[..., 2, :] = fd.derivative(lambda y: vector_field(r, y), theta, h)

    lie = X[..., 1, None, None] * dg_dr + X[..., 2, None, None] * dg_dth
    lie = lie + np.einsum('...lb,...al->...ab', g, dX) + np.einsum('...al,...bl->...ab', g, dX)
    pi = 0.5 * lie
    E = np.stack(frame_vectors(params, kind, r, theta), axis=-2)
    return np.einsum('...mi,...ij,...nj->...mn', E, pi, E)

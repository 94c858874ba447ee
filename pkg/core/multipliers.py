# core/multipliers.py
"""
Energy–momentum tensor, the J/K currents of a multiplier triple (X, w, m)
and the four multiplier families used by the energy estimates.

For a rank-2 field ψ stored by z (see ``core.horizontal``) with
⟨u, v⟩ = c·Re(u v̄), c = 2:

    𝕋_μν = ⟨∇_μψ, ∇_νψ⟩ − ½g_μν(⟨∇^λψ, ∇_λψ⟩ + V|ψ|²)
    J_μ  = 𝕋_μν X^ν + w⟨ψ, ∇_μψ⟩ − ½|ψ|²∂_μw + ½|ψ|²m_μ
    K    = 𝕋·π + X^ν⟨∇^μψ, [∇_μ, ∇_ν]ψ⟩ − ½X(V)|ψ|² + w𝓛
           − ½|ψ|²□w + ½div(|ψ|²m)

with π = ½L_X g and 𝓛 = ⟨∇^λψ, ∇_λψ⟩ + V|ψ|², so that

    div J = K + ⟨□ψ − Vψ, ∇_Xψ + wψ⟩.

Frame components are ordered (e₁, e₂, e₃, e₄). The multipliers X and m are
carried as vector fields in global-chart components, w as a scalar; all
three are stationary and axisymmetric.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import linalg

from . import fd
from .conf import kds_setting
from .coords import normal, sigma_decomposition
from .cutoffs import band, chi_glo, smoothstep
from .exceptions import KdsError
from .frames import (
    NULL_PAIRING, deformation, deformation_fd, frame_at, frame_components,
    frame_vectors, inverse_metric_global, metric_global, tilde_T_coefficient, tilde_T_vector,
)
from .geometry import aux_scalars, d_delta_dr, delta_of, make_params, redshift_slope
from .horizontal import SPIN_NORM
from .models import CurrentSample, PsiJet
from .teukolsky import rw_potential, wave_operator

logger = logging.getLogger(__name__)

SPIN = 2
NORM = SPIN_NORM[SPIN]

# Inverse of the null pairing g(e_μ, e_ν)
FRAME_INVERSE = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -0.5],
    [0.0, 0.0, -0.5, 0.0],
])

STATIONARY_STEP = 1e-4
DIVERGENCE_STEP = 1e-2
FAMILIES = ('energy', 'morawetz', 'redshift', 'rp')


def _pair(u, v):
    return NORM * np.real(u * np.conj(v))


def _sqrt_det(params, r, theta):
    return np.sqrt(np.abs(np.linalg.det(metric_global(params, r, theta))))


# ── Jets ────────────────────────────────────────────────────────────────


def _derivatives(jet):
    d1, d2 = jet.dh[..., 0], jet.dh[..., 1]
    return np.stack(np.broadcast_arrays(d1, d2, jet.d3, jet.d4), axis=-1)


def jet_at(field, tau, r, theta, phi):
    """The first jet of a spin-2 PatchField at the given points."""
    if field.spin != SPIN:
        raise KdsError('support', "Multiplier currents act on spin-2 fields", spin=field.spin)
    point = (tau, r, theta, phi)
    dh = np.stack([field.nabla(1)(*point), field.nabla(2)(*point)], axis=-1)
    return PsiJet(
        psi=field(*point),
        d3=field.nabla(3)(*point),
        d4=field.nabla(4)(*point),
        dh=dh,
        frame=field.frame(r, theta),
    )


def jet_from_vector(frame, values):
    """PsiJet from complex values (..., 5) ordered (ψ, ∇₃ψ, ∇₄ψ, ∇₁ψ, ∇₂ψ)."""
    values = np.asarray(values, complex)
    return PsiJet(psi=values[..., 0], d3=values[..., 1], d4=values[..., 2], dh=values[..., 3:5], frame=frame)


def random_jet(params, r, theta, rng, kind='global', size=None):
    """Jets with independent standard complex Gaussian components."""
    shape = (5,) if size is None else (size, 5)
    values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return jet_from_vector(frame_at(params, kind, r, theta), values)


# ── Energy–momentum tensor ──────────────────────────────────────────────


def lagrangian(jet, V):
    """𝓛 = ⟨∇^λψ, ∇_λψ⟩ + V|ψ|² = |∇ψ|² − ⟨∇₃ψ, ∇₄ψ⟩ + V|ψ|²."""
    grad = _pair(jet.dh[..., 0], jet.dh[..., 0]) + _pair(jet.dh[..., 1], jet.dh[..., 1])
    return grad - _pair(jet.d3, jet.d4) + V * _pair(jet.psi, jet.psi)


def em_tensor(jet, V):
    """
    Frame components 𝕋_μν (..., 4, 4) in the order (e₁, e₂, e₃, e₄).

    The null components are 𝕋₃₃ = |∇₃ψ|², 𝕋₄₄ = |∇₄ψ|² and
    𝕋₃₄ = |∇ψ|² + V|ψ|²; the horizontal trace is ⟨∇₃ψ, ∇₄ψ⟩ − V|ψ|².
    """
    D = _derivatives(jet)
    outer = NORM * np.real(D[..., :, None] * np.conj(D[..., None, :]))
    L = lagrangian(jet, V)
    return outer - 0.5 * NULL_PAIRING * np.asarray(L)[..., None, None]


def em_contract(T, A, B):
    """𝕋(A, B) for frame-component vectors A, B."""
    return np.einsum('...m,...mn,...n->...', A, T, B)


# ── Chart calculus ──────────────────────────────────────────────────────


def chart_divergence(params, vector_fn, point, h, order=4):
    """
    (1/√|g|)∂_i(√|g| V^i) of a vector field given by global-chart components
    ``vector_fn(τ, r, θ, φ̃)``, by centered differences in all four
    coordinates.
    """
    tau, r, theta, phi = point
    total = 0.0
    for index in range(4):
        def density(*x, index=index):
            return _sqrt_det(params, x[1], x[2]) * vector_fn(*x)[..., index]

        total = total + fd.partial(density, point, index, h, order=order)
    return total / _sqrt_det(params, r, theta)


def stationary_divergence(params, vector_fn, r, theta, h=STATIONARY_STEP):
    """Divergence of a stationary axisymmetric vector field ``vector_fn(r, θ)``."""
    return chart_divergence(params, lambda tau, x, y, phi: vector_fn(x, y), (0.0, r, theta, 0.0), h * params.M)


def _chart_gradient(params, fn, r, theta, h):
    """Contravariant gradient g^{ij}∂_j f of a stationary fn(r, θ)."""
    d_r = fd.derivative(lambda x: fn(x, theta), r, h, order=4)
    d_th = fd.derivative(lambda y: fn(r, y), theta, h, order=4)
    g_inv = inverse_metric_global(params, r, theta)
    return g_inv[..., :, 1] * np.asarray(d_r)[..., None] + g_inv[..., :, 2] * np.asarray(d_th)[..., None]


def scalar_wave(params, fn, r, theta, h=STATIONARY_STEP):
    """□f for a stationary axisymmetric scalar fn(r, θ)."""
    step = h * params.M
    return stationary_divergence(params, lambda x, y: _chart_gradient(params, fn, x, y, step), r, theta, h)


def frame_derivative(params, frame, fn, h=STATIONARY_STEP):
    """e_μ(f), μ = 1..4, of a stationary fn(r, θ) as (..., 4)."""
    step = h * params.M
    r, theta = frame.r, frame.theta
    d_r = fd.derivative(lambda x: fn(x, theta), r, step, order=4)
    d_th = fd.derivative(lambda y: fn(r, y), theta, step, order=4)
    E = frame.vectors
    return E[..., :, 1] * np.asarray(d_r)[..., None] + E[..., :, 2] * np.asarray(d_th)[..., None]


def _lower(vector):
    return np.einsum('mn,...n->...m', NULL_PAIRING, vector)


def _raise(covector):
    return np.einsum('mn,...n->...m', FRAME_INVERSE, covector)


def curvature_form(params, kind, r, theta, h=STATIONARY_STEP):
    """
    Curvature F = dω of the horizontal connection ω(e_μ) = (Λ_μ)₁₂ in frame
    components (..., 4, 4); on spin-k fields
    [∇_μ, ∇_ν]z = −ikF_μν z.
    """
    step = h * params.M

    def connection(x, y):
        frame = frame_at(params, kind, x, y)
        lam = np.stack(np.broadcast_arrays(*(frame.lambda_connection[mu] for mu in (1, 2, 3, 4))), axis=-1)
        return np.linalg.solve(frame.vectors, lam[..., None])[..., 0]

    frame = frame_at(params, kind, r, theta)
    r, theta = frame.r, frame.theta
    D = np.zeros(r.shape + (4, 4))  # D[..., i, j] = ∂_i ω_j
    D[..., 1, :] = fd.derivative(lambda x: connection(x, theta), r, step, order=4)
    D[..., 2, :] = fd.derivative(lambda y: connection(r, y), theta, step, order=4)
    F = D - np.swapaxes(D, -1, -2)
    E = frame.vectors
    return np.einsum('...mi,...ij,...nj->...mn', E, F, E)


# ── Multiplier triples ──────────────────────────────────────────────────


def _zero_scalar(r, theta):
    return np.zeros(np.broadcast_shapes(np.shape(r), np.shape(theta)))


def _zero_vector(r, theta):
    return np.zeros(np.broadcast_shapes(np.shape(r), np.shape(theta)) + (4,))


@dataclass(frozen=True)
class MultiplierTriple:
    """
    A multiplier (X, w, m). ``X`` and ``m`` map (r, θ) to global-chart
    vector components, ``w`` to a scalar. Evaluation outside
    ``support`` = (r_lo, r_hi) raises KdsError('support').
    """

    name: str
    X: Callable
    w: Callable = _zero_scalar
    m: Callable = _zero_vector
    kind: str = 'global'
    support: tuple = (0.0, math.inf)
    extras: dict = field(default_factory=dict)

    def check_support(self, r):
        lo, hi = self.support
        r = np.asarray(r)
        if np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12)):
            raise KdsError('support', f"Multiplier {self.name} evaluated off its support",
                           r_min=float(np.min(r)), r_max=float(np.max(r)), support=self.support)


class CurrentEvaluator:
    """
    The stationary data of a triple at (r, θ): frame, X, w, m and their
    derivatives. ``J`` and ``K`` then act on jets at the same points.
    """

    def __init__(self, triple, params, r, theta, V=None):
        triple.check_support(r)
        self.triple = triple
        self.params = params
        self.frame = frame_at(params, triple.kind, r, theta)
        self.r, self.theta = self.frame.r, self.frame.theta
        self.V_fn = V or (lambda x, y: rw_potential(params, x, y))
        self.V = self.V_fn(self.r, self.theta)
        self.X = triple.X(self.r, self.theta)
        self.X_frame = frame_components(params, self.frame, self.X)
        self.w = np.asarray(triple.w(self.r, self.theta), float)
        self.m_frame = frame_components(params, self.frame, triple.m(self.r, self.theta))

    @cached_property
    def dw(self):
        return frame_derivative(self.params, self.frame, self.triple.w)

    @cached_property
    def pi(self):
        return deformation_fd(self.params, self.triple.X, self.r, self.theta, kind=self.triple.kind)

    @cached_property
    def pi_upper(self):
        return np.einsum('am,...mn,nb->...ab', FRAME_INVERSE, self.pi, FRAME_INVERSE)

    @cached_property
    def F(self):
        return curvature_form(self.params, self.triple.kind, self.r, self.theta)

    @cached_property
    def box_w(self):
        return scalar_wave(self.params, self.triple.w, self.r, self.theta)

    @cached_property
    def div_m(self):
        return stationary_divergence(self.params, self.triple.m, self.r, self.theta)

    @cached_property
    def XV(self):
        return np.einsum('...m,...m->...', self.X_frame, frame_derivative(self.params, self.frame, self.V_fn))

    def tensor(self, jet):
        return em_tensor(jet, self.V)

    def J(self, jet):
        """Frame components J_μ (..., 4)."""
        T = self.tensor(jet)
        D = _derivatives(jet)
        psi_sq = _pair(jet.psi, jet.psi)
        return (
            np.einsum('...mn,...n->...m', T, self.X_frame)
            + self.w[..., None] * _pair(jet.psi[..., None], D)
            - 0.5 * psi_sq[..., None] * self.dw
            + 0.5 * psi_sq[..., None] * _lower(self.m_frame)
        )

    def curvature_term(self, jet):
        """X^ν⟨∇^μψ, [∇_μ, ∇_ν]ψ⟩ with [∇_μ, ∇_ν]z = −2iF_μν z."""
        D_up = _raise(_derivatives(jet))
        commuted = -1j * SPIN * np.einsum('...mn,...n->...m', self.F, self.X_frame) * jet.psi[..., None]
        return np.sum(_pair(D_up, commuted), axis=-1)

    def K(self, jet):
        T = self.tensor(jet)
        D = _derivatives(jet)
        psi_sq = _pair(jet.psi, jet.psi)
        nabla_m = np.einsum('...m,...m->...', self.m_frame, D)
        return (
            np.einsum('...mn,...mn->...', T, self.pi_upper)
            + self.curvature_term(jet)
            - 0.5 * self.XV * psi_sq
            + self.w * lagrangian(jet, self.V)
            - 0.5 * psi_sq * self.box_w
            + _pair(jet.psi, nabla_m)
            + 0.5 * psi_sq * self.div_m
        )

    def flux(self, jet, N):
        """J(N) for a vector N in global-chart components."""
        return np.einsum('...m,...m->...', self.J(jet), frame_components(self.params, self.frame, N))

    def sample(self, jet, normals=('Sigma_tau', 'Sigma_star')):
        fluxes = {
            name: self.flux(jet, normal(self.params, name, self.r, self.theta).components)
            for name in normals
        }
        return CurrentSample(J=self.J(jet), K=self.K(jet), boundary_flux=fluxes)


def current_JK(params, triple, jet, V=None):
    """The CurrentSample of ``triple`` for one jet, at the jet's frame point."""
    if jet.frame.kind != triple.kind:
        raise KdsError('support', "Jet and multiplier must share a frame kind", jet=jet.frame.kind, triple=triple.kind)
    return CurrentEvaluator(triple, params, jet.frame.r, jet.frame.theta, V).sample(jet)


def quadratic_form(fn, to_jet, n):
    """
    Real symmetric matrix (2n × 2n) of the quadratic form ``fn(jet)`` in
    the real and imaginary parts of n complex jet variables, by polarization.
    """
    basis = np.concatenate([np.eye(n), 1j * np.eye(n)])
    diag = np.array([fn(to_jet(v)) for v in basis], float)
    Q = np.diag(diag)
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            value = fn(to_jet(basis[i] + basis[j]))
            Q[i, j] = Q[j, i] = 0.5 * (value - diag[i] - diag[j])
    return Q


def min_generalized_eigenvalue(Q, W):
    return float(linalg.eigh(Q, W, eigvals_only=True)[0])


def divergence_identity(triple, field, tau, r, theta, phi, V=None, h=DIVERGENCE_STEP):
    """
    The local divergence identity div J = K + ⟨□ψ − Vψ, ∇_Xψ + wψ⟩ at one
    point, with div J from centered differences of J in the global chart.

    Returns:
        dict with 'div_J', 'K', 'source' and the relative 'residual'.
    """
    if field.kind != triple.kind:
        raise KdsError('support', "Field and multiplier must share a frame kind", field=field.kind, triple=triple.kind)
    params = field.params

    def j_vector(t, x, y, ph):
        ev = CurrentEvaluator(triple, params, x, y, V)
        Jf = ev.J(jet_at(field, t, ev.r, ev.theta, ph))
        J_cov = np.linalg.solve(ev.frame.vectors, Jf[..., None])[..., 0]
        return np.einsum('...ij,...j->...i', inverse_metric_global(params, ev.r, ev.theta), J_cov)

    point = (tau, r, theta, phi)
    div = chart_divergence(params, j_vector, point, h * params.M)
    ev = CurrentEvaluator(triple, params, r, theta, V)
    jet = jet_at(field, tau, r, theta, phi)
    K = ev.K(jet)
    box = wave_operator(field)(*point)
    nabla_X = np.einsum('...m,...m->...', ev.X_frame, _derivatives(jet))
    source = _pair(box - ev.V * jet.psi, nabla_X + ev.w * jet.psi)
    scale = np.maximum(np.maximum(np.abs(div), np.abs(K)), np.maximum(np.abs(source), 1e-300))
    residual = np.abs(div - K - source) / scale
    logger.debug("divergence identity %s: residual %.3e", triple.name, float(np.max(residual)))
    return {'div_J': div, 'K': K, 'source': source, 'residual': residual}


# ── Energy multiplier ───────────────────────────────────────────────────


def _killing_T(r):
    """T = ∂_τ in global-chart components."""
    X = np.zeros(np.shape(r) + (4,))
    X[..., 0] = 1.0
    return X


def _T_hat(params, r, theta):
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    X = np.zeros(r.shape + (4,))
    X[..., 0] = 1.0
    X[..., 3] = params.a / (r ** 2 + params.a ** 2)
    return X


def w_ring(params, r, theta):
    """ẘ = Im(M/((1+γ)q²)); the constant 2aΛ/(3(1+γ)) has no imaginary part."""
    q = aux_scalars(params, r, theta).q_complex
    return np.imag(params.M / ((1.0 + params.gamma) * q ** 2))


def a_potential(params, r, theta):
    """Φ_A = Im(2M/((1+γ)q²) − 2qΛ/(3(1+γ))), with A = −dΦ_A."""
    q = aux_scalars(params, r, theta).q_complex
    xi = 1.0 + params.gamma
    return np.imag(2.0 * params.M / (xi * q ** 2) - 2.0 * q * params.Lambda / (3.0 * xi))


def _wedge(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _dual(u):
    return np.stack([u[..., 1], -u[..., 0]], axis=-1)


def a_one_form(params, r, theta, kind='ingoing'):
    """
    The one-form A_μ = ∈^{ab}Ṙ_{abμ3}T³ + ∈^{ab}Ṙ_{abμ4}T⁴ assembled from
    the Ricci and curvature tables. Frame order (e₁, e₂, e₃, e₄).
    """
    frame = frame_at(params, kind, r, theta)
    ricci = frame.ricci
    T = frame_components(params, frame, _killing_T(frame.r))
    Th, T3, T4 = T[..., 0:2], T[..., 2], T[..., 3]
    eta, etab = ricci.eta, ricci.etab
    rho, rho_dual = frame.weyl['rho'], frame.weyl['rho_dual']
    dot = lambda u, v: np.sum(u * v, axis=-1)

    A4 = -4.0 * rho_dual * T3 - 4.0 * _wedge(etab, eta) * T3 + ricci.tr_chi * _wedge(Th, etab) - ricci.atr_chi * dot(etab, Th)
    A3 = 4.0 * rho_dual * T4 + 4.0 * _wedge(etab, eta) * T4 + ricci.tr_chib * _wedge(Th, eta) - ricci.atr_chib * dot(eta, Th)
    bracket = 4.0 * rho - 4.0 * params.Lambda / 3.0 + ricci.tr_chi * ricci.tr_chib + ricci.atr_chi * ricci.atr_chib
    Ah = (
        (-ricci.tr_chib[..., None] * _dual(eta) + ricci.atr_chib[..., None] * eta) * T3[..., None]
        + (-ricci.tr_chi[..., None] * _dual(etab) + ricci.atr_chi[..., None] * etab) * T4[..., None]
        - 0.5 * bracket[..., None] * _dual(Th)
    )
    return np.stack([Ah[..., 0], Ah[..., 1], A3, A4], axis=-1)


def a_one_form_gradient(params, r, theta, kind='ingoing'):
    """A_μ = −e_μ(Φ_A) by centered differences."""
    frame = frame_at(params, kind, r, theta)
    return -frame_derivative(params, frame, lambda x, y: a_potential(params, x, y))


def a_identity_residual(params, r, theta, kind='ingoing'):
    """max|A_assembled − A_gradient| relative to max|A|; 0 when A ≡ 0."""
    assembled = a_one_form(params, r, theta, kind)
    gradient = a_one_form_gradient(params, r, theta, kind)
    scale = float(np.max(np.abs(assembled)))
    if scale == 0.0:
        return float(np.max(np.abs(gradient)))
    return float(np.max(np.abs(assembled - gradient))) / scale


def energy_multiplier(params):
    """
    The almost-Killing multiplier T̃ = T + χ_δtrap Φ with w = m = 0.

    ``extras`` holds ẘ and the two evaluations of the A one-form.
    """
    return MultiplierTriple(
        name='T-tilde',
        X=lambda r, theta: tilde_T_vector(params, r, theta),
        kind='global',
        support=(params.r_min, params.r_max),
        extras={
            'w_ring': lambda r, theta: w_ring(params, r, theta),
            'A_assembled': lambda r, theta: a_one_form(params, r, theta),
            'A_gradient': lambda r, theta: a_one_form_gradient(params, r, theta),
        },
    )


def tilde_T_defect(params, r, theta=math.pi / 3):
    """|T̃ − T̂| componentwise; zero where |r − 3M|/r ≥ 2δ_trap."""
    return np.max(np.abs(tilde_T_vector(params, r, theta) - _T_hat(params, r, theta)), axis=-1)


def tilde_T_current_check(params, jet):
    """
    𝕋·π^{T̃} − χ′⟨∇_{∇r}ψ, ∇_Φψ⟩ at the jet's point; π^{T̃} is the closed
    form of the frames module and the difference vanishes identically.
    """
    frame = jet.frame
    r, theta = frame.r, frame.theta
    pi = deformation(params, 'T-tilde', r, theta, kind=frame.kind)
    pi_up = np.einsum('am,...mn,nb->...ab', FRAME_INVERSE, pi, FRAME_INVERSE)
    V = rw_potential(params, r, theta)
    Tpi = np.einsum('...mn,...mn->...', em_tensor(jet, V), pi_up)
    _, dchi = tilde_T_coefficient(params, r)
    grad_r = inverse_metric_global(params, r, theta)[..., 1, :]
    Phi = np.zeros(np.shape(r) + (4,))
    Phi[..., 3] = 1.0
    D = _derivatives(jet)
    along = lambda X: np.einsum('...m,...m->...', frame_components(params, frame, X), D)
    return Tpi - dchi * _pair(along(grad_r), along(Phi))


def energy_boundary_constant(params, r, theta):
    """
    Smallest ratio 𝕋(T̂, N_Σ)/𝕋(N_Σ, N_Σ) over jets at (r, θ): the
    measured boundary positivity constant of the energy multiplier.
    """
    frame = frame_at(params, 'global', r, theta)
    N = frame_components(params, frame, normal(params, 'Sigma_tau', r, theta).components)
    T = frame_components(params, frame, _T_hat(params, r, theta))
    V = rw_potential(params, r, theta)
    to_jet = lambda v: jet_from_vector(frame, v)
    A = quadratic_form(lambda j: em_contract(em_tensor(j, V), T, N), to_jet, 5)
    B = quadratic_form(lambda j: em_contract(em_tensor(j, V), N, N), to_jet, 5)
    return min_generalized_eigenvalue(A, B)


# ── Morawetz multiplier ─────────────────────────────────────────────────


def _radial_vector(params, r, theta, coefficient):
    """
    c(r)∂_r of Boyer–Lindquist in global-chart components, where
    ``coefficient(r)`` returns c(r)(r²+a²)/Δ so the components stay finite
    at the horizons.
    """
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    a, M, xi = params.a, params.M, 1.0 + params.gamma
    chi, _, _ = chi_glo(params, r)
    rr = r ** 2 + a ** 2
    upsilon_c = coefficient(r)
    delta = delta_of(params, r)
    X = np.zeros(r.shape + (4,))
    X[..., 0] = upsilon_c * xi * (1.0 - 2.0 * chi) * (1.0 - M ** 2 * delta / (r ** 2 * rr))
    X[..., 1] = upsilon_c * delta / rr
    X[..., 3] = upsilon_c * (1.0 - 2.0 * chi) * a * xi / rr
    return X


def morawetz_f(params, r):
    return (np.asarray(r, float) - 3.0 * params.M) / np.asarray(r, float)


def w_star(params, r):
    """w* = (3a²M + r²(2r − 3M))Δ/(2r²(r²+a²)²)."""
    r = np.asarray(r, float)
    a, M = params.a, params.M
    return (3.0 * a ** 2 * M + r ** 2 * (2.0 * r - 3.0 * M)) * delta_of(params, r) / (2.0 * r ** 2 * (r ** 2 + a ** 2) ** 2)


def w_one(params, r):
    """w₁ = (r−3M)(3r²(r−3M) + a⁴rΛ + a²(3M + 3r + r³Λ))/(3r(r²+a²)²)."""
    r = np.asarray(r, float)
    a, M, L = params.a, params.M, params.Lambda
    inner = 3.0 * r ** 2 * (r - 3.0 * M) + a ** 4 * r * L + a ** 2 * (3.0 * M + 3.0 * r + r ** 3 * L)
    return (r - 3.0 * M) * inner / (3.0 * r * (r ** 2 + a ** 2) ** 2)


def w_delta1(params, r, delta1):
    """w_δ₁ = −δ₁MΔ(r−3M)²/(r²(r²+a²)²)."""
    r = np.asarray(r, float)
    M = params.M
    return -delta1 * M * delta_of(params, r) * (r - 3.0 * M) ** 2 / (r ** 2 * (r ** 2 + params.a ** 2) ** 2)


def morawetz_multiplier(params, delta1=None):
    """X = ((r−3M)/r)R̂, w = w* + w_δ₁, m = v(r)∂_r."""
    delta1 = kds_setting('MORAWETZ_DELTA1') if delta1 is None else delta1
    X = lambda r, theta: _radial_vector(params, r, theta, lambda x: morawetz_f(params, x))
    m = lambda r, theta: _radial_vector(params, r, theta, lambda x: np.sqrt(params.M / (2.0 * x)) / x ** 2)
    return MultiplierTriple(
        name='morawetz',
        X=X,
        w=lambda r, theta: w_star(params, r) + w_delta1(params, r, delta1) + _zero_scalar(r, theta),
        m=m,
        kind='global',
        support=(params.r_min, params.r_max),
        extras={'delta1': delta1},
    )


def w_consistency(params, r, theta):
    """
    w* − (w₀ + w₁) with w₀ = ½|q|²div(|q|⁻²X) evaluated numerically.
    Zero at a = 0; the a-dependence is reported, not corrected.
    """
    X = lambda x, y: _radial_vector(params, x, y, lambda s: morawetz_f(params, s))
    q2 = lambda x, y: aux_scalars(params, x, y).q_abs2
    weighted = lambda x, y: X(x, y) / q2(x, y)[..., None]
    w0 = 0.5 * q2(r, theta) * stationary_divergence(params, weighted, r, theta)
    return w_star(params, r) - (w0 + w_one(params, r))


def hardy_scalar(params, r):
    """
    The Hardy scalar on the a = 0 background with 𝔳 = √(M/(2r)):

        E = (10r³ − 75Mr² + 180M²r − 138M³)/(2r⁶) − 𝔳²/(12Mr²)
            + M(3r − 4M)Λ/(2r³) − (2/3)MΛ²
            + (2M/r² − 2Λr/3)𝔳/(2r²) + Υ∂_r𝔳/(2r²)
    """
    r = np.asarray(r, float)
    M, L = params.M, params.Lambda
    v = np.sqrt(M / (2.0 * r))
    dv = -0.5 * v / r
    upsilon = 1.0 - 2.0 * M / r - L * r ** 2 / 3.0
    return (
        (10.0 * r ** 3 - 75.0 * M * r ** 2 + 180.0 * M ** 2 * r - 138.0 * M ** 3) / (2.0 * r ** 6)
        - v ** 2 / (12.0 * M * r ** 2)
        + M * (3.0 * r - 4.0 * M) * L / (2.0 * r ** 3)
        - 2.0 * M * L ** 2 / 3.0
        + (2.0 * M / r ** 2 - 2.0 * L * r / 3.0) * v / (2.0 * r ** 2)
        + upsilon * dv / (2.0 * r ** 2)
    )


def _hat_fields(params, frame):
    """(c₃, c₄) with R̂ = c₄e₄ − c₃e₃ and (1+γ)T̂ = c₄e₄ + c₃e₃."""
    aux = aux_scalars(params, frame.r, frame.theta)
    rr = frame.r ** 2 + params.a ** 2
    lam = frame.conformal_factor
    return lam * aux.q_abs2 / (2.0 * rr), aux.delta / (2.0 * rr * lam)


def morawetz_coercivity(params, r, theta, delta1=None):
    """
    Derivative part of K for the Morawetz triple in (∇_R̂ψ, ∇_T̂ψ, ∇₁ψ, ∇₂ψ)
    against the weights M/r², δ₁M(r−3M)²/r⁴ and (r−3M)²/r³.

    Returns:
        dict with the normalized 'min_eigenvalue', the diagonal
        'coefficients' (per unit |·|²), the Hardy scalar 'E', 'r3E' and
        'in_trapping' (|1 − 3M/r| < δ_trap).
    """
    triple = morawetz_multiplier(params, delta1)
    delta1 = triple.extras['delta1']
    ev = CurrentEvaluator(triple, params, float(r), float(theta))
    c3, c4 = _hat_fields(params, ev.frame)
    xi = 1.0 + params.gamma

    def to_jet(v):
        R, T, h1, h2 = v
        values = np.array([0.0, (xi * T - R) / (2.0 * c3), (R + xi * T) / (2.0 * c4), h1, h2])
        return jet_from_vector(ev.frame, values)

    Q = quadratic_form(ev.K, to_jet, 4) / NORM
    M = params.M
    weights = np.array([M / r ** 2, delta1 * M * (r - 3 * M) ** 2 / r ** 4, (r - 3 * M) ** 2 / r ** 3, (r - 3 * M) ** 2 / r ** 3])
    # floor for δ₁ = 0 and r = 3M
    weights = np.maximum(weights, 1e-14 * M / r ** 2)
    W = np.diag(np.concatenate([weights, weights]))
    E = float(hardy_scalar(params, r))
    return {
        'min_eigenvalue': min_generalized_eigenvalue(Q, W),
        'coefficients': {'R_hat': Q[0, 0], 'T_hat': Q[1, 1], 'angular': 0.5 * (Q[2, 2] + Q[3, 3])},
        'E': E,
        'r3E': E * float(r) ** 3,
        'in_trapping': bool(abs(1.0 - 3.0 * M / r) < params.delta_trap),
    }


def morawetz_borrow(params, r, delta=None, delta1=None):
    """α² = δ₁M(r−3M)²/r² and β² = δ((r²+a²)/Δ)²𝒜 − α² with 𝒜 = 3MΔ²/(r²(r²+a²))."""
    delta = kds_setting('MORAWETZ_DELTA') if delta is None else delta
    delta1 = delta / 100.0 if delta1 is None else delta1
    r = np.asarray(r, float)
    M, a = params.M, params.a
    alpha_sq = delta1 * M * (r - 3.0 * M) ** 2 / r ** 2
    beta_sq = delta * 3.0 * M * (r ** 2 + a ** 2) / r ** 2 - alpha_sq
    return {'alpha_sq': alpha_sq, 'beta_sq': beta_sq, 'c0': beta_sq / M}


# ── Redshift multiplier ─────────────────────────────────────────────────


def redshift_cutoff(params, r):
    """χ̇((r/r_H − 1)/δ_red): 1 for x ≤ 1, 0 for x ≥ 2."""
    x = (np.asarray(r, float) / params.r_event - 1.0) / params.delta_red
    value, _, _ = smoothstep(x - 1.0)
    return 1.0 - value


def redshift_multiplier(params, c1=None, cutoff=True):
    """
    Y_H = χ̇·Y₀ with Y₀ = d̲e₃ + de₄ + 2T in the ingoing frame,
    d = s(r − r_H), d̲ = 1 + s(r − r_H), s = redshift_slope.
    """
    s = redshift_slope(params, c1)
    rH = params.r_event

    def Y(r, theta):
        _, _, e3, e4 = frame_vectors(params, 'ingoing', r, theta)
        r = np.broadcast_to(np.asarray(r, float), np.shape(e3)[:-1])
        d = s * (r - rH)
        vec = (1.0 + d)[..., None] * e3 + d[..., None] * e4
        vec = vec + 2.0 * np.array([1.0, 0.0, 0.0, 0.0])
        if cutoff:
            vec = redshift_cutoff(params, r)[..., None] * vec
        return vec

    return MultiplierTriple(
        name='redshift', X=Y, kind='ingoing', support=(params.r_min, params.r_max), extras={'slope': s},
    )


def redshift_coercivity(params, theta=math.pi / 3, c1=None):
    """
    K^{Y₀} at r = r_event as a form in (ψ, ∇₃ψ, ∇₄ψ, ∇₁ψ, ∇₂ψ), normalized by
    (r⁻², 1, 1, 1, 1) per unit |·|², against ∂_rΔ(r_H)/(64r_H²).
    """
    triple = redshift_multiplier(params, c1, cutoff=False)
    rH = params.r_event
    ev = CurrentEvaluator(triple, params, rH, float(theta))
    Q = quadratic_form(ev.K, lambda v: jet_from_vector(ev.frame, v), 5) / NORM
    weights = np.array([rH ** -2, 1.0, 1.0, 1.0, 1.0])
    W = np.diag(np.concatenate([weights, weights]))
    target = float(d_delta_dr(params, rH)) / (64.0 * rH ** 2)
    value = min_generalized_eigenvalue(Q, W)
    return {'min_eigenvalue': value, 'target': target, 'margin': value - target}


def redshift_boundary_samples(params, rng, n=200, c1=None):
    """𝕋(Y_H, N_Σ) at n random points of r_H ≤ r ≤ r_H(1+2δ_red) and random jets."""
    triple = redshift_multiplier(params, c1)
    r = params.r_event * (1.0 + 2.0 * params.delta_red * rng.random(n))
    theta = 0.1 + (math.pi - 0.2) * rng.random(n)
    frame = frame_at(params, 'ingoing', r, theta)
    jet = jet_from_vector(frame, rng.standard_normal((n, 5)) + 1j * rng.standard_normal((n, 5)))
    Y = frame_components(params, frame, triple.X(r, theta))
    N = frame_components(params, frame, normal(params, 'Sigma_tau', r, theta).components)
    return em_contract(em_tensor(jet, rw_potential(params, r, theta)), Y, N)


# ── r^p multipliers ─────────────────────────────────────────────────────


def rp_radius(params):
    return max(4.0 * params.M, 2.0 * params.r0)


def rp_profile(p, R, r):
    """f_p = r^p·S(r) with S rising from 0 at R/2 to 1 at R; returns (f, f′, f″)."""
    r = np.asarray(r, float)
    S, dS, d2S = band(r, 0.5 * R, R)
    f = r ** p * S
    df = p * r ** (p - 1) * S + r ** p * dS
    d2f = p * (p - 1) * r ** (p - 2) * S + 2 * p * r ** (p - 1) * dS + r ** p * d2S
    return f, df, d2f


def _check_p(p, delta):
    if not delta <= p <= 2.0 - delta:
        raise KdsError('p-range', "p must lie in [δ, 2 − δ]", p=p, delta=delta)


def rp_multiplier(params, p, delta=None, R=None):
    """
    X = f_p(e₄ + ½r⁻²λe₃), w = rf_p/|q|², m = (r/|q|²)f_p′e₄ + ((2−p)/3)Λf_p e₄,
    with λ from the decomposition of N_Σ.
    """
    delta = kds_setting('RP_DELTA') if delta is None else delta
    _check_p(p, delta)
    R = rp_radius(params) if R is None else R

    def X(r, theta):
        _, _, e3, e4 = frame_vectors(params, 'global', r, theta)
        lam = sigma_decomposition(params, r, theta)['lambda']
        f, _, _ = rp_profile(p, R, r)
        r = np.broadcast_to(np.asarray(r, float), np.shape(lam))
        return f[..., None] * (e4 + (0.5 * lam / r ** 2)[..., None] * e3)

    def w(r, theta):
        f, _, _ = rp_profile(p, R, r)
        return np.asarray(r) * f / aux_scalars(params, r, theta).q_abs2

    def m(r, theta):
        _, _, _, e4 = frame_vectors(params, 'global', r, theta)
        f, df, _ = rp_profile(p, R, r)
        coef = np.asarray(r) * df / aux_scalars(params, r, theta).q_abs2 + (2.0 - p) / 3.0 * params.Lambda * f
        return np.asarray(coef)[..., None] * e4

    return MultiplierTriple(
        name=f'rp({p:g})', X=X, w=w, m=m, kind='global',
        support=(0.5 * R, params.r_max), extras={'p': p, 'R': R, 'delta': delta},
    )


def _check_nabla4(frame, jet):
    """∇̌₄ψ = r⁻¹∇₄(rψ) = ∇₄ψ + (e₄r/r)ψ."""
    return jet.d4 + frame.e4[..., 1] / frame.r * jet.psi


def rp_lambda_bulk(params, p, jet, R=None):
    """
    The Λ-linear part of K for the r^p triple,
    (Λ/6)(2rf − r²f′)|∇₄ψ|² + ((2−p)/3)Λf⟨ψ, ∇₄ψ⟩ + Λc_ψ|ψ|²
    with c_ψ = (rf″ + 2f′ − 2f/r)/6 + (2−p)(f′ + 2f/r)/6 − 2f/(3r).
    """
    R = rp_radius(params) if R is None else R
    r = jet.frame.r
    f, df, d2f = rp_profile(p, R, r)
    L = params.Lambda
    c_psi = (r * d2f + 2.0 * df - 2.0 * f / r) / 6.0 + (2.0 - p) * (df + 2.0 * f / r) / 6.0 - 2.0 * f / (3.0 * r)
    return (
        L / 6.0 * (2.0 * r * f - r ** 2 * df) * _pair(jet.d4, jet.d4)
        + (2.0 - p) / 3.0 * L * f * _pair(jet.psi, jet.d4)
        + L * c_psi * _pair(jet.psi, jet.psi)
    )


def rp_display(params, p, jet, R=None):
    """
    ½f′|∇̌₄ψ|² + ½(2f/r − f′)(|∇ψ|² + V|ψ|²) plus the Λ-linear part
    ``rp_lambda_bulk``, and the matching error weight at the jet's point.
    """
    R = rp_radius(params) if R is None else R
    frame = jet.frame
    r, theta = frame.r, frame.theta
    f, df, d2f = rp_profile(p, R, r)
    L = params.Lambda
    V = rw_potential(params, r, theta)
    psi_sq = _pair(jet.psi, jet.psi)
    grad_sq = _pair(jet.dh[..., 0], jet.dh[..., 0]) + _pair(jet.dh[..., 1], jet.dh[..., 1])
    check = _check_nabla4(frame, jet)
    display = (
        0.5 * df * _pair(check, check)
        + 0.5 * (2.0 * f / r - df) * (grad_sq + V * psi_sq)
        + rp_lambda_bulk(params, p, jet, R)
    )
    err = (
        (f / r ** 3 + np.abs(df) / r ** 2) * _pair(jet.d3, jet.d3)
        + (f / r ** 2 + L * f) * _pair(jet.d4, jet.d4)
        + (f / r ** 2 + L * f) * grad_sq
        + (np.abs(d2f) / r ** 2 + np.abs(df) / r ** 3 + f / r ** 4 + L * f / r ** 2) * psi_sq
    )
    return display, err


def rp_bulk_check(params, p, r, theta, jet=None, rng=None, R=None):
    """
    |K − display|/error-weight for the r^p triple at (r, θ); random jets
    are drawn, one per point, when none is given.
    """
    triple = rp_multiplier(params, p, R=R)
    ev = CurrentEvaluator(triple, params, r, theta)
    if jet is None:
        rng = rng or np.random.default_rng(kds_setting('SEED'))
        shape = np.shape(ev.r) + (5,)
        jet = jet_from_vector(ev.frame, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    K = ev.K(jet)
    display, err = rp_display(params, p, jet, triple.extras['R'])
    return {'K': K, 'display': display, 'err_weight': err, 'ratio': np.abs(K - display) / err}


def rp_lambda_damping(p):
    """
    Smallest eigenvalue of the displayed Λ-damping form in (∇̌₄ψ, r⁻¹ψ),
    normalized by Λr^{p+1}, for f = r^p and e₄r = 1. Compare
    ``rp_lambda_leading`` for the form K actually produces.
    """
    Q = np.array([
        [2.0 - p, -(2.0 - p)],
        [-(2.0 - p), (2.0 - p) + (p + 2.0) * (p - 1.0)],
    ]) / 3.0
    return float(np.linalg.eigvalsh(Q)[0])


def rp_lambda_leading(p):
    """(2−p)/6·|∇̌₄ψ|² in the real basis (Re ∇̌₄ψ, Re r⁻¹ψ, Im ∇̌₄ψ, Im r⁻¹ψ)."""
    return (2.0 - p) / 6.0 * np.diag([1.0, 0.0, 1.0, 0.0])


def rp_lambda_form(params, p, r, theta, R=None):
    """
    (K_Λ − K_{Λ=0})/(Λr^{p+1}) for the r^p triple as a real 4 × 4 form in
    (∇̌₄ψ, r⁻¹ψ), the other jet components vanishing. Both backgrounds
    share M, a and r0.
    """
    if not params.Lambda > 0:
        raise KdsError('regime', "The Λ-damping form needs Λ > 0", Lambda=params.Lambda)
    R = rp_radius(params) if R is None else R
    flat = make_params(params.M, params.a, 0.0, delta_H=params.delta_H, delta_red=params.delta_red,
                       delta_trap=params.delta_trap, r0=params.r0)
    r, theta = float(r), float(theta)

    def k_of(background):
        ev = CurrentEvaluator(rp_multiplier(background, p, R=R), background, r, theta)

        def to_jet(v):
            psi = r * v[1]
            d4 = v[0] - float(ev.frame.e4[..., 1]) / r * psi
            return jet_from_vector(ev.frame, np.array([psi, 0.0, d4, 0.0, 0.0]))

        return quadratic_form(ev.K, to_jet, 2)

    Q = (k_of(params) - k_of(flat)) / (NORM * params.Lambda * r ** (p + 1))
    logger.debug("rp Λ form p=%g r=%g: %s", p, r, np.round(np.diag(Q), 6))
    return Q


def rp_derivative_form(params, p, r, theta, R=None):
    """
    K for the r^p triple restricted to (∇₄ψ, ∇₁ψ, ∇₂ψ) with ψ = ∇₃ψ = 0,
    normalized by ((p/2)r^{p−1}, ½(2−p)r^{p−1}, ½(2−p)r^{p−1}).
    """
    triple = rp_multiplier(params, p, R=R)
    ev = CurrentEvaluator(triple, params, float(r), float(theta))
    to_jet = lambda v: jet_from_vector(ev.frame, np.array([0.0, 0.0, v[0], v[1], v[2]]))
    Q = quadratic_form(ev.K, to_jet, 3) / NORM
    weights = np.array([0.5 * p, 0.5 * (2 - p), 0.5 * (2 - p)]) * r ** (p - 1)
    return min_generalized_eigenvalue(Q, np.diag(np.concatenate([weights, weights])))


def rp_boundary_margin(params, p, r, theta, jet, R=None):
    """
    The r^p flux through Σ* and the displayed lower bound
    ½(r^p|∇ψ|² + 4r^p|ψ|²/|q|² + ((2−p)/3)Λr^p|ψ|²) − (Δ/(2|q|²))r^p|∇̌₄ψ|².

    'flux' is J·N_Σ* with the tangential divergence r^{p−1}⟨ψ, ∇_νψ⟩
    removed, ν = ½e₄(r)e₃ − ½e₃(r)e₄; 'margin' is flux − bound.
    """
    triple = rp_multiplier(params, p, R=R)
    ev = CurrentEvaluator(triple, params, r, theta)
    frame = ev.frame
    aux = aux_scalars(params, frame.r, frame.theta)
    rp = frame.r ** p
    nabla_nu = 0.5 * frame.e4[..., 1] * jet.d3 - 0.5 * frame.e3[..., 1] * jet.d4
    flux = (
        ev.flux(jet, normal(params, 'Sigma_star', frame.r, frame.theta).components)
        - frame.r ** (p - 1) * _pair(jet.psi, nabla_nu)
    )
    psi_sq = _pair(jet.psi, jet.psi)
    grad_sq = _pair(jet.dh[..., 0], jet.dh[..., 0]) + _pair(jet.dh[..., 1], jet.dh[..., 1])
    check = _check_nabla4(frame, jet)
    bound = (
        0.5 * (rp * grad_sq + 4.0 * rp * psi_sq / aux.q_abs2 + (2.0 - p) / 3.0 * params.Lambda * rp * psi_sq)
        - aux.delta / (2.0 * aux.q_abs2) * rp * _pair(check, check)
    )
    return {'flux': flux, 'bound': bound, 'margin': flux - bound}


# ── Preliminary and transport identities ────────────────────────────────


def preliminary_bulk(params, delta, r, theta):
    """
    Coefficients of |∇₃ψ|² and |∇₄ψ|² in (1+γ)K for X = r^{−δ}T, with
    the displayed values ¼δr^{−1−δ} and −¼(Δ²/|q|⁴)δr^{−1−δ}.
    """
    X = lambda x, y: np.asarray(x, float)[..., None] ** -delta * np.broadcast_to(
        np.array([1.0, 0.0, 0.0, 0.0]), np.broadcast_shapes(np.shape(x), np.shape(y)) + (4,))
    triple = MultiplierTriple(name='f_delta_T', X=X, kind='global')
    ev = CurrentEvaluator(triple, params, float(r), float(theta))
    xi = 1.0 + params.gamma
    unit = lambda index: jet_from_vector(ev.frame, np.eye(5)[index])
    aux = aux_scalars(params, r, theta)
    base = delta * float(r) ** (-1 - delta)
    return {
        'c33': xi * float(ev.K(unit(1))) / NORM,
        'c44': xi * float(ev.K(unit(2))) / NORM,
        'expected33': 0.25 * base,
        'expected44': -0.25 * float(aux.delta ** 2 / aux.q_abs2 ** 2) * base,
    }


def transport_divergence_check(params, fn, r, theta, kind='global'):
    """
    div(f e₃) − (e₃(f) + (−2ω̲ + trχ̲)f) for a stationary fn(r, θ), with the
    divergence from centered differences.
    """
    frame = frame_at(params, kind, r, theta)
    vector = lambda x, y: np.asarray(fn(x, y))[..., None] * frame_vectors(params, kind, x, y)[2]
    div = stationary_divergence(params, vector, frame.r, frame.theta)
    e3f = frame_derivative(params, frame, fn)[..., 2]
    ricci = frame.ricci
    return div - (e3f + (-2.0 * ricci.omegab + ricci.tr_chib) * fn(frame.r, frame.theta))


# ── Certification ───────────────────────────────────────────────────────


CERTIFY_COLUMNS = ('r', 'theta', 'margin', 'worst_eigenvalue')


def _exterior_radii(params, n, r_far=None):
    hi = params.r_cosmo if params.has_cosmological_horizon else (r_far or 100.0 * params.M)
    return np.geomspace(params.r_event, hi, n + 2)[1:-1]


def certify(params, family, thetas=(math.pi / 4, math.pi / 2), n_r=12, p=1.0):
    """
    Rows (r, θ, margin, worst_eigenvalue) certifying one multiplier family;
    a row passes when its margin is nonnegative.
    """
    rows = []
    if family == 'energy':
        lo = params.r_event * (1.0 + params.delta_red)
        hi = params.r_cosmo * (1.0 - params.delta_red) if params.has_cosmological_horizon else 50.0 * params.M
        for r in np.linspace(lo, hi, n_r):
            for theta in thetas:
                c0 = energy_boundary_constant(params, r, theta)
                rows.append((r, theta, c0, c0))
    elif family == 'morawetz':
        for r in _exterior_radii(params, n_r):
            if abs(1.0 - 3.0 * params.M / r) < params.delta_trap:
                continue
            for theta in thetas:
                report = morawetz_coercivity(params, r, theta)
                rows.append((r, theta, min(report['min_eigenvalue'], report['r3E']), report['min_eigenvalue']))
    elif family == 'redshift':
        for theta in thetas:
            report = redshift_coercivity(params, theta)
            rows.append((params.r_event, theta, report['margin'], report['min_eigenvalue']))
    elif family == 'rp':
        R = rp_radius(params)
        hi = min(10.0 * R, 0.5 * params.r_cosmo) if params.has_cosmological_horizon else 10.0 * R
        if hi <= R:
            raise KdsError('support', "No far region for the r^p family", R=R, r_cosmo=params.r_cosmo)
        for r in np.linspace(R, hi, n_r):
            for theta in thetas:
                value = rp_derivative_form(params, p, r, theta)
                rows.append((r, theta, value, value))
    else:
        raise KdsError('support', f"Unknown multiplier family {family!r}", choices=FAMILIES)
    logger.info("certify %s: %d rows, worst margin %.3e", family, len(rows), min(row[2] for row in rows) if rows else math.nan)
    return [tuple(float(x) for x in row) for row in rows]

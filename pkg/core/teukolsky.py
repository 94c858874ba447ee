# core/teukolsky.py
"""
The Teukolsky operator for A, the Chandrasekhar transform 𝔮 and the
coefficients of the generalized Regge–Wheeler equation it satisfies.

Everything is evaluated in the global frame. Conformal weights are
carried by the fields: A has s = 2, Ψ = ∇⁽ᶜ⁾₃(q̄⁴r⁻²A) has s = 1 and 𝔮 has
s = 0. C₁ and C₂ have weights −1 and −2.
"""
import logging
import math

import numpy as np
from scipy import interpolate, special

from .exceptions import KdsError
from .frames import frame_at
from .geometry import aux_scalars, delta_of, make_params
from .horizontal import PatchField, dot_gradient
from .models import RWCoeffs, TransformCoeffs

logger = logging.getLogger(__name__)

NOT_A_SOLUTION_TOL = 1e-2


def _broadcast(value, *coords):
    shape = np.broadcast_shapes(*(np.shape(c) for c in coords), np.shape(value))
    return np.broadcast_to(value, shape)


def _scalar_field(params, fn, weight, kind='global'):
    """PatchField of a stationary scalar fn(r, θ) of the given conformal weight."""
    return PatchField(
        params,
        lambda tau, r, theta, phi: _broadcast(fn(r, theta), tau, r, theta, phi),
        spin=0, weight=weight, kind=kind,
    )


# ── Transport coefficients ──────────────────────────────────────────────


def _c_coefficients(ricci):
    t, at = ricci.tr_chib, ricci.atr_chib
    C1 = 2.0 * t - 2.0 * at ** 2 / t - 4j * at
    C2_tilde = -4.0 * at ** 2 + 1.5 * at ** 4 / t ** 2 + 1j * (-2.0 * t * at + 4.0 * at ** 3 / t)
    return C1, 0.5 * t ** 2 + C2_tilde, C2_tilde


def transform_coeffs(params, r, theta):
    """
    f = q q̄³, C₁ and C₂ = ½trχ̲² + C̃₂ at (r, θ).

    At a = 0 these reduce to C₁ = 2trχ̲ and C₂ = ½trχ̲².
    """
    frame = frame_at(params, 'global', r, theta)
    q = aux_scalars(params, frame.r, frame.theta).q_complex
    C1, C2, C2_tilde = _c_coefficients(frame.ricci)
    return TransformCoeffs(f=q * np.conj(q) ** 3, C1=C1, C2=C2, C2_tilde=C2_tilde)


def c_field(params, which):
    """C₁ (weight −1), C₂ or C̃₂ (weight −2) as a PatchField."""
    index, weight = {'C1': (0, -1), 'C2': (1, -2), 'C2_tilde': (2, -2)}[which]
    return _scalar_field(params, lambda r, th: _c_coefficients(frame_at(params, 'global', r, th).ricci)[index], weight)


def _chandrasekhar_factor(params, r, theta):
    q = aux_scalars(params, r, theta).q_complex
    return np.conj(q) ** 4 / np.asarray(r) ** 2


def factorization_identities(params, r, theta):
    """
    Residuals of the two identities behind the factorized transform:

        'log_derivative'  2∇⁽ᶜ⁾₃(q̄⁴/r²) − C₁·(q̄⁴/r²), relative to |C₁ q̄⁴/r²|
        'C2_transport'    C₂ − ½∇⁽ᶜ⁾₃C₁ − ¼C₁², relative to |C₂|
    """
    point = (0.0, r, theta, 0.0)
    coeffs = transform_coeffs(params, r, theta)
    F = _scalar_field(params, lambda x, y: _chandrasekhar_factor(params, x, y), 0)
    F0 = F(*point)
    log_residual = np.abs(2.0 * F.nabla(3, conformal=True)(*point) - coeffs.C1 * F0) / np.abs(coeffs.C1 * F0)
    dC1 = c_field(params, 'C1').nabla(3, conformal=True)(*point)
    c2_residual = np.abs(coeffs.C2 - 0.5 * dC1 - 0.25 * coeffs.C1 ** 2) / np.abs(coeffs.C2)
    return {'log_derivative': log_residual, 'C2_transport': c2_residual}


# ── Teukolsky operator ──────────────────────────────────────────────────


def _expect_teukolsky_field(A):
    if A.spin != 2 or A.weight != 2:
        raise KdsError('support', "The Teukolsky operator acts on spin-2 fields of conformal weight 2",
                       spin=A.spin, weight=A.weight)
    if A.kind != 'global':
        raise KdsError('support', "The Teukolsky operator is assembled in the global frame", kind=A.kind)


def teukolsky_potential(params, frame):
    """Zeroth-order coefficient −tr̄X trX̲ + 2P̄ − 2Λ/3 + 2H·H̲̄."""
    ricci = frame.ricci
    H_dot_Hbbar = np.sum(frame.H * np.conj(frame.Hb), axis=-1)
    return (
        -np.conj(ricci.trX) * ricci.trXb
        + 2.0 * np.conj(frame.weyl['P'])
        - 2.0 * params.Lambda / 3.0
        + 2.0 * H_dot_Hbbar
    )


def teukolsky_apply(A):
    """
    ℒ(A) = −∇⁽ᶜ⁾₄∇⁽ᶜ⁾₃A + ¼𝒟⁽ᶜ⁾⊗̂(𝒟̄⁽ᶜ⁾·A) + (−½trX − 2tr̄X)∇⁽ᶜ⁾₃A
           − ½trX̲∇⁽ᶜ⁾₄A + (4H + H̲ + H̲̄)·∇⁽ᶜ⁾A
           + (−tr̄X trX̲ + 2P̄ − 2Λ/3 + 2H·H̲̄)A

    as a PatchField. In z-storage ¼𝒟⊗̂(𝒟̄·A) is the raising of the
    lowering, H·∇z = H₁Bz and H̲̄·∇z = H̲̄₁Az.
    """
    _expect_teukolsky_field(A)
    params = A.params
    c3 = A.nabla(3, conformal=True)
    c43 = c3.nabla(4, conformal=True)
    c4 = A.nabla(4, conformal=True)
    up = A.raising(conformal=True)
    down = A.lowering(conformal=True)
    angular = down.raising(conformal=True)

    def fn(tau, r, theta, phi):
        point = (tau, r, theta, phi)
        frame = A.frame(r, theta)
        ricci = frame.ricci
        H1, Hb1 = frame.H[..., 0], frame.Hb[..., 0]
        return (
            -c43(*point)
            + angular(*point)
            + (-0.5 * ricci.trX - 2.0 * np.conj(ricci.trX)) * c3(*point)
            - 0.5 * ricci.trXb * c4(*point)
            + (4.0 * H1 + Hb1) * down(*point)
            + np.conj(Hb1) * up(*point)
            + teukolsky_potential(params, frame) * A(*point)
        )

    return A.derived(fn, weight=2)


def chandrasekhar_q(A):
    """
    Ψ = ∇⁽ᶜ⁾₃((q̄⁴/r²)A) and 𝔮 = (q/q̄)r²∇⁽ᶜ⁾₃Ψ, so that
    ∇⁽ᶜ⁾₃Ψ = (q̄/(q r²))𝔮.

    Returns:
        dict with PatchFields 'Psi' (weight 1) and 'qfrak' (weight 0).
    """
    _expect_teukolsky_field(A)
    params = A.params
    FA = A.derived(lambda tau, r, theta, phi: _chandrasekhar_factor(params, r, theta) * A(tau, r, theta, phi))
    psi = FA.nabla(3, conformal=True)
    d_psi = psi.nabla(3, conformal=True)

    def qfrak(tau, r, theta, phi):
        q = aux_scalars(params, r, theta).q_complex
        return q / np.conj(q) * np.asarray(r) ** 2 * d_psi(tau, r, theta, phi)

    return {'Psi': psi, 'qfrak': psi.derived(qfrak, weight=0)}


def factorization_residual(A, tau, r, theta, phi):
    """
    |f(∇⁽ᶜ⁾₃∇⁽ᶜ⁾₃A + C₁∇⁽ᶜ⁾₃A + C₂A) − 𝔮| at the given points, with
    f = q q̄³.
    """
    point = (tau, r, theta, phi)
    coeffs = transform_coeffs(A.params, r, theta)
    c3 = A.nabla(3, conformal=True)
    expanded = coeffs.f * (c3.nabla(3, conformal=True)(*point) + coeffs.C1 * c3(*point) + coeffs.C2 * A(*point))
    return np.abs(expanded - chandrasekhar_q(A)['qfrak'](*point))


# ── Regge–Wheeler coefficients ──────────────────────────────────────────


def rw_potential(params, r, theta):
    """V = 4Δ/((r²+a²)|q|²) + 2Λ."""
    aux = aux_scalars(params, r, theta)
    r = np.asarray(r, float)
    return 4.0 * aux.delta / ((r ** 2 + params.a ** 2) * aux.q_abs2) + 2.0 * params.Lambda


def _div_curl(params, name, r, theta):
    """
    div and curl of the stationary axisymmetric 1-form ``name`` of the
    global frame: div ξ = e₁ξ₁ − (Λ₂)₁₂ξ₁, curl ξ = e₁ξ₂ − (Λ₂)₁₂ξ₂.
    """
    point = (0.0, r, theta, 0.0)
    frame = frame_at(params, 'global', r, theta)
    form = getattr(frame.ricci, name)
    lam2 = frame.lambda_connection[2]
    out = []
    for index in (0, 1):
        component = _scalar_field(params, lambda x, y: getattr(frame_at(params, 'global', x, y).ricci, name)[..., index], 0)
        out.append(np.real(component.directional(1, *point)) - lam2 * form[..., index])
    return out[0], out[1]


def nl_leading_coefficient(params, r, theta):
    """
    c with N_L = c(a²∇_T + a∇_Φ)∇₃A + lower order:
    c = −8(1+γ)q̄²Δ/(λ r²|q|²).
    """
    frame = frame_at(params, 'global', r, theta)
    aux = aux_scalars(params, frame.r, frame.theta)
    return (
        -8.0 * (1.0 + params.gamma) * np.conj(aux.q_complex) ** 2 * aux.delta
        / (frame.conformal_factor * frame.r ** 2 * aux.q_abs2)
    )


def rw_coeffs(params, r, theta):
    """
    Coefficients of the generalized Regge–Wheeler equation for 𝔮 at (r, θ)
    (arrays broadcast). The W samples are the leading-order residual
    expressions of the factorization, each multiplied by f = q q̄³; they
    vanish identically when a = 0.
    """
    frame = frame_at(params, 'global', r, theta)
    r, theta = frame.r, frame.theta
    ricci = frame.ricci
    aux = aux_scalars(params, r, theta)
    q, q2, delta = aux.q_complex, aux.q_abs2, aux.delta
    lam = frame.conformal_factor
    xi = 1.0 + params.gamma
    rho, rho_dual = frame.weyl['rho'], frame.weyl['rho_dual']
    eta, etab = ricci.eta, ricci.etab
    t, at = ricci.tr_chib, ricci.atr_chib
    point = (0.0, r, theta, 0.0)
    coeffs = transform_coeffs(params, r, theta)
    Lam = params.Lambda

    V = rw_potential(params, r, theta)
    R_coef = lam ** 2 * q2 / delta
    trX_trXb = ricci.trX * ricci.trXb
    eta_sq = np.sum(eta ** 2, axis=-1)
    eta_etab = np.sum(eta * etab, axis=-1)
    div_eta, curl_eta = _div_curl(params, 'eta', r, theta)
    div_etab, curl_etab = _div_curl(params, 'etab', r, theta)

    # potential with the transported C₁
    C1 = c_field(params, 'C1')
    nabla_R_C1 = -C1.nabla(4, conformal=True)(*point) + R_coef * C1.nabla(3, conformal=True)(*point)
    V_tilde = (
        nabla_R_C1 - ricci.tr_chi * coeffs.C1 + 4.0 * rho
        - 0.5 * (1.0 + np.real(np.conj(q) / q)) * trX_trXb
        + 8.0 * div_eta + 2.0 * eta_etab + 5.0 * eta_sq
        - 8j * rho_dual + 14.0 * Lam / 3.0 + 8j * curl_eta
    )

    ratio = at ** 2 / t ** 2
    V_tilde_closed = (
        4.0 * delta * r ** 2 / q2 ** 3 + 2.0 * Lam
        + 4.0 * div_eta + eta_sq + 2.0 * eta_etab
        + 8.0 * at / t * (curl_etab + rho_dual)
        + ratio * (np.real(trX_trXb) - 4.0 * div_etab - 4.0 * eta_sq - 4.0 * rho - 8.0 * Lam / 3.0)
        + R_coef * at ** 2 * (3.0 + ratio)
        + 2.0 * ricci.tr_chi * at ** 2 / t
    )

    Z_coef = -xi * 8.0 * params.a * delta / (lam * r ** 2 * q2 ** 2)
    Z = np.zeros(r.shape + (4,))
    Z[..., 0] = params.a * Z_coef
    Z[..., 3] = Z_coef

    W = _w_samples(params, frame, coeffs, point)
    logger.debug("rw_coeffs: max |Im V_tilde| = %.3e", float(np.max(np.abs(np.imag(V_tilde)))))
    return RWCoeffs(
        V=V,
        V_tilde=V_tilde,
        V_tilde_closed=V_tilde_closed,
        V0_bound=np.abs(V_tilde_closed - V),
        Z=Z,
        W3=W['W3'], W4=W['W4'], Wh=W['Wh'], W0=W['W0'],
    )


def _w_samples(params, frame, coeffs, point):
    ricci = frame.ricci
    t = ricci.tr_chib
    f, C2 = coeffs.f, coeffs.C2
    eta, etab = ricci.eta, ricci.etab
    C2_field = c_field(params, 'C2')
    Ct = c_field(params, 'C2_tilde')

    W4 = f * (0.5 * t ** 3 - (C2_field.nabla(3, conformal=True)(*point) + 2.0 * t * C2))
    W3 = f * (t * (-0.5 * ricci.tr_chi * t + 2.0 * frame.weyl['rho'] + 4.0 * params.Lambda / 3.0)
              - C2_field.nabla(4, conformal=True)(*point))
    eta_dual = np.stack([eta[..., 1], -eta[..., 0]], axis=-1)
    grad = np.stack([C2_field.nabla(a, conformal=True)(*point) for a in (1, 2)], axis=-1)
    Wh = f[..., None] * (2.0 * grad + (4.0 * etab - 1j * eta_dual) * C2[..., None])

    trX, trXb = ricci.trX, ricci.trXb
    c3 = Ct.nabla(3, conformal=True)
    W0 = f * (
        -0.5 * (trX + 4.0 * np.conj(trX)) * c3(*point)
        - 0.5 * (2.0 * np.conj(trXb) + 3.0 * trXb) * Ct.nabla(4, conformal=True)(*point)
        + 6.0 * dot_gradient(Ct, etab, point, conformal=True)
        + 4.0 * frame.H[..., 0] * Ct.lowering(conformal=True)(*point)
        - c3.nabla(4, conformal=True)(*point)
        + Ct.lowering(conformal=True).raising(conformal=True)(*point)
    )
    return {'W3': W3, 'W4': W4, 'Wh': Wh, 'W0': W0}


def w_decay_orders(M, Lambda, r, theta, spins=(0.01, 0.02, 0.04)):
    """
    Fitted exponents of |W| in a at fixed (r, θ): O(a) means an exponent
    of at least one.
    """
    from .fd import fitted_order

    samples = {'W3': [], 'W4': [], 'Wh': [], 'W0': []}
    for a in spins:
        c = rw_coeffs(make_params(M, a * M, Lambda), r, theta)
        for key in samples:
            samples[key].append(float(np.max(np.abs(getattr(c, key)))))
    return {key: fitted_order(np.asarray(spins), values) for key, values in samples.items()}


# ── Wave operators ──────────────────────────────────────────────────────


def wave_operator(field):
    """
    □̇_k z = −½(∇₃∇₄ + ∇₄∇₃)z + Δ_k z + (ω − ½trχ)∇₃z + (ω̲ − ½trχ̲)∇₄z
            + (η + η̲)·∇z

    for a PatchField of any spin, in its own frame.
    """
    d3, d4 = field.nabla(3), field.nabla(4)
    d43, d34 = d3.nabla(4), d4.nabla(3)
    ab = field.lowering().raising()
    ba = field.raising().lowering()

    def fn(tau, r, theta, phi):
        point = (tau, r, theta, phi)
        ricci = field.frame(r, theta).ricci
        return (
            -0.5 * (d43(*point) + d34(*point))
            + 0.5 * (ab(*point) + ba(*point))
            + (ricci.omega - 0.5 * ricci.tr_chi) * d3(*point)
            + (ricci.omegab - 0.5 * ricci.tr_chib) * d4(*point)
            + dot_gradient(field, ricci.eta + ricci.etab, point)
        )

    return field.derived(fn)


def scalar_wave_bl(params, fn, t, r, theta, phi, step=1e-3):
    """
    |q|²□ψ in Boyer–Lindquist coordinates:

        ∂_r(Δ∂_rψ) + (1/sinθ)∂_θ(κ sinθ ∂_θψ)
        − (ξ²/Δ)((r²+a²)∂_t + a∂_φ)²ψ + (ξ²/(κ sin²θ))(a sin²θ ∂_t + ∂_φ)²ψ

    with ``fn(t, r, θ, φ)`` differentiated by nested centered differences.
    """
    from .fd import partial

    h = step * params.M
    a, xi = params.a, 1.0 + params.gamma
    args = (t, r, theta, phi)
    d = lambda g, index: (lambda *x: partial(g, x, index, h, order=4))

    radial = d(lambda *x: delta_of(params, x[1]) * d(fn, 1)(*x), 1)(*args)
    polar = d(lambda *x: _kappa(params, x[2]) * np.sin(x[2]) * d(fn, 2)(*x), 2)(*args) / np.sin(theta)

    def killing(coef_t, coef_phi):
        return lambda *x: coef_t(*x) * d(fn, 0)(*x) + coef_phi(*x) * d(fn, 3)(*x)

    rr = lambda *x: np.asarray(x[1]) ** 2 + a ** 2
    L_r = killing(rr, lambda *x: a)
    L_r2 = (lambda *x: rr(*x) * d(L_r, 0)(*x) + a * d(L_r, 3)(*x))(*args)
    L_th = killing(lambda *x: a * np.sin(x[2]) ** 2, lambda *x: 1.0)
    L_th2 = (lambda *x: a * np.sin(x[2]) ** 2 * d(L_th, 0)(*x) + d(L_th, 3)(*x))(*args)

    delta = delta_of(params, r)
    kappa = _kappa(params, theta)
    return radial + polar - xi ** 2 / delta * L_r2 + xi ** 2 / (kappa * np.sin(theta) ** 2) * L_th2


def _kappa(params, theta):
    return 1.0 + params.gamma * np.cos(theta) ** 2


# ── gRW residual on evolved data ────────────────────────────────────────


def spin2_harmonic(lambda_ang, theta):
    """
    Axisymmetric spin-2 harmonic sin²θ P^{(2,2)}_{ℓ−2}(cos θ) with
    ℓ(ℓ+1) − 4 = λ_ang; Δ₂ acts on it as −λ_ang/r² on round spheres.
    """
    ell = (-1.0 + math.sqrt(1.0 + 4.0 * (lambda_ang + 4.0))) / 2.0
    if abs(ell - round(ell)) > 1e-9 or round(ell) < 2:
        raise KdsError('support', "lambda_ang must equal l(l+1) - 4 for an integer l >= 2", lambda_ang=lambda_ang)
    return np.sin(theta) ** 2 * special.eval_jacobi(int(round(ell)) - 2, 2, 2, np.cos(theta))


def grw_residual(solution, theta=1.0, interior=4, tol=NOT_A_SOLUTION_TOL):
    """
    Relative residual of (□̇₂ − V)𝔮 = 0 for an evolved a = 0 mode
    solution, with 𝔮 = ψ(τ, r)·Y(θ).

    ``solution`` holds 'psi' (n_τ × n_r), 'tau', 'r', 'lambda_ang' and the
    black-hole parameters 'M', 'a', 'Lambda'. The residual is sampled on
    the grid nodes at least ``interior`` points away from every edge and
    normalized by max|ψ|/M².

    Raises:
        KdsError('support'): a ≠ 0.
        KdsError('not-a-solution'): the residual exceeds ``tol``.
    """
    if float(solution['a']) != 0.0:
        raise KdsError('support', "The gRW residual is evaluated on a = 0 solutions")
    params = make_params(float(solution['M']), 0.0, float(solution['Lambda']))
    tau = np.asarray(solution['tau'], float)
    r = np.asarray(solution['r'], float)
    psi = np.asarray(solution['psi'])
    scale = float(np.max(np.abs(psi)))
    if scale == 0.0:
        return 0.0
    lambda_ang = float(solution['lambda_ang'])
    splines = [interpolate.RectBivariateSpline(tau, r, part, kx=5, ky=5) for part in (psi.real, psi.imag)]
    Y = lambda th: spin2_harmonic(lambda_ang, th)

    def qfrak(t, x, th, ph):
        t, x, th = np.broadcast_arrays(t, x, th)
        values = splines[0](t.ravel(), x.ravel(), grid=False) + 1j * splines[1](t.ravel(), x.ravel(), grid=False)
        return _broadcast(values.reshape(t.shape) * Y(th), ph)

    field = PatchField(params, qfrak, spin=2, weight=0)
    T, R = np.meshgrid(tau[interior:-interior], r[interior:-interior], indexing='ij')
    box = wave_operator(field)(T, R, theta, 0.0)
    residual = (box - rw_potential(params, R, theta) * field(T, R, theta, 0.0)) / Y(theta)
    value = float(np.sqrt(np.mean(np.abs(residual) ** 2)) * params.M ** 2 / scale)
    logger.info("gRW residual %.3e over %d nodes", value, residual.size)
    if value > tol:
        raise KdsError('not-a-solution', "The loaded data does not solve the mode equation", residual=value)
    return value

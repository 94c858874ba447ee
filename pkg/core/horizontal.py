# core/horizontal.py
"""
Horizontal tensor calculus on 𝔰₀, 𝔰₁ and 𝔰₂(ℂ).

Horizontal tensors are stored by one complex scalar z of spin weight k:

    scalar        z = f                      k = 0
    ASD 1-form    z = F₁,   F₂ = −iz         k = 1
    ASD 2-tensor  z = U₁₁,  U₁₂ = −iz        k = 2

and the covariant derivative acts as ∇_μ z = e_μ z − ik(Λ_μ)₁₂ z. All
horizontal operators are built from the spin raising and lowering pair

    A z = (∇₁ + i∇₂)z    (spin k → k+1)
    B z = (∇₁ − i∇₂)z    (spin k → k−1)

Two containers evaluate them. ``SphereField`` samples z on a sphere
S(τ, r) and differentiates spectrally in (θ, φ̃); ``PatchField`` wraps a
callable z(τ, r, θ, φ̃) and differentiates along frame vectors by finite
differences, which is what the null derivatives need.
"""
import itertools
import logging
import math

import numpy as np
from numpy.polynomial import legendre

from . import fd
from .exceptions import KdsError
from .frames import frame_at
from .geometry import aux_scalars

logger = logging.getLogger(__name__)

# |ψ|² = c_k|z|² for a field stored by z
SPIN_NORM = {0: 1.0, 1: 1.0, 2: 2.0}

# Zeroth-order constant of the integrated Bochner identity, per rank
BOCHNER_CONSTANT = {0: 0.0, 1: 2.0, 2: 8.0}

PATCH_STEP = 1e-3


def _norm_factor(spin):
    return SPIN_NORM.get(abs(spin), 2.0)


def gauss_curvature(params, frame):
    """K̂ = −¼(trχ trχ̲ + ⁽ᵃ⁾trχ ⁽ᵃ⁾trχ̲) − ρ + Λ/3."""
    ricci = frame.ricci
    return (
        -0.25 * (ricci.tr_chi * ricci.tr_chib + ricci.atr_chi * ricci.atr_chib)
        - frame.weyl['rho']
        + params.Lambda / 3.0
    )


# ── Sphere grid ─────────────────────────────────────────────────────────


class SphereGrid:
    """
    Gauss–Legendre nodes in x = cos θ times uniform nodes in φ̃.

    The product rule integrates x^j e^{imφ} exactly for j ≤ 2n_θ − 1 and
    |m| < n_φ/2. θ-derivatives use the parity of spin-weighted functions:
    a Fourier mode m of a spin-k field is sin^p θ · P(cos θ) with
    p = (m + k) mod 2 and P smooth, and P is expanded in Legendre
    polynomials.
    """

    def __init__(self, n_theta, n_phi=None, tail_tol=1e-8):
        if n_theta < 4:
            raise KdsError('resolution', "A sphere grid needs at least 4 nodes in theta", n_theta=n_theta)
        n_phi = n_phi or 2 * n_theta
        x, w = legendre.leggauss(n_theta)
        self.n_theta, self.n_phi = n_theta, n_phi
        self.x, self.weights = x[::-1].copy(), w[::-1].copy()
        self.theta = np.arccos(self.x)
        self.sin = np.sqrt(1.0 - self.x ** 2)
        self.phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        self.dphi = 2.0 * math.pi / n_phi
        self.m = np.rint(np.fft.fftfreq(n_phi, 1.0 / n_phi)).astype(int)
        self.tail_tol = tail_tol
        self._nyquist = (np.abs(self.m) == n_phi // 2) if n_phi % 2 == 0 else np.zeros(n_phi, bool)
        self._vander = legendre.legvander(self.x, n_theta - 1)
        self._dvander = legendre.legvander(self.x, n_theta - 2)
        self._norms = (2.0 * np.arange(n_theta) + 1.0) / 2.0

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    @property
    def mesh(self):
        return np.meshgrid(self.theta, self.phi, indexing='ij')

    @property
    def max_order(self):
        """Largest derivative order the θ-bandwidth resolves."""
        return self.n_theta // 2

    def check_order(self, order):
        if order > self.max_order:
            raise KdsError(
                'resolution', "Derivative order exceeds the grid bandwidth",
                order=order, max_order=self.max_order,
            )

    def integrate(self, values, density=1.0):
        """∫ values · density dx dφ̃ over the grid."""
        values = np.asarray(values) * density
        return np.sum(values * self.weights[:, None]) * self.dphi

    def _modes(self, values):
        modes = np.fft.fft(np.asarray(values, complex), axis=1)
        modes[:, self._nyquist] = 0.0
        return modes

    def _legendre_coefficients(self, samples):
        # discrete Legendre transform; exact for degree ≤ n_θ − 1
        return self._norms[:, None] * (self._vander.T @ (self.weights[:, None] * samples))

    def _check_tail(self, coefficients, scale, what):
        if scale == 0.0:
            return
        tail = np.max(np.abs(coefficients[-2:]))
        if tail > self.tail_tol * scale:
            raise KdsError('resolution', f"Unresolved {what} content; raise n_theta", tail=float(tail / scale))

    def d_phi(self, values):
        modes = self._modes(values)
        scale = np.max(np.abs(modes))
        if scale > 0 and self.n_phi > 4:
            top = np.abs(self.m) >= self.n_phi // 2 - 1
            if np.max(np.abs(modes[:, top])) > self.tail_tol * scale:
                raise KdsError('resolution', "Unresolved phi content; raise n_phi")
        return np.fft.ifft(1j * self.m * modes, axis=1)

    def d_theta(self, values, spin=0):
        modes = self._modes(values)
        parity = (self.m + spin) % 2
        coefficients = {}
        for p in (0, 1):
            cols = parity == p
            if cols.any():
                coefficients[p] = self._legendre_coefficients(modes[:, cols] / self.sin[:, None] ** p)
        scale = max(float(np.max(np.abs(c))) for c in coefficients.values())
        out = np.zeros_like(modes)
        for p, coeff in coefficients.items():
            self._check_tail(coeff, scale, 'theta')
            P = self._vander @ coeff
            dP = self._dvander @ legendre.legder(coeff, axis=0)
            sin = self.sin[:, None]
            out[:, parity == p] = p * self.x[:, None] * P * sin ** (p - 1) - sin ** (p + 1) * dP
        return np.fft.ifft(out, axis=1)


def quadrature_exactness(grid):
    """max error of the grid rule on x^j e^{imφ}, j ≤ 2n_θ − 1, |m| < n_φ/2."""
    TH, PH = grid.mesh
    X = np.cos(TH)
    worst = 0.0
    for j in range(2 * grid.n_theta):
        for m in range(grid.n_phi // 2):
            exact = (2.0 / (j + 1) if j % 2 == 0 else 0.0) * (2.0 * math.pi if m == 0 else 0.0)
            approx = grid.integrate(X ** j * np.exp(1j * m * PH))
            worst = max(worst, abs(approx - exact))
    return worst


def _unit_ladder(grid, values, spin, sign):
    """Raising (sign=+1) or lowering (sign=−1) on the unit round sphere."""
    sin = grid.sin[:, None]
    cot = grid.x[:, None] / sin
    return grid.d_theta(values, spin) + sign * 1j * grid.d_phi(values) / sin - sign * spin * cot * values


def random_field(grid, spin, rng, degree=4):
    """
    A smooth spin-weighted test field: the k-fold raising (or lowering)
    of a random complex polynomial in the embedding coordinates.
    """
    TH, PH = grid.mesh
    X, Y, Z = np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)
    values = np.zeros(grid.shape, complex)
    for i, j, k in itertools.product(range(degree + 1), repeat=3):
        if i + j + k <= degree:
            values += complex(rng.standard_normal(), rng.standard_normal()) * X ** i * Y ** j * Z ** k
    sign = 1 if spin >= 0 else -1
    for step in range(abs(spin)):
        values = _unit_ladder(grid, values, sign * step, sign)
    return values


# ── Sphere fields ───────────────────────────────────────────────────────


class SphereSection:
    """
    The sphere S(τ, r) of ``params`` with the frame data of ``kind`` on a
    SphereGrid. The area element is (|q|²/(1+γ)) dx dφ̃.
    """

    def __init__(self, params, r, grid, kind='global'):
        self.params, self.r, self.grid, self.kind = params, float(r), grid, kind
        theta = grid.theta[:, None]
        self.frame = frame_at(params, kind, self.r, theta)
        self.e1_theta = self.frame.e1[..., 2]
        self.e2_tau = self.frame.e2[..., 0]
        self.e2_phi = self.frame.e2[..., 3]
        self.lam = self.frame.lambda_connection
        self.density = aux_scalars(params, self.r, theta).q_abs2 / (1.0 + params.gamma)
        self.K_hat = gauss_curvature(params, self.frame)

    def field(self, values, spin=0, omega=0.0):
        return SphereField(self, values, spin=spin, omega=omega)

    def integrate(self, values):
        return self.grid.integrate(values, self.density)


class SphereField:
    """
    z-storage values of spin ``spin`` on a SphereSection. ``omega`` is the
    frequency of a field ∝ e^{−iωτ}, so that e₂ picks up −iω e₂(τ).
    ``order`` counts the angular derivatives already taken.
    """

    def __init__(self, sphere, values, spin=0, omega=0.0, order=0):
        sphere.grid.check_order(order)
        self.sphere = sphere
        self.values = np.broadcast_to(np.asarray(values, complex), sphere.grid.shape).copy()
        self.spin = int(spin)
        self.omega = omega
        self.order = order

    def _derived(self, values, spin):
        return SphereField(self.sphere, values, spin=spin, omega=self.omega, order=self.order + 1)

    def e1(self):
        return self.sphere.e1_theta * self.sphere.grid.d_theta(self.values, self.spin)

    def e2(self):
        sphere = self.sphere
        dtau = -1j * self.omega * self.values
        return sphere.e2_tau * dtau + sphere.e2_phi * sphere.grid.d_phi(self.values)

    def _ladder(self, sign):
        k, lam, z = self.spin, self.sphere.lam, self.values
        values = self.e1() + sign * 1j * self.e2() - 1j * k * lam[1] * z + sign * k * lam[2] * z
        return self._derived(values, k + sign)

    def raising(self):
        """A z = (∇₁ + i∇₂)z."""
        return self._ladder(+1)

    def lowering(self):
        """B z = (∇₁ − i∇₂)z."""
        return self._ladder(-1)

    def laplacian(self):
        """Δ_k z = ½(AB + BA)z."""
        ab = self.lowering().raising().values
        ba = self.raising().lowering().values
        return SphereField(self.sphere, 0.5 * (ab + ba), self.spin, self.omega, self.order + 2)

    def conj(self):
        return SphereField(self.sphere, np.conj(self.values), -self.spin, -self.omega, self.order)

    def scaled(self, factor, spin=None):
        return SphereField(self.sphere, factor * self.values, self.spin if spin is None else spin,
                           self.omega, self.order)

    # Pointwise squared norms in the measure of the stored tensor

    def norm_sq(self):
        return _norm_factor(self.spin) * np.abs(self.values) ** 2

    def gradient_sq(self):
        a, b = self.raising().values, self.lowering().values
        return _norm_factor(self.spin) * 0.5 * (np.abs(a) ** 2 + np.abs(b) ** 2)

    def hessian_sq(self):
        up, down = self.raising(), self.lowering()
        terms = [up.raising(), up.lowering(), down.raising(), down.lowering()]
        return _norm_factor(self.spin) * 0.25 * sum(np.abs(t.values) ** 2 for t in terms)

    def integral(self, values):
        return self.sphere.integrate(values)


# ── Hodge operators ─────────────────────────────────────────────────────


def _expect_spin(field, spins, name):
    if field.spin not in spins:
        raise KdsError('support', f"{name} does not act on spin {field.spin}", spin=field.spin)


def _d1(field):
    # (div ξ + i curl ξ)
    _expect_spin(field, (1,), 'D1')
    return field.lowering()


def _d2(field):
    _expect_spin(field, (2,), 'D2')
    return field.lowering()


def _d1_star(field):
    # pair (f, f*) stored as f + if*
    _expect_spin(field, (0,), 'D1_star')
    return field.raising().scaled(-1.0)


def _d2_star(field):
    _expect_spin(field, (1,), 'D2_star')
    return field.raising().scaled(-0.5)


def _complex_d(field):
    _expect_spin(field, (0,), 'D')
    return field.raising()


def _complex_d_hat(field):
    _expect_spin(field, (1,), 'D_hat')
    return field.raising().scaled(2.0)


def _complex_dbar_dot(field):
    _expect_spin(field, (1, 2), 'Dbar_dot')
    return field.lowering().scaled(2.0)


def _complex_d_dot_conj(field):
    _expect_spin(field, (1,), 'D_dot_conj')
    return field.conj().raising().scaled(2.0)


HODGE_OPS = {
    'D1': _d1,
    'D2': _d2,
    'D1_star': _d1_star,
    'D2_star': _d2_star,
    'D': _complex_d,
    'D_hat': _complex_d_hat,
    'Dbar_dot': _complex_dbar_dot,
    'D_dot_conj': _complex_d_dot_conj,
}


def hodge_ops(field, name):
    """
    Apply one of the Hodge operators in z-storage.

    Real operators: 𝒟₁ξ = div ξ + i curl ξ, 𝒟₂u = div u, *𝒟₁(f, f*) and
    *𝒟₂ξ = −½∇⊗̂ξ. Complex operators: 𝒟h, 𝒟⊗̂F, 𝒟̄·F (or 𝒟̄·U) and 𝒟·F̄.

    Raises:
        KdsError('support'): unknown operator or wrong input spin.
        KdsError('resolution'): the grid cannot resolve the derivative.
    """
    try:
        op = HODGE_OPS[name]
    except KeyError:
        raise KdsError('support', f"Unknown Hodge operator {name!r}")
    return op(field)


# ── Sphere identities ───────────────────────────────────────────────────


def _eta_sum(sphere):
    ricci = sphere.frame.ricci
    return ricci.eta + ricci.etab


def adjointness_residuals(sphere, rng):
    """
    Relative residuals of the integration-by-parts identities

        ∫𝒟₁ξ·h = ∫ξ·*𝒟₁h − ∫(η+η̲)·(fξ + f* *ξ)
        ∫𝒟₂u·ξ = ∫u·*𝒟₂ξ − ∫(η+η̲)_b ξ_a u_ab

    on random static fields. The (η+η̲) terms vanish when a = 0.
    """
    grid = sphere.grid
    xi = sphere.field(random_field(grid, 1, rng))
    h = sphere.field(random_field(grid, 0, rng))
    u = sphere.field(random_field(grid, 2, rng))
    s = _eta_sum(sphere)
    s1, s2 = s[..., 0], s[..., 1]
    xi1, xi2 = xi.values.real, xi.values.imag
    f, f_star = h.values.real, h.values.imag

    lhs1 = sphere.integrate(np.real(hodge_ops(xi, 'D1').values * np.conj(h.values)))
    rhs1 = sphere.integrate(np.real(xi.values * np.conj(hodge_ops(h, 'D1_star').values)))
    X1, X2 = f * xi1 + f_star * xi2, f * xi2 - f_star * xi1
    rhs1 -= sphere.integrate(s1 * X1 + s2 * X2)

    u11, u12 = u.values.real, u.values.imag
    lhs2 = sphere.integrate(np.real(hodge_ops(u, 'D2').values * np.conj(xi.values)))
    rhs2 = sphere.integrate(2.0 * np.real(u.values * np.conj(hodge_ops(xi, 'D2_star').values)))
    rhs2 -= sphere.integrate(s1 * (xi1 * u11 + xi2 * u12) + s2 * (xi1 * u12 - xi2 * u11))

    rel = lambda lhs, rhs: abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return {'D1': rel(lhs1, rhs1), 'D2': rel(lhs2, rhs2)}


def frak_j_checks(sphere):
    """max |𝒟(q) + a𝔍| and max |𝒟⊗̂𝔍| on the sphere."""
    params, grid = sphere.params, sphere.grid
    TH, _ = grid.mesh
    q = sphere.field(sphere.r + 1j * params.a * np.cos(TH), spin=0)
    J1 = sphere.frame.frak_j.J1 * np.ones(grid.shape)
    J = sphere.field(J1, spin=1)
    return {
        'D_q': float(np.max(np.abs(hodge_ops(q, 'D').values + params.a * J.values))),
        'D_hat_J': float(np.max(np.abs(hodge_ops(J, 'D_hat').values))),
    }


def laplacian_bochner_check(field):
    """
    Sphere-integrated Bochner identity for a field of rank k ≤ 2:

        ∫|Δ_kψ|² = ∫|∇²ψ|² + ∫K̂|∇ψ|² − c_k∫K̂²|ψ|²

    with c₀, c₁, c₂ = 0, 2, 8. The pointwise defect is a divergence; its
    absolute integral is reported as 'divergence' and the integrated
    defect as 'err' (zero up to quadrature when a = 0).
    """
    k = abs(field.spin)
    if k not in BOCHNER_CONSTANT:
        raise KdsError('support', "Bochner identity is checked for ranks 0, 1 and 2", spin=field.spin)
    K = field.sphere.K_hat
    c = BOCHNER_CONSTANT[k]
    lap_sq = field.laplacian().norm_sq()
    rhs_density = field.hessian_sq() + K * field.gradient_sq() - c * K ** 2 * field.norm_sq()
    lhs = float(np.real(field.integral(lap_sq)))
    rhs = float(np.real(field.integral(rhs_density)))
    return {
        'lhs': lhs,
        'rhs': rhs,
        'divergence': float(np.real(field.integral(np.abs(lap_sq - rhs_density)))),
        'err': lhs - rhs,
        'K_hat_mean': float(np.real(field.integral(K * np.ones(field.values.shape)) / field.integral(np.ones(field.values.shape)))),
    }


def poincare_ratio(field):
    """r²∫|∇ψ|² / ∫|ψ|²; at least 2 for 𝔰₂ fields when a = 0."""
    r = field.sphere.r
    return float(np.real(r ** 2 * field.integral(field.gradient_sq()) / field.integral(field.norm_sq())))


def hodge_elliptic_constant(field):
    """∫(r²|∇f|² + |f|²) / ∫r²|𝒟₂f|² for an 𝔰₂ field."""
    _expect_spin(field, (2,), 'hodge_elliptic_constant')
    r = field.sphere.r
    num = field.integral(r ** 2 * field.gradient_sq() + field.norm_sq())
    den = field.integral(r ** 2 * hodge_ops(field, 'D2').norm_sq())
    return float(np.real(num / den))


# ── Duality algebra ─────────────────────────────────────────────────────

EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]])


def duality_residuals(rng, n=200):
    """
    Machine-precision checks of the pointwise algebra on random tensors:
    **ξ = −ξ, left dual ∈u = −(right dual uε) for u ∈ 𝔰₂, the z-storage of
    *u being −iz, and F·Ḡ = 2(ξ·ζ + i*ξ·ζ), F·G = 0 for F = ξ + i*ξ.
    """
    xi = rng.standard_normal((n, 2))
    zeta = rng.standard_normal((n, 2))
    p, q = rng.standard_normal(n), rng.standard_normal(n)
    u = np.stack([np.stack([p, q], -1), np.stack([q, -p], -1)], -2)

    dual = lambda v: np.einsum('ab,...b->...a', EPSILON, v)
    left = np.einsum('ac,...cb->...ab', EPSILON, u)
    right = np.einsum('...ac,cb->...ab', u, EPSILON)
    z_u = u[..., 0, 0] + 1j * u[..., 0, 1]
    z_left = left[..., 0, 0] + 1j * left[..., 0, 1]

    F = xi + 1j * dual(xi)
    G = zeta + 1j * dual(zeta)
    dot = lambda a, b: np.sum(a * b, axis=-1)
    return {
        'double_dual': float(np.max(np.abs(dual(dual(xi)) + xi))),
        'left_right': float(np.max(np.abs(left + right))),
        'z_storage': float(np.max(np.abs(z_left + 1j * z_u))),
        'F_Gbar': float(np.max(np.abs(dot(F, np.conj(G)) - 2.0 * (dot(xi, zeta) + 1j * dot(dual(xi), zeta))))),
        'F_G': float(np.max(np.abs(dot(F, G)))),
    }


# ── Patch fields ────────────────────────────────────────────────────────


class PatchField:
    """
    A horizontal field z(τ, r, θ, φ̃) of spin ``spin`` and conformal weight
    ``weight``, given by a vectorized callable.

    Frame derivatives are directional differences f(x + εe_μ(x)) in ε, so
    derived fields are callables again and can be differentiated further.
    ``step`` is in units of M.
    """

    def __init__(self, params, fn, spin=0, weight=0, kind='global', step=PATCH_STEP, order=4):
        self.params = params
        self.fn = fn
        self.spin = int(spin)
        self.weight = int(weight)
        self.kind = kind
        self.step = step
        self.order = order

    def __call__(self, tau, r, theta, phi):
        return np.asarray(self.fn(tau, r, theta, phi), complex)

    def derived(self, fn, spin=None, weight=None):
        return PatchField(
            self.params, fn,
            self.spin if spin is None else spin,
            self.weight if weight is None else weight,
            self.kind, self.step, self.order,
        )

    def frame(self, r, theta):
        return frame_at(self.params, self.kind, r, theta)

    def directional(self, mu, tau, r, theta, phi, frame=None):
        """e_μ z by a centered difference along e_μ."""
        frame = frame if frame is not None else self.frame(r, theta)
        E = frame.vectors[..., mu - 1, :]

        def along(eps):
            return self(tau + eps * E[..., 0], r + eps * E[..., 1], theta + eps * E[..., 2], phi + eps * E[..., 3])

        return fd.derivative(along, 0.0, self.step * self.params.M, order=self.order)

    def nabla(self, mu, conformal=False):
        """
        ∇_μ z = e_μ z − ik(Λ_μ)₁₂ z. With ``conformal``:
        ∇⁽ᶜ⁾₃ = ∇₃ − 2sω̲ (weight s−1), ∇⁽ᶜ⁾₄ = ∇₄ + 2sω (weight s+1) and
        ∇⁽ᶜ⁾_a = ∇_a + sζ_a.
        """
        if mu not in (1, 2, 3, 4):
            raise KdsError('support', f"Unknown frame direction {mu!r}")
        k, s = self.spin, self.weight

        def fn(tau, r, theta, phi):
            frame = self.frame(r, theta)
            z = self(tau, r, theta, phi)
            out = self.directional(mu, tau, r, theta, phi, frame) - 1j * k * frame.lambda_connection[mu] * z
            if conformal:
                out = out + s * _conformal_shift(frame, mu) * z
            return out

        weight = s + {3: -1, 4: 1}.get(mu, 0) if conformal else s
        return self.derived(fn, weight=weight)

    def _ladder(self, sign, conformal):
        k, s = self.spin, self.weight

        def fn(tau, r, theta, phi):
            frame = self.frame(r, theta)
            z = self(tau, r, theta, phi)
            lam = frame.lambda_connection
            out = (
                self.directional(1, tau, r, theta, phi, frame)
                + sign * 1j * self.directional(2, tau, r, theta, phi, frame)
                - 1j * k * lam[1] * z + sign * k * lam[2] * z
            )
            if conformal:
                zeta = frame.ricci.zeta
                out = out + s * (zeta[..., 0] + sign * 1j * zeta[..., 1]) * z
            return out

        return self.derived(fn, spin=k + sign)

    def raising(self, conformal=False):
        return self._ladder(+1, conformal)

    def lowering(self, conformal=False):
        return self._ladder(-1, conformal)


def _conformal_shift(frame, mu):
    ricci = frame.ricci
    if mu == 3:
        return -2.0 * ricci.omegab
    if mu == 4:
        return 2.0 * ricci.omega
    return ricci.zeta[..., mu - 1]


def _z(form):
    return form[..., 0] + 1j * form[..., 1]


def dot_gradient(field, X, point, conformal=False):
    """X·∇z = ½[(X₁ − iX₂)Az + (X₁ + iX₂)Bz] for a real horizontal 1-form X."""
    a = field.raising(conformal)(*point)
    b = field.lowering(conformal)(*point)
    x1, x2 = X[..., 0], X[..., 1]
    return 0.5 * ((x1 - 1j * x2) * a + (x1 + 1j * x2) * b)


COMMUTATOR_PAIRS = ('[4,3]', '[3,a]', '[4,a]', '[c3,c4]', '[c4,D]', '[c3,D]')


def commutator_check(field, pair, tau, r, theta, phi):
    """
    LHS − RHS of a commutation formula in the frame of ``field``.

    Pairs:
        '[4,3]'    [∇₄,∇₃]z for any spin k
        '[3,a]'    [∇₃,∇]f on scalars (z-storage of the 1-form)
        '[4,a]'    [∇₄,∇]f on scalars
        '[c3,c4]'  [∇⁽ᶜ⁾₃,∇⁽ᶜ⁾₄]h on s-conformal scalars
        '[c4,D]'   [∇⁽ᶜ⁾₄,𝒟⁽ᶜ⁾]h on s-conformal scalars
        '[c3,D]'   [∇⁽ᶜ⁾₃,𝒟⁽ᶜ⁾]h on s-conformal scalars

    Returns the residual array; finite-difference truncation is O(step⁴)
    with the default fourth-order stencils.
    """
    point = (tau, r, theta, phi)
    frame = field.frame(r, theta)
    ricci = frame.ricci
    k, s = field.spin, field.weight
    z = field(*point)

    if pair == '[4,3]':
        d3, d4 = field.nabla(3), field.nabla(4)
        lhs = d3.nabla(4)(*point) - d4.nabla(3)(*point)
        eta, etab = ricci.eta, ricci.etab
        m = eta[..., 1] * etab[..., 0] - eta[..., 0] * etab[..., 1]
        rhs = (
            2.0 * ricci.omega * d3(*point)
            - 2.0 * ricci.omegab * d4(*point)
            + 2.0 * dot_gradient(field, etab - eta, point)
            + 2j * k * (m + frame.weyl['rho_dual']) * z
        )
        return lhs - rhs

    if k != 0:
        raise KdsError('support', f"Commutator {pair} is checked on scalars only", spin=k)

    if pair in ('[3,a]', '[4,a]'):
        mu = 3 if pair == '[3,a]' else 4
        lhs = field.raising().nabla(mu)(*point) - field.nabla(mu).raising()(*point)
        if mu == 3:
            rhs = -0.5 * ricci.trXb * field.raising()(*point) + _z(ricci.eta - ricci.zeta) * field.nabla(3)(*point)
        else:
            rhs = -0.5 * ricci.trX * field.raising()(*point) + _z(ricci.etab + ricci.zeta) * field.nabla(4)(*point)
        return lhs - rhs

    if pair == '[c3,c4]':
        c3, c4 = field.nabla(3, conformal=True), field.nabla(4, conformal=True)
        lhs = c4.nabla(3, conformal=True)(*point) - c3.nabla(4, conformal=True)(*point)
        eta_dot = np.sum(ricci.eta * ricci.etab, axis=-1)
        rho = frame.weyl['rho'] - field.params.Lambda / 3.0
        rhs = 2.0 * dot_gradient(field, ricci.eta - ricci.etab, point, conformal=True) + 2.0 * s * (rho - eta_dot) * z
        return lhs - rhs

    if pair in ('[c4,D]', '[c3,D]'):
        mu = 4 if pair == '[c4,D]' else 3
        D = field.raising(conformal=True)
        lhs = D.nabla(mu, conformal=True)(*point) - field.nabla(mu, conformal=True).raising(conformal=True)(*point)
        cz = field.nabla(mu, conformal=True)(*point)
        if mu == 4:
            Hb1 = frame.Hb[..., 0]
            rhs = -0.5 * ricci.trX * D(*point) + Hb1 * cz + s * 0.5 * ricci.trX * Hb1 * z
        else:
            H1 = frame.H[..., 0]
            rhs = -0.5 * ricci.trXb * D(*point) + H1 * cz - s * 0.5 * ricci.trXb * H1 * z
        return lhs - rhs

    raise KdsError('support', f"Unknown commutator {pair!r}", choices=COMMUTATOR_PAIRS)

# core/models.py
"""
Value records shared by the verification modules.

Nothing here is stored in a database: the records are frozen dataclasses
with a ``clean()`` hook in the spirit of Django model validation. Records
that carry behaviour (sphere grids, horizontal fields, multiplier
evaluators, coordinate tables) live next to the code that builds them.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .exceptions import KdsError


# ── Background ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class BlackHoleParams:
    """
    Kerr–de Sitter parameters plus the small parameters of the analysis.

    Attributes:
        M: mass (length units).
        a: spin per unit mass (length).
        Lambda: cosmological constant (1/length²), Lambda ≥ 0.
        delta_H: horizon margin; the domain is
            [r_event(1−delta_H), r_cosmo(1+delta_H)].
        delta_red: width of the redshift region r ≤ r_event(1+delta_red).
        delta_trap: width of the trapping region |1 − 3M/r| ≤ delta_trap.
        r0: centre of the transition band [r0−M, r0+M] of the global frame.
        r_event: event-horizon radius.
        r_cosmo: cosmological-horizon radius, ``math.inf`` when Lambda = 0.
        r_inner: inner (Cauchy) horizon when it exists, else None.

    Instances are built by ``core.geometry.make_params`` which solves for
    the horizons; constructing one by hand skips that step.
    """

    M: float
    a: float
    Lambda: float
    delta_H: float
    delta_red: float
    delta_trap: float
    r0: float
    r_event: float
    r_cosmo: float
    r_inner: Optional[float] = None

    @property
    def gamma(self):
        """γ = Λa²/3."""
        return self.Lambda * self.a ** 2 / 3.0

    @property
    def has_cosmological_horizon(self):
        return math.isfinite(self.r_cosmo)

    @property
    def r_min(self):
        """Inner boundary of the computational domain (inside the event horizon)."""
        return self.r_event * (1.0 - self.delta_H)

    @property
    def r_max(self):
        """Outer boundary (beyond the cosmological horizon); inf for Λ = 0."""
        return self.r_cosmo * (1.0 + self.delta_H)

    def clean(self):
        if not self.M > 0:
            raise KdsError('regime', "Mass must be positive", M=self.M)
        if self.Lambda < 0:
            raise KdsError('regime', "Negative cosmological constant is not supported", Lambda=self.Lambda)
        if abs(self.a) > 0.1 * self.M * (1 + 1e-12):
            raise KdsError('regime', "Slow rotation requires |a| <= 0.1 M", a=self.a, M=self.M)
        if self.Lambda * self.M ** 2 > 0.05 * (1 + 1e-12):
            raise KdsError('regime', "Small Λ requires Λ M² <= 0.05", Lambda=self.Lambda)
        for name in ('delta_H', 'delta_red', 'delta_trap'):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise KdsError('regime', f"{name} must lie in (0, 1)", value=value)
        if not self.r_event < self.r0 - self.M:
            raise KdsError('regime', "Transition band must start outside the event horizon", r0=self.r0)
        if self.has_cosmological_horizon and not self.r0 + self.M < 0.5 * self.r_cosmo:
            raise KdsError('regime', "Transition band must end before half the cosmological radius", r0=self.r0)

    def in_mass_units(self):
        """Return the same black hole with all lengths divided by M."""
        M = self.M
        return replace(
            self,
            M=1.0,
            a=self.a / M,
            Lambda=self.Lambda * M ** 2,
            r0=self.r0 / M,
            r_event=self.r_event / M,
            r_cosmo=self.r_cosmo / M,
            r_inner=None if self.r_inner is None else self.r_inner / M,
        )

    def as_dict(self):
        return {
            'M': self.M, 'a': self.a, 'Lambda': self.Lambda,
            'delta_H': self.delta_H, 'delta_red': self.delta_red,
            'delta_trap': self.delta_trap, 'r0': self.r0,
            'r_event': self.r_event,
            'r_cosmo': self.r_cosmo if self.has_cosmological_horizon else 'inf',
            'r_inner': self.r_inner,
        }


@dataclass(frozen=True)
class AuxScalars:
    """Δ, q, |q|², κ, γ and Υ = Δ/(r²+a²) at one or many points."""

    delta: np.ndarray
    q_complex: np.ndarray
    q_abs2: np.ndarray
    kappa: np.ndarray
    gamma: float
    upsilon: np.ndarray


# ── Frames ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RicciTable:
    """
    Ricci coefficients of a null frame.

    One-forms (eta, etab, zeta, xi, xib) are arrays of shape (..., 2);
    chih and chibh have shape (..., 2, 2). Coefficients that vanish
    identically for the frame kind are stored as zeros.
    """

    tr_chi: np.ndarray
    atr_chi: np.ndarray
    tr_chib: np.ndarray
    atr_chib: np.ndarray
    eta: np.ndarray
    etab: np.ndarray
    zeta: np.ndarray
    xi: np.ndarray
    xib: np.ndarray
    omega: np.ndarray
    omegab: np.ndarray
    chih: np.ndarray
    chibh: np.ndarray

    @property
    def trX(self):
        return self.tr_chi - 1j * self.atr_chi

    @property
    def trXb(self):
        return self.tr_chib - 1j * self.atr_chib


@dataclass(frozen=True)
class FrakJ:
    """ASD components of the canonical complex one-form 𝔍."""

    J1: np.ndarray
    J2: np.ndarray

    def as_array(self):
        return np.stack([self.J1, self.J2], axis=-1)


@dataclass(frozen=True)
class FramePoint:
    """
    A null frame with its Ricci, curvature and connection tables.

    ``e1``..``e4`` are coordinate components in ``chart`` ('global' for
    (τ, r, θ, φ̃), 'bl' for Boyer–Lindquist (t, r, θ, φ)). ``weyl`` holds
    the complex P together with the vanishing-marker entries A, B, Bbar,
    Abar; ``lambda_connection`` maps μ ∈ {1, 2, 3, 4} to (Λ_μ)₁₂.
    """

    kind: str
    chart: str
    r: np.ndarray
    theta: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    ricci: RicciTable
    weyl: dict
    lambda_connection: dict
    conformal_factor: np.ndarray
    frak_j: FrakJ

    @property
    def vectors(self):
        """Frame vectors stacked as (..., 4, 4) with row μ-1 = e_μ."""
        return np.stack([self.e1, self.e2, self.e3, self.e4], axis=-2)

    @property
    def H(self):
        eta = self.ricci.eta
        return _asd(eta)

    @property
    def Hb(self):
        return _asd(self.ricci.etab)

    @property
    def Z(self):
        return _asd(self.ricci.zeta)


def _asd(form):
    """Complex ASD combination f + i*f of a real horizontal 1-form."""
    f1, f2 = form[..., 0], form[..., 1]
    return np.stack([f1 + 1j * f2, f2 - 1j * f1], axis=-1)


# ── Coordinates ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RegionFlags:
    in_M_tot: bool
    in_M: bool
    in_M_e: bool
    in_trap: bool
    in_red: bool


@dataclass(frozen=True)
class SliceNormal:
    """Normal to one of Σ(τ), Σ*, A or Σ̂_in, in global-chart components."""

    which: str
    components: np.ndarray


# ── Teukolsky ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RWCoeffs:
    """
    Generalized Regge–Wheeler coefficients at one or many points.

    ``V_tilde`` is the potential assembled with the transported C₁ (its
    imaginary part measures the realness defect); ``V_tilde_closed`` is
    the closed form after the structure equations are used. ``Z`` has
    global-chart components (..., 4) and ``Wh`` the horizontal components
    (..., 2). The W samples carry the factor q q̄³.
    """

    V: np.ndarray
    V_tilde: np.ndarray
    V_tilde_closed: np.ndarray
    V0_bound: np.ndarray
    Z: np.ndarray
    W3: np.ndarray
    W4: np.ndarray
    Wh: np.ndarray
    W0: np.ndarray


@dataclass(frozen=True)
class TransformCoeffs:
    """f = q q̄³ and the transport coefficients C₁, C₂ of the factorization."""

    f: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    C2_tilde: np.ndarray


# ── Multipliers ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class PsiJet:
    """
    First jet of a 𝔰₂(ℂ) field at one point.

    Rank-2 ASD tensors are stored by their first component z = ψ₁₁ + iψ₁₂,
    so ``psi``, ``d3``, ``d4`` are complex scalars and ``dh`` is the pair
    (∇₁ψ, ∇₂ψ) in the same storage. ``frame`` is the FramePoint at (r, θ).
    """

    psi: complex
    d3: complex
    d4: complex
    dh: np.ndarray
    frame: FramePoint

    def clean(self):
        values = np.array([self.psi, self.d3, self.d4, *self.dh])
        if not np.all(np.isfinite(values)):
            raise KdsError('support', "Jet components must be finite")


@dataclass(frozen=True)
class CurrentSample:
    """J (frame components J₁, J₂, J₃, J₄), the scalar K and boundary fluxes by hypersurface name."""

    J: np.ndarray
    K: float
    boundary_flux: dict


# ── Trapping ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TrappedSample:
    sigma: float
    eta_phi: float
    r_trap: float
    second_deriv_sign: tuple
    margin: float
    phi_second_derivative: float


@dataclass(frozen=True)
class GeodesicState:
    """
    Phase-space point (t, r, θ, φ; p_t, p_r, p_θ, p_φ) with its
    conserved quantities E = −p_t, L = p_φ, the Carter quantity
    Q = |q|² O(p, p) and the Hamiltonian H = ½ g⁻¹(p, p).
    """

    position: np.ndarray
    momentum: np.ndarray
    conserved: dict = field(default_factory=dict)


# ── Evolution ───────────────────────────────────────────────────────────


NORM_COLUMNS = ('tau', 'E_deg', 'E', 'E_p', 'Mor', 'B_p_cum', 'F_A_cum', 'F_Sstar_cum')


@dataclass(frozen=True)
class NormReport:
    """Discrete norms on one slice; cumulative entries run from τ = 0."""

    tau: float
    E_deg: float
    E: float
    E_p: float
    Mor: float
    B_p_cum: float
    F_A_cum: float
    F_Sstar_cum: float
    p: float

    def clean(self):
        for name in NORM_COLUMNS[1:5]:
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise KdsError('instability', f"Norm {name} is not a finite nonnegative number", value=value)

    def row(self):
        return [getattr(self, name) for name in NORM_COLUMNS]


@dataclass
class SolutionRecord:
    """
    Report slices of one mode evolution.

    ``psi`` and ``dtau_psi`` have shape (n_slices, n_r); ``balance`` holds
    per slice the T-energy E_T and the residual of
    E_T(τ) − E_T(0) + F_A + F_Σ*.
    """

    params: BlackHoleParams
    lambda_ang: float
    r: np.ndarray
    tau: np.ndarray
    psi: np.ndarray
    dtau_psi: np.ndarray
    norms: list = field(default_factory=list)
    balance: list = field(default_factory=list)

    def clean(self):
        if not (np.all(np.isfinite(self.psi)) and np.all(np.isfinite(self.dtau_psi))):
            raise KdsError('instability', "Solution slices contain non-finite values")
        for report in self.norms:
            report.clean()

    def as_solution(self):
        """The mapping read by ``teukolsky.grw_residual``."""
        return {
            'psi': self.psi, 'tau': self.tau, 'r': self.r, 'lambda_ang': self.lambda_ang,
            'M': self.params.M, 'a': self.params.a, 'Lambda': self.params.Lambda,
        }


# ── Kerr limit ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ComparisonReport:
    compact_set: tuple
    metric_diff: float
    frame_transition_residual: float
    projection_defect: float
    ricci_diff: float = 0.0


# ── Reporting ───────────────────────────────────────────────────────────


@dataclass
class CheckRecord:
    """One named check: measured value, bound and verdict."""

    name: str
    value: float
    bound: float
    passed: bool
    detail: str = ''
    wall_time: float = 0.0


@dataclass
class SuiteReport:
    """
    The outcome of one suite run.

    ``tables`` maps a table name to ``(columns, rows)`` and is written
    next to the JSON summary by the ``suite_completed`` receiver.
    """

    suite: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    wall_time: float = 0.0
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def add(self, record):
        self.checks.append(record)
        return record

# core/cutoffs.py
"""Smooth cutoff profiles used by the frame, coordinate and multiplier constructions."""
import numpy as np


def smoothstep(x):
    """
    Quintic smoothstep S(x) = 6x⁵ − 15x⁴ + 10x³ on [0, 1], clamped outside.

    Returns (S, S′, S″); the profile is C² with vanishing first and second
    derivatives at both ends.
    """
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    t = np.clip(x, 0.0, 1.0)
    value = t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)
    d1 = np.where(inside, 30.0 * t ** 2 * (1.0 - t) ** 2, 0.0)
    d2 = np.where(inside, 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t), 0.0)
    return value, d1, d2


def band(r, lo, hi):
    """Rise from 0 at r ≤ lo to 1 at r ≥ hi; returns (χ, ∂_rχ, ∂²_rχ)."""
    width = hi - lo
    value, d1, d2 = smoothstep((np.asarray(r, dtype=float) - lo) / width)
    return value, d1 / width, d2 / width ** 2


def chi_glo(params, r):
    """Transition of the global frame: 0 on r ≤ r₀−M, 1 on r ≥ r₀+M."""
    return band(r, params.r0 - params.M, params.r0 + params.M)


def chi_ell(params, r):
    """ℓ′: 0 on r ≤ 2r₀, 1 on r ≥ 3r₀."""
    return band(r, 2.0 * params.r0, 3.0 * params.r0)


def chi_zero(x):
    """χ₀: 0 for |x| ≤ 1, 1 for |x| ≥ 2; returns (χ₀, χ₀′) in x."""
    x = np.asarray(x, dtype=float)
    value, d1, _ = smoothstep(np.abs(x) - 1.0)
    return value, d1 * np.sign(x)

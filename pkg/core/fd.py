# core/fd.py
"""Finite-difference stencils and convergence-order fits shared by the oracles."""
import numpy as np

# Centered first-derivative weights, offsets −k..k
CENTRAL_D1 = {
    2: np.array([-0.5, 0.0, 0.5]),
    4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
}


def derivative(fn, x, h, order=2):
    """
    Centered derivative of ``fn`` at ``x`` with step ``h``.

    ``fn`` may return arrays of any shape; the result has the same shape.
    """
    weights = CENTRAL_D1[order]
    half = len(weights) // 2
    total = 0.0
    for offset, weight in zip(range(-half, half + 1), weights):
        if weight:
            total = total + weight * np.asarray(fn(x + offset * h))
    return total / h


def partial(fn, args, index, h, order=2):
    """Centered partial derivative of fn(*args) with respect to args[index]."""
    args = list(args)

    def shifted(value):
        moved = list(args)
        moved[index] = value
        return fn(*moved)

    return derivative(shifted, args[index], h, order=order)


def diff_axis(values, h, axis, order=4):
    """
    Centered derivative of sampled values along ``axis``; the result loses
    ``order/2`` points at each end of that axis.
    """
    weights = CENTRAL_D1[order]
    return _apply_stencil(values, weights, axis) / h


def _apply_stencil(values, weights, axis):
    values = np.moveaxis(np.asarray(values), axis, 0)
    n = values.shape[0]
    width = len(weights)
    if n < width:
        raise ValueError("Too few points for the stencil")
    out = sum(w * values[k:n - width + 1 + k] for k, w in enumerate(weights) if w)
    return np.moveaxis(out, 0, axis)


def fitted_order(steps, errors):
    """
    Least-squares slope of log(error) against log(step).

    Zero errors are dropped; with fewer than two usable points the slope
    is reported as +inf (the quantity is exact at every resolution).
    """
    steps = np.asarray(steps, dtype=float)
    errors = np.abs(np.asarray(errors, dtype=float))
    keep = errors > 0
    if keep.sum() < 2:
        return float('inf')
    slope, _ = np.polyfit(np.log(steps[keep]), np.log(errors[keep]), 1)
    return float(slope)


# One-sided fourth-order first-derivative rows for the two edge nodes
EDGE_D1 = np.array([
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
]) / 12.0


def diff_full(values, h, axis=-1):
    """
    Fourth-order first derivative of uniformly sampled values keeping every
    node: centered in the interior, one-sided on the two nodes at each end.
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    n = values.shape[0]
    if n < 5:
        raise ValueError("Too few points for the stencil")
    out = np.empty(values.shape, dtype=np.result_type(values, float))
    out[2:n - 2] = _apply_stencil(values, CENTRAL_D1[4], 0)
    for row, weights in enumerate(EDGE_D1):
        out[row] = np.tensordot(weights, values[:5], axes=(0, 0))
        out[n - 1 - row] = -np.tensordot(weights, values[::-1][:5], axes=(0, 0))
    return np.moveaxis(out / h, 0, axis)


KO_STENCIL = np.array([1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0])


def kreiss_oliger(values, sigma, h, axis=-1):
    """
    Sixth-difference dissipation σ/(64h)·δ⁶u on nodes at least three away
    from either end (zero elsewhere).
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    out = np.zeros(values.shape, dtype=np.result_type(values, float))
    if values.shape[0] >= 7:
        out[3:-3] = sigma / (64.0 * h) * _apply_stencil(values, KO_STENCIL, 0)
    return np.moveaxis(out, 0, axis)

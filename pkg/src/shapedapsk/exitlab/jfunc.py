"""J-function: mutual information of a consistent Gaussian LLR with std sigma."""
from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

SIGMA_MAX = 60.0
_GH_ORDER = 160
_TABLE_STEP = 0.005


def j_quadrature(sigma) -> np.ndarray:
    """Gauss-Hermite evaluation of 1 - E[log2(1 + exp(-L))], L ~ N(sigma^2/2, sigma^2)."""
    s = np.atleast_1d(np.asarray(sigma, dtype=float))
    t, w = np.polynomial.hermite.hermgauss(_GH_ORDER)
    llr = 0.5 * s[:, None] ** 2 + np.sqrt(2.0) * s[:, None] * t
    e = np.logaddexp(0.0, -llr) / np.log(2.0)
    out = 1.0 - (e @ w) / np.sqrt(np.pi)
    return np.clip(out, 0.0, 1.0).reshape(np.shape(sigma))


def _build_table():
    grid = np.arange(0.0, SIGMA_MAX + _TABLE_STEP, _TABLE_STEP)
    vals = j_quadrature(grid)
    # beyond ~sigma=25 the curve is 1 to double precision
    return CubicSpline(grid, vals)


_SPLINE = _build_table()


def j_function(sigma):
    s = np.asarray(sigma, dtype=float)
    if np.any(s < 0):
        raise ValueError("sigma must be non-negative")
    out = np.where(s >= SIGMA_MAX, 1.0, _SPLINE(np.minimum(s, SIGMA_MAX)))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def _bisect(target: np.ndarray) -> np.ndarray:
    if target.size == 0:
        return target.copy()
    lo = np.zeros_like(target)
    hi = np.full_like(target, SIGMA_MAX)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = _SPLINE(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < 1e-13:
            break
    return 0.5 * (lo + hi)


def j_inverse(info):
    """Inverse of :func:`j_function` by bisection; raises for I >= 1."""
    x = np.asarray(info, dtype=float)
    if np.any(x >= 1.0) or np.any(x < 0.0):
        raise ValueError("J^-1 is defined on [0, 1)")
    out = _bisect(x)
    out = np.where(x == 0.0, 0.0, out)
    return out if out.ndim else float(out)


def j_inverse_sat(info) -> np.ndarray:
    """J^-1 that maps I >= 1 to SIGMA_MAX, for curve assembly at grid endpoints."""
    x = np.clip(np.asarray(info, dtype=float), 0.0, 1.0)
    out = np.full(x.shape, SIGMA_MAX)
    inner = x < 1.0
    out[inner] = j_inverse(x[inner])
    return out

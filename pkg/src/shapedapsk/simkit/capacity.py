"""Monte Carlo mutual information of the discrete-input AWGN channel with symbol priors."""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from ..constellation import Constellation


class CapacityRangeError(ValueError):
    """The Es/N0 search range does not bracket the requested rate."""


def _samples(c: Constellation, n: int, seed: int):
    rng = np.random.default_rng(seed)
    idx = rng.choice(c.size, size=n, p=c.symbol_priors)
    noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return idx, noise


def _mi(c: Constellation, esn0_db: float, idx, noise, block: int = 50_000) -> float:
    if np.isinf(esn0_db):
        if esn0_db > 0:
            p = c.symbol_priors[c.symbol_priors > 0]
            return float(-(p * np.log2(p)).sum())
        return 0.0
    n0 = 10.0 ** (-esn0_db / 10.0)
    with np.errstate(divide="ignore"):
        logp = np.log(c.symbol_priors)
    pts = c.points
    total = 0.0
    for s in range(0, len(idx), block):
        x = pts[idx[s:s + block]]
        y = x + np.sqrt(n0 / 2.0) * noise[s:s + block]
        metric = -np.abs(y[:, None] - pts[None, :]) ** 2 / n0 + logp
        mx = metric.max(axis=1, keepdims=True)
        log_mix = mx[:, 0] + np.log(np.exp(metric - mx).sum(axis=1))
        own = -np.abs(y - x) ** 2 / n0
        # I = E[log p(y|x) - log sum_x' P(x') p(y|x')]
        total += np.sum(own - log_mix)
    return max(total / len(idx) / np.log(2.0), 0.0)


def capacity_estimate(c: Constellation, esn0_db, samples: int = 200_000, seed: int = 0) -> np.ndarray:
    """I(X;Y) in bits per symbol at each Es/N0 (dB); the same draws are reused across the grid."""
    idx, noise = _samples(c, samples, seed)
    return np.array([_mi(c, float(s), idx, noise) for s in np.atleast_1d(esn0_db)])


def solve_capacity_limit(c: Constellation, target_rate: float, lo_db: float = 0.0,
                         hi_db: float = 20.0, samples: int = 200_000, seed: int = 0,
                         xtol: float = 1e-3) -> float:
    """Eb/N0 (dB) at which the mutual information equals ``target_rate`` bits/symbol."""
    idx, noise = _samples(c, samples, seed)

    def f(s):
        return _mi(c, s, idx, noise) - target_rate

    f_lo, f_hi = f(lo_db), f(hi_db)
    if f_lo > 0 or f_hi < 0:
        raise CapacityRangeError(
            f"rate {target_rate} not bracketed by Es/N0 [{lo_db}, {hi_db}] dB")
    esn0 = brentq(f, lo_db, hi_db, xtol=xtol)
    return float(esn0 - 10.0 * np.log10(target_rate))


def capacity_to_csv(esn0_db, mi, meta: dict | None = None) -> str:
    lines = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    lines.append("esn0_db,mi_bits")
    lines += [f"{s:.4f},{v:.6f}" for s, v in zip(np.atleast_1d(esn0_db), mi)]
    return "\n".join(lines) + "\n"

"""Tunnel-open test, Es/N0 threshold bisection and degree-distribution ranking."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constellation import Constellation
from ..ldpc.degrees import DegreeDistribution, enumerate_candidates
from ..shaping import ShapingCode
from .curves import cnd_inverse, vnd_transfer
from .detector import DetectorFamily
from .jfunc import j_inverse_sat

EPS = 0.001
DELTA = 0.001
CHECK_POINTS = 200


class ThresholdError(ValueError):
    """The requested Es/N0 bracket does not contain the threshold."""


@dataclass(frozen=True)
class RankedCandidate:
    dist: DegreeDistribution
    threshold_db: float  # Es/N0


def _check_grid(delta: float) -> np.ndarray:
    return np.linspace(0.0, 1.0 - delta, CHECK_POINTS)


def _margins(cnd_inv: np.ndarray, eps: float) -> np.ndarray:
    # the required gap shrinks with the vertical headroom 1 - CND^-1(x): near MI = 1 both
    # curves are pinned to 1 and a fixed gap would be unattainable at any SNR
    return eps * (1.0 - cnd_inv)


def tunnel_gap(det_ia, det_ie, dist: DegreeDistribution, eps: float = EPS,
               delta: float = DELTA) -> float:
    """min over x in [0, 1-delta] of VND(x) - CND^-1(x) - margin(x); positive means open.

    margin(x) = eps * (1 - CND^-1(x)), i.e. ``eps`` scaled by the remaining headroom. The detector
    curve is interpolated linearly in I_A on a dense check grid.
    """
    x = _check_grid(delta)
    det = np.interp(x, det_ia, det_ie)
    vnd = vnd_transfer(x, j_inverse_sat(det), dist.degrees, dist.edge_fracs)
    cnd = cnd_inverse(x, dist.check_degree)
    return float(np.min(vnd - cnd - _margins(cnd, eps)))


def tunnel_open(det_ia, det_ie, dist, eps=EPS, delta=DELTA) -> bool:
    return tunnel_gap(det_ia, det_ie, dist, eps, delta) > 0.0


def threshold_search(
    dist: DegreeDistribution,
    constellation: Constellation | None = None,
    shaping: ShapingCode | None = None,
    snr_lo: float = 6.0,
    snr_hi: float = 14.0,
    *,
    family: DetectorFamily | None = None,
    eps: float = EPS,
    delta: float = DELTA,
    tol_db: float = 0.01,
) -> float:
    """Smallest Es/N0 (dB, to ``tol_db``) at which the tunnel is open."""
    if family is None:
        if constellation is None:
            raise ValueError("need a constellation or a detector family")
        family = DetectorFamily(constellation, shaping)
    ia = family.ia_grid

    def is_open(snr):
        return tunnel_open(ia, family.ie_at(snr), dist, eps, delta)

    if is_open(snr_lo):
        raise ThresholdError(f"tunnel already open at {snr_lo} dB")
    if not is_open(snr_hi):
        raise ThresholdError(f"tunnel still closed at {snr_hi} dB")
    lo, hi = snr_lo, snr_hi
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if is_open(mid):
            hi = mid
        else:
            lo = mid
    return hi


def optimize_degrees(
    rate,
    dc: int,
    D: int,
    constellation: Constellation | None = None,
    shaping: ShapingCode | None = None,
    top_n: int = 10,
    *,
    family: DetectorFamily | None = None,
    snr_lo: float = 6.0,
    snr_hi: float = 14.0,
    dv_max: int = 25,
    grid_step: float = 0.01,
    eps: float = EPS,
    delta: float = DELTA,
    tol_db: float = 0.01,
    candidates: list[DegreeDistribution] | None = None,
) -> list[RankedCandidate]:
    """Rank every feasible distribution by its EXIT threshold (ascending)."""
    if family is None:
        family = DetectorFamily(constellation, shaping)
    if candidates is None:
        candidates = enumerate_candidates(rate, dc, D, dv_max=dv_max, grid_step=grid_step)
    snrs, table = family.lattice(snr_lo, snr_hi)
    ia = family.ia_grid
    x = _check_grid(delta)
    cnd = cnd_inverse(x, dc)
    cnd = cnd + _margins(cnd, eps)
    det_sig = np.array([j_inverse_sat(np.interp(x, ia, row)) for row in table])

    ranked = []
    for dist in candidates:
        # coarse pass on the lattice, then bisection inside the first open cell
        gaps = [np.min(vnd_transfer(x, s, dist.degrees, dist.edge_fracs) - cnd) for s in det_sig]
        opened = np.flatnonzero(np.asarray(gaps) > 0)
        if opened.size == 0:
            continue
        first = int(opened[0])
        if first == 0:
            thr = float(snrs[0])
        else:
            thr = threshold_search(dist, family=family, snr_lo=float(snrs[first - 1]),
                                   snr_hi=float(snrs[first]), eps=eps, delta=delta,
                                   tol_db=tol_db)
        ranked.append(RankedCandidate(dist, thr))
    ranked.sort(key=lambda rc: rc.threshold_db)
    return ranked[:top_n]

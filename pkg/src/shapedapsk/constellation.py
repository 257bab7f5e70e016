"""APSK constellations with nonuniform symbol priors and an exact soft demapper."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

LLR_CLIP = 50.0


class ConstellationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Constellation:
    ring_sizes: tuple[int, ...]
    ring_radii: np.ndarray
    phase_offsets: np.ndarray
    points: np.ndarray  # complex, shape (M,)
    labels: np.ndarray  # uint8, shape (M, m); column 0 is the MSB
    symbol_priors: np.ndarray
    ring_index: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return self.labels.shape[1]

    @property
    def average_energy(self) -> float:
        return float(np.sum(self.symbol_priors * np.abs(self.points) ** 2))

    @property
    def msb_p0(self) -> float:
        return float(self.symbol_priors[self.labels[:, 0] == 0].sum())

    def uniform_view(self) -> "Constellation":
        """Same geometry and labels with flat symbol priors (no renormalization).

        Used when the MSB bias is supplied as a priori information by a shaping
        decoder instead of being folded into the symbol priors.
        """
        flat = np.full(self.size, 1.0 / self.size)
        return Constellation(self.ring_sizes, self.ring_radii, self.phase_offsets,
                             self.points, self.labels, flat, self.ring_index)

    def modulate(self, bits: np.ndarray) -> np.ndarray:
        """Map (..., m) bit groups (MSB first) to complex symbols."""
        bits = np.asarray(bits)
        weights = 1 << np.arange(self.m - 1, -1, -1)
        idx = (bits.astype(np.int64) * weights).sum(axis=-1)
        return self._point_by_label[idx]

    @cached_property
    def _point_by_label(self) -> np.ndarray:
        weights = 1 << np.arange(self.m - 1, -1, -1)
        order = np.empty(self.size, dtype=np.int64)
        order[(self.labels.astype(np.int64) * weights).sum(axis=1)] = np.arange(self.size)
        return self.points[order]

    def to_dict(self) -> dict:
        return {
            "ring_sizes": list(self.ring_sizes),
            "ring_radii": self.ring_radii.tolist(),
            "phase_offsets": self.phase_offsets.tolist(),
            "points": [[float(p.real), float(p.imag)] for p in self.points],
            "labels": ["".join(str(int(b)) for b in row) for row in self.labels],
            "symbol_priors": self.symbol_priors.tolist(),
            "ring_index": self.ring_index.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Constellation":
        pts = np.array([complex(re, im) for re, im in doc["points"]])
        labels = np.array([[int(ch) for ch in s] for s in doc["labels"]], dtype=np.uint8)
        return cls(
            ring_sizes=tuple(doc["ring_sizes"]),
            ring_radii=np.asarray(doc["ring_radii"], dtype=float),
            phase_offsets=np.asarray(doc["phase_offsets"], dtype=float),
            points=pts,
            labels=labels,
            symbol_priors=np.asarray(doc["symbol_priors"], dtype=float),
            ring_index=np.asarray(doc["ring_index"], dtype=np.int64),
        )

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "Constellation":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def fingerprint(self) -> str:
        """Stable text identity, used for cache keys."""
        return json.dumps(self.to_dict(), sort_keys=True)


def _gray(i: int, nbits: int) -> list[int]:
    g = i ^ (i >> 1)
    return [(g >> (nbits - 1 - b)) & 1 for b in range(nbits)]


# DVB-S2 32-APSK bit map: label (b4..b0) -> (ring, angle as a multiple of the ring's unit).
# Units: inner pi/4, middle pi/12, outer pi/8 (outer angles are then shifted by pi/16).
_DVB_32APSK = [
    (1, 3), (1, 5), (1, -3), (1, -5), (1, 9), (1, 7), (1, -9), (1, -7),
    (2, 1), (2, 3), (2, -2), (2, -4), (2, 6), (2, 4), (2, -7), (2, -5),
    (1, 1), (0, 1), (1, -1), (0, -1), (1, 11), (0, 3), (1, -11), (0, -3),
    (2, 0), (2, 2), (2, -1), (2, -3), (2, 7), (2, 5), (2, 8), (2, -6),
]
_UNITS = (np.pi / 4, np.pi / 12, np.pi / 8)


def _label_32apsk(ring: int, angle: float) -> list[int]:
    """DVB-S2 label of a 4+12+16 APSK point with its two MSBs exchanged.

    In the DVB-S2 map the second bit marks the outer ring, so after the swap the MSB
    alone separates the inner two rings (0) from the outer ring (1).
    """
    if ring == 2:
        angle -= np.pi / 16
    for label, (r, k) in enumerate(_DVB_32APSK):
        if r == ring and abs(np.angle(np.exp(1j * (angle - k * _UNITS[r])))) < 1e-6:
            b = [(label >> (4 - i)) & 1 for i in range(5)]
            return [b[1], b[0], *b[2:]]
    raise ConstellationError(f"no label for ring {ring} at angle {angle:.4f}")


def build_apsk(
    ring_sizes: Sequence[int] = (4, 12, 16),
    gamma1: float = 2.64,
    gamma2: float = 4.64,
    msb_partition_priors: tuple[float, float] = (0.5, 0.5),
) -> Constellation:
    """Build a three-ring APSK constellation whose MSB selects inner rings vs outer ring.

    Ring ``r`` of size ``n_r`` sits at phase offset ``pi / n_r``. Symbols whose MSB is 0
    (the inner two rings) each get prior ``p0 / (M/2)``, the outer ring ``p1 / (M/2)``.
    Radii are scaled so the average energy under those priors is one.
    """
    ring_sizes = tuple(int(s) for s in ring_sizes)
    p0, p1 = (float(p) for p in msb_partition_priors)
    if len(ring_sizes) != 3:
        raise ConstellationError("expected three rings")
    M = sum(ring_sizes)
    if M & (M - 1) or M < 4:
        raise ConstellationError(f"ring sizes sum to {M}, not a power of two")
    if ring_sizes[0] + ring_sizes[1] != M // 2 or ring_sizes[2] != M // 2:
        raise ConstellationError("outer ring must hold exactly half of the symbols")
    if not (gamma2 > gamma1 > 1.0):
        raise ConstellationError(f"need gamma2 > gamma1 > 1, got ({gamma1}, {gamma2})")
    if not (0.0 < p0 < 1.0 and 0.0 < p1 < 1.0) or abs(p0 + p1 - 1.0) > 1e-12:
        raise ConstellationError(f"invalid partition priors ({p0}, {p1})")

    m = M.bit_length() - 1
    rel_radii = np.array([1.0, gamma1, gamma2])
    offsets = np.array([np.pi / s for s in ring_sizes])

    ring_index = np.concatenate([np.full(s, r) for r, s in enumerate(ring_sizes)])
    angles = np.concatenate([offsets[r] + 2 * np.pi * np.arange(s) / s
                             for r, s in enumerate(ring_sizes)])
    angles = np.angle(np.exp(1j * angles))

    if ring_sizes == (4, 12, 16):
        labels = np.array([_label_32apsk(r, a) for r, a in zip(ring_index, angles)],
                          dtype=np.uint8)
    else:
        # generic fallback: Gray-code each partition in angular order
        labels = np.zeros((M, m), dtype=np.uint8)
        for msb, members in ((0, np.flatnonzero(ring_index < 2)),
                             (1, np.flatnonzero(ring_index == 2))):
            order = members[np.lexsort((ring_index[members], np.mod(angles[members], 2 * np.pi)))]
            for i, sym in enumerate(order):
                labels[sym] = [msb, *_gray(i, m - 1)]

    priors = np.where(labels[:, 0] == 0, p0, p1) / (M // 2)
    raw_energy = np.sum(priors * rel_radii[ring_index] ** 2)
    radii = rel_radii / np.sqrt(raw_energy)
    points = radii[ring_index] * np.exp(1j * angles)
    return Constellation(ring_sizes, radii, offsets, points, labels, priors, ring_index)


@dataclass(frozen=True)
class SymbolLLRContext:
    a_priori_llrs: np.ndarray
    noise_variance: float  # per real dimension, N0/2

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise ValueError("noise_variance must be positive")
        if np.isnan(np.asarray(self.a_priori_llrs)).any():
            raise ValueError("a priori LLRs must not be NaN")


def _bit_log_probs(llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # log P(b=0), log P(b=1) for L = log P(0)/P(1); exact at +-inf
    return -np.logaddexp(0.0, -llrs), -np.logaddexp(0.0, llrs)


def _lse(x: np.ndarray, axis: int = -1) -> np.ndarray:
    mx = np.max(x, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(mx), mx, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - safe), axis=axis))
    return out + np.squeeze(safe, axis=axis)


@njit(cache=True)
def _log1pexp(x):
    if x > 0.0:
        return x + np.log1p(np.exp(-x))
    return np.log1p(np.exp(x))


@njit(cache=True)
def _demap_log(base, lp, labels, k, max_log):
    # log-domain evaluation for one bit, robust to underflow
    M, m = labels.shape
    t = np.empty(M)
    mx0 = -np.inf
    mx1 = -np.inf
    for s in range(M):
        v = base[s]
        for j in range(m):
            if j != k:
                v += lp[j, labels[s, j]]
        t[s] = v
        if labels[s, k] == 0:
            if v > mx0:
                mx0 = v
        elif v > mx1:
            mx1 = v
    if max_log:
        return mx0 - mx1
    a0 = 0.0
    a1 = 0.0
    for s in range(M):
        if labels[s, k] == 0:
            if mx0 > -np.inf:
                a0 += np.exp(t[s] - mx0)
        elif mx1 > -np.inf:
            a1 += np.exp(t[s] - mx1)
    l0 = mx0 + np.log(a0) if mx0 > -np.inf else -np.inf
    l1 = mx1 + np.log(a1) if mx1 > -np.inf else -np.inf
    return l0 - l1


@njit(cache=True)
def _fill_log_probs(la, i, use_la, lp):
    m = lp.shape[0]
    for k in range(m):
        if use_la:
            lp[k, 0] = -_log1pexp(-la[i, k])
            lp[k, 1] = -_log1pexp(la[i, k])
        else:
            lp[k, 0] = -np.log(2.0)
            lp[k, 1] = -np.log(2.0)


@njit(cache=True)
def _demap_kernel(y, la, use_la, points, log_prior, labels, inv_2var, max_log, out):
    n_sym, m = out.shape
    M = points.shape[0]
    base = np.empty(M)
    e = np.empty(M)
    w = np.empty(M)
    fac = np.empty((m, M))
    pre = np.empty((m, M))
    suf = np.empty((m, M))
    zero_mask = np.empty((m, M))
    for k in range(m):
        for s in range(M):
            zero_mask[k, s] = 1.0 if labels[s, k] == 0 else 0.0
    lp = np.zeros((m, 2))
    pr = np.ones((m, 2))
    for i in range(n_sym):
        mxb = -np.inf
        for s in range(M):
            d = y[i] - points[s]
            base[s] = log_prior[s] - (d.real * d.real + d.imag * d.imag) * inv_2var
            if base[s] > mxb:
                mxb = base[s]
        if use_la:
            for k in range(m):
                L = la[i, k]
                t = np.exp(-abs(L))
                big = 1.0 / (1.0 + t)
                if L >= 0:
                    pr[k, 0] = big
                    pr[k, 1] = t * big
                else:
                    pr[k, 0] = t * big
                    pr[k, 1] = big
        if max_log:
            _fill_log_probs(la, i, use_la, lp)
            for k in range(m):
                out[i, k] = _demap_log(base, lp, labels, k, True)
            continue
        for s in range(M):
            x = base[s] - mxb
            e[s] = np.exp(x) if x > -745.0 else 0.0
            for j in range(m):
                fac[j, s] = pr[j, labels[s, j]]
            # prefix products over bits 0..j-1, seeded with the channel term
            pre[0, s] = e[s]
            for j in range(1, m):
                pre[j, s] = pre[j - 1, s] * fac[j - 1, s]
            suf[m - 1, s] = 1.0
            for j in range(m - 2, -1, -1):
                suf[j, s] = suf[j + 1, s] * fac[j + 1, s]
        for k in range(m):
            # probability-domain products over the other bits only
            for s in range(M):
                w[s] = pre[k, s] * suf[k, s]
            a0 = 0.0
            a1 = 0.0
            for s in range(M):
                a0 += w[s] * zero_mask[k, s]
                a1 += w[s] * (1.0 - zero_mask[k, s])
            if a0 > 1e-250 and a1 > 1e-250:
                out[i, k] = np.log(a0 / a1)
            else:
                _fill_log_probs(la, i, use_la, lp)
                out[i, k] = _demap_log(base, lp, labels, k, False)


def demap_batch(
    received: np.ndarray,
    a_priori: np.ndarray | None,
    noise_variance: float,
    c: Constellation,
    *,
    max_log: bool = False,
    clip: float = LLR_CLIP,
) -> np.ndarray:
    """Extrinsic per-bit LLRs for an array of received samples.

    ``received`` has shape (...,); ``a_priori`` has shape (..., m) or is None.
    Each symbol is weighted by channel likelihood, symbol prior and the a priori
    probability of the other m-1 bits; a bit's own a priori LLR never enters its output.
    """
    y = np.asarray(received, dtype=complex)
    shape = y.shape
    y = np.ascontiguousarray(y.ravel())
    m = c.m
    if a_priori is None:
        la = np.zeros((1, m))
        use_la = False
    else:
        la = np.ascontiguousarray(np.broadcast_to(a_priori, shape + (m,)), dtype=float).reshape(-1, m)
        if np.isnan(la).any():
            raise ValueError("a priori LLRs must not be NaN")
        use_la = True
    out = np.empty((y.size, m))
    with np.errstate(divide="ignore"):
        log_prior = np.log(c.symbol_priors)
    _demap_kernel(y, la, use_la, np.ascontiguousarray(c.points), log_prior,
                  np.ascontiguousarray(c.labels, dtype=np.int64),
                  1.0 / (2.0 * noise_variance), bool(max_log), out)
    np.nan_to_num(out, copy=False, nan=0.0)
    return np.clip(out, -clip, clip).reshape(shape + (m,))


def demap(received_symbol: complex, ctx: SymbolLLRContext, c: Constellation, **kw) -> np.ndarray:
    """Single-symbol form of :func:`demap_batch`."""
    la = np.asarray(ctx.a_priori_llrs, dtype=float)
    return demap_batch(np.asarray(received_symbol), la, ctx.noise_variance, c, **kw)

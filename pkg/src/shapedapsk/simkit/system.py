"""System configuration and the transmitter chain.

Frame layout for N symbols and m bits per symbol: the interleaved codeword v is split
into d (first Rs*N bits) and s_2..s_m (N bits each, in order); d is shaped into c and
permuted into s_1, which becomes the MSB of every label.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from ..constellation import Constellation, build_apsk
from ..designs import Design
from ..ldpc import BPDecoder, ParityMatrix, build_eira_matrix, encode, read_alist
from ..ldpc.degrees import DegreeDistribution, solve_degree_fractions
from ..shaping import FramingError, ShapingCode, shape_encode


@dataclass
class SystemConfig:
    ring_sizes: tuple[int, ...] = (4, 12, 16)
    gamma1: float = 2.64
    gamma2: float = 4.64
    shaping: list[str] | None = None  # codeword table, MSB-first index order
    rate: str = "3/5"
    check_degree: int = 11
    degrees: tuple[int, ...] = (2, 4, 19)
    a2: float | None = None
    n: int = 16200
    alist: str | None = None
    code_seed: int = 1
    pi1_seed: int = 2
    pi2_seed: int = 3
    max_iters: int = 100
    early_stop: bool = True
    ebn0_db: list[float] = field(default_factory=list)

    @classmethod
    def from_design(cls, design: Design, n: int, **kw) -> "SystemConfig":
        return cls(shaping=design.shaping.words() if design.shaping is not None else None,
                   rate=str(design.rate), check_degree=design.check_degree,
                   degrees=tuple(design.degrees), a2=design.a2, n=n, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ring_sizes"] = list(self.ring_sizes)
        d["degrees"] = list(self.degrees)
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def _permutation(size: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).permutation(size)


class System:
    """Everything derived from a :class:`SystemConfig`: code, interleavers, constellation."""

    def __init__(self, cfg: SystemConfig, H: ParityMatrix | None = None):
        self.cfg = cfg
        self.shaping = ShapingCode.from_strings(cfg.shaping) if cfg.shaping else None
        p0 = self.shaping.p0 if self.shaping is not None else 0.5
        self.constellation: Constellation = build_apsk(cfg.ring_sizes, cfg.gamma1, cfg.gamma2,
                                                       (p0, 1.0 - p0))
        self.m = self.constellation.m
        if H is None:
            H = read_alist(cfg.alist) if cfg.alist else build_eira_matrix(
                self.distribution, cfg.n, seed=cfg.code_seed)
        self.H = H
        n = H.n
        rs = self.shaping.rate if self.shaping is not None else Fraction(1)
        N = Fraction(n) / (self.m - 1 + rs)
        if N.denominator != 1:
            raise FramingError(f"n={n} does not split into whole symbols at Rs={rs}")
        self.N = int(N)
        self.n_d = int(rs * self.N)
        if self.shaping is not None and self.N % self.shaping.ns:
            raise FramingError(f"N={self.N} is not a multiple of ns={self.shaping.ns}")
        self.pi1 = _permutation(n, cfg.pi1_seed)
        self.pi2 = _permutation(self.N, cfg.pi2_seed)
        target = Fraction(cfg.rate) * (self.m + rs - 1)
        if abs(self.realized_rate - target) > Fraction(1, n):
            raise FramingError(f"realized rate {float(self.realized_rate):.5f} != {float(target):.5f}")

    @cached_property
    def distribution(self) -> DegreeDistribution:
        dist = solve_degree_fractions(self.cfg.rate, self.cfg.check_degree, self.cfg.degrees,
                                      a2=self.cfg.a2)
        if dist is None:
            raise ValueError("infeasible degree profile")
        return dist

    @cached_property
    def decoder(self) -> BPDecoder:
        return BPDecoder(self.H)

    @property
    def k(self) -> int:
        return self.H.k

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def realized_rate(self) -> Fraction:
        """Information bits per channel symbol."""
        return Fraction(self.H.k, self.N)

    def ebn0_to_esn0(self, ebn0_db):
        return np.asarray(ebn0_db, dtype=float) + 10 * np.log10(float(self.realized_rate))

    @property
    def demap_constellation(self) -> Constellation:
        # with a shaping decoder in the loop the MSB bias arrives as a priori information
        return self.constellation.uniform_view() if self.shaping is not None else self.constellation


def transmit(info_bits: np.ndarray, system: System) -> tuple[np.ndarray, dict]:
    """Encode, interleave, separate, shape and map. Returns (symbols, tapes)."""
    b = np.asarray(info_bits, dtype=np.uint8)
    single = b.ndim == 1
    b = b.reshape(-1, b.shape[-1])
    if b.shape[1] != system.k:
        raise FramingError(f"expected {system.k} information bits per frame, got {b.shape[1]}")
    B, N, m = b.shape[0], system.N, system.m
    u = encode(b, system.H)
    v = u[:, system.pi1]
    d = v[:, : system.n_d]
    rest = v[:, system.n_d:].reshape(B, m - 1, N)
    c = shape_encode(d, system.shaping) if system.shaping is not None else d
    s1 = c[:, system.pi2] if system.shaping is not None else c
    labels = np.concatenate([s1[:, None, :], rest], axis=1).transpose(0, 2, 1)
    x = system.constellation.modulate(labels)
    tapes = {"b": b, "u": u, "v": v, "d": d, "c": c, "s": labels.transpose(0, 2, 1)}
    if single:
        return x[0], {k_: t[0] for k_, t in tapes.items()}
    return x, tapes


def awgn(symbols: np.ndarray, esn0_db: float, seed=None) -> np.ndarray:
    """Circular complex Gaussian noise with per-dimension variance 1 / (2 Es/N0)."""
    if np.isinf(esn0_db) and esn0_db > 0:
        return np.array(symbols, dtype=complex, copy=True)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = np.asarray(symbols, dtype=complex)
    sd = np.sqrt(0.5 * 10.0 ** (-esn0_db / 10.0))
    return x + sd * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))

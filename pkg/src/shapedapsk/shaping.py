"""Block shaping codes that bias the MSB stream toward zero."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constellation import LLR_CLIP, _bit_log_probs, _lse


class FramingError(ValueError):
    """Input length does not fit the block structure."""


@dataclass(frozen=True, eq=False)
class ShapingCode:
    """Codeword table; row i is the codeword for the ks-bit input whose MSB-first value is i."""

    codewords: np.ndarray

    def __post_init__(self):
        cw = np.asarray(self.codewords, dtype=np.uint8)
        if cw.ndim != 2:
            raise ValueError("codeword table must be 2-D")
        rows, ns = cw.shape
        ks = rows.bit_length() - 1
        if rows != 1 << ks:
            raise ValueError(f"table has {rows} rows, not a power of two")
        if ks > ns:
            raise ValueError("rate ks/ns must not exceed 1")
        if len({tuple(r) for r in cw.tolist()}) != rows:
            raise ValueError("codewords must be distinct")
        if not np.isin(cw, (0, 1)).all():
            raise ValueError("codewords must be binary")
        object.__setattr__(self, "codewords", cw)

    @classmethod
    def from_strings(cls, words: Sequence[str]) -> "ShapingCode":
        return cls(np.array([[int(ch) for ch in w] for w in words], dtype=np.uint8))

    @property
    def ns(self) -> int:
        return self.codewords.shape[1]

    @property
    def ks(self) -> int:
        return self.codewords.shape[0].bit_length() - 1

    @property
    def rate(self) -> Fraction:
        return Fraction(self.ks, self.ns)

    @property
    def p0(self) -> float:
        return compute_p0(self)

    @property
    def info_table(self) -> np.ndarray:
        idx = np.arange(1 << self.ks)
        shifts = np.arange(self.ks - 1, -1, -1)
        return ((idx[:, None] >> shifts) & 1).astype(np.uint8)

    def words(self) -> list[str]:
        return ["".join(map(str, r)) for r in self.codewords.tolist()]

    def fingerprint(self) -> str:
        return ",".join(self.words())


SHAPING_4_2 = ShapingCode.from_strings(["0000", "0100", "0010", "0001"])
SHAPING_3_2 = ShapingCode.from_strings(["000", "100", "010", "001"])


def compute_p0(code: ShapingCode) -> float:
    """Fraction of zeros over the table, i.e. P(bit = 0) for equiprobable inputs."""
    cw = code.codewords
    return float(np.count_nonzero(cw == 0)) / cw.size


def shape_encode(info_bits: np.ndarray, code: ShapingCode) -> np.ndarray:
    """Map each ks-bit group to its codeword. Leading axes are preserved."""
    bits = np.asarray(info_bits)
    if bits.shape[-1] % code.ks:
        raise FramingError(f"length {bits.shape[-1]} is not a multiple of ks={code.ks}")
    groups = bits.reshape(bits.shape[:-1] + (-1, code.ks)).astype(np.int64)
    idx = groups @ (1 << np.arange(code.ks - 1, -1, -1))
    out = code.codewords[idx]
    return out.reshape(bits.shape[:-1] + (-1,))


def shape_decode_soft(
    channel_llrs: np.ndarray,
    a_priori: np.ndarray,
    code: ShapingCode,
    clip: float = LLR_CLIP,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact MAP over the 2^ks codewords, blockwise.

    ``channel_llrs`` has shape (..., ns), ``a_priori`` (..., ks); both describe single
    blocks (callers reshape streams first). Returns ``(coded_extrinsic, info_extrinsic)``,
    each excluding the corresponding input's own contribution, clipped to +-clip.
    """
    lch = np.asarray(channel_llrs, dtype=float)
    lap = np.asarray(a_priori, dtype=float)
    if lch.shape[-1] != code.ns or lap.shape[-1] != code.ks:
        raise FramingError("block lengths do not match the code")

    cw, info = code.codewords, code.info_table
    c0, c1 = _bit_log_probs(lch)
    a0, a1 = _bit_log_probs(lap)
    # per-codeword contribution of each coded / info position, shape (..., 2^ks)
    cterm = [np.where(cw[:, j] == 0, c0[..., j, None], c1[..., j, None]) for j in range(code.ns)]
    aterm = [np.where(info[:, i] == 0, a0[..., i, None], a1[..., i, None]) for i in range(code.ks)]

    def _leave_out(terms, skip):
        total = 0.0
        for j, t in enumerate(terms):
            if j != skip:
                total = total + t
        return total

    info_sum = _leave_out(aterm, -1)
    chan_sum = _leave_out(cterm, -1)

    coded_ext = np.empty(lch.shape)
    for j in range(code.ns):
        s = info_sum + _leave_out(cterm, j)
        zero = cw[:, j] == 0
        coded_ext[..., j] = _diff(s, zero)
    info_ext = np.empty(lap.shape)
    for i in range(code.ks):
        s = chan_sum + _leave_out(aterm, i)
        zero = info[:, i] == 0
        info_ext[..., i] = _diff(s, zero)
    return np.clip(coded_ext, -clip, clip), np.clip(info_ext, -clip, clip)


def _diff(s, zero):
    s = np.broadcast_to(s, np.broadcast_shapes(np.shape(s), zero.shape))
    with np.errstate(invalid="ignore"):
        num = _lse(s[..., zero]) if zero.any() else np.full(s.shape[:-1], -np.inf)
        den = _lse(s[..., ~zero]) if (~zero).any() else np.full(s.shape[:-1], -np.inf)
        out = num - den
    return np.nan_to_num(out, nan=0.0)

"""Flooding sum-product decoding in the tanh domain, batched over frames."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..constellation import LLR_CLIP
from .codes import ParityMatrix

_TANH_MAX = 1.0 - 1e-15


@dataclass
class DecoderState:
    """Check-to-variable messages for a batch; shape (E_padded, B)."""

    c2v: np.ndarray

    @property
    def batch(self) -> int:
        return self.c2v.shape[1]

    def select(self, keep: np.ndarray) -> "DecoderState":
        return DecoderState(self.c2v[:, keep])


class BPDecoder:
    """Precomputed message layout for one parity-check matrix.

    Edges live in a dense check-major array of shape (m, w_max) with padding slots,
    so the leave-one-out tanh products are prefix/suffix cumulative products.
    """

    def __init__(self, H: ParityMatrix, clip: float = LLR_CLIP):
        self.H = H
        self.clip = clip
        m, n = H.m, H.n
        order = np.lexsort((H.var_idx, H.check_idx))
        checks, vars_ = H.check_idx[order], H.var_idx[order]
        w = np.bincount(checks, minlength=m)
        self.w_max = int(w.max())
        starts = np.concatenate([[0], np.cumsum(w)[:-1]])
        slot = np.arange(len(checks)) - starts[checks]
        flat = checks * self.w_max + slot
        self.size = m * self.w_max
        self.valid = np.zeros(self.size, dtype=bool)
        self.valid[flat] = True
        self.slot_var = np.zeros(self.size, dtype=np.int64)
        self.slot_var[flat] = vars_
        self.edge_slots = flat
        # variable totals: (n x size) incidence restricted to valid slots
        self.v_sum = sp.csr_matrix(
            (np.ones(len(flat)), (vars_, flat)), shape=(n, self.size))

    def init_state(self, batch: int) -> DecoderState:
        return DecoderState(np.zeros((self.size, batch)))

    def _check_update(self, v2c: np.ndarray) -> np.ndarray:
        B = v2c.shape[1]
        t = np.tanh(0.5 * v2c)
        t[~self.valid] = 1.0
        t = t.reshape(self.H.m, self.w_max, B)
        pre = np.ones_like(t)
        suf = np.ones_like(t)
        pre[:, 1:] = np.cumprod(t[:, :-1], axis=1)
        suf[:, :-1] = np.cumprod(t[:, :0:-1], axis=1)[:, ::-1]
        prod = np.clip(pre * suf, -_TANH_MAX, _TANH_MAX).reshape(self.size, B)
        out = 2.0 * np.arctanh(prod)
        out[~self.valid] = 0.0
        return np.clip(out, -self.clip, self.clip)

    def iterate(self, llr: np.ndarray, state: DecoderState) -> tuple[np.ndarray, DecoderState]:
        """One flooding iteration. ``llr`` has shape (n, B); returns (posterior, new state)."""
        total = self.v_sum @ state.c2v
        v2c = llr[self.slot_var] + total[self.slot_var] - state.c2v
        v2c = np.clip(v2c, -self.clip, self.clip)
        c2v = self._check_update(v2c)
        post = llr + self.v_sum @ c2v
        return post, DecoderState(c2v)

    def syndrome_ok(self, posterior: np.ndarray) -> np.ndarray:
        hard = (posterior < 0).astype(np.int64)
        bits = hard[self.slot_var] * self.valid[:, None]
        par = bits.reshape(self.H.m, self.w_max, -1).sum(axis=1) & 1
        return ~par.any(axis=0)

    def decode(self, llr: np.ndarray, max_iters: int = 100, early_stop: bool = True):
        """Standalone decoding of (n,) or (n, B) channel LLRs.

        Returns (posterior, extrinsic, iterations, syndrome_ok); frames stop individually
        once their syndrome is satisfied.
        """
        single = np.ndim(llr) == 1
        L = np.asarray(llr, dtype=float).reshape(self.H.n, -1)
        B = L.shape[1]
        post = L.copy()
        ext = np.zeros_like(L)
        iters = np.zeros(B, dtype=np.int64)
        ok = self.syndrome_ok(post) if max_iters == 0 else np.zeros(B, dtype=bool)
        active = np.arange(B)
        state = self.init_state(B)
        for it in range(1, max_iters + 1):
            p, state = self.iterate(L[:, active], state)
            post[:, active] = p
            # summed check messages, exactly free of the channel input
            ext[:, active] = self.v_sum @ state.c2v
            iters[active] = it
            good = self.syndrome_ok(p)
            ok[active] = good
            if early_stop and good.any():
                active, state = active[~good], state.select(~good)
                if active.size == 0:
                    break
        ext = np.clip(ext, -self.clip, self.clip)
        post = np.clip(post, -self.clip, self.clip)
        if single:
            return post[:, 0], ext[:, 0], int(iters[0]), bool(ok[0])
        return post, ext, iters, ok


def bp_decode(channel_llrs, H: ParityMatrix, max_iters: int = 100, early_stop: bool = True):
    return BPDecoder(H).decode(channel_llrs, max_iters, early_stop)

"""Iterative BICM-ID receiver: demapper, shaping decoder and LDPC decoder in one loop."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constellation import demap_batch
from ..shaping import shape_decode_soft
from .system import System


@dataclass
class ReceiveResult:
    bits: np.ndarray  # (B, k) hard decisions on the information bits
    iterations: np.ndarray  # (B,) global iterations used
    converged: np.ndarray  # (B,) syndrome satisfied


def _shaped_s1_prior(system: System, la_d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shaping decoder with no channel input: a priori on d -> a priori on s1."""
    sh = system.shaping
    B = la_d.shape[0]
    blocks = la_d.reshape(B, -1, sh.ks)
    coded, _ = shape_decode_soft(np.zeros(blocks.shape[:2] + (sh.ns,)), blocks, sh)
    return coded.reshape(B, -1)[:, system.pi2]


def bicm_id_receive(received: np.ndarray, system: System, esn0_db: float,
                    max_iters: int | None = None, early_stop: bool | None = None) -> ReceiveResult:
    """Decode (N,) or (B, N) received symbols.

    One global iteration is: demap, shaping decode (shaped systems only), one flooding
    LDPC iteration, then the LDPC extrinsics become the next demapper a priori.
    Frames leave the loop once their syndrome is satisfied.
    """
    cfg = system.cfg
    max_iters = cfg.max_iters if max_iters is None else max_iters
    early_stop = cfg.early_stop if early_stop is None else early_stop
    y = np.asarray(received, dtype=complex)
    single = y.ndim == 1
    y = y.reshape(-1, system.N)
    B, N, m, nd = y.shape[0], system.N, system.m, system.n_d
    sh = system.shaping
    var = 0.5 * 10.0 ** (-esn0_db / 10.0)
    c = system.demap_constellation
    dec = system.decoder
    pi1 = system.pi1

    out_bits = np.zeros((B, system.k), dtype=np.uint8)
    iters = np.zeros(B, dtype=np.int64)
    ok = np.zeros(B, dtype=bool)

    active = np.arange(B)
    state = dec.init_state(B)
    le_v = np.zeros((B, system.n))  # LDPC extrinsics in interleaved (v) order
    la_s1 = _shaped_s1_prior(system, le_v[:, :nd]) if sh is not None else None

    for it in range(1, max_iters + 1):
        ya = y[active]
        Ba = len(active)
        la = np.empty((Ba, N, m))
        la[:, :, 1:] = le_v[:, nd:].reshape(Ba, m - 1, N).transpose(0, 2, 1)
        la[:, :, 0] = la_s1 if sh is not None else le_v[:, :N]
        ext = demap_batch(ya, la, var, c)

        lin_v = np.empty((Ba, system.n))
        lin_v[:, nd:] = ext[:, :, 1:].transpose(0, 2, 1).reshape(Ba, -1)
        if sh is not None:
            ch = np.empty((Ba, N))
            ch[:, system.pi2] = ext[:, :, 0]
            coded, info = shape_decode_soft(ch.reshape(Ba, -1, sh.ns),
                                            le_v[:, :nd].reshape(Ba, -1, sh.ks), sh)
            lin_v[:, :nd] = info.reshape(Ba, -1)
            la_s1 = coded.reshape(Ba, -1)[:, system.pi2]
        else:
            lin_v[:, :N] = ext[:, :, 0]

        lu = np.empty_like(lin_v)
        lu[:, pi1] = lin_v
        post, state = dec.iterate(lu.T, state)
        le_v = np.clip(post.T - lu, -dec.clip, dec.clip)[:, pi1]
        good = dec.syndrome_ok(post)

        iters[active] = it
        ok[active] = good
        out_bits[active] = (post[: system.k].T < 0).astype(np.uint8)
        if early_stop and good.any():
            keep = ~good
            active, state, le_v = active[keep], state.select(keep), le_v[keep]
            if sh is not None:
                la_s1 = la_s1[keep]
            if active.size == 0:
                break

    if single:
        return ReceiveResult(out_bits[0], iters[:1], ok[:1])
    return ReceiveResult(out_bits, iters, ok)

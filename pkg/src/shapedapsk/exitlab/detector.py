"""Monte Carlo detector characteristics, uniform and shaped, with an on-disk cache."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path

import numpy as np

from ..constellation import Constellation, demap_batch
from ..shaping import ShapingCode, shape_decode_soft, shape_encode
from .curves import ExitCurve, mi_from_llrs
from .jfunc import j_inverse_sat

MIN_SAMPLES = 1000
SEARCH_GRID = np.linspace(0.0, 1.0, 21)
_CACHE_VERSION = 2


def gaussian_apriori(bits: np.ndarray, sigma: float, normals: np.ndarray) -> np.ndarray:
    """Consistent Gaussian LLRs: mean sigma^2/2 toward the true bit, std sigma."""
    return (0.5 * sigma**2 + sigma * normals) * (1.0 - 2.0 * bits)


def _chunk_inputs(c: Constellation, shaping: ShapingCode | None, n_sym: int, rng):
    """Random transmitter tape for one chunk; independent of Es/N0 and I_A."""
    m = c.m
    tape = {"noise": rng.standard_normal((n_sym, 2))}
    if shaping is None:
        bits = rng.integers(0, 2, (n_sym, m), dtype=np.uint8)
        tape["labels"] = bits
        tape["v"] = bits.ravel()
        tape["normals"] = rng.standard_normal(bits.size)
        return tape
    n_blocks = n_sym // shaping.ns
    d = rng.integers(0, 2, n_blocks * shaping.ks, dtype=np.uint8)
    coded = shape_encode(d, shaping)
    perm = rng.permutation(n_sym)  # second interleaver
    s1 = coded[perm]
    rest = rng.integers(0, 2, (n_sym, m - 1), dtype=np.uint8)
    tape.update(
        d=d, perm=perm, rest=rest,
        labels=np.column_stack([s1, rest]),
        normals_d=rng.standard_normal(d.size),
        normals_rest=rng.standard_normal(rest.size).reshape(rest.shape),
    )
    return tape


def _measure_chunk(c, shaping, tape, esn0_db, sigma_a, max_log):
    n0 = 10.0 ** (-esn0_db / 10.0)
    noise = tape["noise"]
    y = c.modulate(tape["labels"]) + np.sqrt(n0 / 2.0) * (noise[:, 0] + 1j * noise[:, 1])
    if shaping is None:
        v = tape["v"]
        la = gaussian_apriori(v, sigma_a, tape["normals"]).reshape(tape["labels"].shape)
        ext = demap_batch(y, la, n0 / 2.0, c, max_log=max_log)
        return ext.ravel(), v

    d, perm, rest = tape["d"], tape["perm"], tape["rest"]
    ns, ks = shaping.ns, shaping.ks
    la_d = gaussian_apriori(d, sigma_a, tape["normals_d"]).reshape(-1, ks)
    la_rest = gaussian_apriori(rest, sigma_a, tape["normals_rest"])
    # shaping decoder turns the a priori on d into a priori on the shaped bits
    coded_prior, _ = shape_decode_soft(np.zeros((la_d.shape[0], ns)), la_d, shaping)
    la_s1 = coded_prior.ravel()[perm]
    ext = demap_batch(y, np.column_stack([la_s1, la_rest]), n0 / 2.0, c.uniform_view(),
                      max_log=max_log)
    ch_coded = np.empty(len(perm))
    ch_coded[perm] = ext[:, 0]
    _, info_ext = shape_decode_soft(ch_coded.reshape(-1, ns), la_d, shaping)
    llrs = np.concatenate([info_ext.ravel(), ext[:, 1:].ravel()])
    bits = np.concatenate([d, rest.ravel()])
    return llrs, bits


def detector_characteristic(
    c: Constellation,
    shaping: ShapingCode | None,
    esn0_db: float,
    ia_grid=SEARCH_GRID,
    samples_per_point: int = 200_000,
    seed: int = 0,
    chunk: int = 50_000,
    max_log: bool = False,
) -> ExitCurve:
    """I_E between the bits v entering the bit separator and their detector extrinsics.

    Every grid point reuses the same transmitted bits, noise and a priori draws (common
    random numbers), so curves are smooth in both I_A and Es/N0.
    """
    if samples_per_point < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples per point")
    ia_grid = np.asarray(ia_grid, dtype=float)
    unit = shaping.ns if shaping is not None else 1
    chunk = max(unit, chunk - chunk % unit)
    sizes = []
    left = samples_per_point
    while left > 0:
        take = min(chunk, left)
        take += (-take) % unit
        sizes.append(take)
        left -= take

    ss = np.random.SeedSequence(seed)
    tapes = [_chunk_inputs(c, shaping, n, np.random.default_rng(child))
             for n, child in zip(sizes, ss.spawn(len(sizes)))]
    sig = j_inverse_sat(ia_grid)
    ie = np.empty(len(ia_grid))
    for i, s in enumerate(sig):
        llr_all, bit_all = zip(*(_measure_chunk(c, shaping, t, esn0_db, s, max_log) for t in tapes))
        ie[i] = mi_from_llrs(np.concatenate(llr_all), np.concatenate(bit_all))
    params = {"esn0_db": round(float(esn0_db), 6),
              "shaping": shaping.fingerprint() if shaping is not None else "none",
              "samples": samples_per_point, "seed": seed}
    return ExitCurve(ia_grid, ie, "detector", params)


class DetectorFamily:
    """Detector curves on an Es/N0 lattice (step ``step_db``), linearly interpolated.

    Curves are computed lazily and, when ``cache_dir`` is set, persisted as .npz files
    keyed by a content hash of everything that determines them.
    """

    def __init__(self, c: Constellation, shaping: ShapingCode | None,
                 ia_grid=SEARCH_GRID, samples_per_point: int = 200_000, seed: int = 0,
                 step_db: float = 0.1, cache_dir: str | Path | None = None):
        self.c = c
        self.shaping = shaping
        self.ia_grid = np.asarray(ia_grid, dtype=float)
        self.samples = samples_per_point
        self.seed = seed
        self.step_db = step_db
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self._mem: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def _key(self, esn0_db: float) -> str:
        doc = {
            "v": _CACHE_VERSION,
            "constellation": self.c.fingerprint(),
            "shaping": self.shaping.fingerprint() if self.shaping is not None else None,
            "esn0": round(float(esn0_db), 6),
            "grid": [round(float(x), 9) for x in self.ia_grid],
            "samples": self.samples,
            "seed": self.seed,
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:24]

    def _lattice_curve(self, idx: int) -> np.ndarray:
        with self._lock:
            if idx in self._mem:
                return self._mem[idx]
        esn0 = round(idx * self.step_db, 6)
        path = None
        if self.cache_dir is not None:
            path = self.cache_dir / f"det_{self._key(esn0)}.npz"
            if path.exists():
                ie = np.load(path)["ie"]
                with self._lock:
                    self._mem[idx] = ie
                return ie
        ie = detector_characteristic(self.c, self.shaping, esn0, self.ia_grid,
                                     self.samples, self.seed).ie_values
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".npz")
            with os.fdopen(fd, "wb") as fh:
                np.savez(fh, ie=ie, esn0=esn0)
            os.replace(tmp, path)
        with self._lock:
            self._mem[idx] = ie
        return ie

    def ie_at(self, esn0_db: float) -> np.ndarray:
        pos = esn0_db / self.step_db
        lo = int(np.floor(pos + 1e-9))
        frac = pos - lo
        a = self._lattice_curve(lo)
        if frac < 1e-9:
            return a
        b = self._lattice_curve(lo + 1)
        return (1 - frac) * a + frac * b

    def curve_at(self, esn0_db: float) -> ExitCurve:
        return ExitCurve(self.ia_grid, np.clip(self.ie_at(esn0_db), 0, 1), "detector",
                         {"esn0_db": esn0_db})

    def lattice(self, lo_db: float, hi_db: float) -> tuple[np.ndarray, np.ndarray]:
        """(Es/N0 points, I_E array of shape (points, grid)) covering [lo_db, hi_db]."""
        i0 = int(np.floor(lo_db / self.step_db + 1e-9))
        i1 = int(np.ceil(hi_db / self.step_db - 1e-9))
        idx = np.arange(i0, i1 + 1)
        return idx * self.step_db, np.array([self._lattice_curve(int(i)) for i in idx])

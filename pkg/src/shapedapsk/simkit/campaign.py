"""BER/FER campaigns with per-frame random substreams."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .receiver import bicm_id_receive
from .system import System, awgn, transmit


@dataclass
class BerRecord:
    ebn0_db: float
    frames: int
    bits: int
    bit_errors: int
    frame_errors: int
    iterations: int  # summed over frames

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else float("nan")

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def avg_iters(self) -> float:
        return self.iterations / self.frames if self.frames else float("nan")


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    """Substream for one frame; independent of batching and worker layout."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, frame)))


def simulate_frames(system: System, ebn0_db: float, seed: int, point: int,
                    frames: range) -> tuple[int, int, int]:
    """(bit errors, frame errors, iterations) over the given frame indices, decoded as one batch."""
    esn0 = float(system.ebn0_to_esn0(ebn0_db))
    info = np.empty((len(frames), system.k), dtype=np.uint8)
    rngs = [frame_rng(seed, point, f) for f in frames]
    for i, rng in enumerate(rngs):
        info[i] = rng.integers(0, 2, system.k, dtype=np.uint8)
    x, _ = transmit(info, system)
    y = np.stack([awgn(xi, esn0, rng) for xi, rng in zip(x, rngs)])
    res = bicm_id_receive(y, system, esn0)
    errs = (res.bits != info).sum(axis=1)
    return int(errs.sum()), int((errs > 0).sum()), int(res.iterations.sum())


_WORKER_SYSTEM: System | None = None


def _init_worker(system):
    global _WORKER_SYSTEM
    _WORKER_SYSTEM = system


def _worker(args):
    return simulate_frames(_WORKER_SYSTEM, *args)


def ber_campaign(
    system: System,
    ebn0_db,
    seed: int = 0,
    min_errors: int = 200,
    max_bits: float = 1e8,
    max_frames: int | None = None,
    batch: int = 8,
    workers: int = 1,
    progress=None,
    stop_ber: float | None = None,
    min_frame_errors: int = 0,
) -> list[BerRecord]:
    """Simulate each Eb/N0 point until ``min_errors`` bit errors or a bit/frame budget.

    ``min_frame_errors`` additionally asks for that many failed frames before a point is
    done; a single failed frame can carry hundreds of bit errors.

    Frames are drawn in rounds of ``batch``; a round is split across ``workers`` and the
    stop rule is checked after each round. Every frame has its own random substream, so
    the records depend on (seed, batch) only, not on the worker count or scheduling.
    With ``stop_ber`` set, the sweep ends after the first point whose BER falls below it.
    """
    if max_frames == 0:
        return []
    points = list(np.atleast_1d(np.asarray(ebn0_db, dtype=float)))
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(system,))
    records = []
    try:
        for p, eb in enumerate(points):
            rec = BerRecord(float(eb), 0, 0, 0, 0, 0)
            while ((rec.bit_errors < min_errors or rec.frame_errors < min_frame_errors)
                   and rec.bits < max_bits):
                size = batch if max_frames is None else min(batch, max_frames - rec.frames)
                if size <= 0:
                    break
                start = rec.frames
                step = -(-size // workers)
                chunks = [range(start + i, start + min(i + step, size)) for i in range(0, size, step)]
                jobs = [(float(eb), seed, p, ch) for ch in chunks]
                results = pool.map(_worker, jobs) if pool else [simulate_frames(system, *j) for j in jobs]
                for (be, fe, it), ch in zip(results, chunks):
                    rec.frames += len(ch)
                    rec.bits += len(ch) * system.k
                    rec.bit_errors += be
                    rec.frame_errors += fe
                    rec.iterations += it
                if progress is not None:
                    progress(rec)
            records.append(rec)
            if stop_ber is not None and rec.ber < stop_ber:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return records


CSV_FIELDS = ["ebn0_db", "bits", "bit_errors", "frame_errors", "ber", "fer", "avg_iters"]


def records_to_csv(records: list[BerRecord], meta: dict | None = None,
                   path: str | Path | None = None) -> str:
    buf = io.StringIO()
    for key, val in (meta or {}).items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([f"{r.ebn0_db:.4f}", r.bits, r.bit_errors, r.frame_errors,
                    f"{r.ber:.6e}", f"{r.fer:.6e}", f"{r.avg_iters:.3f}"])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def records_from_csv(path: str | Path, k: int) -> list[BerRecord]:
    """Read a campaign CSV back; ``k`` is the number of information bits per frame."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        bits = int(row["bits"])
        frames = bits // k
        out.append(BerRecord(float(row["ebn0_db"]), frames, bits, int(row["bit_errors"]),
                             int(row["frame_errors"]), round(float(row["avg_iters"]) * frames)))
    return out


def ebn0_at_ber(records: list[BerRecord], target: float = 1e-4) -> float:
    """Eb/N0 where the BER curve crosses ``target``, log-linear between bracketing points."""
    pts = sorted((r.ebn0_db, r.ber) for r in records if r.bits)
    for (x0, b0), (x1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1:
            if b1 <= 0:
                return x1
            t = (np.log10(b0) - np.log10(target)) / (np.log10(b0) - np.log10(b1))
            return float(x0 + t * (x1 - x0))
    raise ValueError(f"records do not bracket BER {target:g}")


def record_dict(r: BerRecord) -> dict:
    return dict(asdict(r), ber=r.ber, fer=r.fer, avg_iters=r.avg_iters)

"""EXIT curve containers, LLR-based MI estimation and the VND/CND transfer curves."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..ldpc.degrees import DegreeDistribution
from .jfunc import j_function, j_inverse_sat


@dataclass(frozen=True, eq=False)
class ExitCurve:
    ia_grid: np.ndarray
    ie_values: np.ndarray
    kind: str  # "detector" | "vnd" | "cnd"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        ia = np.asarray(self.ia_grid, dtype=float)
        ie = np.asarray(self.ie_values, dtype=float)
        if ia.shape != ie.shape:
            raise ValueError("grid and values differ in shape")
        if np.any(np.diff(ia) <= 0):
            raise ValueError("ia_grid must be strictly ascending")
        if ia.min() < 0 or ia.max() > 1 or ie.min() < 0 or ie.max() > 1:
            raise ValueError("mutual information must lie in [0, 1]")
        object.__setattr__(self, "ia_grid", ia)
        object.__setattr__(self, "ie_values", ie)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        for key, val in sorted(self.params.items()):
            buf.write(f"# {key}: {val}\n")
        buf.write(f"# kind: {self.kind}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ia", "ie"])
        for a, e in zip(self.ia_grid, self.ie_values):
            w.writerow([f"{a:.6f}", f"{e:.9f}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "ExitCurve":
        params, kind, rows = {}, "detector", []
        for line in Path(path).read_text().splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                if key.strip() == "kind":
                    kind = val.strip()
                else:
                    params[key.strip()] = val.strip()
            elif line and not line.startswith("ia"):
                a, e = line.split(",")
                rows.append((float(a), float(e)))
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], kind, params)


def mi_from_llrs(llrs, bits) -> float:
    """I = 1 - E[log2(1 + exp(-L * (1 - 2b)))], clamped to [0, 1]."""
    L = np.asarray(llrs, dtype=float).ravel()
    b = np.asarray(bits).ravel()
    if L.size == 0 or L.size != b.size:
        raise ValueError("need equal-length, non-empty LLRs and bits")
    signed = L * (1.0 - 2.0 * b)
    val = 1.0 - np.mean(np.logaddexp(0.0, -signed)) / np.log(2.0)
    return float(min(max(val, 0.0), 1.0))


def vnd_transfer(ia, det_sigma, degrees, edge_fracs, det_ie=None) -> np.ndarray:
    """Irregular VND output given detector sigma J^-1(I_E,DET) sampled on ``ia``."""
    sa = j_inverse_sat(ia)
    out = np.zeros(np.shape(ia))
    for d, b in zip(degrees, edge_fracs):
        if d == 1 and det_ie is not None:
            term = det_ie  # no check messages: the detector passes straight through
        else:
            term = j_function(np.sqrt((d - 1) * sa**2 + det_sigma**2))
        out = out + b * term
    return np.clip(out, 0.0, 1.0)


def vnd_curve(detector: ExitCurve, dist: DegreeDistribution | None = None, *,
              degrees=None, edge_fracs=None) -> ExitCurve:
    """Variable-node curve: per-degree combination with the detector, blended by edge fractions."""
    if dist is not None:
        degrees, edge_fracs = dist.degrees, dist.edge_fracs
    det_sigma = j_inverse_sat(detector.ie_values)
    ie = vnd_transfer(detector.ia_grid, det_sigma, degrees, edge_fracs, detector.ie_values)
    params = dict(detector.params, degrees=list(degrees))
    return ExitCurve(detector.ia_grid, ie, "vnd", params)


def cnd_transfer(ia, dc: int) -> np.ndarray:
    sig = j_inverse_sat(1.0 - np.asarray(ia, dtype=float))
    return 1.0 - j_function(np.sqrt(dc - 1) * sig)


def cnd_inverse(ie, dc: int) -> np.ndarray:
    """The check input I_A that produces a given check output I_E."""
    sig = j_inverse_sat(1.0 - np.asarray(ie, dtype=float))
    return 1.0 - j_function(sig / np.sqrt(dc - 1))


def cnd_curve(dc: int, ia_grid) -> ExitCurve:
    if dc < 2:
        raise ValueError("check degree must be at least 2")
    ia = np.asarray(ia_grid, dtype=float)
    return ExitCurve(ia, np.clip(cnd_transfer(ia, dc), 0.0, 1.0), "cnd", {"dc": dc})

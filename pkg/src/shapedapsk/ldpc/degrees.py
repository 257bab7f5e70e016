"""Variable-node degree distributions for check-regular eIRA codes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

MAX_DEGREE = 25


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    degrees: tuple[int, ...]
    node_fracs: np.ndarray
    edge_fracs: np.ndarray
    check_degree: int
    rate: float

    def __post_init__(self):
        d = np.asarray(self.degrees)
        a = np.asarray(self.node_fracs, dtype=float)
        b = np.asarray(self.edge_fracs, dtype=float)
        if d[0] != 2 or np.any(np.diff(d) <= 0):
            raise ValueError(f"degrees must start at 2 and increase strictly: {self.degrees}")
        if d[-1] > MAX_DEGREE:
            raise ValueError(f"max degree {d[-1]} exceeds {MAX_DEGREE}")
        if abs(a.sum() - 1) > 1e-9 or abs(b.sum() - 1) > 1e-9:
            raise ValueError("fractions must sum to one")
        if np.any(a <= 0):
            raise ValueError("node fractions must be positive")
        if not np.allclose(b, a * d / np.dot(a, d), atol=1e-12):
            raise ValueError("edge fractions inconsistent with node fractions")
        if abs(a[0] - (1 - self.rate)) > 1e-9:
            raise ValueError("degree-2 fraction must equal 1 - rate")
        if abs(np.dot(a, d) - (1 - self.rate) * self.check_degree) > 1e-9:
            raise ValueError("edge balance violated")

    @property
    def D(self) -> int:
        return len(self.degrees)

    @property
    def avg_var_degree(self) -> float:
        return float(np.dot(self.node_fracs, self.degrees))

    def table(self, digits: int = 3) -> str:
        """Three-column text table: degree, node fraction, edge fraction."""
        return "\n".join(f"{d} {a:.{digits}f} {b:.{digits}f}"
                         for d, a, b in zip(self.degrees, self.node_fracs, self.edge_fracs))

    def key(self) -> str:
        return "[" + ",".join(map(str, self.degrees)) + "]"

    def to_dict(self) -> dict:
        return {"degrees": list(self.degrees), "node_fracs": self.node_fracs.tolist(),
                "edge_fracs": self.edge_fracs.tolist(), "check_degree": self.check_degree,
                "rate": self.rate}


def _as_rate(rate) -> float:
    if isinstance(rate, str):
        rate = Fraction(rate)
    return float(rate)


def solve_degree_fractions(
    rate,
    dc: int,
    degrees: Sequence[int],
    a2: float | None = None,
) -> DegreeDistribution | None:
    """Node fractions from the rate, check degree and degree set.

    The degree-2 fraction is pinned to 1 - rate and the remaining fractions follow from
    normalization and edge balance. With four degrees one more fraction is free; ``a2``
    fixes the fraction of the second-smallest degree. Returns None if any fraction is
    not strictly inside (0, 1).
    """
    r = _as_rate(rate)
    degrees = tuple(int(x) for x in degrees)
    D = len(degrees)
    if D < 2 or degrees[0] != 2 or any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError(f"invalid degree set {degrees}")
    if D == 4 and a2 is None:
        raise ValueError("four degrees need a fixed a2")
    if D > 4:
        raise ValueError("at most four distinct degrees are supported")

    a = np.zeros(D)
    a[0] = 1 - r
    rest = np.array(degrees[1:], dtype=float)
    mass = r  # sum of remaining fractions
    edges = (1 - r) * dc - 2 * (1 - r)
    if D == 2:
        a[1] = mass
        if abs(rest[0] * mass - edges) > 1e-9:
            return None
    else:
        fixed = 0
        if D == 4:
            a[1] = a2
            mass -= a2
            edges -= a2 * rest[0]
            fixed = 1
        d_lo, d_hi = rest[fixed], rest[fixed + 1]
        # a_lo + a_hi = mass ; d_lo a_lo + d_hi a_hi = edges
        a_hi = (edges - d_lo * mass) / (d_hi - d_lo)
        a[fixed + 1] = mass - a_hi
        a[fixed + 2] = a_hi
    if np.any(a <= 0) or np.any(a >= 1) or degrees[-1] > MAX_DEGREE:
        return None
    d = np.asarray(degrees, dtype=float)
    b = a * d / np.dot(a, d)
    return DegreeDistribution(degrees, a, b, int(dc), r)


def enumerate_candidates(
    rate,
    dc: int,
    D: int,
    dv_max: int = MAX_DEGREE,
    grid_step: float = 0.01,
) -> list[DegreeDistribution]:
    """Every feasible distribution with D degrees, 2 < dv_2 < ... <= dv_max."""
    if D not in (3, 4):
        raise ValueError("D must be 3 or 4")
    r = _as_rate(rate)
    out = []
    for tail in combinations(range(3, dv_max + 1), D - 1):
        degs = (2, *tail)
        if D == 3:
            dist = solve_degree_fractions(r, dc, degs)
            if dist is not None:
                out.append(dist)
            continue
        # vectorized over the a2 grid, then materialize the feasible points
        d2, d3, d4 = tail
        grid = np.arange(1, int(np.floor(r / grid_step + 1e-9)) + 1) * grid_step
        mass = r - grid
        edges = (1 - r) * (dc - 2) - grid * d2
        a4 = (edges - d3 * mass) / (d4 - d3)
        a3 = mass - a4
        ok = (a3 > 0) & (a4 > 0) & (mass > 0)
        for x in grid[ok]:
            dist = solve_degree_fractions(r, dc, degs, a2=round(float(x), 12))
            if dist is not None:
                out.append(dist)
    return out

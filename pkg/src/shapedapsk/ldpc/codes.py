"""eIRA parity-check matrices: construction, systematic encoding, alist I/O."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .degrees import DegreeDistribution


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ParityMatrix:
    """Sparse H stored as edge lists. Columns k..n-1 are the dual-diagonal accumulator."""

    n: int
    k: int
    check_idx: np.ndarray
    var_idx: np.ndarray

    def __post_init__(self):
        order = np.lexsort((self.check_idx, self.var_idx))
        object.__setattr__(self, "check_idx", np.asarray(self.check_idx, dtype=np.int64)[order])
        object.__setattr__(self, "var_idx", np.asarray(self.var_idx, dtype=np.int64)[order])

    @property
    def m(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def csr(self) -> sp.csr_matrix:
        data = np.ones(len(self.var_idx), dtype=np.int64)
        return sp.csr_matrix((data, (self.check_idx, self.var_idx)), shape=(self.m, self.n))

    @cached_property
    def _sys_csr(self) -> sp.csr_matrix:
        return self.csr[:, : self.k].tocsr()

    def to_dense(self) -> np.ndarray:
        return self.csr.toarray().astype(np.uint8)

    @property
    def col_weights(self) -> np.ndarray:
        return np.bincount(self.var_idx, minlength=self.n)

    @property
    def row_weights(self) -> np.ndarray:
        return np.bincount(self.check_idx, minlength=self.m)

    def syndrome(self, words: np.ndarray) -> np.ndarray:
        """H c^T mod 2 for words of shape (..., n)."""
        w = np.asarray(words, dtype=np.int64)
        flat = w.reshape(-1, self.n)
        s = (self.csr @ flat.T).T % 2
        return s.reshape(w.shape[:-1] + (self.m,))

    def same_structure(self, other: "ParityMatrix") -> bool:
        return (self.n == other.n and self.k == other.k
                and np.array_equal(self.check_idx, other.check_idx)
                and np.array_equal(self.var_idx, other.var_idx))

    def count_4cycles(self) -> int:
        """Number of column pairs sharing two or more rows (each such pair closes a 4-cycle)."""
        h = self.csr.astype(np.int64)
        overlap = (h.T @ h).tocoo()
        mask = (overlap.row < overlap.col) & (overlap.data >= 2)
        pairs = overlap.data[mask]
        return int(np.sum(pairs * (pairs - 1) // 2))


def _node_counts(dist: DegreeDistribution, n: int, k: int) -> list[int]:
    """Largest-remainder rounding of a_i * n over the systematic degrees, summing to k."""
    raw = np.asarray(dist.node_fracs[1:]) * n
    raw = raw * (k / raw.sum())
    counts = np.floor(raw).astype(int)
    short = k - counts.sum()
    for i in np.argsort(-(raw - counts), kind="stable")[:short]:
        counts[i] += 1
    return counts.tolist()


def build_eira_matrix(dist: DegreeDistribution, n: int, seed: int = 0,
                      avoid_4cycles: bool = True) -> ParityMatrix:
    """Random check-regular eIRA code realizing ``dist`` at length ``n``.

    Systematic columns are filled column by column (highest degree first), each edge
    going to a row with the most remaining capacity; rows that would close a 4-cycle
    with an already placed edge are skipped when an alternative exists.
    """
    m_float = n * (1 - dist.rate)
    m = int(round(m_float))
    if abs(m - m_float) > 1e-6 or m < 2:
        raise ConstructionError(f"n={n} does not give an integer number of checks at rate {dist.rate}")
    k = n - m
    dc = dist.check_degree
    sys_degrees = list(dist.degrees[1:])
    if max(sys_degrees) > m:
        raise ConstructionError(f"degree {max(sys_degrees)} exceeds the {m} available rows")
    counts = _node_counts(dist, n, k)
    if any(c < 0 for c in counts):
        raise ConstructionError("negative node count after rounding")

    rng = random.Random(seed)
    col_deg = np.repeat(sys_degrees, counts)[::-1]  # highest degree first
    total = int(col_deg.sum())
    target = np.full(m, dc - 2)
    target[0] = dc - 1
    diff = total - int(target.sum())
    if abs(diff) > m:
        raise ConstructionError(f"systematic edges {total} cannot meet check degree {dc}")
    adjust_rows = rng.sample(range(m), abs(diff))
    target[adjust_rows] += 1 if diff > 0 else -1
    if target.min() < 0:
        raise ConstructionError("check degree too small for the accumulator")

    # adjacency including the accumulator: column k+j touches rows j and j+1
    row_cols: list[list[int]] = [[] for _ in range(m)]
    col_rows: list[list[int]] = [[] for _ in range(n)]
    for j in range(m):
        for r in ((j, j + 1) if j + 1 < m else (j,)):
            row_cols[r].append(k + j)
            col_rows[k + j].append(r)

    cap = target.astype(int).tolist()
    top = max(cap)
    buckets: list[list[int]] = [[] for _ in range(top + 1)]
    pos = [0] * m
    for r in range(m):
        pos[r] = len(buckets[cap[r]])
        buckets[cap[r]].append(r)

    def move_down(r):
        b = buckets[cap[r]]
        i, last = pos[r], b[-1]
        b[i], pos[last] = last, i
        b.pop()
        cap[r] -= 1
        pos[r] = len(buckets[cap[r]])
        buckets[cap[r]].append(r)

    def pick(level_rows, exclude):
        if not level_rows:
            return None
        for _ in range(24):
            r = level_rows[rng.randrange(len(level_rows))]
            if r not in exclude:
                return r
        free = [r for r in level_rows if r not in exclude]
        return free[rng.randrange(len(free))] if free else None

    for c, d in enumerate(col_deg):
        chosen: list[int] = []
        blocked: set[int] = set()
        for _ in range(d):
            levels = [lv for lv in range(len(buckets) - 1, 0, -1) if buckets[lv]]
            r = None
            if avoid_4cycles:
                # prefer the fullest level; step down one level to dodge a 4-cycle
                for lv in levels[:2]:
                    r = pick(buckets[lv], blocked)
                    if r is not None:
                        break
            if r is None:
                taken = set(chosen)
                for lv in levels:
                    r = pick(buckets[lv], taken)
                    if r is not None:
                        break
            if r is None:
                raise ConstructionError("ran out of rows while placing edges")
            chosen.append(r)
            blocked.add(r)
            for cc in row_cols[r]:
                blocked.update(col_rows[cc])
            move_down(r)
        for r in chosen:
            row_cols[r].append(c)
            col_rows[c].append(r)

    if any(cap):
        raise ConstructionError("unfilled row capacity")
    checks = np.fromiter((r for col in col_rows for r in col), dtype=np.int64, count=total + 2 * m - 1)
    vars_ = np.repeat(np.arange(n), [len(col) for col in col_rows])
    return ParityMatrix(n, k, checks, vars_)


def encode(u: np.ndarray, H: ParityMatrix) -> np.ndarray:
    """Systematic encoding [u | p] with p_j = p_{j-1} xor <row j systematic part, u>."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != H.k:
        raise ValueError(f"expected {H.k} information bits, got {u.shape[-1]}")
    flat = u.reshape(-1, H.k).astype(np.int64)
    s = (H._sys_csr @ flat.T).T & 1
    p = np.bitwise_xor.accumulate(s, axis=1)
    out = np.concatenate([flat, p], axis=1).astype(np.uint8)
    return out.reshape(u.shape[:-1] + (H.n,))


def write_alist(H: ParityMatrix, path: str | Path) -> None:
    """MacKay alist with zero padding."""
    cols = [[] for _ in range(H.n)]
    rows = [[] for _ in range(H.m)]
    for c, v in zip(H.check_idx.tolist(), H.var_idx.tolist()):
        cols[v].append(c + 1)
        rows[c].append(v + 1)
    max_c = max(map(len, cols))
    max_r = max(map(len, rows))
    lines = [f"{H.n} {H.m}", f"{max_c} {max_r}",
             " ".join(str(len(c)) for c in cols), " ".join(str(len(r)) for r in rows)]
    lines += [" ".join(map(str, sorted(c) + [0] * (max_c - len(c)))) for c in cols]
    lines += [" ".join(map(str, sorted(r) + [0] * (max_r - len(r)))) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_alist(path: str | Path, k: int | None = None) -> ParityMatrix:
    """Parse an alist file; padding zeros are optional. ``k`` defaults to n - m."""
    tokens = Path(path).read_text().split()
    it = iter(int(t) for t in tokens)
    n, m = next(it), next(it)
    next(it), next(it)
    col_w = [next(it) for _ in range(n)]
    row_w = [next(it) for _ in range(m)]
    rest = list(it)
    max_c = max(col_w)
    padded = len(rest) == n * max_c + m * max(row_w)
    checks, vars_ = [], []
    i = 0
    for v in range(n):
        width = max_c if padded else col_w[v]
        entries = [e for e in rest[i:i + width] if e]
        i += width
        if len(entries) != col_w[v]:
            raise ValueError(f"column {v + 1}: expected {col_w[v]} entries")
        checks += [e - 1 for e in entries]
        vars_ += [v] * len(entries)
    return ParityMatrix(n, n - m if k is None else k, np.array(checks), np.array(vars_))

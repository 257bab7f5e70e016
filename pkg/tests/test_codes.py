import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import gf2_syndrome

from shapedapsk.ldpc import (
    ConstructionError,
    build_eira_matrix,
    encode,
    read_alist,
    solve_degree_fractions,
    write_alist,
)


def test_tiny_instance_is_too_small():
    # 10 rows cannot host a degree-14 column
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    with pytest.raises(ConstructionError):
        build_eira_matrix(dist, 28, seed=0)


def test_non_integer_parity_count_rejected():
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    with pytest.raises(ConstructionError):
        build_eira_matrix(dist, 30, seed=0)


def test_small_instance_structure(small_code):
    H = small_code
    m, k = H.m, H.k
    assert (H.n, k, m) == (56, 36, 20)
    dense = H.to_dense()
    acc = dense[:, k:]
    # dual diagonal, last column weight one
    assert np.array_equal(acc, np.eye(m, dtype=acc.dtype) + np.eye(m, k=-1, dtype=acc.dtype))
    cw = H.col_weights
    assert (cw == 1).sum() == 1 and cw[-1] == 1
    rw = H.row_weights
    assert np.all(np.abs(rw - 10) <= 1)
    counts = {d: int((cw[:k] == d).sum()) for d in (2, 3, 14)}
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    # systematic degree-2 columns plus accumulator make up the degree-2 nodes
    expect = {3: dist.node_fracs[1] * 56, 14: dist.node_fracs[2] * 56}
    for d, x in expect.items():
        assert abs(counts[d] - x) <= 1


def test_rate_identity(medium_code):
    assert abs(medium_code.k / medium_code.n - 3 / 5) <= 1 / medium_code.n


def test_same_seed_same_matrix():
    dist = solve_degree_fractions("3/5", 11, (2, 4, 19))
    a = build_eira_matrix(dist, 500, seed=7)
    b = build_eira_matrix(dist, 500, seed=7)
    c = build_eira_matrix(dist, 500, seed=8)
    assert a.same_structure(b)
    assert not a.same_structure(c)


def test_four_cycle_avoidance_is_effective():
    # best effort: a handful may survive, far fewer than blind placement leaves
    dist = solve_degree_fractions("3/5", 11, (2, 4, 19))
    kept = build_eira_matrix(dist, 2000, seed=1).count_4cycles()
    blind = build_eira_matrix(dist, 2000, seed=1, avoid_4cycles=False).count_4cycles()
    assert kept <= 5 and kept < blind


def test_all_zero_encoding(small_code):
    assert not encode(np.zeros(small_code.k, dtype=np.uint8), small_code).any()


def test_hundred_random_encodings(small_code):
    H = small_code.to_dense()
    rng = np.random.default_rng(0)
    for _ in range(100):
        c = encode(rng.integers(0, 2, small_code.k, dtype=np.uint8), small_code)
        assert not gf2_syndrome(H, c).any()


@given(st.integers(0, 2**31))
def test_encodings_satisfy_parity(medium_code, seed):
    rng = np.random.default_rng(seed)
    c = encode(rng.integers(0, 2, (3, medium_code.k), dtype=np.uint8), medium_code)
    assert not medium_code.syndrome(c).any()


def test_unit_vector_parity_is_accumulated_column(small_code):
    H = small_code.to_dense()
    k = small_code.k
    for j in (0, 5, k - 1):
        u = np.zeros(k, dtype=np.uint8)
        u[j] = 1
        p = encode(u, small_code)[k:]
        assert np.array_equal(p, np.cumsum(H[:, j]) % 2)


def test_alist_roundtrip(tmp_path, medium_code):
    path = tmp_path / "h.alist"
    write_alist(medium_code, path)
    back = read_alist(path)
    assert back.same_structure(medium_code)
    assert back.k == medium_code.k


def test_alist_header(tmp_path, small_code):
    path = tmp_path / "h.alist"
    write_alist(small_code, path)
    lines = path.read_text().splitlines()
    assert lines[0].split() == ["56", "20"]
    assert lines[1].split() == [str(small_code.col_weights.max()), str(small_code.row_weights.max())]

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shapedapsk.designs import DESIGNS
from shapedapsk.ldpc import DegreeDistribution, enumerate_candidates, solve_degree_fractions


def _printed(dist, digits):
    return [round(float(x), digits) for x in dist.node_fracs], \
        [round(float(x), 3) for x in dist.edge_fracs]


def test_uniform_d3_table_exact():
    dist = solve_degree_fractions("3/5", 11, (2, 4, 19))
    a, b = _printed(dist, 2)
    assert a == [0.40, 0.52, 0.08]
    assert b == [0.182, 0.473, 0.345]


def test_uniform_d4_table_exact():
    dist = DESIGNS["uniform-d4"].distribution()
    a, b = _printed(dist, 2)
    assert a == [0.40, 0.10, 0.44, 0.06]
    assert b == [0.182, 0.066, 0.402, 0.351]


def test_shaped_d3_table():
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    # no free parameter: the degree-14 fraction is fixed at 13/154
    assert dist.node_fracs[2] == pytest.approx(13 / 154, abs=1e-12)
    a, b = _printed(dist, 3)
    assert a[:2] == [0.357, 0.558]
    assert abs(dist.node_fracs[2] - 0.085) < 0.001
    assert b == [0.200, 0.469, 0.331]


def test_shaped_d4_table():
    dist = DESIGNS["shaped-d4"].distribution()
    assert np.allclose(dist.node_fracs, [0.357, 0.548, 0.002, 0.093], atol=0.001)
    assert np.allclose(dist.edge_fracs, [0.200, 0.461, 0.002, 0.337], atol=0.001)


def test_infeasible_profile_returns_none():
    assert solve_degree_fractions("3/5", 11, (2, 10, 11)) is None


def test_d4_requires_free_fraction():
    with pytest.raises(ValueError):
        solve_degree_fractions("9/14", 10, (2, 3, 5, 13))


@given(st.sampled_from([("3/5", 11), ("2/3", 10), ("9/14", 10), ("1/2", 7)]),
       st.integers(3, 24), st.integers(4, 25))
def test_solved_distributions_satisfy_invariants(rate_dc, d2, d3):
    rate, dc = rate_dc
    if d3 <= d2:
        return
    dist = solve_degree_fractions(rate, dc, (2, d2, d3))
    if dist is None:
        return
    r = float(Fraction(rate))
    a, b, d = dist.node_fracs, dist.edge_fracs, np.array(dist.degrees)
    assert abs(a.sum() - 1) < 1e-9 and abs(b.sum() - 1) < 1e-9
    assert np.allclose(b, a * d / np.dot(a, d), atol=1e-12)
    assert abs(a[0] - (1 - r)) < 1e-12
    assert abs(np.dot(a, d) - (1 - r) * dc) < 1e-9
    assert np.all((a > 0) & (a < 1))


def test_enumerate_d3_contains_reference():
    keys = {c.key() for c in enumerate_candidates("3/5", 11, 3)}
    assert "[2,4,19]" in keys and "[2,3,12]" in keys


def test_enumerate_d3_shaped_contains_reference():
    keys = {c.key() for c in enumerate_candidates("9/14", 10, 3)}
    assert "[2,3,14]" in keys


def test_enumerate_d4_contains_reference():
    cands = [c for c in enumerate_candidates("9/14", 10, 4, grid_step=0.001)
             if c.degrees == (2, 3, 5, 13)]
    assert any(np.allclose(c.node_fracs, [0.357, 0.548, 0.002, 0.093], atol=0.001) for c in cands)


def test_enumerate_small_dv_max_empty():
    assert enumerate_candidates("3/5", 11, 3, dv_max=3) == []


def test_all_candidates_valid():
    for c in enumerate_candidates("3/5", 11, 4, grid_step=0.05):
        assert isinstance(c, DegreeDistribution)
        assert max(c.degrees) <= 25


def test_table_format():
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    assert dist.table().splitlines()[0] == "2 0.357 0.200"

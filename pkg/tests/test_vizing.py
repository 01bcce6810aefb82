import random

import pytest
from hypothesis import given, strategies as st

from cyclepart.balancing.vizing import (
    ColoringError,
    DisjointifyError,
    Multigraph,
    brute_force_disjointify_feasible,
    coloring_problems,
    disjointify_matchings,
    vizing_matching,
)
from cyclepart.oracles import max_matching_size
from cyclepart.props import random_multigraph


def test_triangle():
    h = Multigraph(3, ((0, 1), (1, 2), (0, 2)))
    r = vizing_matching(h)
    assert len(set(r.colours)) == 3 and len(r.matching) == 1
    assert not coloring_problems(h, r.colours, r.palette)


def test_parallel_bundle():
    h = Multigraph(2, ((0, 1),) * 3)
    r = vizing_matching(h)
    assert r.palette <= 6 and len(r.matching) == 1


def test_loop_rejected():
    with pytest.raises(ColoringError):
        Multigraph(2, ((1, 1),))


def test_empty():
    assert vizing_matching(Multigraph(3, ())).matching == ()


@given(st.integers(0, 10**9))
def test_colouring_bound(seed):
    h = random_multigraph(random.Random(seed))
    r = vizing_matching(h)
    bound = h.max_degree + h.max_multiplicity
    assert not coloring_problems(h, r.colours, r.palette)
    assert r.palette <= bound
    ends = [v for e in r.matching for v in h.edges[e]]
    assert len(ends) == len(set(ends))
    assert len(r.matching) * bound >= len(h.edges)
    assert len(r.matching) <= max_matching_size(h.m, h.edges)


def test_disjointify_single():
    m = [(0, 1), (2, 3), (4, 5)]
    r = disjointify_matchings([m], 1)
    assert r.chosen == ((0, 1, 2),)


def test_disjointify_vertex_disjoint():
    r = disjointify_matchings([[(0, 1)], [(2, 3)], [(4, 5)]], 2)
    assert r.chosen == ((0,), (0,), (0,))


def test_disjointify_two_perfect_matchings():
    m1 = [(0, 4), (1, 5), (2, 6), (3, 7)]
    m2 = [(0, 5), (1, 6), (2, 7), (3, 4)]
    r = disjointify_matchings([m1, m2], 2)
    assert all(len(c) >= 1 for c in r.chosen)
    assert brute_force_disjointify_feasible([m1, m2], 2)


def test_disjointify_infeasible():
    ms = [[(0, 1)], [(0, 2)]]
    assert not brute_force_disjointify_feasible(ms, 1)
    with pytest.raises(DisjointifyError):
        disjointify_matchings(ms, 1)
    assert disjointify_matchings(ms, 1, strict=False).method == "best-effort"


@st.composite
def matching_families(draw):
    m = draw(st.integers(2, 8))
    fams = []
    for _ in range(draw(st.integers(1, 3))):
        verts = draw(st.permutations(range(m)))
        size = draw(st.integers(1, m // 2))
        fams.append([(verts[2 * t], verts[2 * t + 1]) for t in range(size)])
    return fams


@given(matching_families(), st.integers(1, 3))
def test_disjointify_matches_oracle(fams, k):
    feasible = brute_force_disjointify_feasible(fams, k)
    if sum(map(len, fams)) > 16:
        return
    try:
        r = disjointify_matchings(fams, k)
    except DisjointifyError:
        assert not feasible
        return
    assert feasible
    used = [v for i, ts in enumerate(r.chosen) for t in ts for v in fams[i][t]]
    assert len(used) == len(set(used))
    assert all(len(ts) >= q for ts, q in zip(r.chosen, r.quotas))

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cyclepart.digraph import complete_digraph
from cyclepart.expansion import (
    ExpansionError,
    ExpansionParams,
    bipartite_to_digraph,
    is_bipartite_robust_expander,
    is_robust_outexpander,
    refine_partition_heuristic,
    robust_neighbourhood,
    view_from_edges,
)
from cyclepart.instances import complete_digraph_union, random_regular_digraph
from cyclepart.props import run_suite

TENTH = ExpansionParams(Fraction(1, 10), Fraction(1, 10))


def complete(a, b):
    return view_from_edges(a, b, [(i, j) for i in range(a) for j in range(b)])


def two_blocks():
    return view_from_edges(10, 10, [(i, j) for i in range(10) for j in range(10) if (i < 5) == (j < 5)])


def random_view(rng, a, b, p):
    return view_from_edges(a, b, [(i, j) for i in range(a) for j in range(b) if rng.random() < p])


def brute_expander(view, params, scale):
    a = len(view.left)
    for size in range(a + 1):
        if not (params.tau * a <= size <= (1 - params.tau) * a):
            continue
        for S in itertools.combinations(range(a), size):
            if len(robust_neighbourhood(view, S, params.nu, scale)) < size + params.nu * scale:
                return False
    return True


def test_params_validated():
    with pytest.raises(ExpansionError):
        ExpansionParams(Fraction(1, 2), Fraction(1, 4))


def test_rn_complete_and_empty():
    assert robust_neighbourhood(complete(10, 10), range(2), Fraction(1, 10)) == set(range(10))
    assert robust_neighbourhood(view_from_edges(4, 4, []), range(4), Fraction(1, 10)) == set()


@given(st.integers(0, 10**9))
def test_rn_recount_and_monotone(seed):
    rng = random.Random(seed)
    g = random_regular_digraph(10, rng.randint(1, 9), seed)
    S = {v for v in range(10) if rng.random() < 0.5}
    nu = Fraction(rng.randint(1, 5), 10)
    got = robust_neighbourhood(g, S, nu)
    assert got == {v for v in range(10) if len(S & set(g.in_adj[v])) >= nu * 10}
    assert got <= robust_neighbourhood(g, S, nu / 2)


def test_complete_bipartite_scale_conflict():
    # true only when νn is read with n = |A|; with n = |A| + |B| every 1-set fails
    assert is_bipartite_robust_expander(complete(10, 10), TENTH, scale=10).holds
    assert not is_bipartite_robust_expander(complete(10, 10), TENTH).holds


@pytest.mark.parametrize("m", [4, 6, 8, 12])
def test_complete_bipartite_positive_total_scale(m):
    params = ExpansionParams(Fraction(1, 20), Fraction(1, 10))
    assert is_bipartite_robust_expander(complete(m, m), params).holds


def test_two_blocks_witness():
    v = is_bipartite_robust_expander(two_blocks(), TENTH, scale=10)
    assert not v.holds and v.witness == (0, 1, 2, 3, 4) and v.mode == "exact"
    assert not is_bipartite_robust_expander(two_blocks(), TENTH).holds


def test_edgeless_fails():
    assert not is_bipartite_robust_expander(view_from_edges(6, 6, []), TENTH).holds


def test_size_cap():
    with pytest.raises(ExpansionError):
        is_bipartite_robust_expander(complete(24, 24), TENTH, mode="exact")
    assert is_bipartite_robust_expander(complete(24, 24), TENTH, scale=24).mode == "sampled"


@settings(max_examples=30)
@given(st.integers(0, 10**9))
def test_verifier_matches_brute_force(seed):
    rng = random.Random(seed)
    a = rng.randint(2, 8)
    view = random_view(rng, a, rng.randint(2, 8), rng.choice([0.5, 0.8, 0.95]))
    params = ExpansionParams(Fraction(1, 10), Fraction(rng.randint(1, 4), 10))
    for scale in (None, a):
        v = is_bipartite_robust_expander(view, params, scale=scale)
        assert v.holds == brute_expander(view, params, view.order if scale is None else scale)


def test_bipartite_to_digraph_examples():
    assert bipartite_to_digraph(view_from_edges(5, 5, [(i, i) for i in range(5)])).e == 0
    assert bipartite_to_digraph(complete(4, 4)) == complete_digraph(4)
    rng = random.Random(3)
    view = random_view(rng, 8, 8, 0.5)
    loops = sum(1 for i, j in view.edges if i == j)
    assert bipartite_to_digraph(view).e == len(view.edges) - loops
    with pytest.raises(ExpansionError):
        bipartite_to_digraph(complete(3, 4))


def _loss_absorbed(m, params):
    # one dropped a_i b_i edge per vertex must not cross the (ν/2)m threshold
    return math.ceil(params.nu * 2 * m) - 1 >= math.ceil(params.nu / 2 * m)


@settings(max_examples=40)
@given(st.integers(0, 10**9))
def test_outexpander_implication(seed):
    rng = random.Random(seed)
    m = rng.randint(4, 12)
    view = random_view(rng, m, m, rng.choice([0.7, 0.9, 1.0]))
    params = ExpansionParams(rng.choice([Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)]), Fraction(1, 5))
    if _loss_absorbed(m, params) and is_bipartite_robust_expander(view, params).holds:
        assert is_robust_outexpander(bipartite_to_digraph(view), params.weakened()).holds


def test_outexpander_implication_needs_large_m():
    params = ExpansionParams(Fraction(1, 20), Fraction(1, 10))
    edges = [(0, 0), (0, 2), (0, 3), (1, 1), (1, 2), (2, 0), (2, 2), (3, 0), (3, 1), (3, 2), (3, 3)]
    view = view_from_edges(4, 4, edges)
    assert not _loss_absorbed(4, params)
    assert is_bipartite_robust_expander(view, params).holds
    assert not is_robust_outexpander(bipartite_to_digraph(view), params.weakened()).holds


def test_alteration_suite():
    assert run_suite("alteration", seed=1, iters=30).ok


def test_refine_two_blocks():
    p, rep = refine_partition_heuristic(complete_digraph_union(2, 4), ExpansionParams(Fraction(1, 20), Fraction(1, 10)))
    assert p.k == 2 and sorted(map(sorted, p.rows)) == [list(range(5)), list(range(5, 10))]
    assert all(v.holds for v in rep.verdicts)


def test_refine_single_block():
    p, rep = refine_partition_heuristic(complete_digraph(6), ExpansionParams(Fraction(1, 20), Fraction(1, 10)))
    assert p.k == 1 and rep.verdicts[0].holds


@pytest.mark.parametrize("seed", range(3))
def test_refine_dense_audit(seed):
    g = random_regular_digraph(14, 10, seed)
    p, rep = refine_partition_heuristic(g, ExpansionParams(Fraction(1, 20), Fraction(1, 10)))
    assert len(rep.verdicts) == p.k
    assert all(v.holds for v in rep.verdicts) or rep.stalled or rep.rounds
    assert sorted(v for r in p.rows for v in r) == list(range(14))

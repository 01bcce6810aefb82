from collections import Counter
from fractions import Fraction

import pytest

from cyclepart.balancing.config import BalancerConfig
from cyclepart.balancing.network import (
    SSTAR,
    TSTAR,
    Accounting,
    CrossStructureError,
    CrossStructures,
    S,
    T,
    build_balancing_network,
    check_cross_structures,
    extract_cross_structures,
    seed_fractional_flow,
)
from cyclepart.digraph import Digraph
from cyclepart.flow import flow_problems
from cyclepart.instances import complete_digraph_union, planted_regular_digraph
from cyclepart.partition import CellPartition, cross_edges


def _structures(k, d, theta, xp=None, xm=None, ms=None):
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    acc = {ij: Accounting(0, 0, 0, Fraction(0), Fraction(0)) for ij in pairs}
    return CrossStructures(
        k, d, Fraction(theta), dict(xp or {}), dict(xm or {}), dict(ms or {}), acc, {ij: True for ij in pairs}
    )


def test_no_cross_edges_gives_empty_structures():
    g = complete_digraph_union(2, 4)
    p = CellPartition.diagonal([range(5), range(5, 10)])
    cs = extract_cross_structures(g, p, BalancerConfig(theta=Fraction(1, 2)), 4)
    assert cs.size() == 0 and not check_cross_structures(cs)


def test_threshold_too_small():
    g = complete_digraph_union(2, 2)
    p = CellPartition.diagonal([range(3), range(3, 6)])
    with pytest.raises(CrossStructureError):
        extract_cross_structures(g, p, BalancerConfig(theta=Fraction(1, 4)), 2)


def test_high_degree_vertex_in_x_plus():
    # vertex 0 sends 4 edges into column class 1; θd = 2
    edges = [(0, 4), (0, 5), (0, 6), (0, 7)]
    g = Digraph(8, edges)
    p = CellPartition.diagonal([range(4), range(4, 8)])
    cs = extract_cross_structures(g, p, BalancerConfig(theta=Fraction(1, 2)), 4, trim=False)
    assert cs.x_plus[(0, 1)] == (0,)
    assert cs.matchings[(0, 1)] == ()


def test_accounting_inequality_by_direct_sum():
    assign = [(0, 0)] * 9 + [(0, 1)] + [(1, 0)] * 2 + [(1, 1)] * 8
    g, p = planted_regular_digraph(assign, 6, 3)
    cfg = BalancerConfig(gamma=Fraction(1, 4), theta=Fraction(1, 3))
    cs = extract_cross_structures(g, p, cfg, 6)
    assert not check_cross_structures(cs)
    mm = 6 * 4 * cfg.theta * 6
    for ij in cs.pairs():
        es = cross_edges(g, p, *ij)
        out = Counter(u for u, _ in es)
        inn = Counter(v for _, v in es)
        rhs = (
            sum(out[v] for v in cs.x_plus[ij])
            + sum(inn[v] for v in cs.x_minus[ij])
            + mm * len(cs.matchings[ij])
        )
        assert len(es) <= rhs + cs.accounting[ij].slack
        assert cs.accounting[ij].e_g == len(es)


def test_empty_network_has_only_terminals():
    p = CellPartition(2, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2, 3]})
    bn = build_balancing_network(Digraph(4, []), p, _structures(2, 2, Fraction(1, 2)))
    assert set(bn.star.nodes) == {S(0), S(1), T(0), T(1), SSTAR, TSTAR}
    caps = {(u, v): c for u, v, c in bn.star.edges}
    assert caps[(SSTAR, S(0))] == 1 and caps[(T(1), TSTAR)] == 1
    assert caps[(SSTAR, S(1))] == 0 and caps[(T(0), S(0))] is None


def test_matching_edge_path():
    p = CellPartition.diagonal([[0, 1], [2, 3]])
    cs = _structures(2, 2, Fraction(1, 2), ms={(0, 1): ((0, 2),)})
    bn = build_balancing_network(Digraph(4, [(0, 2)]), p, cs)
    arcs = {(u, v): c for u, v, c in bn.local.edges}
    assert arcs == {(S(0), ("x+", 0)): 1, (("x+", 0), ("x-", 2)): 1, (("x-", 2), T(1)): 1}
    assert bn.local.node_caps == {("x+", 0): 1, ("x-", 2): 1}


def test_two_part_network_counts():
    # one X+ and one X- path per ordered pair and one matching edge per pair, k = 2
    p = CellPartition.diagonal([[0, 1, 2], [3, 4, 5]])
    cs = _structures(
        2, 2, Fraction(1, 2),
        xp={(0, 1): (0,), (1, 0): (3,)},
        xm={(0, 1): (4,), (1, 0): (1,)},
        ms={(0, 1): ((2, 5),), (1, 0): ((5, 2),)},
    )
    bn = build_balancing_network(Digraph(6, []), p, cs)
    # 4 terminals + x+ {0,3,2,5} + x- {4,1,5,2}
    assert len(bn.local.nodes) == 12
    assert len(bn.local.edges) == 2 * 2 + 2 * 2 + 2 * 3
    assert len(bn.star.edges) == len(bn.local.edges) + 3 * 2


def test_marked_vertex_deletions():
    p = CellPartition(2, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2, 3]})
    cs = _structures(2, 2, Fraction(1, 2), xm={(0, 1): (1,)}, ms={(1, 0): ((3, 0),)})
    bn = build_balancing_network(Digraph(4, []), p, cs, v0=1)
    assert ("x-", 1) not in bn.local.nodes
    assert bn.removed["s_i0_v0_minus"]
    with pytest.raises(CrossStructureError):
        build_balancing_network(Digraph(4, []), p, cs, v0=0)


def test_seed_flow_empty():
    p = CellPartition.diagonal([[0, 1], [2, 3]])
    cs = _structures(2, 2, Fraction(1, 100))
    g = Digraph(4, [])
    bn = build_balancing_network(g, p, cs)
    seed = seed_fractional_flow(bn, g, p, cs)
    assert seed.flow.values == () and seed.deficit == 0


def test_seed_flow_formula_and_deficit():
    g = Digraph(4, [(0, 2), (0, 3)])
    p = CellPartition.diagonal([[0, 1], [2, 3]])
    cs = _structures(2, 4, Fraction(1, 200), xp={(0, 1): (0,)})
    bn = build_balancing_network(g, p, cs)
    seed = seed_fractional_flow(bn, g, p, cs)
    assert seed.amounts == (max(Fraction(1, 2), 6 * 4 * Fraction(1, 200)),)
    assert not flow_problems(bn.local, seed.flow)
    assert seed.deficit < 1

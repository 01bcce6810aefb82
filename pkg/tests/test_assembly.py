import random
import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from cyclepart.assembly import (
    AssemblyError,
    ExtensionError,
    HamiltonCapError,
    component_cycle,
    cover_pipeline,
    extend_matching_bipartite,
    hamilton_cycle_exact,
    identify_and_split,
)
from cyclepart.digraph import complete_digraph, directed_cycle, disjoint_union
from cyclepart.expansion import view_from_edges
from cyclepart.instances import (
    bipartite_regular,
    complete_digraph_union,
    min_cycle_cover_exact,
    random_regular_digraph,
    random_regular_oriented,
    regular_tournament,
)
from cyclepart.partition import CellPartition, PartitionError
from cyclepart.paths import PathSystem, cover_from_successor


def _is_ham(g, cyc):
    return sorted(cyc) == list(range(g.n)) and all(
        g.has_edge(cyc[t], cyc[(t + 1) % len(cyc)]) for t in range(len(cyc))
    )


def test_hamilton_examples():
    assert hamilton_cycle_exact(directed_cycle(6)) == list(range(6))
    assert hamilton_cycle_exact(disjoint_union([directed_cycle(3), directed_cycle(3)])) is None
    t = regular_tournament(7)
    assert _is_ham(t, hamilton_cycle_exact(t))


def test_hamilton_cap_and_budget():
    with pytest.raises(HamiltonCapError):
        hamilton_cycle_exact(complete_digraph(30))
    with pytest.raises(HamiltonCapError):
        hamilton_cycle_exact(random_regular_digraph(20, 3, 1), budget=1)


@settings(max_examples=40)
@given(st.integers(2, 12), st.integers(0, 10**9))
def test_min_cover_one_iff_hamiltonian(n, seed):
    rng = random.Random(seed)
    g = random_regular_digraph(n, rng.randint(1, min(3, n - 1)), seed)
    ham = hamilton_cycle_exact(g)
    count, cover = min_cycle_cover_exact(g)
    assert (count == 1) == (ham is not None)
    if ham is not None:
        assert _is_ham(g, ham)
    cover.validate(g)


def test_identify_complete_part():
    g = complete_digraph(4)
    res = identify_and_split(g, CellPartition.diagonal([range(4)]), 0, {})
    assert isinstance(res, tuple) and _is_ham(g, list(res))


def _closes(q, phi, span):
    succ = dict(q.edges)
    succ.update({w: v for v, w in phi.items()})
    cover = cover_from_successor(succ)
    return len(cover) == 1 and set(cover.cycles[0]) == span


def test_identify_one_pair():
    g = complete_digraph(6)
    p = CellPartition(2, 6, {(0, 0): [0, 1, 2, 3], (0, 1): [4], (1, 0): [5]})
    q = identify_and_split(g, p, 0, {4: 5})
    assert isinstance(q, PathSystem) and len(q.paths) == 1
    assert q.paths[0][0] == 4 and q.paths[0][-1] == 5
    assert _closes(q, {4: 5}, set(range(6)))


def test_identify_two_pairs():
    g = complete_digraph(8)
    p = CellPartition(2, 8, {(0, 0): [0, 1, 2, 3], (0, 1): [4, 5], (1, 0): [6, 7]})
    phi = {4: 6, 5: 7}
    q = identify_and_split(g, p, 0, phi)
    assert len(q.paths) == 2
    assert {(path[0], path[-1]) for path in q.paths} in ({(4, 7), (5, 6)}, {(4, 6), (5, 7)})
    assert _closes(q, phi, set(range(8)))


def test_identify_bad_phi():
    p = CellPartition(2, 6, {(0, 0): [0, 1, 2, 3], (0, 1): [4], (1, 0): [5]})
    with pytest.raises(AssemblyError):
        identify_and_split(complete_digraph(6), p, 0, {})


def test_identify_not_hamiltonian():
    g = complete_digraph_union(2, 2)
    with pytest.raises(AssemblyError) as exc:
        identify_and_split(g, CellPartition.diagonal([range(6)]), 0, {})
    assert exc.value.part == 0


def test_component_singleton():
    cyc = component_cycle(complete_digraph(5), CellPartition.diagonal([range(5)]), [0])
    assert sorted(cyc) == list(range(5))


@pytest.mark.parametrize("seed", range(4))
def test_component_two_parts(seed):
    g = random_regular_digraph(10, 7, seed)
    p = CellPartition(2, 10, {(0, 0): [0, 1, 2, 3], (0, 1): [4], (1, 0): [5], (1, 1): [6, 7, 8, 9]})
    cyc = component_cycle(g, p, [0, 1])
    assert _is_ham(g, list(cyc))


def test_component_unbalanced():
    p = CellPartition(2, 5, {(0, 0): [0, 1], (0, 1): [2], (1, 1): [3, 4]})
    with pytest.raises(PartitionError):
        component_cycle(complete_digraph(5), p, [0, 1])


def test_pipeline_two_complete_blocks():
    g = complete_digraph_union(2, 3)
    res = cover_pipeline(g, CellPartition.diagonal([range(4), range(4, 8)]))
    assert res.report.ok and len(res.cover) == 2 == res.report.bound
    res.cover.validate(g)


def test_pipeline_two_tournaments():
    g = disjoint_union([regular_tournament(5), regular_tournament(5)])
    res = cover_pipeline(g, CellPartition.diagonal([range(5), range(5, 10)]))
    assert res.report.ok and len(res.cover) == 2 == res.report.bound


def test_pipeline_tournament_nine():
    g = regular_tournament(9)
    res = cover_pipeline(g, CellPartition.diagonal([range(9)]))
    assert res.report.ok and len(res.cover) == 1 == min_cycle_cover_exact(g)[0]


def test_pipeline_auto_partition():
    res = cover_pipeline(complete_digraph_union(2, 4))
    assert res.report.ok and len(res.cover) == 2 and "refinement" in res.report.details


def test_pipeline_reports_stage():
    from cyclepart.digraph import Digraph

    res = cover_pipeline(Digraph(3, [(0, 1)]))
    assert res.cover is None and res.report.stage == "partition"
    g = complete_digraph_union(2, 3)
    res = cover_pipeline(g, CellPartition.diagonal([range(3), range(3, 8)]))
    assert res.cover is None and res.report.stage in ("balancing", "hamiltonicity")


@settings(max_examples=15)
@given(st.integers(0, 10**9))
def test_pipeline_oriented_blocks(seed):
    rng = random.Random(seed)
    d = rng.randint(2, 3)
    sizes = [rng.randint(2 * d + 1, 2 * d + 4) for _ in range(rng.randint(1, 2))]
    g = disjoint_union([random_regular_oriented(s, d, rng.randrange(2**31)) for s in sizes])
    starts = [sum(sizes[:t]) for t in range(len(sizes))]
    p = CellPartition.diagonal([range(s, s + z) for s, z in zip(starts, sizes)])
    res = cover_pipeline(g, p)
    if res.report.ok:
        res.cover.validate(g)
        assert len(res.cover) == res.report.components <= res.report.bound
        if g.n <= 16:
            assert min_cycle_cover_exact(g)[0] <= len(res.cover)
    else:
        assert res.cover is None and res.report.message


def _contains(cover, matching, m):
    edges = set(cover.edges)
    return all((a, m + b) in edges or (m + b, a) in edges for a, b in matching)


def test_extend_k44_minus_matching():
    bg = view_from_edges(4, 4, [(i, j) for i in range(4) for j in range(4) if i != j])
    m = [(i, (i + 1) % 4) for i in range(4)]
    res = extend_matching_bipartite(bg, m)
    assert len(res.cover) == 1 and _contains(res.cover, m, 4)
    assert sorted(res.cover.cycles[0]) == list(range(8))


def test_extend_two_k33():
    bg = bipartite_regular(6, 3, 0, blocks=2)
    m = sorted((a, b) for a, b in bg.edges if a % 3 == b % 3)
    assert len(m) == 6
    res = extend_matching_bipartite(bg, m)
    assert len(res.cover) == 2 == res.bound and _contains(res.cover, m, 6)


def test_extend_errors():
    pm = view_from_edges(3, 3, [(i, i) for i in range(3)])
    with pytest.raises(ExtensionError):
        extend_matching_bipartite(pm, [(i, i) for i in range(3)])
    bg = view_from_edges(4, 4, [(i, j) for i in range(4) for j in range(4) if i != j])
    with pytest.raises(ExtensionError):
        extend_matching_bipartite(bg, [(0, 1), (1, 2)])
    with pytest.raises(ExtensionError):
        extend_matching_bipartite(bg, [(i, i) for i in range(4)])


@settings(max_examples=20)
@given(st.integers(2, 8), st.integers(0, 10**9), st.data())
def test_extend_random(m, seed, data):
    d = data.draw(st.integers(2, m))
    bg = bipartite_regular(m, d, seed)
    h = nx.Graph()
    h.add_nodes_from(range(2 * m))
    h.add_edges_from((a, m + b) for a, b in bg.edges)
    mate = nx.bipartite.hopcroft_karp_matching(h, top_nodes=range(m))
    matching = [(a, mate[a] - m) for a in range(m)]
    res = extend_matching_bipartite(bg, matching)
    assert _contains(res.cover, matching, m)
    assert res.method == "exact" and len(res.cover) <= res.bound
    assert sorted(v for c in res.cover.cycles for v in c) == list(range(2 * m))

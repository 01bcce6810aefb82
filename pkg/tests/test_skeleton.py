import random

import pytest
from hypothesis import given, strategies as st

from cyclepart.balancing.skeleton import (
    Multidigraph,
    SkeletonError,
    acyclic_cross_skeleton,
    dag_path_decomposition,
)
from cyclepart.digraph import Digraph, directed_cycle
from cyclepart.instances import random_regular_digraph
from cyclepart.oracles import dag_path_count
from cyclepart.partition import CellPartition, cross_counts, regular_balance_identity
from cyclepart.props import random_dag, random_partition


def test_path_and_star():
    assert dag_path_decomposition(Digraph(3, [(0, 1), (1, 2)])) == [[0, 1, 2]]
    assert len(dag_path_decomposition(Digraph(4, [(0, 1), (0, 2), (0, 3)]))) == 3


def test_cycle_rejected():
    with pytest.raises(SkeletonError):
        dag_path_decomposition(directed_cycle(3))


def test_balanced_skeleton_empty():
    g = random_regular_digraph(8, 3, 1)
    p = CellPartition.diagonal([range(4), range(4, 8)])
    sk = acyclic_cross_skeleton(g, p)
    assert sk.bound == 0 and sk.subgraph.e == 0


def test_two_part_imbalance():
    g = random_regular_digraph(6, 2, 4)
    p = CellPartition(2, 6, {(0, 0): [0, 1], (0, 1): [2], (1, 1): [3, 4, 5]})
    sk = acyclic_cross_skeleton(g, p)
    assert sk.bound == 2 and sk.subgraph.e <= 2
    m = cross_counts(sk.subgraph, p)
    a, b = sk.order
    assert m[b][a] == 0 and m[0][0] == m[1][1] == 0
    assert m[0][1] - m[1][0] == 2 * p.imbalance()[0]


def test_irregular_rejected():
    g = Digraph(3, [(0, 1)])
    with pytest.raises(SkeletonError):
        acyclic_cross_skeleton(g, CellPartition.diagonal([[0, 1, 2]]))


@given(st.integers(0, 10**9))
def test_dag_count_formula(seed):
    h = random_dag(random.Random(seed))
    paths = dag_path_decomposition(h)
    assert len(paths) == dag_path_count(h.n, h.edges)
    arcs = sorted((a, b) for path in paths for a, b in zip(path, path[1:]))
    assert arcs == h.sorted_edges()


@given(st.integers(0, 10**9))
def test_multidigraph_decomposition(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 5)
    order = list(range(k))
    rng.shuffle(order)
    mult = {}
    for a in range(k):
        for b in range(a + 1, k):
            if rng.random() < 0.5:
                mult[(order[a], order[b])] = rng.randint(1, 3)
    h = Multidigraph(k)
    h.mult.update(mult)
    paths = dag_path_decomposition(h)
    assert len(paths) == dag_path_count(k, h.edge_list())
    assert sum(len(p) - 1 for p in paths) == h.e


@given(st.integers(3, 20), st.integers(0, 10**9), st.integers(1, 4))
def test_skeleton_identity(n, seed, k):
    rng = random.Random(seed)
    d = rng.randint(1, n - 1)
    g = random_regular_digraph(n, d, seed)
    p = random_partition(rng, n, k)
    sk = acyclic_cross_skeleton(g, p)
    assert sk.subgraph.e <= sk.bound
    assert sk.subgraph.edges <= g.edges
    m = cross_counts(sk.subgraph, p)
    pos = {part: t for t, part in enumerate(sk.order)}
    for i in range(k):
        assert m[i][i] == 0
        for j in range(k):
            if m[i][j]:
                assert pos[i] < pos[j]
    imb = p.imbalance()
    for i in range(k):
        assert sum(m[i]) - sum(m[j][i] for j in range(k)) == d * imb[i]
    assert not any(regular_balance_identity(g, p))

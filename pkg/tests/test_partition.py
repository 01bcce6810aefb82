import pytest
from hypothesis import given, strategies as st

from cyclepart.digraph import Digraph, directed_cycle
from cyclepart.instances import random_regular_digraph
from cyclepart.oracles import balance_residuals_direct
from cyclepart.partition import (
    CellPartition,
    PartitionError,
    b_graph,
    component_vertices,
    cross_counts,
    cross_subgraph,
    is_balanced,
    merge_to_diagonal,
    parse_partition,
    regular_balance_identity,
    skeleton,
)

from conftest import digraphs, partitions


def test_balanced_examples():
    assert is_balanced(CellPartition.diagonal([[0, 1], [2, 3]]))
    p = CellPartition(2, 5, {(0, 0): [0, 1], (0, 1): [2], (1, 1): [3, 4]})
    assert not is_balanced(p)
    assert p.imbalance() == [1, -1]


def test_skeleton_examples():
    assert not skeleton(CellPartition.diagonal([[0], [1], [2]])).edges
    p = CellPartition(3, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2], (2, 2): [3]})
    sk = skeleton(p)
    assert sk.edges == {(0, 1)}
    assert sk.components() == [[0, 1], [2]]


def test_cross_subgraph_examples():
    g = Digraph(2, [(0, 1), (1, 0)])
    p = CellPartition.diagonal([[0], [1]])
    assert cross_subgraph(g, p, 0, 1).edges == {(0, 1)}
    assert cross_subgraph(g, p, 1, 0).edges == {(1, 0)}
    q = CellPartition.diagonal([[0, 1], []])
    assert not cross_subgraph(Digraph(2, []), q, 0, 1).edges
    with pytest.raises(IndexError):
        cross_subgraph(g, p, 0, 2)


def test_balance_identity_four_cycle():
    g = directed_cycle(4)
    p = CellPartition(2, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2], (1, 0): [3]})
    assert regular_balance_identity(g, p) == [0, 0]
    with pytest.raises(PartitionError):
        regular_balance_identity(Digraph(3, [(0, 1)]), CellPartition.diagonal([[0, 1, 2]]))


def test_merge_examples():
    p = CellPartition.diagonal([[0, 1], [2, 3]])
    q, rep = merge_to_diagonal(directed_cycle(4), p)
    assert q == p and rep.symmetric_difference == [0, 0]
    p = CellPartition(2, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2, 3]})
    q, rep = merge_to_diagonal(directed_cycle(4), p)
    assert q.cells[0][0] == (0, 1) and rep.symmetric_difference[0] == 1


def test_text_and_json_round_trip():
    p = CellPartition(2, 5, {(0, 0): [0, 1], (0, 1): [2], (1, 1): [3, 4]})
    assert parse_partition(p.to_text(), 5) == p
    assert CellPartition.from_json(p.to_json()) == p
    with pytest.raises(PartitionError):
        CellPartition(1, 2, {(0, 0): [0]})
    with pytest.raises(PartitionError):
        CellPartition(1, 2, {(0, 0): [0, 1], (0, 1): [1]})


@given(st.data())
def test_rows_and_columns_partition(data):
    n = data.draw(st.integers(1, 15))
    p = data.draw(partitions(n))
    assert sum(len(r) for r in p.rows) == sum(len(c) for c in p.cols) == n
    assert sum(p.imbalance()) == 0
    for i in range(p.k):
        for j in range(p.k):
            assert set(p.cells[i][j]) == p.rows[i] & p.cols[j]
    assert is_balanced(p) == all(len(p.rows[i]) == len(p.cols[i]) for i in range(p.k))
    brute = {(min(i, j), max(i, j)) for i in range(p.k) for j in range(p.k) if i != j and p.cells[i][j]}
    assert skeleton(p).edges == frozenset(brute)
    comps = skeleton(p).components()
    blocks = [component_vertices(p, c) for c in comps]
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            assert not blocks[a] & blocks[b]


@given(digraphs(max_n=9), st.data())
def test_cross_counts_sum_to_degrees(g, data):
    p = data.draw(partitions(g.n))
    m = cross_counts(g, p)
    for i in range(p.k):
        assert sum(m[i]) == sum(len(g.out_adj[v]) for v in p.rows[i])
        assert sum(m[j][i] for j in range(p.k)) == sum(len(g.in_adj[v]) for v in p.cols[i])
    diag = sum(m[i][i] for i in range(p.k))
    assert b_graph(g, p).e == g.e - diag


@given(st.integers(2, 20), st.integers(0, 10**6), st.data())
def test_regular_balance_identity_is_zero(n, seed, data):
    d = data.draw(st.integers(1, n - 1))
    g = random_regular_digraph(n, d, seed)
    p = data.draw(partitions(n))
    assert regular_balance_identity(g, p) == [0] * p.k
    assert balance_residuals_direct(g, p, d) == [0] * p.k


@given(st.integers(2, 14), st.integers(0, 10**6), st.data())
def test_merge_is_diagonal(n, seed, data):
    g = random_regular_digraph(n, 1, seed)
    p = data.draw(partitions(n))
    q, _ = merge_to_diagonal(g, p)
    assert is_balanced(q) and not skeleton(q).edges
    assert all(q.rows[i] == p.rows[i] for i in range(p.k))

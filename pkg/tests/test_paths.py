import random

import pytest
from hypothesis import given, strategies as st

from cyclepart.digraph import Digraph, complete_digraph, directed_cycle
from cyclepart.instances import one_factor_exists, random_regular_digraph
from cyclepart.oracles import count_cycles_of_successor
from cyclepart.partition import CellPartition, is_balanced
from cyclepart.paths import (
    CoverError,
    CycleCover,
    PathSystem,
    PathSystemError,
    contains_paths,
    contract,
    contraction_degree_report,
    is_nontrivial,
    is_p_balanced,
    lift_one_factor,
)
from cyclepart.props import balanced_partition_for, random_path_system



def test_path_system_rules():
    with pytest.raises(PathSystemError):
        PathSystem(((0,),))
    with pytest.raises(PathSystemError):
        PathSystem(((0, 1), (1, 2)))
    with pytest.raises(PathSystemError):
        PathSystem.from_edges([(0, 1), (1, 0)])
    q = PathSystem.from_edges([(2, 3), (0, 1), (1, 4)])
    assert q.paths == ((0, 1, 4), (2, 3)) and q.e == 3


def test_p_balanced_examples():
    p = CellPartition.diagonal([[0, 1], [2, 3]])
    assert is_p_balanced(PathSystem(()), p)
    p = CellPartition(2, 4, {(0, 0): [0], (0, 1): [1], (1, 1): [2, 3]})
    assert p.imbalance() == [1, -1]
    assert is_p_balanced(PathSystem(((1, 2),)), p)
    assert not is_p_balanced(PathSystem(()), p)


def test_nontrivial_examples():
    p = CellPartition.diagonal([[0, 1, 2], [3, 4, 5]])
    assert not is_nontrivial(PathSystem(((0, 1), (3, 4))), p)
    assert is_nontrivial(PathSystem(((3, 0),)), p)
    q = CellPartition(2, 3, {(0, 0): [0], (0, 1): [1], (1, 1): [2]})
    assert is_nontrivial(PathSystem(()), q)
    assert not is_nontrivial(PathSystem(((1, 2),)), q)
    assert is_nontrivial(PathSystem(((0, 1, 2),)), q)


def test_contract_examples():
    tri = directed_cycle(3)
    c = contract(tri, None, PathSystem(((0, 1),)))
    assert c.graph.n == 2 and c.graph.edges == {(0, 1), (1, 0)}
    assert c.lift == ((2,), (0, 1))
    f = CycleCover(((0, 1),))
    lifted = lift_one_factor(f, c)
    assert len(lifted) == 1 and set(lifted.cycles[0]) == {0, 1, 2}
    assert contains_paths(lifted, PathSystem(((0, 1),)))
    ident = contract(tri, None, PathSystem(()))
    assert ident.graph == tri
    p = CellPartition(2, 4, {(0, 1): [0], (1, 0): [1], (0, 0): [2], (1, 1): [3]})
    g = Digraph(4, [(0, 1), (1, 0)])
    c = contract(g, p, PathSystem(((0, 1),)))
    assert c.partition.where[-1] == (1, 1)
    with pytest.raises(PathSystemError):
        contract(tri, None, PathSystem(((1, 0),)))


def test_cover_validator():
    c = CycleCover(((0, 1, 2),))
    assert not c.problems(directed_cycle(3))
    assert c.problems(directed_cycle(4))
    with pytest.raises(CoverError):
        CycleCover(((0, 1), (1, 2))).validate(complete_digraph(3))
    assert "->" in c.to_dot(directed_cycle(3))


def test_degree_report_examples():
    g = complete_digraph(10)
    p = CellPartition.diagonal([range(5), range(5, 10)])
    rep = contraction_degree_report(g, p, PathSystem(()))
    assert rep.before == rep.after
    rep = contraction_degree_report(g, p, PathSystem(((0, 1),)))
    assert all(a >= b for a, b in zip(rep.after, rep.bound))
    with pytest.raises(PathSystemError):
        contraction_degree_report(g, p, PathSystem(((0, 1, 2, 3, 4, 5),)))


@given(st.integers(4, 14), st.integers(0, 10**6), st.integers(1, 4))
def test_contraction_laws(n, seed, k):
    rng = random.Random(seed)
    g = random_regular_digraph(n, rng.randint(n // 2, n - 1), seed)
    q = random_path_system(rng, g)
    p = balanced_partition_for(rng, g, q, k)
    assert is_p_balanced(q, p)
    c = contract(g, p, q)
    assert is_balanced(c.partition)
    assert c.graph.n == g.n - q.e
    f = one_factor_exists(c.graph)
    assert f is not None
    lifted = lift_one_factor(f, c)
    lifted.validate(g)
    assert len(lifted) == len(f) == count_cycles_of_successor(dict(lifted.edges))
    assert contains_paths(lifted, q)


@given(st.integers(4, 12), st.integers(0, 10**6))
def test_contraction_order_independent(n, seed):
    rng = random.Random(seed)
    g = random_regular_digraph(n, rng.randint(1, n - 1), seed)
    q = random_path_system(rng, g)
    paths = list(q.paths)
    rng.shuffle(paths)
    a = contract(g, None, q)
    b = contract(g, None, PathSystem(tuple(paths)))
    relabel = {a.lift.index(x): b.lift.index(x) for x in a.lift}
    assert {(relabel[u], relabel[v]) for u, v in a.graph.edges} == set(b.graph.edges)


@given(st.integers(6, 12), st.integers(0, 10**6), st.integers(1, 3))
def test_contraction_degree_bound(n, seed, k):
    rng = random.Random(seed)
    g = random_regular_digraph(n, n - 2, seed)
    p = CellPartition.from_assignment(k, [(rng.randrange(k), rng.randrange(k)) for _ in range(n)])
    v = rng.randrange(n)
    q = PathSystem(((v, g.out_adj[v][0]),))
    if all(1 < len(p.rows[i]) and 1 < len(p.cols[i]) for i in range(k)):
        rep = contraction_degree_report(g, p, q)
        for a, b in zip(rep.after, rep.bound):
            assert a is None or b is None or a >= b

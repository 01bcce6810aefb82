"""Randomised invariant suites shared by the CLI and the acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable

import networkx as nx

from .balancing.skeleton import dag_path_decomposition
from .balancing.vizing import Multigraph, coloring_problems, vizing_matching
from .digraph import Digraph, disjoint_union, is_d_regular
from .expansion import ExpansionParams, alter_view, is_bipartite_robust_expander, view_from_edges
from .flow import FlowNetwork, flow_problems, max_flow_integer
from .instances import one_factor_exists, random_regular_digraph, random_regular_oriented
from .oracles import balance_residuals_direct, brute_force_min_cut, dag_path_count
from .partition import CellPartition, is_balanced, regular_balance_identity
from .paths import PathSystem, contains_paths, contract, is_p_balanced, lift_one_factor


@dataclass
class SuiteResult:
    suite: str
    seed: int
    iters: int
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "iters": self.iters,
            "checked": self.checked,
            "skipped": self.skipped,
            "verdict": "PASS" if self.ok else "FAIL",
            "failures": self.failures[:20],
        }


def random_network(rng: random.Random, max_nodes: int = 10, max_cap: int = 9) -> FlowNetwork:
    n = rng.randint(2, max_nodes)
    nodes = tuple(range(n))
    edges = []
    for u in range(n - 1):
        for v in range(1, n):
            if u != v and rng.random() < 0.35:
                edges.append((u, v, rng.randint(0, max_cap)))
    return FlowNetwork(nodes, tuple(edges), (0,), (n - 1,))


def random_partition(rng: random.Random, n: int, k: int, diag_bias: float = 0.5) -> CellPartition:
    assign = []
    for _ in range(n):
        i = rng.randrange(k)
        assign.append((i, i) if rng.random() < diag_bias else (i, rng.randrange(k)))
    return CellPartition.from_assignment(k, assign)


def random_path_system(rng: random.Random, g: Digraph) -> PathSystem:
    """Proper sub-paths of the cycles of a 1-factor, so the contraction keeps a 1-factor."""
    f = one_factor_exists(g)
    paths = []
    for cyc in f.cycles if f else ():
        if len(cyc) < 3 or rng.random() < 0.3:
            continue
        length = rng.randint(2, len(cyc) - 1)
        s = rng.randrange(len(cyc))
        paths.append(tuple(cyc[(s + t) % len(cyc)] for t in range(length)))
    return PathSystem(tuple(paths))


def balanced_partition_for(rng: random.Random, g: Digraph, q: PathSystem, k: int) -> CellPartition:
    """A cell partition for which q is P-balanced, built from a balanced contracted assignment.

    Contracted vertices get rows at random and columns by a permutation of the
    rows; each path then pins its end's row and its start's column only.
    """
    used = q.vertices
    keep = [v for v in range(g.n) if v not in used]
    m = len(keep) + len(q.paths)
    rows = [rng.randrange(k) for _ in range(m)]
    cols = rows[:]
    rng.shuffle(cols)
    assign: list[tuple[int, int] | None] = [None] * g.n
    for t, v in enumerate(keep):
        assign[v] = (rows[t], cols[t])
    for s, path in enumerate(q.paths):
        t = len(keep) + s
        for v in path:
            assign[v] = (rng.randrange(k), rng.randrange(k))
        assign[path[-1]] = (rows[t], assign[path[-1]][1])
        assign[path[0]] = (assign[path[0]][0], cols[t])
    return CellPartition.from_assignment(k, assign)


def suite_flow_duality(rng: random.Random, res: SuiteResult) -> None:
    net = random_network(rng)
    f, cut = max_flow_integer(net)
    errs = flow_problems(net, f)
    val = f.value(net)
    brute = brute_force_min_cut(net)
    if errs or val != brute or cut.capacity != val:
        res.failures.append({"network": net.to_json(), "flow": str(val), "brute": brute, "errors": errs})


def suite_balance_identity(rng: random.Random, res: SuiteResult) -> None:
    n = rng.randint(2, 30)
    d = rng.randint(1, n - 1)
    g = random_regular_digraph(n, d, rng.randrange(2**31))
    p = random_partition(rng, n, rng.randint(1, 4))
    a = regular_balance_identity(g, p)
    b = balance_residuals_direct(g, p, d)
    if any(a) or any(b):
        res.failures.append({"n": n, "d": d, "residuals": a, "direct": b})


def suite_contraction(rng: random.Random, res: SuiteResult) -> None:
    n = rng.randint(4, 14)
    d = rng.randint(max(1, n // 2), n - 1)
    g = random_regular_digraph(n, d, rng.randrange(2**31))
    q = random_path_system(rng, g)
    p = balanced_partition_for(rng, g, q, rng.randint(1, 4))
    c = contract(g, p, q)
    fail = {}
    if not is_p_balanced(q, p):
        fail["p_balanced"] = False
    if not is_balanced(c.partition):
        fail["contracted_balanced"] = c.partition.imbalance()
    f = one_factor_exists(c.graph) if c.graph.n >= 2 else None
    if f is None:
        res.skipped += 1
    else:
        lifted = lift_one_factor(f, c)
        if len(lifted) != len(f) or not contains_paths(lifted, q) or lifted.problems(g):
            fail["lift"] = lifted.problems(g)
    if fail:
        res.failures.append({"edges": sorted(g.edges), "paths": q.to_json(), "partition": p.to_json(), **fail})


def random_dag(rng: random.Random, max_nodes: int = 12) -> Digraph:
    n = rng.randint(1, max_nodes)
    order = list(range(n))
    rng.shuffle(order)
    arcs = [(order[a], order[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.3]
    return Digraph(n, arcs)


def suite_dag_decomposition(rng: random.Random, res: SuiteResult) -> None:
    h = random_dag(rng)
    paths = dag_path_decomposition(h)
    got = sorted((a, b) for path in paths for a, b in zip(path, path[1:]))
    if len(paths) != dag_path_count(h.n, h.edges) or got != h.sorted_edges():
        res.failures.append({"edges": h.sorted_edges(), "paths": paths})


def random_multigraph(rng: random.Random, max_nodes: int = 10, max_mult: int = 3) -> Multigraph:
    m = rng.randint(2, max_nodes)
    edges = []
    for u in range(m):
        for v in range(u + 1, m):
            if rng.random() < 0.4:
                edges += [(u, v)] * rng.randint(1, max_mult)
    return Multigraph(m, tuple(edges))


def suite_vizing(rng: random.Random, res: SuiteResult) -> None:
    h = random_multigraph(rng)
    r = vizing_matching(h)
    errs = coloring_problems(h, r.colours, r.palette)
    bound = h.max_degree + h.max_multiplicity
    used = {h.edges[e][0] for e in r.matching} | {h.edges[e][1] for e in r.matching}
    if r.palette > bound:
        errs.append(f"palette {r.palette} > {bound}")
    if len(used) != 2 * len(r.matching):
        errs.append("largest class is not a matching")
    if h.edges and len(r.matching) * bound < len(h.edges):
        errs.append(f"matching {len(r.matching)} < e/(Δ+μ) = {len(h.edges)}/{bound}")
    if errs:
        res.failures.append({"m": h.m, "edges": list(h.edges), "errors": errs})


def suite_oriented_component_bound(rng: random.Random, res: SuiteResult) -> None:
    d = rng.randint(1, 3)
    blocks = [random_regular_oriented(rng.randint(2 * d + 1, 2 * d + 5), d, rng.randrange(2**31))
              for _ in range(rng.randint(1, 3))]
    g = disjoint_union(blocks)
    und = nx.Graph()
    und.add_nodes_from(range(g.n))
    und.add_edges_from(g.edges)
    comps = nx.number_connected_components(und)
    if is_d_regular(g) != d or comps * (2 * d + 1) > g.n:
        res.failures.append({"n": g.n, "d": d, "components": comps})


ALTERATION_PARAMS = ExpansionParams(Fraction(1, 4), Fraction(1, 4))


def suite_alteration(rng: random.Random, res: SuiteResult, a: int = 16) -> None:
    """Perturb an expanding G[A ∪ B] by at most ν|A|/4 vertices and recheck at (ν/2, 2τ).

    Robust neighbourhoods are measured against |A| (and |A'| after the change).
    Hosts are complete bipartite minus one or two random perfect matchings and
    a few random edges, on a+2 vertices per side so that additions are possible.
    """
    m = a + 2
    miss = set()
    for _ in range(rng.randint(1, 2)):
        perm = list(range(m))
        rng.shuffle(perm)
        miss |= {(i, perm[i]) for i in range(m)}
    miss |= {(rng.randrange(m), rng.randrange(m)) for _ in range(rng.randint(0, 4))}
    host = view_from_edges(m, m, [(i, j) for i in range(m) for j in range(m) if (i, j) not in miss])
    left, right = list(range(m)), list(range(m))
    rng.shuffle(left)
    rng.shuffle(right)
    A, B = left[:a], right[:a]
    params = ALTERATION_PARAMS
    if not is_bipartite_robust_expander(alter_view(host, A, B), params, scale=a).holds:
        res.skipped += 1
        return
    budget = int(params.nu * a / 4)
    A2, B2 = set(A), set(B)
    for _ in range(rng.randint(0, budget)):
        side, spare = (A2, left[a:]) if rng.random() < 0.5 else (B2, right[a:])
        if rng.random() < 0.5:
            side.discard(rng.choice(sorted(side)))
        else:
            side.add(rng.choice(spare))
    v = is_bipartite_robust_expander(alter_view(host, sorted(A2), sorted(B2)), params.weakened(), scale=len(A2))
    if not v.holds:
        res.failures.append({"missing": sorted(miss), "A": sorted(A), "B": sorted(B),
                             "A2": sorted(A2), "B2": sorted(B2), "witness": v.witness})


SUITES: dict[str, Callable[[random.Random, SuiteResult], None]] = {
    "balance-identity": suite_balance_identity,
    "contraction": suite_contraction,
    "flow-duality": suite_flow_duality,
    "vizing": suite_vizing,
    "dag-decomposition": suite_dag_decomposition,
    "oriented-component-bound": suite_oriented_component_bound,
    "alteration": suite_alteration,
}


def run_suite(name: str, seed: int = 0, iters: int = 100) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    rng = random.Random(seed)
    res = SuiteResult(name, seed, iters)
    for _ in range(iters):
        SUITES[name](rng, res)
        res.checked += 1
    return res

"""Extremal and random instance families plus exact cycle-cover oracles."""

from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass, field
from typing import Sequence

import networkx as nx

from .digraph import BipartiteView, Digraph, complete_digraph, disjoint_union, is_d_regular, is_oriented
from .partition import CellPartition
from .paths import CycleCover, cover_from_successor

FAMILIES = (
    "regular-tournament",
    "two-tournaments",
    "clique-minus-matching-oriented",
    "clique-minus-hamilton-oriented",
    "complete-digraph-union",
    "random-regular-digraph",
    "random-regular-oriented",
    "bipartite-regular",
)


class InfeasibleInstance(ValueError):
    pass


class SolverCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class InstanceSpec:
    """``n`` is the order (or block size for two-tournaments / bipartite side size), ``blocks`` the block count."""

    family: str
    n: int | None = None
    d: int | None = None
    blocks: int | None = None
    seed: int = 0
    sizes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InfeasibleInstance(f"unknown family {self.family!r}")
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    def to_json(self) -> dict:
        out = asdict(self)
        out["sizes"] = list(self.sizes)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "InstanceSpec":
        return cls(**{**data, "sizes": tuple(data.get("sizes", ()))})


def regular_tournament(n: int) -> Digraph:
    """Rotational tournament i -> i+1, ..., i+(n-1)/2 mod n."""
    if n < 1 or n % 2 == 0:
        raise InfeasibleInstance(f"regular tournament needs odd order, got {n}")
    m = (n - 1) // 2
    return Digraph(n, [(i, (i + t) % n) for i in range(n) for t in range(1, m + 1)])


def _orient_eulerian(n: int, und_edges: Sequence[tuple[int, int]], seed: int | None = None) -> Digraph:
    """Orient an even-degree graph along Euler circuits of its components."""
    h = nx.MultiGraph()
    h.add_nodes_from(range(n))
    h.add_edges_from(und_edges)
    if any(deg % 2 for _, deg in h.degree()):
        raise InfeasibleInstance("underlying graph has a vertex of odd degree")
    arcs = []
    for comp in sorted(nx.connected_components(h), key=min):
        if len(comp) < 2:
            continue
        sub = h.subgraph(comp)
        arcs.extend((u, v) for u, v in nx.eulerian_circuit(sub, source=min(comp)))
    g = Digraph(n, arcs)
    if seed is not None:
        g = _reverse_random_cycles(g, random.Random(seed), 4 * max(1, len(arcs)))
    return g


def _reverse_random_cycles(g: Digraph, rng: random.Random, rounds: int) -> Digraph:
    """Reverse random directed cycles; in/out degrees and orientedness are preserved."""
    out = {v: set(g.out_adj[v]) for v in range(g.n)}
    for _ in range(rounds):
        v = rng.randrange(g.n)
        if not out[v]:
            continue
        walk, pos = [v], {v: 0}
        while True:
            w = rng.choice(sorted(out[walk[-1]]))
            if w in pos:
                cyc = walk[pos[w]:] + [w]
                break
            pos[w] = len(walk)
            walk.append(w)
        for a, b in zip(cyc, cyc[1:]):
            out[a].discard(b)
        for a, b in zip(cyc, cyc[1:]):
            out[b].add(a)
    return Digraph(g.n, [(u, v) for u in out for v in out[u]])


def clique_minus_matching_oriented(n: int, seed: int | None = None) -> Digraph:
    if n < 4 or n % 2:
        raise InfeasibleInstance(f"clique minus a perfect matching needs even n >= 4, got {n}")
    und = [(u, v) for u, v in itertools.combinations(range(n), 2) if not (u % 2 == 0 and v == u + 1)]
    return _orient_eulerian(n, und, seed)


def clique_minus_hamilton_oriented(n: int, seed: int | None = None) -> Digraph:
    if n < 5 or n % 2 == 0:
        raise InfeasibleInstance(f"clique minus a Hamilton cycle needs odd n >= 5, got {n}")
    ham = {frozenset((i, (i + 1) % n)) for i in range(n)}
    und = [(u, v) for u, v in itertools.combinations(range(n), 2) if frozenset((u, v)) not in ham]
    return _orient_eulerian(n, und, seed)


def complete_digraph_union(blocks: int, d: int) -> Digraph:
    if blocks < 1 or d < 1:
        raise InfeasibleInstance("need blocks >= 1 and d >= 1")
    return disjoint_union([complete_digraph(d + 1)] * blocks)


def jackson_extremal(n: int) -> Digraph:
    """Disconnected regular oriented graph on n vertices with the largest degree of its residue class mod 4."""
    r = n % 4
    if r == 2:
        return disjoint_union([regular_tournament(n // 2)] * 2)
    if r == 0:
        return disjoint_union([clique_minus_matching_oriented(n // 2)] * 2)
    if r == 3:
        return disjoint_union([regular_tournament((n - 1) // 2), clique_minus_matching_oriented((n + 1) // 2)])
    return disjoint_union([clique_minus_matching_oriented((n - 1) // 2), clique_minus_hamilton_oriented((n + 1) // 2)])


def random_regular_digraph(n: int, d: int, seed: int = 0, oriented: bool = False) -> Digraph:
    """Circulant v -> v+1..v+d, then random head switches that keep the digraph simple."""
    if oriented:
        return random_regular_oriented(n, d, seed)
    if not 0 <= d < n:
        raise InfeasibleInstance(f"need 0 <= d < n, got n={n}, d={d}")
    rng = random.Random(seed)
    edges = [(v, (v + t) % n) for v in range(n) for t in range(1, d + 1)]
    present = set(edges)
    if d == 0 or d == n - 1:
        return Digraph(n, edges)
    for _ in range(10 * len(edges)):
        a, b = rng.sample(range(len(edges)), 2)
        (u1, v1), (u2, v2) = edges[a], edges[b]
        if u1 == v2 or u2 == v1 or (u1, v2) in present or (u2, v1) in present:
            continue
        present -= {(u1, v1), (u2, v2)}
        present |= {(u1, v2), (u2, v1)}
        edges[a], edges[b] = (u1, v2), (u2, v1)
    return Digraph(n, edges)


def random_regular_oriented(n: int, d: int, seed: int = 0) -> Digraph:
    """Random 2d-regular graph, Euler-circuit orientation, then random cycle reversals."""
    if d < 0 or 2 * d > n - 1:
        raise InfeasibleInstance(f"oriented {d}-regular needs n >= 2d+1, got n={n}")
    if d == 0:
        return Digraph(n, [])
    rng = random.Random(seed)
    if 2 * d > (n - 1) / 2:
        comp_deg = n - 1 - 2 * d
        if comp_deg == 0:
            comp = nx.empty_graph(n)
        else:
            comp = nx.random_regular_graph(comp_deg, n, seed=rng.randrange(2**31))
        und = nx.complement(comp)
    else:
        und = nx.random_regular_graph(2 * d, n, seed=rng.randrange(2**31))
    perm = list(range(n))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for u, v in und.edges()]
    return _orient_eulerian(n, edges, rng.randrange(2**31))


def bipartite_regular(m: int, d: int, seed: int = 0, blocks: int | None = None) -> BipartiteView:
    """d-regular bipartite graph with sides of size m; ``blocks`` gives a disjoint union of K_{d,d}."""
    if blocks is not None:
        if m != blocks * d:
            raise InfeasibleInstance("block union of K_{d,d} needs m = blocks * d")
        edges = [(b * d + i, b * d + j) for b in range(blocks) for i in range(d) for j in range(d)]
        return BipartiteView(tuple(range(m)), tuple(range(m, 2 * m)), frozenset(edges))
    if not 1 <= d <= m:
        raise InfeasibleInstance(f"need 1 <= d <= m, got m={m}, d={d}")
    rng = random.Random(seed)
    edges = [(i, (i + t) % m) for i in range(m) for t in range(d)]
    present = set(edges)
    for _ in range(10 * len(edges)):
        a, b = rng.sample(range(len(edges)), 2) if len(edges) > 1 else (0, 0)
        (u1, v1), (u2, v2) = edges[a], edges[b]
        if (u1, v2) in present or (u2, v1) in present:
            continue
        present -= {(u1, v1), (u2, v2)}
        present |= {(u1, v2), (u2, v1)}
        edges[a], edges[b] = (u1, v2), (u2, v1)
    return BipartiteView(tuple(range(m)), tuple(range(m, 2 * m)), frozenset(edges))


def bipartite_as_digraph(view: BipartiteView) -> Digraph:
    """Arcs left -> right on vertices 0..2m-1; used only for the edge-list file format."""
    m = len(view.left)
    return Digraph(m + len(view.right), [(i, m + j) for i, j in view.edges])


def generate(spec: InstanceSpec) -> Digraph:
    f, n, d = spec.family, spec.n, spec.d
    if f == "regular-tournament":
        return regular_tournament(_need(n, "n"))
    if f == "two-tournaments":
        sizes = spec.sizes or (_need(n, "n"),) * 2
        if len(sizes) != 2 or sizes[0] != sizes[1]:
            raise InfeasibleInstance(f"two-tournaments needs two equal odd sizes, got {sizes}")
        return disjoint_union([regular_tournament(s) for s in sizes])
    if f == "clique-minus-matching-oriented":
        return clique_minus_matching_oriented(_need(n, "n"))
    if f == "clique-minus-hamilton-oriented":
        return clique_minus_hamilton_oriented(_need(n, "n"))
    if f == "complete-digraph-union":
        return complete_digraph_union(_need(spec.blocks, "blocks"), _need(d, "d"))
    if f == "random-regular-digraph":
        return random_regular_digraph(_need(n, "n"), _need(d, "d"), spec.seed)
    if f == "random-regular-oriented":
        return random_regular_oriented(_need(n, "n"), _need(d, "d"), spec.seed)
    return bipartite_as_digraph(bipartite_regular(_need(n, "n"), _need(d, "d"), spec.seed, spec.blocks))


def _need(x, name: str) -> int:
    if x is None:
        raise InfeasibleInstance(f"parameter {name} is required")
    return int(x)


def instance_problems(spec: InstanceSpec, g: Digraph) -> list[str]:
    """Family-level validity checks: regularity, orientation and block count."""
    errs = []
    if spec.family == "bipartite-regular":
        degs = {g.out_degree(v) + g.in_degree(v) for v in range(g.n)}
        if degs != {spec.d}:
            errs.append(f"bipartite degrees {sorted(degs)} != {{{spec.d}}}")
        return errs
    d = is_d_regular(g)
    if d is None:
        errs.append("not regular")
    oriented_families = {
        "regular-tournament",
        "two-tournaments",
        "clique-minus-matching-oriented",
        "clique-minus-hamilton-oriented",
        "random-regular-oriented",
    }
    if spec.family in oriented_families and not is_oriented(g):
        errs.append("not oriented")
    expect_blocks = {"two-tournaments": 2, "complete-digraph-union": spec.blocks}.get(spec.family)
    if expect_blocks is not None:
        und = nx.Graph()
        und.add_nodes_from(range(g.n))
        und.add_edges_from(g.edges)
        if nx.number_connected_components(und) != expect_blocks:
            errs.append(f"expected {expect_blocks} blocks")
    if spec.d is not None and d is not None and spec.family != "complete-digraph-union" and d != spec.d:
        errs.append(f"degree {d} != requested {spec.d}")
    return errs


def planted_regular_digraph(
    assignment: Sequence[tuple[int, int]], d: int, seed: int = 0, max_switches: int = 20000
) -> tuple[Digraph, CellPartition]:
    """d-regular digraph whose edges follow a given cell partition as far as the counts allow.

    A vertex in V_ij sends its d out-edges into column class i and takes its d
    in-edges from row class j; leftover stubs from unequal row/column sizes
    become cross edges. Loops and repeats are removed by head switches within
    the same column class, so the class-level edge counts are preserved.
    """
    n = len(assignment)
    p = CellPartition.from_assignment(max(max(a) for a in assignment) + 1, assignment)
    rng = random.Random(seed)
    out_stubs = [[] for _ in range(p.k)]
    in_stubs = [[] for _ in range(p.k)]
    for v, (i, j) in enumerate(assignment):
        out_stubs[i] += [v] * d
        in_stubs[j] += [v] * d
    pairs, left_o, left_i = [], [], []
    for i in range(p.k):
        rng.shuffle(out_stubs[i])
        rng.shuffle(in_stubs[i])
        t = min(len(out_stubs[i]), len(in_stubs[i]))
        pairs += list(zip(out_stubs[i][:t], in_stubs[i][:t]))
        left_o += out_stubs[i][t:]
        left_i += in_stubs[i][t:]
    rng.shuffle(left_i)
    pairs += list(zip(left_o, left_i))
    col = [a[1] for a in assignment]
    for _ in range(max_switches):
        seen: dict[tuple[int, int], int] = {}
        bad = None
        for t, (u, v) in enumerate(pairs):
            if u == v or (u, v) in seen:
                bad = t
                break
            seen[(u, v)] = t
        if bad is None:
            break
        u1, v1 = pairs[bad]
        same = [t for t, (_, v) in enumerate(pairs) if col[v] == col[v1] and t != bad]
        t2 = rng.choice(same) if same and rng.random() < 0.9 else rng.randrange(len(pairs))
        u2, v2 = pairs[t2]
        if u1 != v2 and u2 != v1:
            pairs[bad], pairs[t2] = (u1, v2), (u2, v1)
    else:
        raise InfeasibleInstance("switch budget exhausted while removing loops and repeats")
    return Digraph(n, pairs), p


def one_factor_exists(g: Digraph) -> CycleCover | None:
    """A 1-factor via augmenting paths in the out-copy/in-copy bipartite view, or None."""
    match_in: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in g.out_adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_in or augment(match_in[v], seen):
                match_in[v] = u
                return True
        return False

    for u in range(g.n):
        if not augment(u, set()):
            return None
    return cover_from_successor({u: v for v, u in match_in.items()})


def _scc_count(g_out: Sequence[int], rem: int) -> tuple[int, bool]:
    """Number of strongly connected components inside ``rem`` and whether all have size >= 2."""
    n = len(g_out)
    h = nx.DiGraph()
    vs = [v for v in range(n) if rem >> v & 1]
    h.add_nodes_from(vs)
    for v in vs:
        m = g_out[v] & rem
        while m:
            b = m & -m
            m ^= b
            h.add_edge(v, b.bit_length() - 1)
    comps = list(nx.strongly_connected_components(h))
    return len(comps), all(len(c) >= 2 for c in comps)


def min_cycle_cover_exact(g: Digraph, cap: int = 16) -> tuple[int, CycleCover] | None:
    """Fewest vertex-disjoint cycles covering g, or None if no 1-factor exists.

    Branch and bound: the next cycle always passes through the smallest
    uncovered vertex; the lower bound is the number of strongly connected
    components of the uncovered part, which must all be nontrivial.
    """
    n = g.n
    if n > cap:
        raise SolverCapError(f"n={n} exceeds the exact cycle-cover cap {cap}")
    if n == 0:
        return 0, CycleCover(())
    first = one_factor_exists(g)
    if first is None:
        return None
    out_m = g.out_mask
    best = [len(first), first.cycles]
    full = (1 << n) - 1
    root_lb, ok = _scc_count(out_m, full)
    if not ok:
        return None

    def cycles_through(s: int, rem: int):
        path = [s]

        def walk(u: int, used: int):
            if out_m[u] >> s & 1 and len(path) >= 2:
                yield tuple(path)
            m = out_m[u] & rem & ~used
            while m:
                b = m & -m
                m ^= b
                v = b.bit_length() - 1
                path.append(v)
                yield from walk(v, used | b)
                path.pop()

        yield from walk(s, 1 << s)

    def rec(rem: int, chosen: list[tuple[int, ...]]) -> bool:
        if not rem:
            if len(chosen) < best[0]:
                best[0], best[1] = len(chosen), tuple(chosen)
            return best[0] <= root_lb
        lb, feasible = _scc_count(out_m, rem)
        if not feasible or len(chosen) + lb >= best[0]:
            return False
        s = (rem & -rem).bit_length() - 1
        for cyc in cycles_through(s, rem):
            mask = 0
            for v in cyc:
                mask |= 1 << v
            chosen.append(cyc)
            done = rec(rem & ~mask, chosen)
            chosen.pop()
            if done:
                return True
        return False

    if best[0] > root_lb:
        rec(full, [])
    cover = CycleCover(best[1]).canonical()
    cover.validate(g)
    return best[0], cover


def regular_tournaments(n: int):
    """Every labelled regular tournament on n vertices (n odd, small)."""
    if n % 2 == 0:
        raise InfeasibleInstance("regular tournaments need odd n")
    m = (n - 1) // 2
    pairs = list(itertools.combinations(range(n), 2))
    outd = [0] * n
    ind = [0] * n
    arcs: list[tuple[int, int]] = []

    def rec(t: int):
        if t == len(pairs):
            yield Digraph(n, arcs)
            return
        u, v = pairs[t]
        for a, b in ((u, v), (v, u)):
            if outd[a] < m and ind[b] < m:
                outd[a] += 1
                ind[b] += 1
                arcs.append((a, b))
                yield from rec(t + 1)
                arcs.pop()
                outd[a] -= 1
                ind[b] -= 1

    yield from rec(0)

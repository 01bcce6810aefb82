"""Part-level multidigraphs, cycle stripping and DAG path decomposition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..digraph import Digraph, is_d_regular
from ..partition import CellPartition, cross_counts, cross_edges


class SkeletonError(ValueError):
    pass


@dataclass
class Multidigraph:
    """Multidigraph on 0..k-1 with loops; ``mult[(i, j)]`` is the edge multiplicity."""

    k: int
    mult: Counter = field(default_factory=Counter)

    @classmethod
    def from_partition(cls, g: Digraph, p: CellPartition) -> "Multidigraph":
        m = cross_counts(g, p)
        return cls(p.k, Counter({(i, j): m[i][j] for i in range(p.k) for j in range(p.k) if m[i][j]}))

    @property
    def e(self) -> int:
        return sum(self.mult.values())

    def out_minus_in(self) -> list[int]:
        b = [0] * self.k
        for (i, j), c in self.mult.items():
            b[i] += c
            b[j] -= c
        return b

    def edge_list(self) -> list[tuple[int, int]]:
        return [e for e in sorted(self.mult) for _ in range(self.mult[e])]

    def find_cycle(self) -> list[tuple[int, int]] | None:
        """Lowest-lexicographic directed cycle (loops first), as a list of arcs."""
        for (i, j), c in sorted(self.mult.items()):
            if i == j and c:
                return [(i, i)]
        succ = {i: sorted({j for (a, j), c in self.mult.items() if a == i and c}) for i in range(self.k)}
        state = [0] * self.k
        stack: list[int] = []

        def dfs(u: int):
            state[u] = 1
            stack.append(u)
            for v in succ[u]:
                if state[v] == 1:
                    cyc = stack[stack.index(v):]
                    return [(cyc[t], cyc[(t + 1) % len(cyc)]) for t in range(len(cyc))]
                if state[v] == 0:
                    found = dfs(v)
                    if found:
                        return found
            state[u] = 2
            stack.pop()
            return None

        for s in range(self.k):
            if state[s] == 0:
                found = dfs(s)
                if found:
                    return found
        return None

    def topological_order(self) -> list[int]:
        indeg = [0] * self.k
        for (i, j), c in self.mult.items():
            if c and i != j:
                indeg[j] += 1
        order = []
        ready = sorted(i for i in range(self.k) if indeg[i] == 0)
        while ready:
            u = ready.pop(0)
            order.append(u)
            for (i, j), c in sorted(self.mult.items()):
                if i == u and c and i != j:
                    indeg[j] -= 1
                    if indeg[j] == 0:
                        ready.append(j)
                        ready.sort()
        if len(order) != self.k:
            raise SkeletonError("multidigraph has a directed cycle")
        return order


@dataclass(frozen=True)
class AcyclicSkeleton:
    subgraph: Digraph
    order: tuple[int, ...]  # parts listed so that every kept edge goes forward
    multiplicities: dict
    bound: int


def acyclic_cross_skeleton(g: Digraph, p: CellPartition, d: int | None = None) -> AcyclicSkeleton:
    """Subgraph of B(g,P) whose part-level multigraph is acyclic and keeps the imbalance.

    ``d`` is the weight in e(G_i*) - e(G_*i) = d(|V_i*| - |V_*i|). By default it is
    the regularity degree of g; pass d=1 for a P-balanced path system.
    """
    if d is None:
        d = is_d_regular(g)
        if d is None:
            raise SkeletonError("digraph is not regular and no weight d was given")
    h = Multidigraph.from_partition(g, p)
    imb = p.imbalance()
    b = h.out_minus_in()  # loops cancel out here
    if any(b[i] != d * imb[i] for i in range(p.k)):
        raise SkeletonError(f"identity e(G_i*)-e(G_*i) = d(|V_i*|-|V_*i|) fails for d={d}")
    while True:
        cyc = h.find_cycle()
        if cyc is None:
            break
        m = min(h.mult[a] for a in cyc)
        for a in cyc:
            h.mult[a] -= m
            if not h.mult[a]:
                del h.mult[a]
    order = h.topological_order()
    edges = []
    for (i, j), c in sorted(h.mult.items()):
        edges.extend(cross_edges(g, p, i, j)[:c])
    sub = Digraph(g.n, edges)
    bound = d * (p.k - 1) * sum(abs(x) for x in imb) // 2
    if sub.e > bound:
        raise SkeletonError(f"stripped subgraph has {sub.e} edges > bound {bound}")
    return AcyclicSkeleton(sub, tuple(order), dict(h.mult), bound)


def dag_path_decomposition(h: Digraph | Multidigraph) -> list[list[int]]:
    """Split the edges of an acyclic (multi)digraph into Σ|d⁺-d⁻|/2 paths.

    Each path is a vertex list. Paths start at a vertex with no remaining
    in-edges and are extended along the lowest remaining out-edge.
    """
    if isinstance(h, Multidigraph):
        n = h.k
        arcs = h.edge_list()
    else:
        n = h.n
        arcs = h.sorted_edges()
    if any(u == v for u, v in arcs):
        raise SkeletonError("loop in DAG input")
    out: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in arcs:
        out[u].append(v)
        indeg[v] += 1
    for lst in out:
        lst.sort(reverse=True)  # pop() yields the smallest head
    if _has_cycle(n, out):
        raise SkeletonError("input has a directed cycle")
    paths = []
    while True:
        start = next((v for v in range(n) if out[v] and indeg[v] == 0), None)
        if start is None:
            break
        path = [start]
        while out[path[-1]]:
            v = out[path[-1]].pop()
            indeg[v] -= 1
            path.append(v)
        paths.append(path)
    return paths


def _has_cycle(n: int, out: list[list[int]]) -> bool:
    indeg = [0] * n
    for lst in out:
        for v in set(lst):
            indeg[v] += 1
    ready = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for v in set(out[u]):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    return seen != n

"""Brute-force reference computations kept independent of the main algorithms."""

from __future__ import annotations

import itertools
from collections import Counter

from .digraph import Digraph
from .flow import FlowNetwork
from .partition import CellPartition


def brute_force_min_cut(net: FlowNetwork) -> int | None:
    """Least capacity over every source-side set; None when every cut is unbounded.

    Node capacities are modelled by an in/out copy per capped node, and the
    enumeration decides both copies independently.
    """
    src, snk = set(net.sources), set(net.sinks)
    capped = [v for v, c in net.node_caps.items() if v not in src and v not in snk]
    inner = [v for v in net.nodes if v not in src and v not in snk]
    best = None
    for bits in itertools.product((0, 1), repeat=len(inner) + len(capped)):
        side_in = {v: True for v in src} | {v: False for v in snk}
        side_out = dict(side_in)
        for v, b in zip(inner, bits):
            side_in[v] = side_out[v] = bool(b)
        for v, b in zip(capped, bits[len(inner):]):
            side_out[v] = bool(b)
        total, infinite = 0, False
        for v in capped:
            if side_in[v] and not side_out[v]:
                c = net.node_caps[v]
                if c is None:
                    infinite = True
                else:
                    total += c
        for u, v, c in net.edges:
            if side_out[u] and not side_in[v]:
                if c is None:
                    infinite = True
                else:
                    total += c
        if not infinite and (best is None or total < best):
            best = total
    return best


def balance_residuals_direct(g: Digraph, p: CellPartition, d: int) -> list[int]:
    """d(|V_i*| - |V_*i|) - (e(G_i*) - e(G_*i)) counted straight from the edge set."""
    row = {v: p.where[v][0] for v in range(g.n)}
    col = {v: p.where[v][1] for v in range(g.n)}
    out = Counter()
    inn = Counter()
    for u, v in g.edges:
        if row[u] != col[v]:
            out[row[u]] += 1
            inn[col[v]] += 1
    rows = Counter(row.values())
    cols = Counter(col.values())
    return [d * (rows[i] - cols[i]) - (out[i] - inn[i]) for i in range(p.k)]


def dag_path_count(n: int, arcs) -> int:
    diff = [0] * n
    for u, v in arcs:
        diff[u] += 1
        diff[v] -= 1
    return sum(abs(x) for x in diff) // 2


def max_matching_size(m: int, edges) -> int:
    """Maximum matching of a small multigraph by exhaustive edge-subset growth."""
    edges = sorted({tuple(sorted(e)) for e in edges})
    best = 0

    def rec(t: int, used: int, size: int):
        nonlocal best
        best = max(best, size)
        if size + (len(edges) - t) <= best:
            return
        for s in range(t, len(edges)):
            u, v = edges[s]
            if not (used >> u & 1 or used >> v & 1):
                rec(s + 1, used | 1 << u | 1 << v, size + 1)

    rec(0, 0, 0)
    return best


def count_cycles_of_successor(succ: dict[int, int]) -> int:
    seen, count = set(), 0
    for s in succ:
        if s in seen:
            continue
        count += 1
        v = s
        while v not in seen:
            seen.add(v)
            v = succ[v]
    return count

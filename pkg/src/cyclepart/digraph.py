"""Directed graph container with sorted in/out adjacency and a few views."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    pass


class Digraph:
    """Simple digraph on vertices 0..n-1. No loops, no repeated ordered pairs.

    Instances are treated as immutable; every derived view is cached.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise GraphFormatError(f"negative vertex count {n}")
        seen: set[tuple[int, int]] = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop at {u}")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        out: list[list[int]] = [[] for _ in range(n)]
        inn: list[list[int]] = [[] for _ in range(n)]
        for u, v in seen:
            out[u].append(v)
            inn[v].append(u)
        self.n = n
        self.edges = frozenset(seen)
        self.out_adj = tuple(tuple(sorted(a)) for a in out)
        self.in_adj = tuple(tuple(sorted(a)) for a in inn)

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, e={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Digraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @property
    def e(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @cached_property
    def out_mask(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in a) for a in self.out_adj)

    @cached_property
    def in_mask(self) -> tuple[int, ...]:
        return tuple(sum(1 << u for u in a) for a in self.in_adj)

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def induced(self, vertices: Sequence[int]) -> tuple["Digraph", list[int]]:
        """Induced subdigraph relabelled to 0..m-1; also returns new->old ids."""
        order = sorted(set(vertices))
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Digraph(len(order), edges), order

    def reverse(self) -> "Digraph":
        return Digraph(self.n, [(v, u) for u, v in self.edges])


def _check_ids(g: Digraph, vs: Iterable[int]) -> None:
    for v in vs:
        if not 0 <= v < g.n:
            raise IndexError(f"vertex {v} out of range for n={g.n}")


def degree_profile(g: Digraph) -> list[tuple[int, int]]:
    return [(len(g.out_adj[v]), len(g.in_adj[v])) for v in range(g.n)]


def is_d_regular(g: Digraph) -> int | None:
    """Common semidegree d if every in- and out-degree equals d, else None."""
    if g.n == 0:
        return 0
    d = len(g.out_adj[0])
    for v in range(g.n):
        if len(g.out_adj[v]) != d or len(g.in_adj[v]) != d:
            return None
    return d


def is_oriented(g: Digraph) -> bool:
    return all((v, u) not in g.edges for u, v in g.edges)


def min_semidegree(g: Digraph) -> int:
    if g.n == 0:
        return 0
    return min(min(len(a) for a in g.out_adj), min(len(a) for a in g.in_adj))


def max_semidegree(g: Digraph) -> int:
    if g.n == 0:
        return 0
    return max(max(len(a) for a in g.out_adj), max(len(a) for a in g.in_adj))


def edge_count_between(g: Digraph, A: Iterable[int], B: Iterable[int]) -> int:
    A = set(A)
    B = set(B)
    _check_ids(g, A)
    _check_ids(g, B)
    if len(A) <= len(B):
        return sum(1 for a in A for b in g.out_adj[a] if b in B)
    return sum(1 for b in B for a in g.in_adj[b] if a in A)


def degree_into(g: Digraph, v: int, B: set[int] | frozenset[int]) -> int:
    """d⁺(v, B)."""
    return sum(1 for w in g.out_adj[v] if w in B)


def degree_from(g: Digraph, v: int, A: set[int] | frozenset[int]) -> int:
    """d⁻(v, A)."""
    return sum(1 for u in g.in_adj[v] if u in A)


@dataclass(frozen=True)
class BipartiteView:
    """Undirected bipartite graph G[U,W].

    View-vertices are positions: left position i is ``left[i]``, right position
    j is ``right[j]``. ``edges`` holds position pairs (i, j), so a vertex lying
    in both U and W shows up twice as distinct view-vertices.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    @property
    def order(self) -> int:
        return len(self.left) + len(self.right)

    def left_neighbours(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in self.left]
        for i, j in sorted(self.edges):
            nb[i].append(j)
        return nb

    def right_neighbours(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in self.right]
        for i, j in sorted(self.edges):
            nb[j].append(i)
        return nb

    def restrict(self, left_pos: Sequence[int], right_pos: Sequence[int]) -> "BipartiteView":
        li = {p: i for i, p in enumerate(left_pos)}
        ri = {p: j for j, p in enumerate(right_pos)}
        edges = frozenset((li[i], ri[j]) for i, j in self.edges if i in li and j in ri)
        return BipartiteView(
            tuple(self.left[p] for p in left_pos), tuple(self.right[p] for p in right_pos), edges
        )


def bipartite_view(g: Digraph, U: Iterable[int], W: Iterable[int]) -> BipartiteView:
    left = tuple(sorted(set(U)))
    right = tuple(sorted(set(W)))
    _check_ids(g, left)
    _check_ids(g, right)
    rpos = {w: j for j, w in enumerate(right)}
    edges = frozenset(
        (i, rpos[w]) for i, u in enumerate(left) for w in g.out_adj[u] if w in rpos
    )
    return BipartiteView(left, right, edges)


def parse_edge_list(text: str) -> Digraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty edge list")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("first line must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"bad header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"header promises {m} edges, found {len(body)}")
    edges = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad edge line {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line {ln!r}") from exc
    if len(set(edges)) != len(edges):
        raise GraphFormatError("duplicate edge in edge list")
    return Digraph(n, edges)


def format_edge_list(g: Digraph) -> str:
    rows = [f"{g.n} {g.e}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(rows) + "\n"


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def directed_cycle(n: int) -> Digraph:
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_union(graphs: Sequence[Digraph]) -> Digraph:
    edges = []
    off = 0
    for h in graphs:
        edges.extend((u + off, v + off) for u, v in h.edges)
        off += h.n
    return Digraph(off, edges)

"""k×k cell partitions {V_ij}, their skeleton S(P) and cross subgraphs G_ij."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .digraph import Digraph, is_d_regular


class PartitionError(ValueError):
    pass


class CellPartition:
    """Partition of [0, n) into cells V_ij, 0 <= i, j < k. Cells may be empty."""

    def __init__(self, k: int, n: int, cells: Mapping[tuple[int, int], Iterable[int]]):
        if k < 1:
            raise PartitionError("need at least one part")
        where: dict[int, tuple[int, int]] = {}
        grid = [[() for _ in range(k)] for _ in range(k)]
        for (i, j), vs in cells.items():
            if not (0 <= i < k and 0 <= j < k):
                raise PartitionError(f"cell ({i},{j}) outside {k}x{k} grid")
            vs = sorted(set(vs))
            for v in vs:
                if not 0 <= v < n:
                    raise PartitionError(f"vertex {v} out of range for n={n}")
                if v in where:
                    raise PartitionError(f"vertex {v} in two cells")
                where[v] = (i, j)
            grid[i][j] = tuple(vs)
        if len(where) != n:
            missing = sorted(set(range(n)) - set(where))
            raise PartitionError(f"cells do not cover vertices {missing[:10]}")
        self.k = k
        self.n = n
        self.cells: tuple[tuple[tuple[int, ...], ...], ...] = tuple(tuple(r) for r in grid)
        self.where = tuple(where[v] for v in range(n))

    @classmethod
    def from_assignment(cls, k: int, assignment: Sequence[tuple[int, int]]) -> "CellPartition":
        cells: dict[tuple[int, int], list[int]] = {}
        for v, ij in enumerate(assignment):
            cells.setdefault(tuple(ij), []).append(v)
        return cls(k, len(assignment), cells)

    @classmethod
    def diagonal(cls, parts: Sequence[Iterable[int]], n: int | None = None) -> "CellPartition":
        parts = [sorted(p) for p in parts]
        if n is None:
            n = sum(len(p) for p in parts)
        return cls(len(parts), n, {(i, i): p for i, p in enumerate(parts)})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CellPartition) and (self.k, self.n, self.cells) == (
            other.k,
            other.n,
            other.cells,
        )

    def __hash__(self) -> int:
        return hash((self.k, self.n, self.cells))

    def __repr__(self) -> str:
        sizes = [[len(c) for c in row] for row in self.cells]
        return f"CellPartition(k={self.k}, n={self.n}, sizes={sizes})"

    def cell(self, i: int, j: int) -> tuple[int, ...]:
        self._check(i, j)
        return self.cells[i][j]

    def _check(self, *idx: int) -> None:
        for i in idx:
            if not 0 <= i < self.k:
                raise IndexError(f"part index {i} out of range for k={self.k}")

    @cached_property
    def rows(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(v for c in self.cells[i] for v in c) for i in range(self.k))

    @cached_property
    def cols(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(v for r in self.cells for v in r[j]) for j in range(self.k))

    def row(self, i: int) -> frozenset[int]:
        """V_{i*}."""
        self._check(i)
        return self.rows[i]

    def col(self, j: int) -> frozenset[int]:
        """V_{*j}."""
        self._check(j)
        return self.cols[j]

    def row_of(self, v: int) -> int:
        return self.where[v][0]

    def col_of(self, v: int) -> int:
        return self.where[v][1]

    def imbalance(self) -> list[int]:
        """|V_{i*}| - |V_{*i}| per part."""
        return [len(self.rows[i]) - len(self.cols[i]) for i in range(self.k)]

    def off_diagonal(self) -> list[int]:
        return sorted(v for v, (i, j) in enumerate(self.where) if i != j)

    @cached_property
    def _skeleton(self) -> "SkeletonGraph":
        edges = set()
        for i in range(self.k):
            for j in range(i + 1, self.k):
                if self.cells[i][j] or self.cells[j][i]:
                    edges.add((i, j))
        return SkeletonGraph(self.k, frozenset(edges))

    def to_text(self) -> str:
        out = [str(self.k)]
        for i in range(self.k):
            for j in range(self.k):
                if self.cells[i][j]:
                    out.append(" ".join(map(str, (i, j, *self.cells[i][j]))))
        return "\n".join(out) + "\n"

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "cells": [
                {"i": i, "j": j, "vertices": list(self.cells[i][j])}
                for i in range(self.k)
                for j in range(self.k)
                if self.cells[i][j]
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CellPartition":
        cells = {(c["i"], c["j"]): c["vertices"] for c in data["cells"]}
        return cls(int(data["k"]), int(data["n"]), cells)


def parse_partition(text: str, n: int) -> CellPartition:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise PartitionError("empty partition file")
    if lines[0].startswith("{"):
        return CellPartition.from_json(json.loads(text))
    try:
        k = int(lines[0])
        cells = {}
        for ln in lines[1:]:
            nums = [int(x) for x in ln.split()]
            if len(nums) < 2:
                raise PartitionError(f"bad cell line {ln!r}")
            key = (nums[0], nums[1])
            if key in cells:
                raise PartitionError(f"cell {key} listed twice")
            cells[key] = nums[2:]
    except ValueError as exc:
        raise PartitionError(str(exc)) from exc
    return CellPartition(k, n, cells)


@dataclass(frozen=True)
class SkeletonGraph:
    k: int
    edges: frozenset[tuple[int, int]]
    _comp: list = field(default_factory=list, compare=False, repr=False)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest member."""
        if not self._comp:
            parent = list(range(self.k))

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for i, j in self.edges:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            groups: dict[int, list[int]] = {}
            for i in range(self.k):
                groups.setdefault(find(i), []).append(i)
            self._comp.extend(sorted(groups.values()))
        return [list(c) for c in self._comp]

    def neighbours(self, i: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == i} | {a for a, b in self.edges if b == i})


def is_balanced(p: CellPartition) -> bool:
    return all(x == 0 for x in p.imbalance())


def skeleton(p: CellPartition) -> SkeletonGraph:
    return p._skeleton


def component_vertices(p: CellPartition, comp: Iterable[int]) -> set[int]:
    """V_I: all vertices in rows or columns indexed by the component."""
    out: set[int] = set()
    for i in comp:
        out |= p.rows[i] | p.cols[i]
    return out


def cross_edges(g: Digraph, p: CellPartition, i: int, j: int) -> list[tuple[int, int]]:
    """Sorted E_G(V_{i*}, V_{*j})."""
    p._check(i, j)
    if g.n != p.n:
        raise PartitionError("partition and digraph disagree on n")
    cj = p.cols[j]
    return sorted((u, v) for u in p.rows[i] for v in g.out_adj[u] if v in cj)


def cross_subgraph(g: Digraph, p: CellPartition, i: int, j: int) -> Digraph:
    """G_ij, kept on the full vertex set of g."""
    return Digraph(g.n, cross_edges(g, p, i, j))


def cross_counts(g: Digraph, p: CellPartition) -> list[list[int]]:
    """Matrix of e(G_ij)."""
    if g.n != p.n:
        raise PartitionError("partition and digraph disagree on n")
    m = [[0] * p.k for _ in range(p.k)]
    for u, v in g.edges:
        m[p.where[u][0]][p.where[v][1]] += 1
    return m


def b_graph(g: Digraph, p: CellPartition) -> Digraph:
    """B(G,P): G without the diagonal cross subgraphs G_ii."""
    if g.n != p.n:
        raise PartitionError("partition and digraph disagree on n")
    return Digraph(g.n, [(u, v) for u, v in g.edges if p.where[u][0] != p.where[v][1]])


def regular_balance_identity(g: Digraph, p: CellPartition) -> list[int]:
    d = is_d_regular(g)
    if d is None:
        raise PartitionError("balance identity needs a regular digraph")
    m = cross_counts(g, p)
    res = []
    for i in range(p.k):
        out_i = sum(m[i][j] for j in range(p.k) if j != i)
        in_i = sum(m[j][i] for j in range(p.k) if j != i)
        res.append(d * (len(p.rows[i]) - len(p.cols[i])) - (out_i - in_i))
    return res


@dataclass(frozen=True)
class MergeReport:
    min_out_inside: list[int | None]
    min_in_inside: list[int | None]
    symmetric_difference: list[int]


def merge_to_diagonal(g: Digraph, p: CellPartition) -> tuple[CellPartition, MergeReport]:
    """Diagonal P' with V'_ii = V_{i*}, plus semidegree statistics inside each V'_ii."""
    q = CellPartition.diagonal([sorted(p.rows[i]) for i in range(p.k)], p.n)
    mins_out: list[int | None] = []
    mins_in: list[int | None] = []
    for i in range(p.k):
        part = q.rows[i]
        if not part:
            mins_out.append(None)
            mins_in.append(None)
            continue
        mins_out.append(min(sum(1 for w in g.out_adj[v] if w in part) for v in part))
        mins_in.append(min(sum(1 for w in g.in_adj[v] if w in part) for v in part))
    sym = [len(set(p.cells[i][i]) ^ set(q.cells[i][i])) for i in range(p.k)]
    return q, MergeReport(mins_out, mins_in, sym)

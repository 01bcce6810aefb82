"""Path systems, Q-contraction, 1-factor lifting and cycle covers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .digraph import Digraph
from .partition import CellPartition, PartitionError


class PathSystemError(ValueError):
    pass


@dataclass(frozen=True)
class PathSystem:
    """Vertex-disjoint directed paths, each given as a vertex sequence with >= 2 vertices."""

    paths: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        paths = tuple(tuple(int(v) for v in path) for path in self.paths)
        object.__setattr__(self, "paths", paths)
        seen: set[int] = set()
        for path in paths:
            if len(path) < 2:
                raise PathSystemError(f"path {path} has no edge")
            for v in path:
                if v in seen:
                    raise PathSystemError(f"vertex {v} used twice")
                seen.add(v)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]]) -> "PathSystem":
        """Assemble maximal paths from an edge set with in/out degree <= 1 and no cycle."""
        succ: dict[int, int] = {}
        pred: dict[int, int] = {}
        for u, v in edges:
            if u in succ or v in pred:
                raise PathSystemError(f"edge ({u},{v}) gives a vertex degree 2")
            succ[u] = v
            pred[v] = u
        paths = []
        used = 0
        for s in sorted(u for u in succ if u not in pred):
            path = [s]
            while path[-1] in succ:
                path.append(succ[path[-1]])
            used += len(path) - 1
            paths.append(tuple(path))
        if used != len(succ):
            raise PathSystemError("edge set contains a cycle")
        return cls(tuple(paths))

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for path in self.paths for v in path)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for path in self.paths for a, b in zip(path, path[1:])]

    @property
    def e(self) -> int:
        return sum(len(path) - 1 for path in self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def check_in(self, g: Digraph) -> None:
        for u, v in self.edges:
            if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
                raise PathSystemError(f"edge ({u},{v}) not in digraph")

    def to_json(self) -> list[list[int]]:
        return [list(path) for path in self.paths]


def is_matching(edges: Iterable[tuple[int, int]]) -> bool:
    seen: set[int] = set()
    for u, v in edges:
        if u == v or u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def _edge_classes(edges: Iterable[tuple[int, int]], p: CellPartition) -> tuple[list[int], list[int]]:
    out = [0] * p.k
    inn = [0] * p.k
    for u, v in edges:
        i, j = p.where[u][0], p.where[v][1]
        if i != j:
            out[i] += 1
            inn[j] += 1
    return out, inn


def p_balance_residuals(q: PathSystem | Digraph, p: CellPartition) -> list[int]:
    """(|V_i*| - |V_*i|) - (e(q_i*) - e(q_*i)) per part."""
    edges = q.edges
    out, inn = _edge_classes(edges, p)
    return [(len(p.rows[i]) - len(p.cols[i])) - (out[i] - inn[i]) for i in range(p.k)]


def is_p_balanced(q: PathSystem | Digraph, p: CellPartition) -> bool:
    return all(r == 0 for r in p_balance_residuals(q, p))


def is_nontrivial(q: PathSystem, p: CellPartition) -> bool:
    used = q.vertices
    for v, (i, j) in enumerate(p.where):
        if i != j and v not in used:
            return True
    for path in q.paths:
        # path starts in V_{*j}, ends in V_{i*}, i != j
        if p.where[path[0]][1] != p.where[path[-1]][0]:
            return True
    return False


@dataclass(frozen=True)
class Contraction:
    graph: Digraph
    partition: CellPartition | None
    lift: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"lift": [list(x) for x in self.lift]}


def contract(g: Digraph, p: CellPartition | None, q: PathSystem) -> Contraction:
    """Contract every path of q into a fresh vertex.

    Untouched vertices keep their relative order and come first; the new
    vertices follow in path order. ``lift[x]`` is the original vertex sequence
    represented by contracted vertex x.
    """
    q.check_in(g)
    if p is not None and p.n != g.n:
        raise PartitionError("partition and digraph disagree on n")
    used = q.vertices
    keep = [v for v in range(g.n) if v not in used]
    new_id = {v: i for i, v in enumerate(keep)}
    base = len(keep)
    tail_map = dict(new_id)
    head_map = dict(new_id)
    for t, path in enumerate(q.paths):
        tail_map[path[-1]] = base + t
        head_map[path[0]] = base + t
    edges = []
    for u, v in g.edges:
        a, b = tail_map.get(u), head_map.get(v)
        if a is None or b is None or a == b:
            continue
        edges.append((a, b))
    h = Digraph(base + len(q.paths), edges)
    lift = tuple((v,) for v in keep) + q.paths
    newp = None
    if p is not None:
        assign = [p.where[v] for v in keep]
        assign += [(p.where[path[-1]][0], p.where[path[0]][1]) for path in q.paths]
        newp = CellPartition.from_assignment(p.k, assign)
    return Contraction(h, newp, lift)


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class CycleCover:
    """Vertex-disjoint directed cycles; each cycle is a vertex sequence, closing edge implied."""

    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "cycles", tuple(tuple(int(v) for v in c) for c in self.cycles)
        )

    def __len__(self) -> int:
        return len(self.cycles)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(c[i], c[(i + 1) % len(c)]) for c in self.cycles for i in range(len(c))]

    def problems(self, g: Digraph) -> list[str]:
        errs = []
        seen: set[int] = set()
        for c in self.cycles:
            if len(c) < 2:
                errs.append(f"cycle {c} shorter than 2")
            for v in c:
                if not 0 <= v < g.n:
                    errs.append(f"vertex {v} out of range")
                elif v in seen:
                    errs.append(f"vertex {v} covered twice")
                seen.add(v)
        for u, v in self.edges:
            if not g.has_edge(u, v):
                errs.append(f"edge ({u},{v}) missing from digraph")
        missing = set(range(g.n)) - seen
        if missing:
            errs.append(f"uncovered vertices {sorted(missing)[:10]}")
        return errs

    def validate(self, g: Digraph) -> None:
        errs = self.problems(g)
        if errs:
            raise CoverError("; ".join(errs))

    def canonical(self) -> "CycleCover":
        """Rotate each cycle to start at its minimum; sort cycles."""
        out = []
        for c in self.cycles:
            m = c.index(min(c))
            out.append(c[m:] + c[:m])
        return CycleCover(tuple(sorted(out)))

    def to_json(self) -> dict:
        return {"count": len(self.cycles), "cycles": [list(c) for c in self.cycles]}

    def to_dot(self, g: Digraph | None = None) -> str:
        lines = ["digraph cover {"]
        cyc = set(self.edges)
        if g is not None:
            for u, v in g.sorted_edges():
                style = ' [color=red, penwidth=2]' if (u, v) in cyc else ' [color=gray80]'
                lines.append(f"  {u} -> {v}{style};")
        else:
            for u, v in sorted(cyc):
                lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


OneFactor = CycleCover


def lift_one_factor(f: CycleCover, c: Contraction) -> CycleCover:
    f.validate(c.graph)
    return CycleCover(tuple(tuple(v for w in cyc for v in c.lift[w]) for cyc in f.cycles))


def contains_paths(f: CycleCover, q: PathSystem) -> bool:
    es = set(f.edges)
    return all(e in es for e in q.edges)


def _bipartite_min_degree(g: Digraph, left: Iterable[int], right: Iterable[int]) -> int | None:
    left = set(left)
    right = set(right)
    degs = [sum(1 for w in g.out_adj[u] if w in right) for u in left]
    degs += [sum(1 for u in g.in_adj[w] if u in left) for w in right]
    return min(degs) if degs else None


@dataclass(frozen=True)
class DegreeReport:
    before: list[int | None]
    after: list[int | None]
    bound: list[int | None]

    @property
    def slack(self) -> list[int | None]:
        return [None if a is None or b is None else a - b for a, b in zip(self.after, self.bound)]


def contraction_degree_report(g: Digraph, p: CellPartition, q: PathSystem) -> DegreeReport:
    eq = q.e
    for i in range(p.k):
        if not (eq < len(p.rows[i]) and eq < len(p.cols[i])):
            raise PathSystemError(
                f"e(Q)={eq} not below |V_{i}*|={len(p.rows[i])}, |V_*{i}|={len(p.cols[i])}"
            )
    c = contract(g, p, q)
    before, after, bound = [], [], []
    for i in range(p.k):
        b = _bipartite_min_degree(g, p.rows[i], p.cols[i])
        a = _bipartite_min_degree(c.graph, c.partition.rows[i], c.partition.cols[i])
        lim = None if b is None else b - 2 * eq
        if a is not None and lim is not None and a < lim:
            raise AssertionError(f"part {i}: degree {a} below bound {lim}")
        before.append(b)
        after.append(a)
        bound.append(lim)
    return DegreeReport(before, after, bound)


def cover_from_successor(succ: dict[int, int]) -> CycleCover:
    seen: set[int] = set()
    cycles = []
    for s in sorted(succ):
        if s in seen:
            continue
        cyc = [s]
        seen.add(s)
        v = succ[s]
        while v != s:
            if v in seen or v not in succ:
                raise CoverError("successor map is not a permutation")
            cyc.append(v)
            seen.add(v)
            v = succ[v]
        cycles.append(tuple(cyc))
    return CycleCover(tuple(cycles))


def paths_between(paths: Sequence[Sequence[int]]) -> PathSystem:
    return PathSystem(tuple(tuple(p) for p in paths))

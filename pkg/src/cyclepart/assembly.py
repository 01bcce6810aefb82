"""Exact Hamiltonicity, per-part identification, component cycles and the cover pipeline."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .balancing.balancer import BalancerError, combined_balancer
from .balancing.config import BalancerConfig
from .digraph import BipartiteView, Digraph, is_d_regular, is_oriented
from .partition import CellPartition, PartitionError, component_vertices, is_balanced, skeleton
from .paths import CoverError, CycleCover, PathSystem, PathSystemError, contract, cover_from_successor, lift_one_factor

HAMILTON_CAP = 24


class HamiltonCapError(RuntimeError):
    pass


class AssemblyError(RuntimeError):
    """A part's identified digraph has no Hamilton cycle, or a stitched union is not one cycle."""

    def __init__(self, message: str, part: int | None = None):
        super().__init__(message)
        self.part = part


def _reach_all(start: int, rem: int, out_mask: Sequence[int]) -> bool:
    """Every vertex of ``rem`` reachable from start inside rem ∪ {start}."""
    seen = 0
    frontier = out_mask[start] & rem
    while frontier:
        seen |= frontier
        nxt = 0
        f = frontier
        while f:
            b = f & -f
            f ^= b
            nxt |= out_mask[b.bit_length() - 1]
        frontier = nxt & rem & ~seen
    return seen == rem


def hamilton_cycle_exact(g: Digraph, cap: int = HAMILTON_CAP, budget: int | None = None) -> list[int] | None:
    """A Hamilton cycle of g as a vertex list starting at 0, or None after full search.

    Backtracking from vertex 0 with three cuts: a vertex whose only free
    in-neighbour is the current end is forced next, every remaining vertex
    must keep a free in- and out-neighbour, and the rest must stay reachable.
    ``budget`` bounds the number of search nodes.
    """
    n = g.n
    if n > cap:
        raise HamiltonCapError(f"n={n} exceeds the exact Hamiltonicity cap {cap}")
    if n < 2:
        return None
    out_m, in_m = g.out_mask, g.in_mask
    full = (1 << n) - 1
    if any(not out_m[v] or not in_m[v] for v in range(n)):
        return None
    if not _reach_all(0, full & ~1, out_m) or not _reach_all(0, full & ~1, g.reverse().out_mask):
        return None
    path = [0]
    nodes = [0]

    def rec(cur: int, rem: int) -> bool:
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise HamiltonCapError(f"search budget {budget} exhausted at n={n}")
        if not rem:
            return bool(out_m[cur] & 1)
        avail = rem | 1
        forced = -1
        r = rem
        while r:
            b = r & -r
            r ^= b
            v = b.bit_length() - 1
            free_in = in_m[v] & (rem | (1 << cur))
            if not free_in or not (out_m[v] & avail):
                return False
            if free_in == 1 << cur:
                if forced >= 0:
                    return False
                forced = v
        if forced >= 0:
            cands = [forced] if out_m[cur] >> forced & 1 else []
        else:
            cands = [v for v in range(n) if (out_m[cur] & rem) >> v & 1]
            cands.sort(key=lambda v: (bin(out_m[v] & rem).count("1"), v))
        for v in cands:
            nrem = rem & ~(1 << v)
            if nrem and not _reach_all(v, nrem, out_m):
                continue
            path.append(v)
            if rec(v, nrem):
                return True
            path.pop()
        return False

    return list(path) if rec(0, full & ~1) else None


def _part_sets(p: CellPartition, i: int) -> tuple[list[int], list[int], set[int]]:
    diag = set(p.cells[i][i])
    return sorted(p.rows[i]), sorted(p.cols[i]), diag


def identify_and_split(
    g: Digraph, p: CellPartition, i: int, phi: dict[int, int], cap: int = HAMILTON_CAP
) -> PathSystem | tuple[int, ...]:
    """Paths Q in G_ii with Q ∪ {φ(v)v} one cycle on V_i* ∪ V_*i, or a cycle when V_i* = V_*i = V_ii."""
    rows, cols, diag = _part_sets(p, i)
    off_r = [v for v in rows if v not in diag]
    off_c = [v for v in cols if v not in diag]
    if sorted(phi) != off_r or sorted(phi.values()) != off_c:
        raise AssemblyError(f"part {i}: phi is not a bijection V_i*\\V_ii -> V_*i\\V_ii", i)
    if not rows:
        raise AssemblyError(f"part {i} is empty", i)
    rep = {w: w for w in diag}
    rep.update({w: v for v, w in phi.items()})
    pos = {v: t for t, v in enumerate(rows)}
    if len(rows) == 1:
        v = rows[0]
        if v in diag or not g.has_edge(v, phi[v]):
            raise AssemblyError(f"part {i}: single vertex cannot close a cycle", i)
        return PathSystem(((v, phi[v]),))
    colset = set(cols)
    h_edges = set()
    for u in rows:
        for w in g.out_adj[u]:
            if w in colset and rep[w] != u:
                h_edges.add((pos[u], pos[rep[w]]))
    h = Digraph(len(rows), h_edges)
    cyc = hamilton_cycle_exact(h, cap)
    if cyc is None:
        raise AssemblyError(f"part {i}: identified digraph on {len(rows)} vertices is not Hamiltonian", i)
    cyc = [rows[t] for t in cyc]
    if not off_r:
        return tuple(cyc)
    start = next(t for t, v in enumerate(cyc) if v not in diag)
    cyc = cyc[start:] + cyc[:start]
    paths, cur = [], [cyc[0]]
    for v in cyc[1:] + [cyc[0]]:
        if v in diag:
            cur.append(v)
        else:
            cur.append(phi[v])
            paths.append(tuple(cur))
            cur = [v]
    q = PathSystem(tuple(paths))
    q.check_in(g)
    _check_closure(q, phi, set(rows) | colset, i)
    return q


def _check_closure(q: PathSystem, phi: dict[int, int], span: set[int], part: int) -> None:
    succ = {u: v for u, v in q.edges}
    for v, w in phi.items():
        succ[w] = v
    try:
        cover = cover_from_successor(succ)
    except CoverError as exc:
        raise AssemblyError(f"part {part}: Q with phi edges is not a cycle ({exc})", part) from exc
    if len(cover) != 1 or set(cover.cycles[0]) != span:
        raise AssemblyError(f"part {part}: Q with phi edges is not one spanning cycle", part)


def reverse_bfs_order(p: CellPartition, comp: Sequence[int]) -> list[int]:
    """Order of a skeleton component in which every index but the last has a later neighbour."""
    sk = skeleton(p)
    inside = set(comp)
    root = min(comp)
    order, seen, dq = [], {root}, deque([root])
    while dq:
        u = dq.popleft()
        order.append(u)
        for w in sk.neighbours(u):
            if w in inside and w not in seen:
                seen.add(w)
                dq.append(w)
    if seen != inside:
        raise PartitionError(f"{sorted(comp)} is not a connected skeleton component")
    return order[::-1]


def component_cycle(g: Digraph, p: CellPartition, comp: Sequence[int], cap: int = HAMILTON_CAP) -> tuple[int, ...]:
    """One cycle spanning ∪_{i∈I}(V_i* ∪ V_*i), stitched part by part."""
    if not is_balanced(p):
        raise PartitionError(f"partition is not balanced: imbalance {p.imbalance()}")
    span = component_vertices(p, comp)
    if not span:
        raise AssemblyError(f"component {sorted(comp)} has no vertices")
    order = reverse_bfs_order(p, comp)
    if len(order) == 1:
        res = identify_and_split(g, p, order[0], {}, cap)
        if isinstance(res, PathSystem):
            raise AssemblyError(f"part {order[0]}: singleton component gave paths", order[0])
        return res
    edges: list[tuple[int, int]] = []
    q_paths: list[tuple[int, ...]] = []
    for i in order:
        rows, cols, diag = _part_sets(p, i)
        off_r = [v for v in rows if v not in diag]
        off_c = [v for v in cols if v not in diag]
        rset, cset = set(off_r), set(off_c)
        phi = {path[-1]: path[0] for path in q_paths if path[0] in cset and path[-1] in rset}
        free_r = [v for v in off_r if v not in phi]
        free_c = [v for v in off_c if v not in set(phi.values())]
        phi.update(zip(free_r, free_c))
        res = identify_and_split(g, p, i, phi, cap)
        if not isinstance(res, PathSystem):
            raise AssemblyError(f"part {i} has no off-diagonal vertices inside a larger component", i)
        edges.extend(res.edges)
        if i == order[-1]:
            break
        try:
            q_paths = list(PathSystem.from_edges(edges).paths)
        except PathSystemError as exc:
            raise AssemblyError(f"part {i}: stitched union is not a path system ({exc})", i) from exc
    succ = dict(edges)
    if len(succ) != len(edges):
        raise AssemblyError("stitched union repeats a tail vertex")
    try:
        cover = cover_from_successor(succ)
    except CoverError as exc:
        raise AssemblyError(f"stitched union is not a cycle ({exc})") from exc
    if len(cover) != 1 or set(cover.cycles[0]) != span:
        raise AssemblyError("stitched union is not one cycle over the component")
    return cover.cycles[0]


@dataclass
class PipelineReport:
    n: int
    d: int | None
    q: int | None = None
    stage: str = "partition"
    ok: bool = False
    message: str = ""
    balancer: dict | None = None
    components: int | None = None
    cycles: int | None = None
    bound: int | None = None
    min_length: int | None = None
    half_d: Fraction | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "q": self.q,
            "stage": self.stage,
            "ok": self.ok,
            "message": self.message,
            "balancer": self.balancer,
            "components": self.components,
            "cycles": self.cycles,
            "bound": self.bound,
            "min_length": self.min_length,
            "half_d": None if self.half_d is None else str(self.half_d),
            "long_cycles": None if self.min_length is None else self.min_length >= self.half_d,
            "details": self.details,
        }


@dataclass(frozen=True)
class PipelineResult:
    cover: CycleCover | None
    report: PipelineReport


def cover_pipeline(
    g: Digraph,
    p: CellPartition | None = None,
    cfg: BalancerConfig | None = None,
    expansion=None,
    cap: int = HAMILTON_CAP,
) -> PipelineResult:
    """Balance, contract, build one cycle per skeleton component, lift back.

    Never returns an invalid cover: a failing stage yields ``cover=None`` and
    the report names the stage. ``expansion`` holds the parameters used when
    ``p`` is None and the partition is produced by the heuristic refiner.
    """
    cfg = cfg or BalancerConfig()
    d = is_d_regular(g)
    rep = PipelineReport(g.n, d)
    if d is None or d == 0:
        rep.message = "digraph is not d-regular with d >= 1"
        return PipelineResult(None, rep)
    rep.q = cfg.q if cfg.q is not None else (2 if is_oriented(g) else 1)
    rep.bound = g.n // (rep.q * d + 1)
    rep.half_d = Fraction(d, 2)
    if p is None:
        from .expansion import ExpansionParams, refine_partition_heuristic

        p, rrep = refine_partition_heuristic(g, expansion or ExpansionParams(Fraction(1, 20), Fraction(1, 10)))
        rep.details["refinement"] = rrep.to_json()
    if p.n != g.n:
        rep.message = f"partition covers {p.n} vertices, digraph has {g.n}"
        return PipelineResult(None, rep)
    rep.stage = "balancing"
    try:
        res = combined_balancer(g, p, cfg)
    except (BalancerError, ValueError) as exc:
        rep.message = str(exc)
        rep.details["tag"] = getattr(exc, "tag", type(exc).__name__)
        return PipelineResult(None, rep)
    rep.balancer = res.report.to_json()
    con = contract(g, res.partition, res.paths)
    pc = con.partition
    if not is_balanced(pc):
        rep.message = f"contracted partition is not balanced: {pc.imbalance()}"
        return PipelineResult(None, rep)
    rep.stage = "hamiltonicity"
    comps = [c for c in skeleton(pc).components() if component_vertices(pc, c)]
    rep.components = len(comps)
    h_cycles = []
    for comp in comps:
        span = component_vertices(pc, comp)
        if len(span) == 1:
            (w,) = span
            path = con.lift[w]
            if len(path) >= 2 and g.has_edge(path[-1], path[0]):
                h_cycles.append((w,))
                continue
            rep.message = f"component {comp} is a single vertex that does not close"
            rep.details["part"] = comp[0]
            return PipelineResult(None, rep)
        try:
            h_cycles.append(component_cycle(con.graph, pc, comp, cap))
        except (AssemblyError, HamiltonCapError, PartitionError) as exc:
            rep.message = str(exc)
            rep.details["part"] = getattr(exc, "part", None)
            return PipelineResult(None, rep)
    rep.stage = "lift"
    if all(len(c) >= 2 for c in h_cycles):
        cover = lift_one_factor(CycleCover(tuple(h_cycles)), con)
    else:
        cover = CycleCover(tuple(tuple(v for w in c for v in con.lift[w]) for c in h_cycles))
    errs = cover.problems(g)
    if errs:
        rep.message = "; ".join(errs)
        return PipelineResult(None, rep)
    rep.stage = "done"
    rep.ok = True
    rep.cycles = len(cover)
    rep.min_length = min(len(c) for c in cover.cycles)
    return PipelineResult(cover.canonical(), rep)


class ExtensionError(ValueError):
    pass


@dataclass(frozen=True)
class ExtensionResult:
    """Cover of the bipartite graph; left position a is vertex a, right position b is vertex m+b."""

    cover: CycleCover
    h: Digraph
    h_cover: CycleCover
    bound: Fraction
    method: str

    def to_json(self) -> dict:
        return {
            "cover": self.cover.to_json(),
            "h_cycles": len(self.h_cover),
            "bound": str(self.bound),
            "within_bound": len(self.cover) <= self.bound,
            "method": self.method,
        }


def extend_matching_bipartite(bg: BipartiteView, matching: Sequence[tuple[int, int]]) -> ExtensionResult:
    """Vertex-disjoint cycles covering a d-regular bipartite graph and containing the perfect matching."""
    m = len(bg.left)
    if len(bg.right) != m:
        raise ExtensionError("sides differ in size")
    degs = [len(x) for x in bg.left_neighbours()] + [len(x) for x in bg.right_neighbours()]
    if m == 0 or len(set(degs)) != 1:
        raise ExtensionError("bipartite graph is not regular")
    d = degs[0]
    matching = [tuple(e) for e in matching]
    if any(e not in bg.edges for e in matching):
        raise ExtensionError("matching edge missing from the graph")
    if sorted(a for a, _ in matching) != list(range(m)) or sorted(b for _, b in matching) != list(range(m)):
        raise ExtensionError("matching is not perfect")
    if d == 1:
        raise ExtensionError("d = 1: H is edgeless, no cover containing M beyond 2-cycles of single edges")
    partner = dict(matching)  # x_a is matched to y_partner[a]
    owner = {b: a for a, b in matching}
    h = Digraph(m, [(a, owner[b]) for a, b in bg.edges if owner[b] != a])
    if m <= 16:
        from .instances import min_cycle_cover_exact

        found = min_cycle_cover_exact(h)
        if found is None:
            raise ExtensionError("H has no 1-factor")
        h_cover, method = found[1], "exact"
    else:
        res = cover_pipeline(h, CellPartition.diagonal([range(m)]))
        if res.cover is None:
            raise ExtensionError(f"pipeline on H failed: {res.report.message}")
        h_cover, method = res.cover, "pipeline"
    cycles = []
    for c in h_cover.cycles:
        cyc = []
        for t, a in enumerate(c):
            nxt = c[(t + 1) % len(c)]
            cyc += [a, m + partner[nxt]]
        cycles.append(tuple(cyc))
    cover = CycleCover(tuple(cycles))
    _check_bipartite_cover(bg, cover, matching)
    return ExtensionResult(cover, h, h_cover, Fraction(2 * m, 2 * d), method)


def _check_bipartite_cover(bg: BipartiteView, cover: CycleCover, matching) -> None:
    m = len(bg.left)
    und = {frozenset((a, m + b)) for a, b in bg.edges}
    seen = [v for c in cover.cycles for v in c]
    if sorted(seen) != list(range(2 * m)):
        raise ExtensionError("cover does not partition the vertex set")
    used = set()
    for c in cover.cycles:
        for t, v in enumerate(c):
            e = frozenset((v, c[(t + 1) % len(c)]))
            if e not in und:
                raise ExtensionError(f"cover edge {sorted(e)} not in graph")
            used.add(e)
    for a, b in matching:
        if frozenset((a, m + b)) not in used:
            raise ExtensionError(f"matching edge ({a},{b}) missing from the cover")


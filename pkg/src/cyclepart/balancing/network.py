"""Cross structures X±_ij, M_ij and the balancing networks F, F0, F*, F⁺."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from ..digraph import Digraph
from ..flow import Flow, FlowNetwork
from ..partition import CellPartition, cross_edges
from .config import BalancerConfig
from .vizing import Multigraph, disjointify_matchings, vizing_matching


class CrossStructureError(ValueError):
    pass


class SeedFlowError(ValueError):
    pass


@dataclass(frozen=True)
class Accounting:
    e_g: int
    x_plus_mass: int
    x_minus_mass: int
    matching_mass: Fraction
    slack: Fraction

    @property
    def rhs(self) -> Fraction:
        return self.x_plus_mass + self.x_minus_mass + self.matching_mass + self.slack

    @property
    def holds(self) -> bool:
        return self.e_g <= self.rhs


@dataclass(frozen=True)
class CrossStructures:
    k: int
    d: int
    theta: Fraction
    x_plus: dict  # (i, j) -> tuple of vertices
    x_minus: dict
    matchings: dict  # (i, j) -> tuple of directed edges
    accounting: dict  # (i, j) -> Accounting
    trimmed: dict  # (i, j) -> bool, whether RHS <= e(G_ij) + d was reached
    disjointify_method: str = "none"

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.k) for j in range(self.k) if i != j]

    def union_matching(self) -> list[tuple[int, int]]:
        return sorted(e for m in self.matchings.values() for e in m)

    def size(self) -> int:
        return sum(
            len(self.x_plus.get(ij, ())) + len(self.x_minus.get(ij, ())) + len(self.matchings.get(ij, ()))
            for ij in self.pairs()
        )

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "d": self.d,
            "disjointify": self.disjointify_method,
            "cells": [
                {
                    "i": i,
                    "j": j,
                    "x_plus": list(self.x_plus.get((i, j), ())),
                    "x_minus": list(self.x_minus.get((i, j), ())),
                    "matching": [list(e) for e in self.matchings.get((i, j), ())],
                    "e_g": self.accounting[(i, j)].e_g,
                    "rhs": str(self.accounting[(i, j)].rhs),
                    "holds": self.accounting[(i, j)].holds,
                }
                for i, j in self.pairs()
                if (i, j) in self.accounting
            ],
        }


def extract_cross_structures(
    g: Digraph, p: CellPartition, cfg: BalancerConfig, d: int, trim: bool = True
) -> CrossStructures:
    """X±_ij by the θd threshold, M_ij from Vizing colourings, made jointly disjoint.

    ``g`` is the (typically stripped) subgraph whose cross subgraphs G_ij are
    inspected; ``d`` is the regularity degree of the host digraph. With
    ``trim=False`` the structures keep every X vertex and matching edge.
    """
    k = p.k
    thr = cfg.theta * d
    if thr < 2:
        raise CrossStructureError(f"threshold θd = {thr} is below 2")
    floor = cfg.floor_for(k)
    mm = 6 * k * k * thr  # 6k²θd
    slack = 3 * thr * floor
    xp, xm, m0, ecount = {}, {}, {}, {}
    outd, ind = {}, {}
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            es = cross_edges(g, p, i, j)
            ecount[(i, j)] = len(es)
            od = Counter(u for u, _ in es)
            idg = Counter(v for _, v in es)
            outd[(i, j)], ind[(i, j)] = od, idg
            xp[(i, j)] = tuple(sorted(v for v, c in od.items() if c >= thr))
            xm[(i, j)] = tuple(sorted(v for v, c in idg.items() if c >= thr))
            sp, sm = set(xp[(i, j)]), set(xm[(i, j)])
            rest = [(u, v) for u, v in es if u not in sp and v not in sm]
            if not rest:
                m0[(i, j)] = ()
                continue
            verts = sorted({x for e in rest for x in e})
            loc = {v: t for t, v in enumerate(verts)}
            res = vizing_matching(Multigraph(len(verts), tuple((loc[u], loc[v]) for u, v in rest)))
            match = tuple(sorted(rest[e] for e in res.matching))
            m0[(i, j)] = match if len(match) > floor else ()
    keys = [ij for ij in sorted(m0) if m0[ij]]
    mats = {ij: () for ij in m0}
    method = "none"
    if keys:
        dj = disjointify_matchings([m0[ij] for ij in keys], k, seed=cfg.seed, strict=False)
        for ij, ts in zip(keys, dj.chosen):
            mats[ij] = tuple(m0[ij][t] for t in ts)
        method = dj.method
    acc, trimmed = {}, {}
    for ij in sorted(ecount):
        e_g = ecount[ij]
        xs_p = list(xp[ij])
        xs_m = list(xm[ij])
        ms = list(mats[ij])

        def account() -> Accounting:
            return Accounting(
                e_g,
                sum(outd[ij][v] for v in xs_p),
                sum(ind[ij][v] for v in xs_m),
                mm * len(ms),
                slack,
            )

        a = account()
        # trim while the RHS exceeds e(G_ij) + d, never dropping below e(G_ij)
        while trim and a.rhs > e_g + d:
            if ms and a.rhs - mm >= e_g:
                ms.pop()
            else:
                cands = [(outd[ij][v], 0, v) for v in xs_p] + [(ind[ij][v], 1, v) for v in xs_m]
                cands = [c for c in sorted(cands) if a.rhs - c[0] >= e_g]
                if not cands:
                    break
                w, side, v = cands[0]
                (xs_p if side == 0 else xs_m).remove(v)
            a = account()
        xp[ij], xm[ij], mats[ij] = tuple(xs_p), tuple(xs_m), tuple(ms)
        acc[ij] = a
        trimmed[ij] = a.rhs <= e_g + d
    return CrossStructures(k, d, Fraction(cfg.theta), xp, xm, mats, acc, trimmed, method)


def check_cross_structures(cs: CrossStructures) -> list[str]:
    errs = []
    seen: set[int] = set()
    for ij, m in cs.matchings.items():
        sp, sm = set(cs.x_plus.get(ij, ())), set(cs.x_minus.get(ij, ()))
        for u, v in m:
            if u in seen or v in seen:
                errs.append(f"matching edge ({u},{v}) shares a vertex")
            seen.update((u, v))
            if u in sp or v in sm:
                errs.append(f"matching edge ({u},{v}) in {ij} touches X")
    return errs


def S(i):  # noqa: N802
    return ("s", i)


def T(j):  # noqa: N802
    return ("t", j)


SSTAR = ("s*",)
TSTAR = ("t*",)


@dataclass(frozen=True)
class PathTag:
    kind: str  # "X+", "X-" or "M"
    i: int
    j: int
    item: object  # vertex for X±, edge for M


@dataclass
class BalancingNetwork:
    """F (or F0 when a vertex is marked) plus the super-terminal extension F*.

    ``paths`` lists, per construction path, its tag and edge indices into
    ``local``; ``removed_paths`` holds the F paths deleted to form F0.
    """

    local: FlowNetwork
    star: FlowNetwork
    paths: list[tuple[PathTag, tuple[int, ...]]]
    full: FlowNetwork
    full_paths: list[tuple[PathTag, tuple[int, ...]]]
    v0: int | None = None
    removed: dict = field(default_factory=dict)

    def plus(self) -> FlowNetwork:
        """F⁺: F* with an extra unit edge s_i t_j for every ordered pair."""
        k = sum(1 for v in self.star.nodes if isinstance(v, tuple) and v[0] == "s")
        extra = tuple((S(i), T(j), 1) for i in range(k) for j in range(k))
        return FlowNetwork(
            self.star.nodes, self.star.edges + extra, self.star.sources, self.star.sinks, self.star.node_caps
        )


def _assemble(k: int, specs: list[tuple[PathTag, list]]):
    nodes = [S(i) for i in range(k)] + [T(j) for j in range(k)]
    seen = set(nodes)
    edges = []
    paths = []
    caps = {}
    for tag, seq in specs:
        idx = []
        for a, b in zip(seq, seq[1:]):
            for x in (a, b):
                if x not in seen:
                    seen.add(x)
                    nodes.append(x)
                    caps[x] = 1
            idx.append(len(edges))
            edges.append((a, b, 1))
        paths.append((tag, tuple(idx)))
    return nodes, edges, caps, paths


def build_balancing_network(
    g: Digraph, p: CellPartition, cs: CrossStructures, v0: int | None = None
) -> BalancingNetwork:
    k = p.k
    specs: list[tuple[PathTag, list]] = []
    for i, j in cs.pairs():
        for x in cs.x_plus.get((i, j), ()):
            specs.append((PathTag("X+", i, j, x), [S(i), ("x+", x), T(j)]))
        for x in cs.x_minus.get((i, j), ()):
            specs.append((PathTag("X-", i, j, x), [S(i), ("x-", x), T(j)]))
        for u, v in cs.matchings.get((i, j), ()):
            specs.append((PathTag("M", i, j, (u, v)), [S(i), ("x+", u), ("x-", v), T(j)]))
    fn, fe, fc, fpaths = _assemble(k, specs)
    full = FlowNetwork(tuple(fn), tuple(fe), tuple(S(i) for i in range(k)), tuple(T(j) for j in range(k)), fc)
    removed: dict = {}
    kept_specs = specs
    if v0 is not None:
        i0, j0 = p.where[v0]
        if i0 == j0:
            raise CrossStructureError(f"marked vertex {v0} lies in a diagonal cell")
        kept_specs = []
        for tag, seq in specs:
            if ("x+", v0) in seq:
                removed.setdefault("through_v0_plus", []).append(tag)
            elif seq[0] == S(i0) and seq[1] == ("x-", v0):
                removed.setdefault("s_i0_v0_minus", []).append(tag)
            elif tag.kind == "M" and tag.item[1] == v0:
                removed.setdefault("x_plus_into_v0_minus", []).append(tag)
            else:
                kept_specs.append((tag, seq))
        # v0⁻ without in-neighbours disappears together with its path remnants
    ln, le, lc, lpaths = _assemble(k, kept_specs)
    local = FlowNetwork(tuple(ln), tuple(le), full.sources, full.sinks, lc)
    imb = p.imbalance()
    star_edges = list(le)
    star_edges += [(SSTAR, S(i), max(imb[i], 0)) for i in range(k)]
    star_edges += [(T(i), TSTAR, max(-imb[i], 0)) for i in range(k)]
    star_edges += [(T(i), S(i), None) for i in range(k)]
    star = FlowNetwork(tuple(ln) + (SSTAR, TSTAR), tuple(star_edges), (SSTAR,), (TSTAR,), lc)
    return BalancingNetwork(local, star, lpaths, full, fpaths, v0, removed)


@dataclass(frozen=True)
class SeedFlow:
    flow: Flow  # on the local network (F or F0)
    amounts: tuple  # per local path
    f_ij: dict
    loads: dict
    deficit: Fraction  # Σ max{e(G_ij)/d - f_ij, 0}
    lost_to_marking: Fraction


def seed_fractional_flow(
    bn: BalancingNetwork, g: Digraph, p: CellPartition, cs: CrossStructures, g0: Digraph | None = None
) -> SeedFlow:
    """Fractional flow pushing p_j(x±) along X paths and 6k²θ along matching paths.

    Loads are checked on F before the F0 deletions; paths through deleted
    elements are then cancelled. ``g0`` is the host digraph used for the
    per-vertex load bound (defaults to g).
    """
    g0 = g if g0 is None else g0
    k, d, theta = cs.k, cs.d, cs.theta
    floor_amt = 6 * k * k * theta
    od = {ij: Counter(u for u, _ in cross_edges(g, p, *ij)) for ij in cs.pairs()}
    idg = {ij: Counter(v for _, v in cross_edges(g, p, *ij)) for ij in cs.pairs()}

    def amount(tag: PathTag) -> Fraction:
        if tag.kind == "X+":
            return max(Fraction(od[(tag.i, tag.j)][tag.item], d), floor_amt)
        if tag.kind == "X-":
            return max(Fraction(idg[(tag.i, tag.j)][tag.item], d), floor_amt)
        return Fraction(floor_amt)

    full_amounts = [amount(tag) for tag, _ in bn.full_paths]
    loads: dict = Counter()
    for (tag, idx), a in zip(bn.full_paths, full_amounts):
        for e in idx[:-1]:
            loads[bn.full.edges[e][1]] += a
    over = {v: x for v, x in loads.items() if x > 1}
    if over:
        v, x = min(over.items(), key=lambda kv: repr(kv[0]))
        vert = v[1]
        i = p.row_of(vert) if v[0] == "x+" else p.col_of(vert)
        if v[0] == "x+":
            inside = sum(1 for w in g0.out_adj[vert] if w in p.cols[i])
        else:
            inside = sum(1 for w in g0.in_adj[vert] if w in p.rows[i])
        bound = 1 - Fraction(inside, d) + 6 * k**3 * theta
        raise SeedFlowError(
            f"load {x} > 1 at {v!r} (degree bound {bound}); the small-θ hypothesis fails here"
        )
    # deleting v0 cancels exactly the construction paths through removed elements
    kept = {tag for tag, _ in bn.paths}
    amt = {tag: a for (tag, _), a in zip(bn.full_paths, full_amounts)}
    lost = sum((a for tag, a in amt.items() if tag not in kept), Fraction(0))
    amounts = []
    vals = [Fraction(0)] * len(bn.local.edges)
    for tag, idx in bn.paths:
        amounts.append(amt[tag])
        for e in idx:
            vals[e] += amt[tag]
    f_ij: dict = Counter()
    for (tag, _), a in zip(bn.paths, amounts):
        f_ij[(tag.i, tag.j)] += a
    # lower f_ij to e(G_ij)/d by draining paths of that class in construction order
    for pos in range(len(bn.paths) - 1, -1, -1):
        tag, idx = bn.paths[pos]
        ij = (tag.i, tag.j)
        excess = f_ij[ij] - Fraction(len(cross_edges(g, p, *ij)), d)
        if excess > 0:
            cut = min(excess, amounts[pos])
            amounts[pos] -= cut
            f_ij[ij] -= cut
            for e in idx:
                vals[e] -= cut
    deficit = sum(
        (max(Fraction(len(cross_edges(g, p, i, j)), d) - f_ij[(i, j)], Fraction(0)) for i, j in cs.pairs()),
        Fraction(0),
    )
    return SeedFlow(Flow(tuple(vals)), tuple(amounts), dict(f_ij), dict(loads), deficit, lost)

"""Balanced path systems: the flow route, the extremal search, and the combined pipeline."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from ..digraph import Digraph, is_d_regular, is_oriented
from ..flow import FlowNetwork, max_flow_integer
from ..partition import (
    CellPartition,
    cross_edges,
    is_balanced,
    merge_to_diagonal,
    skeleton,
)
from ..paths import (
    PathSystem,
    _bipartite_min_degree,
    contract,
    is_nontrivial,
    is_p_balanced,
)
from .config import BalancerConfig
from .network import (
    SeedFlowError,
    build_balancing_network,
    extract_cross_structures,
    seed_fractional_flow,
)
from .skeleton import acyclic_cross_skeleton


class BalancerError(RuntimeError):
    """Failure of a balancing step; ``tag`` names the hypothesis or stage involved."""

    def __init__(self, message: str, tag: str, details: dict | None = None):
        super().__init__(f"[{tag}] {message}")
        self.tag = tag
        self.details = details or {}


@dataclass
class BalancedReport:
    hypotheses: dict = field(default_factory=dict)
    m1: bool = False
    v0: int | None = None
    flow_value: int = 0
    required: int = 0
    seed: dict = field(default_factory=dict)
    extension_source: str = ""
    stripped: bool = False
    e_q: int = 0
    bound: Fraction = Fraction(0)
    nontrivial: bool = False
    structures: dict = field(default_factory=dict)
    trimmed: bool = True
    excluded: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "hypotheses": self.hypotheses,
            "m1": self.m1,
            "v0": self.v0,
            "flow_value": self.flow_value,
            "required": self.required,
            "seed": self.seed,
            "extension_source": self.extension_source,
            "stripped": self.stripped,
            "e_q": self.e_q,
            "bound": str(self.bound),
            "nontrivial": self.nontrivial,
            "trimmed": self.trimmed,
            "excluded": self.excluded,
        }


def _require_regular(g: Digraph) -> int:
    d = is_d_regular(g)
    if d is None:
        raise BalancerError("input digraph is not regular", "regularity")
    return d


def balancer_hypotheses(g: Digraph, p: CellPartition, cfg: BalancerConfig, d: int) -> dict:
    """Checks of the bipartite degree, imbalance and part-size hypotheses (plus the
    all-but-γn degree condition used by the combined balancer)."""
    n, k = g.n, p.k
    gn = cfg.gamma * n
    out: dict = {}
    degs = [_bipartite_min_degree(g, p.rows[i], p.cols[i]) for i in range(k)]
    out["min_bipartite_degree"] = {
        "holds": all(x is not None and x * k >= d for x in degs),
        "values": degs,
        "required": str(Fraction(d, k)),
    }
    imb = p.imbalance()
    out["imbalance"] = {"holds": all(abs(x) <= gn for x in imb), "values": imb, "limit": str(gn)}
    sizes = [(len(p.rows[i]), len(p.cols[i])) for i in range(k)]
    out["part_sizes"] = {
        "holds": all(a >= d - gn and b >= d - gn for a, b in sizes),
        "values": sizes,
        "limit": str(d - gn),
    }
    bad = Counter()
    for v in range(n):
        i, j = p.where[v]
        if sum(1 for w in g.out_adj[v] if w in p.cols[i]) < d - gn or sum(
            1 for w in g.in_adj[v] if w in p.rows[j]
        ) < d - gn:
            bad[(i, j)] += 1
    out["cell_degree"] = {
        "holds": all(c <= gn for c in bad.values()),
        "worst": max(bad.values(), default=0),
        "limit": str(gn),
    }
    return out


def marked_vertex(g0: Digraph, p: CellPartition, threshold: Fraction) -> int | None:
    """Lowest off-diagonal v with d⁺(v, V_*i) - d⁻(v, V_i*) >= threshold, i = row(v)."""
    for v in range(g0.n):
        i, j = p.where[v]
        if i == j:
            continue
        gap = sum(1 for w in g0.out_adj[v] if w in p.cols[i]) - sum(1 for w in g0.in_adj[v] if w in p.rows[i])
        if gap >= threshold:
            return v
    return None


def _kuhn(cands: list[list[int]]) -> tuple[list[int] | None, int | None]:
    """Augmenting-path bipartite matching; each item gets a distinct candidate.

    Returns the assignment, or None with the index of the first item left unmatched.
    """
    owner: dict[int, int] = {}

    def try_item(t: int, seen: set[int]) -> bool:
        for v in cands[t]:
            if v in seen:
                continue
            seen.add(v)
            if v not in owner or try_item(owner[v], seen):
                owner[v] = t
                return True
        return False

    for t in range(len(cands)):
        if not try_item(t, set()):
            return None, t
    res = [0] * len(cands)
    for v, t in owner.items():
        res[t] = v
    return res, None


def _extend(
    host: Digraph,
    p: CellPartition,
    y_plus: list[tuple[int, int, int]],
    y_minus: list[tuple[int, int, int]],
    m_star: list[tuple[int, int]],
    banned: set[int],
) -> tuple[list[tuple[int, int]] | None, tuple | None]:
    """Distinct out-partners for Y⁺ and in-partners for Y⁻; on failure, the network node left unmatched."""
    cands = []
    for i, j, y in y_plus:
        cands.append([v for u, v in cross_edges(host, p, i, j) if u == y and v not in banned])
    for i, j, y in y_minus:
        cands.append([u for u, v in cross_edges(host, p, i, j) if v == y and u not in banned])
    pick, miss = _kuhn(cands)
    if pick is None:
        if miss < len(y_plus):
            return None, ("x+", y_plus[miss][2])
        return None, ("x-", y_minus[miss - len(y_plus)][2])
    edges = list(m_star)
    for (i, j, y), v in zip(y_plus, pick[: len(y_plus)]):
        edges.append((y, v))
    for (i, j, y), u in zip(y_minus, pick[len(y_plus):]):
        edges.append((u, y))
    return edges, None


def find_balanced_path_system(
    g0: Digraph, p: CellPartition, cfg: BalancerConfig | None = None
) -> tuple[PathSystem, BalancedReport]:
    """P-balanced path system with e(Q) <= (k-1)Σ|imbalance|/2 via integral flow on F*.

    Hypothesis violations are reported, not fatal. Raises BalancerError if the
    flow does not saturate the super-terminal edges or the extension step
    cannot find distinct partners.
    """
    cfg = cfg or BalancerConfig()
    d = _require_regular(g0)
    n, k = g0.n, p.k
    rep = BalancedReport()
    rep.hypotheses = balancer_hypotheses(g0, p, cfg, d)
    off = p.off_diagonal()
    rep.m1 = len(off) > k * k * cfg.gamma * n
    rep.bound = Fraction((k - 1) * sum(abs(x) for x in p.imbalance()), 2)
    if is_balanced(p):
        rep.nontrivial = is_nontrivial(PathSystem(()), p)
        return PathSystem(()), rep
    sk = acyclic_cross_skeleton(g0, p, d)
    g = sk.subgraph
    v0 = None if rep.m1 else marked_vertex(g0, p, cfg.m2_for(k, d))
    rep.v0 = v0
    need = sum(max(x, 0) for x in p.imbalance())
    rep.required = need
    # a Y vertex without free partners is shut off in F* and the flow re-solved
    excluded: set = set()
    while True:
        flow, bn, val = _saturating_flow(g, g0, p, cfg, d, v0, need, excluded, rep)
        if val < need:
            failed = [h for h, r in rep.hypotheses.items() if not r["holds"]]
            raise BalancerError(
                f"max flow {val} does not saturate the s* edges (needs {need})",
                "saturation",
                {"failed_hypotheses": failed, "seed": rep.seed, "excluded": sorted(excluded)},
            )
        y_plus, y_minus, m_star = [], [], []
        for e, (u, v, _) in enumerate(bn.edges):
            if flow.values[e] != 1:
                continue
            if u[0] == "x+" and v[0] == "t":
                y_plus.append((p.row_of(u[1]), v[1], u[1]))
            elif u[0] == "s" and v[0] == "x-":
                y_minus.append((u[1], p.col_of(v[1]), v[1]))
            elif u[0] == "x+" and v[0] == "x-":
                m_star.append((u[1], v[1]))
        y_plus.sort()
        y_minus.sort()
        m_star.sort()
        w = set(off) if not rep.m1 else set()
        base_ban = {x for e in m_star for x in e} | {y for _, _, y in y_plus} | {y for _, _, y in y_minus}
        edges, miss = None, None
        for name, host, ban in (
            ("stripped", g, base_ban | w),
            ("host", g0, base_ban | w),
            ("host-ignoring-W", g0, base_ban),
        ):
            edges, miss = _extend(host, p, y_plus, y_minus, m_star, ban)
            if edges is not None:
                rep.extension_source = name
                break
        if edges is not None:
            break
        if miss in excluded:
            raise BalancerError("no distinct extension partners exist", "extension", {"excluded": sorted(excluded)})
        excluded.add(miss)
    rep.excluded = [list(x) for x in sorted(excluded)]
    q = PathSystem.from_edges(edges)
    if not is_p_balanced(q, p):
        raise AssertionError("saturated flow produced an unbalanced system")
    strip = acyclic_cross_skeleton(Digraph(n, q.edges), p, d=1)
    q2 = PathSystem.from_edges(strip.subgraph.sorted_edges())
    if q2.e < q.e and (is_nontrivial(q2, p) or not is_nontrivial(q, p)):
        q = q2
        rep.stripped = True
    if not is_p_balanced(q, p):
        raise AssertionError("stripping broke P-balance")
    rep.e_q = q.e
    rep.nontrivial = is_nontrivial(q, p)
    return q, rep


def _saturating_flow(g, g0, p, cfg, d, v0, need, excluded, rep):
    """Max flow on F* (node capacities of ``excluded`` set to 0), trimmed structures first."""
    for trim in (True, False):
        # trimmed structures can leave too little capacity at desk scale; the
        # untrimmed retry only adds paths, and Q is re-validated afterwards
        try:
            cs = extract_cross_structures(g, p, cfg, d, trim=trim)
        except ValueError as exc:
            raise BalancerError(str(exc), "threshold") from exc
        rep.structures = cs.to_json()
        rep.trimmed = trim
        bn = build_balancing_network(g, p, cs, v0)
        if not excluded:
            try:
                seed = seed_fractional_flow(bn, g, p, cs, g0)
                rep.seed = {"available": True, "deficit": str(seed.deficit), "lost_to_marking": str(seed.lost_to_marking)}
            except SeedFlowError as exc:
                rep.seed = {"available": False, "reason": str(exc)}
        star = bn.star
        if excluded:
            caps = dict(star.node_caps)
            caps.update({x: 0 for x in excluded if x in caps})
            star = FlowNetwork(star.nodes, star.edges, star.sources, star.sinks, caps)
        flow, _ = max_flow_integer(star)
        val = flow.value(star)
        rep.flow_value = int(val)
        if val > need:
            raise AssertionError("flow exceeds the cut at s*")
        if val == need:
            break
    return flow, star, val


def _part_of(p: CellPartition) -> list[int]:
    return [p.where[v][0] for v in range(p.n)]


def _acceptable(edges: list[tuple[int, int]], p: CellPartition) -> PathSystem | None:
    try:
        q = PathSystem.from_edges(edges)
    except ValueError:
        return None
    if is_p_balanced(q, p) and is_nontrivial(q, p):
        return q
    return None


@dataclass
class ExtremalReport:
    stage: str = ""
    nodes: int = 0
    hypotheses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"stage": self.stage, "nodes": self.nodes, "hypotheses": self.hypotheses}


def find_extremal_path_system(
    g: Digraph, p: CellPartition, cfg: BalancerConfig | None = None
) -> tuple[PathSystem, ExtremalReport]:
    """Non-trivial P-balanced path system with at most k edges for a diagonal partition."""
    cfg = cfg or BalancerConfig()
    d = _require_regular(g)
    k, n = p.k, g.n
    if p.off_diagonal():
        raise BalancerError("partition is not diagonal", "diagonal")
    qd = cfg.q if cfg.q is not None else (2 if is_oriented(g) else 1)
    if n >= (qd * d + 1) * k:
        raise BalancerError(f"n={n} >= (qd+1)k={(qd * d + 1) * k}", "n<(qd+1)k")
    rep = ExtremalReport()
    part = _part_of(p)
    rep.hypotheses = {
        "part_size": all(2 * len(p.cells[i][i]) >= d for i in range(k)),
        "inside_degree": all(
            k * (sum(1 for w in g.out_adj[v] if part[w] == part[v]) + sum(1 for w in g.in_adj[v] if part[w] == part[v]))
            >= d
            for v in range(n)
        ),
        "d>165k^5": d > 165 * k**5,
    }
    classes = {(i, j): cross_edges(g, p, i, j) for i in range(k) for j in range(k) if i != j}
    # disjoint pair e1 in G_ij, e2 in G_ji
    for i in range(k):
        for j in range(i + 1, k):
            for e1 in classes[(i, j)]:
                for e2 in classes[(j, i)]:
                    if not set(e1) & set(e2):
                        rep.stage = "disjoint-pair"
                        return PathSystem.from_edges([e1, e2]), rep
    # directed cycles of length >= 3 in H0, one edge per class among its first three
    heavy = {ij for ij, es in classes.items() if len(es) >= 3}
    for cyc in _simple_cycles(k, heavy, 3):
        arcs = [(cyc[t], cyc[(t + 1) % len(cyc)]) for t in range(len(cyc))]
        for pick in product(*[classes[a][:3] for a in arcs]):
            q = _acceptable(list(pick), p)
            if q is not None:
                rep.stage = "h0-cycle"
                return q, rep
    # bounded backtracking over at most k cross edges
    cross = sorted(e for es in classes.values() for e in es)
    found = _backtrack(cross, part, k, p, cfg.node_budget, rep)
    if found is None:
        raise BalancerError(
            f"no non-trivial balanced system within {k} edges ({rep.nodes} nodes searched)",
            "search-cap" if rep.nodes >= cfg.node_budget else "search-exhausted",
            {"hypotheses": rep.hypotheses},
        )
    rep.stage = "backtracking"
    return found, rep


def _simple_cycles(k: int, arcs: set, min_len: int):
    """Directed simple cycles on [k] using ``arcs``, smallest vertex first, lexicographic."""
    succ = {i: sorted(j for a, j in arcs if a == i) for i in range(k)}
    for s in range(k):
        stack = [(s, [s])]
        while stack:
            u, path = stack.pop()
            for v in reversed(succ[u]):
                if v == s and len(path) >= min_len:
                    yield path
                elif v > s and v not in path:
                    stack.append((v, path + [v]))


def _backtrack(cross, part, k, p, budget, rep) -> PathSystem | None:
    bal = [0] * k
    outd: set[int] = set()
    ind: set[int] = set()
    comp = {}

    def find(x):
        while comp.get(x, x) != x:
            x = comp[x]
        return x

    chosen: list[tuple[int, int]] = []

    def rec(start: int) -> PathSystem | None:
        rep.nodes += 1
        if rep.nodes >= budget:
            return None
        if chosen and not any(bal):
            q = _acceptable(chosen, p)
            if q is not None:
                return q
        if len(chosen) == k:
            return None
        if sum(abs(b) for b in bal) > 2 * (k - len(chosen)):
            return None
        for t in range(start, len(cross)):
            u, v = cross[t]
            if u in outd or v in ind:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                continue
            saved = dict(comp)
            comp[rv] = ru
            outd.add(u)
            ind.add(v)
            bal[part[u]] += 1
            bal[part[v]] -= 1
            chosen.append((u, v))
            res = rec(t + 1)
            if res is not None:
                return res
            chosen.pop()
            bal[part[u]] -= 1
            bal[part[v]] += 1
            outd.discard(u)
            ind.discard(v)
            comp.clear()
            comp.update(saved)
            if rep.nodes >= budget:
                return None
        return None

    return rec(0)


@dataclass
class CombinedReport:
    q: int
    hypotheses: dict
    balanced: dict
    components_before: int
    components_after: int
    limit: Fraction
    route: str
    symmetric_difference: list[int]
    e_q: int
    extremal: dict | None = None

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "hypotheses": self.hypotheses,
            "balanced": self.balanced,
            "components_before": self.components_before,
            "components_after": self.components_after,
            "limit": str(self.limit),
            "route": self.route,
            "symmetric_difference": self.symmetric_difference,
            "e_q": self.e_q,
            "extremal": self.extremal,
        }


@dataclass(frozen=True)
class CombinedResult:
    partition: CellPartition
    paths: PathSystem
    contracted: CellPartition
    report: CombinedReport


def combined_balancer(g: Digraph, p: CellPartition, cfg: BalancerConfig | None = None) -> CombinedResult:
    """P', Q and the contracted P* whose skeleton has at most n/(qd+1) components."""
    cfg = cfg or BalancerConfig()
    d = _require_regular(g)
    n, k = g.n, p.k
    q = cfg.q if cfg.q is not None else (2 if is_oriented(g) else 1)
    limit = Fraction(n, q * d + 1)
    hyp = balancer_hypotheses(g, p, cfg, d)
    before = len(skeleton(p).components())
    q0, rep0 = find_balanced_path_system(g, p, cfg)
    p0 = contract(g, p, q0).partition
    comps = len(skeleton(p0).components())
    if comps <= limit:
        return CombinedResult(
            p, q0, p0,
            CombinedReport(q, hyp, rep0.to_json(), before, comps, limit, "flow", [0] * k, q0.e),
        )
    kstar = n // (q * d + 1) + 1
    if skeleton(p0).edges or k != kstar:
        raise BalancerError(
            f"{comps} components > {limit} but the skeleton is not empty on k*={kstar} parts (k={k})",
            "empty-skeleton",
            {"components": comps, "k_star": kstar},
        )
    p1, mrep = merge_to_diagonal(g, p)
    q1, erep = find_extremal_path_system(g, p1, cfg)
    p_star = contract(g, p1, q1).partition
    after = len(skeleton(p_star).components())
    if after > limit:
        raise BalancerError(f"{after} components remain above {limit}", "components")
    return CombinedResult(
        p1, q1, p_star,
        CombinedReport(
            q, hyp, rep0.to_json(), before, after, limit, "extremal", mrep.symmetric_difference, q1.e,
            erep.to_json(),
        ),
    )

"""Capacitated flow networks, deterministic Edmonds-Karp, min cuts, flow reduction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

Node = Hashable
Cap = int | None  # None means unbounded


class FlowError(ValueError):
    pass


class UnboundedFlowError(FlowError):
    pass


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network. Parallel edges are allowed and addressed by index."""

    nodes: tuple[Node, ...]
    edges: tuple[tuple[Node, Node, Cap], ...]
    sources: tuple[Node, ...]
    sinks: tuple[Node, ...]
    node_caps: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = {v: i for i, v in enumerate(self.nodes)}
        if len(idx) != len(self.nodes):
            raise FlowError("repeated node label")
        object.__setattr__(self, "_index", idx)
        src, snk = set(self.sources), set(self.sinks)
        if src & snk:
            raise FlowError("a node is both source and sink")
        for u, v, c in self.edges:
            if u not in idx or v not in idx:
                raise FlowError(f"edge ({u!r},{v!r}) uses unknown node")
            if c is not None and c < 0:
                raise FlowError("negative capacity")
            if v in src:
                raise FlowError(f"source {v!r} has an in-edge")
            if u in snk:
                raise FlowError(f"sink {u!r} has an out-edge")
        for v, c in self.node_caps.items():
            if v not in idx:
                raise FlowError(f"capacity on unknown node {v!r}")
            if c is not None and c < 0:
                raise FlowError("negative node capacity")
        for v in src | snk:
            if v not in idx:
                raise FlowError(f"terminal {v!r} not a node")

    def index(self, v: Node) -> int:
        return self._index[v]

    def out_edges(self, v: Node) -> list[int]:
        return [i for i, (a, _, _) in enumerate(self.edges) if a == v]

    def in_edges(self, v: Node) -> list[int]:
        return [i for i, (_, b, _) in enumerate(self.edges) if b == v]

    def finite_total(self) -> int:
        tot = sum(c for _, _, c in self.edges if c is not None)
        tot += sum(c for c in self.node_caps.values() if c is not None)
        return tot

    def to_json(self) -> dict:
        enc = lambda c: "inf" if c is None else c  # noqa: E731
        return {
            "nodes": [repr(v) for v in self.nodes],
            "edges": [[repr(u), repr(v), enc(c)] for u, v, c in self.edges],
            "node_caps": {repr(v): enc(c) for v, c in self.node_caps.items()},
            "sources": [repr(v) for v in self.sources],
            "sinks": [repr(v) for v in self.sinks],
        }


@dataclass(frozen=True)
class Flow:
    values: tuple  # per edge, int or Fraction

    def value(self, net: FlowNetwork) -> Fraction | int:
        src = set(net.sources)
        out = sum(f for (u, _, _), f in zip(net.edges, self.values) if u in src)
        inn = sum(f for (_, v, _), f in zip(net.edges, self.values) if v in src)
        return out - inn

    def through(self, net: FlowNetwork, v: Node) -> Fraction | int:
        """Flow entering v (or leaving, for sources)."""
        if v in net.sources:
            return sum(f for (a, _, _), f in zip(net.edges, self.values) if a == v)
        return sum(f for (_, b, _), f in zip(net.edges, self.values) if b == v)

    def to_json(self, net: FlowNetwork) -> dict:
        return {"values": [str(f) for f in self.values], "value": str(self.value(net))}


@dataclass(frozen=True)
class Cut:
    """Source side U of a cut in ``network``; capacity counts U->W edges."""

    network: FlowNetwork
    source_side: frozenset
    capacity: int
    edges: tuple[int, ...]


def flow_problems(net: FlowNetwork, f: Flow) -> list[str]:
    errs = []
    if len(f.values) != len(net.edges):
        return ["flow length differs from edge count"]
    bal: dict = {v: 0 for v in net.nodes}
    inflow: dict = {v: 0 for v in net.nodes}
    for (u, v, c), x in zip(net.edges, f.values):
        if x < 0 or (c is not None and x > c):
            errs.append(f"edge ({u!r},{v!r}) flow {x} outside [0,{c}]")
        bal[u] -= x
        bal[v] += x
        inflow[v] += x
    term = set(net.sources) | set(net.sinks)
    for v in net.nodes:
        if v not in term and bal[v] != 0:
            errs.append(f"conservation fails at {v!r} by {bal[v]}")
        c = net.node_caps.get(v)
        if c is not None and v not in term and inflow[v] > c:
            errs.append(f"node {v!r} carries {inflow[v]} > {c}")
    return errs


def split_vertex_capacities(net: FlowNetwork) -> FlowNetwork:
    """Replace each capacitated node v with v_in -> v_out carrying the node capacity.

    Nodes without a capacity keep their label. Split halves are labelled
    ``(v, "in")`` and ``(v, "out")``; the internal edges are appended after the
    original edges in node order.
    """
    capped = [v for v in net.nodes if net.node_caps.get(v) is not None]
    if not capped:
        return FlowNetwork(net.nodes, net.edges, net.sources, net.sinks, {})
    term = set(net.sources) | set(net.sinks)
    capped = [v for v in capped if v not in term]
    cs = set(capped)
    nodes: list = []
    for v in net.nodes:
        nodes.extend([(v, "in"), (v, "out")] if v in cs else [v])
    tail = lambda v: (v, "out") if v in cs else v  # noqa: E731
    head = lambda v: (v, "in") if v in cs else v  # noqa: E731
    edges = [(tail(u), head(v), c) for u, v, c in net.edges]
    edges += [((v, "in"), (v, "out"), net.node_caps[v]) for v in capped]
    return FlowNetwork(tuple(nodes), tuple(edges), net.sources, net.sinks, {})


class _Residual:
    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, c: int) -> int:
        a = len(self.head)
        self.head += [v, u]
        self.cap += [c, 0]
        self.adj[u].append(a)
        self.adj[v].append(a + 1)
        return a

    def finish(self) -> None:
        for lst in self.adj:
            lst.sort(key=lambda a: (self.head[a], a))

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        head, cap, adj = self.head, self.cap, self.adj
        while True:
            parent = [-1] * self.n
            parent[s] = -2
            dq = deque([s])
            while dq and parent[t] == -1:
                u = dq.popleft()
                for a in adj[u]:
                    v = head[a]
                    if cap[a] > 0 and parent[v] == -1:
                        parent[v] = a
                        if v == t:
                            break
                        dq.append(v)
            if parent[t] == -1:
                return total
            b = None
            v = t
            while v != s:
                a = parent[v]
                b = cap[a] if b is None else min(b, cap[a])
                v = head[a ^ 1]
            v = t
            while v != s:
                a = parent[v]
                cap[a] -= b
                cap[a ^ 1] += b
                v = head[a ^ 1]
            total += b

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for a in self.adj[u]:
                if self.cap[a] > 0 and self.head[a] not in seen:
                    seen.add(self.head[a])
                    dq.append(self.head[a])
        return seen


_SUPER_S = ("__super__", "s")
_SUPER_T = ("__super__", "t")


def max_flow_integer(net: FlowNetwork) -> tuple[Flow, Cut]:
    """Integral maximum flow and a minimum cut of equal capacity.

    Node capacities are handled by splitting; the returned Cut refers to the
    split network. Several sources or sinks are joined through unbounded
    super-terminal edges. Unbounded capacities become (sum of finite ones) + 1;
    a flow reaching that sentinel is reported as unbounded.
    """
    for _, _, c in net.edges:
        if c is not None and c != int(c):
            raise FlowError("max_flow_integer needs integer capacities")
    work = split_vertex_capacities(net)
    big = work.finite_total() + 1
    nodes = list(work.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    multi_s = len(work.sources) != 1
    multi_t = len(work.sinks) != 1
    s = t = None
    if multi_s:
        s = len(nodes)
        nodes.append(_SUPER_S)
    else:
        s = idx[work.sources[0]]
    if multi_t:
        t = len(nodes)
        nodes.append(_SUPER_T)
    else:
        t = idx[work.sinks[0]]
    r = _Residual(len(nodes))
    arcs = []
    for u, v, c in work.edges:
        arcs.append(r.add(idx[u], idx[v], big if c is None else int(c)))
    if multi_s:
        for v in work.sources:
            r.add(s, idx[v], big)
    if multi_t:
        for v in work.sinks:
            r.add(idx[v], t, big)
    r.finish()
    value = r.max_flow(s, t)
    if value >= big:
        raise UnboundedFlowError("flow value unbounded")
    split_vals = [r.cap[a ^ 1] for a in arcs]
    reach = r.reachable(s)
    side = frozenset(nodes[i] for i in reach if nodes[i] not in (_SUPER_S, _SUPER_T))
    cut_edges = tuple(
        k for k, (u, v, _) in enumerate(work.edges) if u in side and v not in side
    )
    cap = sum(big if work.edges[k][2] is None else work.edges[k][2] for k in cut_edges)
    if multi_s:
        cap += sum(big for v in work.sources if v not in side)
    if multi_t:
        cap += sum(big for v in work.sinks if v in side)
    if cap != value:
        raise FlowError(f"internal: cut {cap} != flow {value}")
    vals = tuple(split_vals[: len(net.edges)])
    return Flow(vals), Cut(work, side, cap, cut_edges)


def _positive_path(
    net: FlowNetwork, vals: Sequence, starts: Iterable[Node], goals: set, banned_edge: int
) -> list[int] | None:
    """BFS over positive-flow edges; returns edge indices of a path from starts to goals."""
    out: dict = {}
    for k, (u, _, _) in enumerate(net.edges):
        if vals[k] > 0 and k != banned_edge:
            out.setdefault(u, []).append(k)
    parent: dict = {}
    dq = deque()
    for s in starts:
        if s not in parent:
            parent[s] = None
            dq.append(s)
    while dq:
        u = dq.popleft()
        if u in goals:
            path = []
            while parent[u] is not None:
                k = parent[u]
                path.append(k)
                u = net.edges[k][0]
            return path[::-1]
        for k in out.get(u, []):
            v = net.edges[k][1]
            if v not in parent:
                parent[v] = k
                dq.append(v)
    return None


def reduce_edge_to_zero(net: FlowNetwork, f: Flow, e: int) -> Flow:
    """Cancel flow cycles through e, then source->e->sink paths, until f(e) = 0."""
    if not 0 <= e < len(net.edges):
        raise FlowError(f"edge index {e} not in network")
    vals = list(f.values)
    u, v, _ = net.edges[e]
    srcs, snks = set(net.sources), set(net.sinks)
    while vals[e] > 0:
        cyc = None if v == u else _positive_path(net, vals, [v], {u}, e)
        if v == u:
            cyc = []
        if cyc is not None:
            walk = cyc + [e]
        else:
            before = [] if u in srcs else _positive_path(net, vals, sorted(srcs, key=net.index), {u}, e)
            after = [] if v in snks else _positive_path(net, vals, [v], snks, e)
            if before is None or after is None:
                raise FlowError("flow decomposition failed; input flow invalid")
            walk = before + [e] + after
        delta = min(vals[k] for k in walk)
        for k in walk:
            vals[k] -= delta
    return Flow(tuple(vals))

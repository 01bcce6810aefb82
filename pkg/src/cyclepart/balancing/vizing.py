"""Edge colouring of multigraphs with Δ+μ colours, and matching disjointification."""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Sequence


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class Multigraph:
    """Undirected multigraph on 0..m-1; parallel edges are separate list entries."""

    m: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ColoringError(f"loop at {u}")
            if not (0 <= u < self.m and 0 <= v < self.m):
                raise ColoringError(f"edge ({u},{v}) out of range")

    @property
    def max_degree(self) -> int:
        deg = Counter()
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return max(deg.values(), default=0)

    @property
    def max_multiplicity(self) -> int:
        c = Counter(tuple(sorted(e)) for e in self.edges)
        return max(c.values(), default=0)


class _Colouring:
    def __init__(self, g: Multigraph, k: int):
        self.g = g
        self.k = k
        self.colour: list[int | None] = [None] * len(g.edges)
        self.at: list[dict[int, int]] = [dict() for _ in range(g.m)]
        self.deg = [0] * g.m
        for u, v in g.edges:
            self.deg[u] += 1
            self.deg[v] += 1

    def other(self, e: int, v: int) -> int:
        a, b = self.g.edges[e]
        return b if a == v else a

    def missing(self, v: int) -> list[int]:
        here = self.at[v]
        return [c for c in range(self.k) if c not in here]

    def set(self, e: int, c: int | None) -> None:
        u, v = self.g.edges[e]
        old = self.colour[e]
        if old is not None:
            del self.at[u][old]
            del self.at[v][old]
        if c is not None:
            assert c not in self.at[u] and c not in self.at[v]
            self.at[u][c] = e
            self.at[v][c] = e
        self.colour[e] = c

    def colour_edge(self, e0: int) -> None:
        u, v = self.g.edges[e0]
        x = u if self.deg[u] <= self.deg[v] else v
        fan = [e0]
        rim = [self.other(e0, x)]
        while True:
            mx = set(self.missing(x))
            yn = rim[-1]
            if mx & set(self.missing(yn)):
                self._fold(x, fan, rim)
                return
            myn = set(self.missing(yn))
            for i, y in enumerate(rim[:-1]):
                shared = myn & set(self.missing(y))
                if y != yn and shared:
                    self._reduce(x, fan, rim, i, min(shared))
                    return
            rim_missing = set()
            for y in rim:
                rim_missing.update(self.missing(y))
            in_fan = set(fan)
            nxt = None
            for c in sorted(self.at[x]):
                f = self.at[x][c]
                if f not in in_fan and c in rim_missing:
                    nxt = f
                    break
            if nxt is None:
                raise ColoringError("fan cannot be extended; colour count too small")
            fan.append(nxt)
            rim.append(self.other(nxt, x))

    def _fold(self, x: int, fan: list[int], rim: list[int]) -> None:
        while True:
            common = sorted(set(self.missing(x)) & set(self.missing(rim[-1])))
            new = common[0]
            old = self.colour[fan[-1]]
            self.set(fan[-1], None)
            self.set(fan[-1], new)
            if len(fan) == 1:
                return
            idx = next(i for i, y in enumerate(rim[:-1]) if old not in self.at[y])
            del fan[idx + 1 :]
            del rim[idx + 1 :]

    def _chain(self, y: int, a: int, b: int) -> tuple[list[int], int]:
        cur, z, chain = b, y, []
        while cur in self.at[z]:
            e = self.at[z][cur]
            chain.append(e)
            z = self.other(e, z)
            cur = a if cur == b else b
        return chain, z

    def _swap(self, chain: list[int], a: int, b: int) -> None:
        cols = [self.colour[e] for e in chain]
        for e in chain:
            self.set(e, None)
        for e, c in zip(chain, cols):
            self.set(e, a if c == b else b)

    def _reduce(self, x: int, fan: list[int], rim: list[int], i: int, a: int) -> None:
        b = min(self.missing(x))
        chain, end = self._chain(rim[i], a, b)
        if end != x:
            self._swap(chain, a, b)
            del fan[i + 1 :]
            del rim[i + 1 :]
        else:
            chain, end = self._chain(rim[-1], a, b)
            self._swap(chain, a, b)
        self._fold(x, fan, rim)


@dataclass(frozen=True)
class VizingResult:
    colours: tuple[int, ...]
    palette: int
    matching: tuple[int, ...]  # edge indices of the largest colour class


def vizing_matching(h: Multigraph) -> VizingResult:
    """Proper colouring with at most Δ+μ colours; the largest class is the matching."""
    k = h.max_degree + h.max_multiplicity
    if not h.edges:
        return VizingResult((), 0, ())
    col = _Colouring(h, k)
    for e in range(len(h.edges)):
        col.colour_edge(e)
    colours = tuple(col.colour)
    counts = Counter(colours)
    best = min(counts, key=lambda c: (-counts[c], c))
    matching = tuple(e for e, c in enumerate(colours) if c == best)
    return VizingResult(colours, k, matching)


def coloring_problems(h: Multigraph, colours: Sequence[int], palette: int) -> list[str]:
    errs = []
    seen: dict[tuple[int, int], int] = {}
    for e, ((u, v), c) in enumerate(zip(h.edges, colours)):
        if c is None or not 0 <= c < palette:
            errs.append(f"edge {e} has colour {c} outside palette {palette}")
            continue
        for w in (u, v):
            if (w, c) in seen:
                errs.append(f"colour {c} repeated at vertex {w}")
            seen[(w, c)] = e
    return errs


class DisjointifyError(RuntimeError):
    pass


@dataclass(frozen=True)
class DisjointifyResult:
    chosen: tuple[tuple[int, ...], ...]  # per input matching, kept edge positions
    quotas: tuple[int, ...]
    method: str


def _fits(used: set[int], e: tuple[int, int]) -> bool:
    return e[0] not in used and e[1] not in used


def disjointify_matchings(
    matchings: Sequence[Sequence[tuple[int, int]]], k: int, seed: int = 0, strict: bool = True
) -> DisjointifyResult:
    """Pick M ⊆ ∪M_i forming one matching with |M ∩ M_i| >= e(M_i)/(2k²) for every i.

    Small instances (<= 16 edges in total) are searched exhaustively; larger ones
    use seeded randomized greedy with 2k² restarts. The result is verified and
    greedily padded with any further compatible edges. With ``strict=False`` an
    infeasible quota system falls back to a maximal matching (method
    "best-effort") instead of raising.
    """
    k = max(k, 1)
    quotas = tuple(math.ceil(len(m) / (2 * k * k)) for m in matchings)
    items = [(i, t, tuple(e)) for i, m in enumerate(matchings) for t, e in enumerate(m)]
    if len(items) <= 16:
        picked = _exhaustive(items, quotas, len(matchings))
        method = "exhaustive"
    else:
        picked = None
        rng = random.Random(seed)
        for _ in range(2 * k * k):
            order = items[:]
            rng.shuffle(order)
            picked = _greedy(order, quotas, len(matchings))
            if picked is not None:
                break
        method = "greedy"
    if picked is None:
        if strict:
            raise DisjointifyError(f"no disjoint selection meets quotas {quotas}")
        picked, method = [], "best-effort"
    used = {v for _, _, e in picked for v in e}
    have = {(i, t) for i, t, _ in picked}
    for i, t, e in items:
        if (i, t) not in have and _fits(used, e):
            picked.append((i, t, e))
            used.update(e)
    chosen = [[] for _ in matchings]
    for i, t, _ in picked:
        chosen[i].append(t)
    out = DisjointifyResult(tuple(tuple(sorted(c)) for c in chosen), quotas, method)
    _verify(matchings, out, check_quotas=method != "best-effort")
    return out


def _verify(matchings, res: DisjointifyResult, check_quotas: bool = True) -> None:
    used: set[int] = set()
    for i, ts in enumerate(res.chosen):
        if check_quotas and len(ts) < res.quotas[i]:
            raise DisjointifyError(f"matching {i} keeps {len(ts)} < {res.quotas[i]}")
        for t in ts:
            u, v = matchings[i][t]
            if u in used or v in used:
                raise DisjointifyError("selection is not a matching")
            used.update((u, v))


def _greedy(order, quotas, ell):
    have = [0] * ell
    used: set[int] = set()
    picked = []
    for i, t, e in order:
        if have[i] < quotas[i] and _fits(used, e):
            picked.append((i, t, e))
            used.update(e)
            have[i] += 1
    if all(h >= q for h, q in zip(have, quotas)):
        return picked
    return None


def _exhaustive(items, quotas, ell):
    need = list(quotas)
    remaining = [0] * ell
    for i, _, _ in items:
        remaining[i] += 1
    picked: list = []
    used: set[int] = set()

    def rec(pos: int) -> bool:
        if all(x <= 0 for x in need):
            return True
        if pos == len(items):
            return False
        i, t, e = items[pos]
        if any(need[j] > remaining[j] for j in range(ell)):
            return False
        remaining[i] -= 1
        if need[i] > 0 and _fits(used, e):
            picked.append(items[pos])
            used.update(e)
            need[i] -= 1
            if rec(pos + 1):
                remaining[i] += 1
                return True
            need[i] += 1
            used.difference_update(e)
            picked.pop()
        ok = rec(pos + 1)
        remaining[i] += 1
        return ok

    return picked if rec(0) else None


def brute_force_disjointify_feasible(matchings, k) -> bool:
    """Oracle: does any sub-selection satisfy the quotas? Exponential; tests only."""
    k = max(k, 1)
    quotas = [math.ceil(len(m) / (2 * k * k)) for m in matchings]
    items = [(i, tuple(e)) for i, m in enumerate(matchings) for e in m]
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            used: set[int] = set()
            ok = True
            for _, e in combo:
                if not _fits(used, e):
                    ok = False
                    break
                used.update(e)
            if not ok:
                continue
            cnt = Counter(i for i, _ in combo)
            if all(cnt[i] >= q for i, q in enumerate(quotas)):
                return True
    return False

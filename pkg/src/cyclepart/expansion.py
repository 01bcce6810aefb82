"""Robust neighbourhoods, exhaustive/sampled expander verifiers and a refinement heuristic."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .digraph import BipartiteView, Digraph, bipartite_view
from .partition import CellPartition


class ExpansionError(ValueError):
    pass


@dataclass(frozen=True)
class ExpansionParams:
    nu: Fraction
    tau: Fraction

    def __post_init__(self):
        object.__setattr__(self, "nu", Fraction(self.nu))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if not (0 < self.nu <= self.tau < 1):
            raise ExpansionError("need 0 < nu <= tau < 1")

    def weakened(self) -> "ExpansionParams":
        """(ν/2, 2τ), capped below 1."""
        return ExpansionParams(self.nu / 2, min(2 * self.tau, Fraction(999, 1000)))

    def to_json(self) -> dict:
        return {"nu": str(self.nu), "tau": str(self.tau)}


def _ceil(x: Fraction) -> int:
    return math.ceil(x)


def robust_neighbourhood(
    obj: BipartiteView | Digraph, S: Iterable[int], nu, scale: int | None = None
) -> set[int]:
    """RN_ν(S): right positions (view) or vertices (digraph, in-neighbours) with >= ν·n neighbours in S.

    For a view, S holds left positions and n defaults to |A|+|B|; for a
    digraph n is the vertex count. ``scale`` overrides n.
    """
    S = set(S)
    nu = Fraction(nu)
    if isinstance(obj, Digraph):
        n = obj.n if scale is None else scale
        if not S <= set(range(obj.n)):
            raise ExpansionError("S is not a vertex set of the digraph")
        t = nu * n
        return {v for v in range(obj.n) if sum(1 for u in obj.in_adj[v] if u in S) >= t}
    n = obj.order if scale is None else scale
    if not S <= set(range(len(obj.left))):
        raise ExpansionError("S must consist of left positions")
    t = nu * n
    cnt = [0] * len(obj.right)
    for i, j in obj.edges:
        if i in S:
            cnt[j] += 1
    return {j for j, c in enumerate(cnt) if c >= t}


@dataclass(frozen=True)
class ExpanderVerdict:
    holds: bool
    mode: str  # "exact" or "sampled"
    witness: tuple[int, ...] | None
    checked: int
    params: ExpansionParams
    scale: int

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "mode": self.mode,
            "verdict": self.holds,
            "witness": None if self.witness is None else list(self.witness),
            "checked": self.checked,
            "scale": self.scale,
        }


EXHAUSTIVE_CAP = 20
_CHUNK = 1 << 15


def _masks(nbrs: Sequence[Iterable[int]]) -> np.ndarray:
    out = np.zeros(len(nbrs), dtype=np.int64)
    for j, lst in enumerate(nbrs):
        m = 0
        for i in lst:
            m |= 1 << i
        out[j] = m
    return out


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _check_sets(
    src_masks: np.ndarray, a: int, params: ExpansionParams, n: int, candidates: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per candidate S: sizes, counts per target, and a violation flag."""
    t = _ceil(params.nu * n)
    sizes = np.bitwise_count(candidates).astype(np.int64)
    cnt = np.bitwise_count(candidates[:, None] & src_masks[None, :]).astype(np.int64)
    rn = (cnt >= t).sum(axis=1)
    # |RN| >= |S| + νn  <=>  den(|RN| - |S|) >= num·n
    num, den = params.nu.numerator, params.nu.denominator
    bad = den * (rn - sizes) < num * n
    return sizes, cnt, bad


def _size_window(a: int, tau: Fraction) -> tuple[int, int]:
    return _ceil(tau * a), math.floor((1 - tau) * a)


def _enumerate(a: int, lo: int, hi: int):
    total = 1 << a
    for start in range(0, total, _CHUNK):
        m = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        s = np.bitwise_count(m)
        yield m[(s >= lo) & (s <= hi)]


def _sampled(a: int, lo: int, hi: int, samples: int, seed: int):
    rng = random.Random(seed)
    out = []
    for s in range(lo, hi + 1):
        for _ in range(samples):
            out.append(sum(1 << i for i in rng.sample(range(a), s)))
    if out:
        yield np.array(out, dtype=np.int64)


def _verify(
    src_masks: np.ndarray, a: int, params: ExpansionParams, n: int, mode: str, samples: int, seed: int
) -> tuple[bool, tuple[int, ...] | None, int, str]:
    if a > 62:
        raise ExpansionError("side too large for bitmask verification")
    if mode == "auto":
        mode = "exact" if a <= EXHAUSTIVE_CAP else "sampled"
    if mode == "exact" and a > EXHAUSTIVE_CAP:
        raise ExpansionError(f"|A|={a} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; use sampled mode")
    lo, hi = _size_window(a, params.tau)
    gen = _enumerate(a, lo, hi) if mode == "exact" else _sampled(a, lo, hi, samples, seed)
    best = None
    checked = 0
    for cand in gen:
        if not len(cand):
            continue
        checked += len(cand)
        sizes, _, bad = _check_sets(src_masks, a, params, n, cand)
        if bad.any():
            bs, bm = sizes[bad], cand[bad]
            for s, m in zip(bs.tolist(), bm.tolist()):
                key = (s, _bits(m))
                if best is None or key < best:
                    best = key
    return best is None, None if best is None else best[1], checked, mode


def is_bipartite_robust_expander(
    view: BipartiteView,
    params: ExpansionParams,
    *,
    mode: str = "auto",
    samples: int = 200,
    seed: int = 0,
    scale: int | None = None,
) -> ExpanderVerdict:
    """Every S ⊆ A with τ|A| <= |S| <= (1-τ)|A| has |RN_ν(S) ∩ B| >= |S| + νn.

    n is |A|+|B| unless ``scale`` is given. The witness is the violating S
    (left positions) of least size, then lowest lexicographic.
    """
    n = view.order if scale is None else scale
    src = _masks(view.right_neighbours())
    ok, wit, checked, used = _verify(src, len(view.left), params, n, mode, samples, seed)
    return ExpanderVerdict(ok, used, wit, checked, params, n)


def is_robust_outexpander(
    g: Digraph, params: ExpansionParams, *, mode: str = "auto", samples: int = 200, seed: int = 0
) -> ExpanderVerdict:
    """Every S with τn <= |S| <= (1-τ)n has |RN⁺_ν(S)| >= |S| + νn."""
    src = _masks([g.in_adj[v] for v in range(g.n)])
    ok, wit, checked, used = _verify(src, g.n, params, g.n, mode, samples, seed)
    return ExpanderVerdict(ok, used, wit, checked, params, g.n)


def bipartite_to_digraph(view: BipartiteView) -> Digraph:
    """Digraph on positions 0..m-1 with i -> j iff a_i b_j is an edge and i != j."""
    if len(view.left) != len(view.right):
        raise ExpansionError("sides must have equal size")
    return Digraph(len(view.left), [(i, j) for i, j in view.edges if i != j])


def view_from_edges(m_left: int, m_right: int, edges: Iterable[tuple[int, int]]) -> BipartiteView:
    """Abstract bipartite view with left ids 0..a-1 and right ids a..a+b-1."""
    return BipartiteView(
        tuple(range(m_left)), tuple(range(m_left, m_left + m_right)), frozenset((int(i), int(j)) for i, j in edges)
    )


def alter_view(host: BipartiteView, A: Sequence[int], B: Sequence[int]) -> BipartiteView:
    """Sub-view G[A' ∪ B'] of a host view, A' and B' given as host positions."""
    return host.restrict(sorted(A), sorted(B))


@dataclass
class RefinementReport:
    rounds: int = 0
    splits: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)  # per final part
    stalled: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rounds": self.rounds,
            "splits": self.splits,
            "verdicts": [v.to_json() for v in self.verdicts],
            "stalled": self.stalled,
        }


def _view_components(view: BipartiteView) -> list[int]:
    """Masks of left positions per connected component of the view."""
    a = len(view.left)
    parent = list(range(a + len(view.right)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in view.edges:
        parent[find(i)] = find(a + j)
    comp: dict[int, int] = {}
    for i in range(a):
        comp[find(i)] = comp.get(find(i), 0) | 1 << i
    return sorted(comp.values())


def _best_split(view: BipartiteView, params: ExpansionParams, samples: int, seed: int) -> tuple[int, int] | None:
    """Violating S minimising the number of edges between S ∪ RN(S) and the rest.

    Ties go to smaller |RN(S)| - |S|, then to the lowest S. Returns
    (S mask over left positions, RN mask over right positions) or None.
    """
    a = len(view.left)
    n = view.order
    src = _masks(view.right_neighbours())
    deg = np.bitwise_count(src).astype(np.int64)
    lo, hi = _size_window(a, params.tau)
    if lo > hi:
        return None
    gens = [np.array([c for c in _view_components(view) if lo <= c.bit_count() <= hi], dtype=np.int64)]
    gens.append(None)
    t = _ceil(params.nu * n)
    best = None
    for cand in gens:
        for chunk in ([cand] if cand is not None else (_enumerate(a, lo, hi) if a <= EXHAUSTIVE_CAP else _sampled(a, lo, hi, samples, seed))):
            if not len(chunk):
                continue
            sizes, cnt, bad = _check_sets(src, a, params, n, chunk)
            if not bad.any():
                continue
            inr = cnt >= t
            cut = np.where(inr, deg[None, :] - cnt, cnt).sum(axis=1)
            gap = inr.sum(axis=1) - sizes
            for c, gp, m, r in zip(cut[bad].tolist(), gap[bad].tolist(), chunk[bad].tolist(), inr[bad]):
                rmask = sum(1 << j for j in np.flatnonzero(r).tolist())
                key = (c, gp, _bits(m))
                if best is None or key < best[0]:
                    best = (key, m, rmask)
    return None if best is None else (best[1], best[2])


def refine_partition_heuristic(
    g: Digraph, params: ExpansionParams, max_rounds: int = 16, *, samples: int = 200, seed: int = 0
) -> tuple[CellPartition, RefinementReport]:
    """Split the bipartite double view until each part is a bipartite robust expander.

    Best effort only: parts that still fail (or cannot be split) are listed
    in the report, and every final part carries its verdict.
    """
    n = g.n
    full = bipartite_view(g, range(n), range(n))
    parts: list[tuple[tuple[int, ...], tuple[int, ...]]] = [(tuple(range(n)), tuple(range(n)))]
    rep = RefinementReport()
    done: set = set()
    for _ in range(max_rounds):
        changed = False
        nxt = []
        for A, B in parts:
            if (A, B) in done or not A or not B:
                nxt.append((A, B))
                continue
            sub = full.restrict(A, B)
            split = _best_split(sub, params, samples, seed)
            if split is None:
                done.add((A, B))
                nxt.append((A, B))
                continue
            smask, rmask = split
            A1 = tuple(A[i] for i in range(len(A)) if smask >> i & 1)
            B1 = tuple(B[j] for j in range(len(B)) if rmask >> j & 1)
            A2 = tuple(x for x in A if x not in set(A1))
            B2 = tuple(x for x in B if x not in set(B1))
            if not (A2 or B2):
                rep.stalled.append([list(A), list(B)])
                done.add((A, B))
                nxt.append((A, B))
                continue
            rep.splits.append({"a": list(A1), "b": list(B1)})
            nxt += [(A1, B1), (A2, B2)]
            changed = True
        parts = nxt
        rep.rounds += 1
        if not changed:
            break
    parts.sort(key=lambda ab: (min(ab[0] + ab[1]), ab))
    row = [0] * n
    col = [0] * n
    for t, (A, B) in enumerate(parts):
        for v in A:
            row[v] = t
        for v in B:
            col[v] = t
        rep.verdicts.append(
            is_bipartite_robust_expander(full.restrict(A, B), params, samples=samples, seed=seed)
            if A and B
            else ExpanderVerdict(False, "exact", (), 0, params, len(A) + len(B))
        )
    p = CellPartition.from_assignment(len(parts), [(row[v], col[v]) for v in range(n)])
    return p, rep

"""Brute-force reference: Decomp peeling and all-subintervals enumeration.

These are deliberately unoptimized. They serve as ground truth for the
core-time engine and as the baseline in benchmarks.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable

from .temporal_graph import QueryInterval, TemporalGraph


@dataclass(frozen=True)
class TemporalKCore:
    """One temporal k-core: sorted vertices, ``(u, v, t)`` edges sorted by ``(t, u, v)``.

    ``tti`` is the tightest time interval ``(min t, max t)`` of the edges, or
    ``None`` for the empty core.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]
    tti: tuple[int, int] | None

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int, int]]) -> "TemporalKCore":
        es = tuple(sorted(edges, key=lambda x: (x[2], x[0], x[1])))
        tti = (es[0][2], es[-1][2]) if es else None
        return cls(tuple(sorted(vertices)), es, tti)

    @property
    def empty(self) -> bool:
        return not self.edges

    def issubcore(self, other: "TemporalKCore") -> bool:
        return set(self.vertices) <= set(other.vertices) and set(self.edges) <= set(other.edges)


EMPTY_CORE = TemporalKCore((), (), None)


def decomp(g: TemporalGraph, lo: int, hi: int, k: int) -> TemporalKCore:
    """Temporal k-core of ``g`` over ``[lo, hi]`` by iterative peeling."""
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    nbrs: dict[int, set[int]] = {}
    live: list[tuple[int, int, tuple[int, ...]]] = []
    for (u, v), ts in zip(g.edges, g.times):
        i, j = bisect_left(ts, lo), bisect_right(ts, hi)
        if i < j:
            live.append((u, v, ts[i:j]))
            nbrs.setdefault(u, set()).add(v)
            nbrs.setdefault(v, set()).add(u)

    # ascending-id worklist of under-degree vertices
    removed: set[int] = set()
    work = sorted(v for v, ns in nbrs.items() if len(ns) < k)
    while work:
        nxt: set[int] = set()
        for v in work:
            if v in removed:
                continue
            removed.add(v)
            for w in nbrs[v]:
                if w not in removed:
                    nbrs[w].discard(v)
                    if len(nbrs[w]) < k:
                        nxt.add(w)
        work = sorted(nxt)

    keep = [v for v in nbrs if v not in removed]
    edges = [(u, v, t) for u, v, ts in live if u not in removed and v not in removed for t in ts]
    return TemporalKCore.build(keep, edges)


def enumerate_naive(g: TemporalGraph, q: QueryInterval) -> dict[tuple[int, int], TemporalKCore]:
    """All distinct non-empty temporal k-cores over sub-intervals of the query window, keyed by TTI."""
    q.validate(g)
    out: dict[tuple[int, int], TemporalKCore] = {}
    for ts in range(q.Ts, q.Te + 1):
        for te in range(ts, q.Te + 1):
            core = decomp(g, ts, te, q.k)
            if core.tti is not None and core.tti not in out:
                out[core.tti] = core
    return out

"""Phase I: support times, k-degree times and k-core times for a start anchor.

The k-core time of a vertex ``v`` w.r.t. anchor ``x`` is the smallest ``t``
such that ``v`` lies in the k-core of the detemporalized graph over
``[x, t]``; for an edge it is ``max(sup, sigma(u), sigma(v))``.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

from .temporal_graph import INFINITY, TemporalGraph

Time = int | float  # finite tick or INFINITY


@dataclass(frozen=True)
class CoreTimeMap:
    """k-core times anchored at ``x``; ``edge_sigma[i]`` belongs to ``edges[i]``."""

    x: int
    k: int
    vertex_sigma: tuple[Time, ...]
    edges: tuple[tuple[int, int], ...]
    edge_sigma: tuple[Time, ...]

    def edge_map(self) -> dict[tuple[int, int], Time]:
        return dict(zip(self.edges, self.edge_sigma))

    def vertex_map(self) -> dict[int, Time]:
        return dict(enumerate(self.vertex_sigma))

    def all_infinite(self) -> bool:
        return all(s == INFINITY for s in self.vertex_sigma)


def support_times(g: TemporalGraph, x: int | None = None) -> list[Time]:
    """Earliest timestamp (``>= x`` when given) of every edge group, INFINITY if none."""
    if x is None:
        return [ts[0] if ts else INFINITY for ts in g.times]
    out: list[Time] = []
    for ts in g.times:
        i = bisect_left(ts, x)
        out.append(ts[i] if i < len(ts) else INFINITY)
    return out


def _incident_by_support(g: TemporalGraph, sup: Sequence[Time]) -> list[list[tuple[Time, int]]]:
    return [sorted((sup[e], e) for e in g.adjacency[v] if sup[e] != INFINITY) for v in range(g.n)]


def k_degree_times(g: TemporalGraph, sup: Sequence[Time], k: int) -> list[Time]:
    """k-th smallest incident support time per vertex (INFINITY when degree < k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return [inc[k - 1][0] if len(inc) >= k else INFINITY for inc in _incident_by_support(g, sup)]


@dataclass
class PeelTrace:
    """Per-extraction record: vertex, bucket key, raw degree time, running minimum."""

    steps: list[tuple[int, Time, Time, Time]]
    degree_updates: list[tuple[int, Time, Time]]


def core_times(
    g: TemporalGraph, x: int, k: int, trace: PeelTrace | None = None
) -> tuple[list[Time], list[Time], list[Time]]:
    """Array form of :func:`core_init`: ``(vertex_sigma, edge_sigma, sup)`` by edge id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = g.n
    sup = support_times(g, x)
    inc = _incident_by_support(g, sup)
    edges = g.edges
    # slot of edge e in the incident list of its lower / higher endpoint
    slot_u = [0] * len(edges)
    slot_v = [0] * len(edges)
    for v in range(n):
        for i, (_, e) in enumerate(inc[v]):
            if edges[e][0] == v:
                slot_u[e] = i
            else:
                slot_v[e] = i

    d: list[Time] = [lst[k - 1][0] if len(lst) >= k else INFINITY for lst in inc]
    ptr = [k - 1] * n
    removed = [False] * n
    sigma: list[Time] = [INFINITY] * n

    # bucket queue over [x, t_max] plus one INFINITY bucket; each bucket is a min-heap of ids
    lo = x
    nb = max(g.t_max - lo + 1, 0)
    buckets: list[list[int]] = [[] for _ in range(nb + 1)]
    inf_b = nb
    key: list[Time] = list(d)

    def bucket_of(t: Time) -> int:
        return inf_b if t == INFINITY else t - lo

    for v in range(n):
        buckets[bucket_of(key[v])].append(v)  # ascending ids already form a heap
    cursor = inf_b
    t_run: Time = INFINITY
    left = n
    while left:
        b = buckets[cursor]
        while b and (removed[b[0]] or bucket_of(key[b[0]]) != cursor):
            heapq.heappop(b)
        if not b:
            cursor -= 1
            continue
        vs = heapq.heappop(b)
        t_run = min(t_run, key[vs])
        sigma[vs] = t_run
        removed[vs] = True
        left -= 1
        if trace is not None:
            trace.steps.append((vs, key[vs], d[vs], t_run))
        for _, e in inc[vs]:
            u, v = edges[e]
            if u == vs:
                w, slot = v, slot_v[e]
            else:
                w, slot = u, slot_u[e]
            if removed[w] or slot > ptr[w]:
                continue
            lst = inc[w]
            p = ptr[w] + 1
            while p < len(lst):
                a, b2 = edges[lst[p][1]]
                if not removed[a] and not removed[b2]:
                    break
                p += 1
            ptr[w] = p
            old = d[w]
            d[w] = lst[p][0] if p < len(lst) else INFINITY
            if trace is not None:
                trace.degree_updates.append((w, old, d[w]))
            # clamp to the running minimum; the vertex's sigma cannot exceed it
            nk = min(d[w], t_run)
            if nk != key[w]:
                key[w] = nk
                heapq.heappush(buckets[bucket_of(nk)], w)

    esig: list[Time] = [
        INFINITY if s == INFINITY else max(s, sigma[u], sigma[v]) for (u, v), s in zip(edges, sup)
    ]
    return sigma, esig, sup


def core_init(g: TemporalGraph, Ts: int, k: int, trace: PeelTrace | None = None) -> CoreTimeMap:
    """k-core times of every vertex and edge of ``g`` anchored at ``Ts``.

    Timestamps before ``Ts`` are ignored, so ``g`` need not be projected.
    """
    vs, es, _ = core_times(g, Ts, k, trace)
    return CoreTimeMap(x=Ts, k=k, vertex_sigma=tuple(vs), edges=g.edges, edge_sigma=tuple(es))

"""Phase II: advance the start anchor by one tick and repair k-core times.

Dropping the temporal edges at the current anchor can only raise support
times and hence core times. Raised items are processed in descending order of
their tentative core time; with that order every vertex and edge is finalized
at most once per tick.
"""
from __future__ import annotations

import heapq
import logging
from bisect import bisect_left, insort
from dataclasses import dataclass

from .core_init import CoreTimeMap, Time, core_times
from .temporal_graph import INFINITY, TemporalGraph, project

log = logging.getLogger(__name__)

VERTEX, EDGE = 0, 1


class ContractError(RuntimeError):
    """A precondition between pipeline stages was violated."""


class InvariantViolation(RuntimeError):
    """A finalized item was raised again within one update."""


@dataclass
class UpdateStats:
    tick: int
    removed: int = 0
    seeded: int = 0
    extractions: int = 0
    reentries: int = 0
    fallback: bool = False


class CoreState:
    """Mutable per-query working state: the window ``[x, Te]`` and its core times.

    Edge groups are never rebuilt; ``cur[e]`` indexes the first surviving
    timestamp of edge ``e`` and an emptied group has ``sup[e] == INFINITY``.
    ``inc[v]`` holds ``(sigma, edge)`` pairs sorted ascending so the k-th
    smallest incident core time is ``inc[v][k - 1][0]``.
    """

    def __init__(self, g: TemporalGraph, x: int, k: int, vsig, esig, sup, Te: int | None = None,
                 order: str = "descending", on_reentry: str = "fallback"):
        if order not in ("descending", "ascending"):
            raise ValueError(f"unknown update order {order!r}")
        if on_reentry not in ("fallback", "raise", "ignore"):
            raise ValueError(f"unknown reentry policy {on_reentry!r}")
        self.Te = g.t_max if Te is None else Te
        self.g = g
        self.k = k
        self.x = x
        self.order = order
        self.on_reentry = on_reentry
        g = self.g
        self.eu = [u for u, _ in g.edges]
        self.ev = [v for _, v in g.edges]
        self.times = g.times
        self.cur = [bisect_left(ts, x) for ts in g.times]
        self.sup: list[Time] = list(sup)
        self.vsig: list[Time] = list(vsig)
        self.esig: list[Time] = list(esig)
        self.inc = [sorted((self.esig[e], e) for e in g.adjacency[v]) for v in range(g.n)]
        self.edges_at: dict[int, list[int]] = {}
        for e, ts in enumerate(g.times):
            for t in ts[self.cur[e]:]:
                self.edges_at.setdefault(t, []).append(e)
        # finalization stamps; a stamp equal to the current call id means finalized
        self._call = 0
        self._vfin = [0] * g.n
        self._efin = [0] * len(g.edges)
        self._echg = [0] * len(g.edges)
        self.history: list[UpdateStats] = []
        self.finite = sum(1 for s in self.vsig if s != INFINITY)

    @classmethod
    def initialize(cls, g: TemporalGraph, Ts: int, k: int, Te: int | None = None, **kw) -> "CoreState":
        """Project ``g`` to ``[Ts, Te]`` and run Phase I on it."""
        Te = g.t_max if Te is None else Te
        g0 = project(g, Ts, Te)
        vs, es, sup = core_times(g0, Ts, k)
        return cls(g0, Ts, k, vs, es, sup, Te=Te, **kw)

    @classmethod
    def from_sigma(cls, g: TemporalGraph, sigma: CoreTimeMap, **kw) -> "CoreState":
        if sigma.edges != g.edges:
            raise ContractError("core-time map does not match the graph's edges")
        sup = [ts[0] if ts else INFINITY for ts in g.times]
        return cls(g, sigma.x, sigma.k, sigma.vertex_sigma, sigma.edge_sigma, sup, **kw)

    # -- views -----------------------------------------------------------

    def live_edges(self) -> list[int]:
        return [e for e, s in enumerate(self.sup) if s != INFINITY]

    def graph(self) -> TemporalGraph:
        """Materialize the current window as a :class:`TemporalGraph`."""
        live = self.live_edges()
        g = self.g
        return TemporalGraph._assemble(
            g.n,
            [g.edges[e] for e in live],
            [g.times[e][self.cur[e]:] for e in live],
            g.t_max, g.raw_time_map, g.vertex_ids, g.stats,
        )

    def sigma(self) -> CoreTimeMap:
        live = self.live_edges()
        return CoreTimeMap(
            x=self.x,
            k=self.k,
            vertex_sigma=tuple(self.vsig),
            edges=tuple(self.g.edges[e] for e in live),
            edge_sigma=tuple(self.esig[e] for e in live),
        )

    def kth_incident(self, v: int) -> Time:
        inc = self.inc[v]
        return inc[self.k - 1][0] if len(inc) >= self.k else INFINITY

    # -- update ----------------------------------------------------------

    def _set_edge(self, e: int, new: Time) -> None:
        old = self.esig[e]
        self.esig[e] = new
        for v in (self.eu[e], self.ev[e]):
            lst = self.inc[v]
            del lst[bisect_left(lst, (old, e))]
            insort(lst, (new, e))

    def advance(self) -> list[int]:
        """Drop the temporal edges at the anchor tick and move the anchor to ``x + 1``.

        Returns the ids of edges whose support or core time changed.
        """
        tick = self.x
        self._call += 1
        call = self._call
        stats = UpdateStats(tick=tick)
        k = self.k
        vsig, esig, sup = self.vsig, self.esig, self.sup
        eu, ev = self.eu, self.ev
        sign = -1 if self.order == "descending" else 1
        heap: list[tuple[Time, int, int]] = []
        changed: list[int] = []
        touched = self._echg
        violated = False

        removed = self.edges_at.pop(tick, ())
        for e in removed:
            c = self.cur[e] + 1
            self.cur[e] = c
            ts = self.times[e]
            s = ts[c] if c < len(ts) else INFINITY
            sup[e] = s
            stats.removed += 1
            changed.append(e)
            touched[e] = call
            new = max(s, vsig[eu[e]], vsig[ev[e]])
            if new > esig[e]:
                self._set_edge(e, new)
                heapq.heappush(heap, (sign * new, EDGE, e))
                stats.seeded += 1

        vfin, efin = self._vfin, self._efin
        while heap:
            key, kind, i = heapq.heappop(heap)
            if kind == VERTEX:
                if vsig[i] != sign * key or vfin[i] == call:
                    continue
                vfin[i] = call
                stats.extractions += 1
                s_v = vsig[i]
                # only edges below the vertex's new core time can rise
                lst = self.inc[i]
                cands = [e for _, e in lst[:bisect_left(lst, (s_v, -1))]]
                for e in cands:
                    w = eu[e] + ev[e] - i
                    new = s_v
                    if sup[e] > new:
                        new = sup[e]
                    if vsig[w] > new:
                        new = vsig[w]
                    if new > esig[e]:
                        if efin[e] == call:
                            stats.reentries += 1
                            violated = True
                            if self.on_reentry == "raise":
                                raise InvariantViolation(f"edge {self.g.edges[e]} raised after finalization")
                            continue
                        self._set_edge(e, new)
                        if touched[e] != call:
                            touched[e] = call
                            changed.append(e)
                        heapq.heappush(heap, (sign * new, EDGE, e))
            else:
                if esig[i] != sign * key or efin[i] == call:
                    continue
                efin[i] = call
                stats.extractions += 1
                for v in (eu[i], ev[i]):
                    inc = self.inc[v]
                    new = inc[k - 1][0] if len(inc) >= k else INFINITY
                    if new > vsig[v]:
                        if vfin[v] == call:
                            stats.reentries += 1
                            violated = True
                            if self.on_reentry == "raise":
                                raise InvariantViolation(f"vertex {v} raised after finalization")
                            continue
                        if new == INFINITY:
                            self.finite -= 1
                        vsig[v] = new
                        heapq.heappush(heap, (sign * new, VERTEX, v))

        self.x = tick + 1
        if violated and self.on_reentry == "fallback":
            log.warning("single-extraction invariant broken at tick %d; recomputing", tick)
            stats.fallback = True
            changed = self._recompute()
        self.history.append(stats)
        return changed

    def _recompute(self) -> list[int]:
        g = self.graph()
        vs, es, _ = core_times(g, self.x, self.k)
        by_edge = dict(zip(g.edges, es))
        changed = []
        for e, uv in enumerate(self.g.edges):
            new = by_edge.get(uv, INFINITY)
            if new != self.esig[e]:
                self._set_edge(e, new)
                changed.append(e)
        self.vsig[:] = vs
        self.finite = sum(1 for s in vs if s != INFINITY)
        return changed


def core_update(g_prev: TemporalGraph, sigma_prev: CoreTimeMap, tick: int, Te: int | None = None,
                order: str = "descending", on_reentry: str = "fallback"
                ) -> tuple[TemporalGraph, CoreTimeMap]:
    """Drop the temporal edges at ``tick`` and return ``(g_next, sigma_next)`` anchored at ``tick + 1``."""
    if sigma_prev.x != tick:
        raise ContractError(f"core-time map anchored at {sigma_prev.x}, expected {tick}")
    if any(ts[0] < tick for ts in g_prev.times):
        raise ContractError(f"graph still holds temporal edges before tick {tick}")
    Te = g_prev.t_max if Te is None else Te
    state = CoreState.from_sigma(g_prev, sigma_prev, order=order, on_reentry=on_reentry)
    state.Te = Te
    state.advance()
    return state.graph(), state.sigma()

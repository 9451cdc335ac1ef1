"""End-to-end time-range temporal k-core query.

Phase I computes core times for the first anchor ``Ts``; Phase II advances
the anchor one tick at a time. For anchor ``x`` the core over ``[x, te]``
holds the vertices with ``sigma(v) <= te`` and the temporal edges
``(u, v, t)`` with ``max(sigma(u, v), t) <= te``.

Two listers produce the emission stream:

* :func:`core_t_list` sweeps one anchor and deduplicates through a
  :class:`TTIRegistry`.
* :class:`AnchorIndex` keeps the entry keys of all temporal edges in a
  Fenwick tree across anchors. The core over ``[x, te]`` was already emitted
  at an earlier anchor iff it equals the core over ``[x - 1, te]``, which
  happens iff that larger core holds no edge stamped ``x - 1``. So anchor
  ``x`` emits exactly the change points ``te >= min sigma_{x-1}(e)`` over the
  edges stamped ``x - 1``, without registry lookups.
"""
from __future__ import annotations

import heapq
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core_init import CoreTimeMap, Time
from .core_update import ContractError, CoreState
from .oracle import TemporalKCore
from .temporal_graph import INFINITY, QueryInterval, TemporalGraph

DETAILS = ("count", "tti", "vertices", "full")


class Emission(NamedTuple):
    anchor: int
    te: int
    tti: tuple[int, int]
    vertices: tuple[int, ...] | None = None
    edges: tuple[tuple[int, int, int], ...] | None = None

    def core(self) -> TemporalKCore:
        return TemporalKCore(self.vertices or (), self.edges or (), self.tti)


class Sink:
    """Receives emissions in order. ``detail`` selects the payload.

    ``count`` sinks only get per-anchor totals via :meth:`emit_count`; the
    others get one :meth:`emit` call per core. Payload tuples are fresh
    copies and may be retained.
    """

    detail = "tti"

    def emit(self, em: Emission) -> None:
        raise NotImplementedError

    def emit_count(self, anchor: int, n: int) -> None:
        raise NotImplementedError


class CollectSink(Sink):
    def __init__(self, detail: str = "full"):
        if detail not in DETAILS[1:]:
            raise ValueError(f"unsupported detail {detail!r}")
        self.detail = detail
        self.emissions: list[Emission] = []

    def emit(self, em: Emission) -> None:
        self.emissions.append(em)

    def ttis(self) -> list[tuple[int, int]]:
        return [em.tti for em in self.emissions]

    def cores(self) -> dict[tuple[int, int], TemporalKCore]:
        return {em.tti: em.core() for em in self.emissions}


class CountSink(Sink):
    detail = "count"

    def __init__(self):
        self.total = 0
        self.per_anchor: dict[int, int] = {}

    def emit(self, em: Emission) -> None:
        self.emit_count(em.anchor, 1)

    def emit_count(self, anchor: int, n: int) -> None:
        if n:
            self.total += n
            self.per_anchor[anchor] = self.per_anchor.get(anchor, 0) + n


class CallbackSink(Sink):
    def __init__(self, fn: Callable[[Emission], None], detail: str = "tti"):
        self.fn = fn
        self.detail = detail

    def emit(self, em: Emission) -> None:
        self.fn(em)


class DuplicateCore(AssertionError):
    """Two structurally different cores share a TTI."""


class TTIRegistry:
    """Set of emitted TTIs over ``[Ts, Te]``.

    Dense triangular bitmap when the window has at most ``dense_limit``
    ticks, a plain set otherwise. With ``verify`` the full core is kept per
    TTI and a repeated TTI must carry an identical core.
    """

    def __init__(self, Ts: int, Te: int, dense_limit: int = 1 << 16, verify: bool = False):
        self.Ts, self.Te = Ts, Te
        self.delta = Te - Ts + 1
        self._bits: bytearray | None = None
        self._set: set[tuple[int, int]] | None = None
        if self.delta <= dense_limit:
            self._bits = bytearray((self.delta * (self.delta + 1) // 2 + 7) // 8)
        else:
            self._set = set()
        self._n = 0
        self.cores: dict[tuple[int, int], TemporalKCore] | None = {} if verify else None

    def _index(self, tti: tuple[int, int]) -> int:
        i, j = tti[0] - self.Ts, tti[1] - self.Ts
        if not 0 <= i <= j < self.delta:
            raise ValueError(f"TTI {tti} outside [{self.Ts}, {self.Te}]")
        return i * self.delta - i * (i - 1) // 2 + (j - i)

    def __contains__(self, tti: tuple[int, int]) -> bool:
        if self._bits is None:
            return tti in self._set
        p = self._index(tti)
        return bool(self._bits[p >> 3] >> (p & 7) & 1)

    def add(self, tti: tuple[int, int], core: TemporalKCore | None = None) -> bool:
        """Record ``tti``; return ``True`` if it was new."""
        if tti in self:
            if self.cores is not None and core is not None and self.cores[tti] != core:
                raise DuplicateCore(f"TTI {tti} maps to two different cores")
            return False
        if self._bits is None:
            self._set.add(tti)
        else:
            p = self._index(tti)
            self._bits[p >> 3] |= 1 << (p & 7)
        if self.cores is not None and core is not None:
            self.cores[tti] = core
        self._n += 1
        return True

    def __len__(self) -> int:
        return self._n


def reconstruct(sigma: CoreTimeMap, g: TemporalGraph, t_e: int) -> TemporalKCore:
    """Temporal k-core over ``[sigma.x, t_e]`` read off the core times."""
    if t_e < sigma.x:
        raise ValueError(f"t_e={t_e} precedes anchor {sigma.x}")
    es = sigma.edge_map()
    verts = [v for v, s in enumerate(sigma.vertex_sigma) if s <= t_e]
    edges = [
        (u, v, t)
        for (u, v), ts in zip(g.edges, g.times)
        if es.get((u, v), INFINITY) <= t_e
        for t in ts
        if sigma.x <= t <= t_e
    ]
    return TemporalKCore.build(verts, edges)


def core_t_list(sigma: CoreTimeMap, g: TemporalGraph, x: int, Te: int,
                registry: TTIRegistry, sink: Sink) -> int:
    """Emit the new cores over ``[x, te]`` for ``te = x..Te``; return how many were emitted."""
    if sigma.x != x:
        raise ContractError(f"core-time map anchored at {sigma.x}, expected {x}")
    es = sigma.edge_map()
    entries: list[tuple[Time, int, int, int]] = []  # (key, t, u, v)
    for (u, v), ts in zip(g.edges, g.times):
        s = es.get((u, v), INFINITY)
        if s > Te:
            continue
        for t in ts:
            if x <= t <= Te:
                entries.append((max(s, t), t, u, v))
    entries.sort()
    vq = sorted((s, v) for v, s in enumerate(sigma.vertex_sigma) if s <= Te)

    verts: list[int] = []
    edges: list[tuple[int, int, int]] = []
    lo_t = hi_t = None
    i = j = 0
    emitted = 0
    while i < len(entries):
        te = entries[i][0]
        while i < len(entries) and entries[i][0] == te:
            _, t, u, v = entries[i]
            edges.append((u, v, t))
            lo_t = t if lo_t is None else min(lo_t, t)
            hi_t = t if hi_t is None else max(hi_t, t)
            i += 1
        while j < len(vq) and vq[j][0] <= te:
            verts.append(vq[j][1])
            j += 1
        tti = (lo_t, hi_t)
        core = None
        if sink.detail == "full" or registry.cores is not None:
            core = TemporalKCore.build(verts, edges)
        if registry.add(tti, core):
            emitted += 1
            _deliver(sink, x, te, tti, verts, edges, core)
    return emitted


def _deliver(sink: Sink, x, te, tti, verts, edges, core=None) -> None:
    if sink.detail == "count":
        sink.emit_count(x, 1)
    elif sink.detail == "tti":
        sink.emit(Emission(x, te, tti))
    elif sink.detail == "vertices":
        sink.emit(Emission(x, te, tti, tuple(sorted(verts))))
    else:
        core = core or TemporalKCore.build(verts, edges)
        sink.emit(Emission(x, te, tti, core.vertices, core.edges))


class _Fenwick:
    """Counts over positions ``0..n-1`` with prefix sums and k-th-one search."""

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)
        self.top = 1 << max(n.bit_length() - 1, 0) if n else 0

    def add(self, i: int, d: int) -> None:
        i += 1
        tree, n = self.tree, self.n
        while i <= n:
            tree[i] += d
            i += i & -i

    def prefix(self, i: int) -> int:
        """Sum over ``0..i-1``."""
        s = 0
        tree = self.tree
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def find(self, k: int) -> int:
        """Smallest position whose prefix sum reaches ``k`` (``k >= 1``); ``n`` if none."""
        pos = 0
        step = self.top
        tree, n = self.tree, self.n
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] < k:
                pos = nxt
                k -= tree[nxt]
            step >>= 1
        return pos


class _MinTree:
    """Point-assign / prefix-min segment tree."""

    def __init__(self, n: int):
        size = 1
        while size < max(n, 1):
            size <<= 1
        self.size = size
        self.t: list[Time] = [INFINITY] * (2 * size)

    def set(self, i: int, val: Time) -> None:
        t = self.t
        i += self.size
        t[i] = val
        i >>= 1
        while i:
            m = t[2 * i] if t[2 * i] < t[2 * i + 1] else t[2 * i + 1]
            if t[i] == m:
                break
            t[i] = m
            i >>= 1

    def prefix_min(self, hi: int) -> Time:
        """Minimum over ``0..hi`` inclusive."""
        t = self.t
        lo = self.size
        r = hi + self.size + 1
        res: Time = INFINITY
        while lo < r:
            if lo & 1:
                res = min(res, t[lo])
                lo += 1
            if r & 1:
                r -= 1
                res = min(res, t[r])
            lo >>= 1
            r >>= 1
        return res


class AnchorIndex:
    """Entry keys ``max(sigma(e), t)`` of every live temporal edge, kept across anchors.

    ``cnt[te]`` counts temporal edges entering at ``te``; ``te`` is a change
    point while ``cnt[te] > 0``. Occurrences with ``t <= sigma(e)`` are
    absorbed into ``sigma(e)``'s bucket. A second tree holds, per core time,
    the smallest support time among edges with that core time, which gives
    the TTI start of a snapshot as a prefix minimum.
    """

    def __init__(self, state: CoreState, Ts: int, Te: int):
        self.st = state
        self.Ts, self.Te = Ts, Te
        size = Te - Ts + 1
        self.cnt = [0] * size
        self.nz = _Fenwick(size)
        self.minsup = _MinTree(size)
        self.leaf: dict[int, list[tuple[Time, int]]] = {}
        m = len(state.g.edges)
        self.m_sig: list[Time] = [INFINITY] * m
        self.m_sup: list[Time] = [INFINITY] * m
        self.m_lo = list(state.cur)
        self.m_hi = list(state.cur)
        for e in range(m):
            self._add_edge(e)

    def _bump(self, t: int, d: int) -> None:
        i = t - self.Ts
        c = self.cnt[i]
        nc = c + d
        self.cnt[i] = nc
        if c == 0 and nc:
            self.nz.add(i, 1)
        elif nc == 0 and c:
            self.nz.add(i, -1)

    def _refresh_leaf(self, s: int) -> None:
        h = self.leaf.get(s)
        while h:
            sup, e = h[0]
            if self.m_sig[e] == s and self.m_sup[e] == sup:
                break
            heapq.heappop(h)
        self.minsup.set(s - self.Ts, h[0][0] if h else INFINITY)

    def _add_edge(self, e: int) -> None:
        """Index ``e`` from scratch (it must currently be unindexed)."""
        st = self.st
        s = st.esig[e]
        lo = st.cur[e]
        self.m_lo[e] = lo
        if s == INFINITY:
            self.m_hi[e] = lo
            return
        ts = st.times[e]
        hi = bisect_right(ts, s, lo)
        if hi > lo:
            self._bump(s, hi - lo)
        for t in ts[hi:]:
            self._bump(t, 1)
        self.m_sig[e], self.m_hi[e], self.m_sup[e] = s, hi, st.sup[e]
        heapq.heappush(self.leaf.setdefault(s, []), (st.sup[e], e))
        self._refresh_leaf(s)

    def _drop_edge(self, e: int) -> None:
        s = self.m_sig[e]
        if s == INFINITY:
            return
        lo, hi = self.m_lo[e], self.m_hi[e]
        if hi > lo:
            self._bump(s, lo - hi)
        for t in self.st.times[e][hi:]:
            self._bump(t, -1)
        self.m_sig[e] = INFINITY
        self._refresh_leaf(s)

    def reindex(self, e: int) -> None:
        st = self.st
        old, new = self.m_sig[e], st.esig[e]
        if old == INFINITY or new < old:
            self._drop_edge(e)
            self._add_edge(e)
            return
        if new == INFINITY:
            # absorbed front removals first, then the rest of the group
            self._drop_edge(e)
            self.m_lo[e] = self.m_hi[e] = st.cur[e]
            return
        ts = st.times[e]
        lo0, hi0 = self.m_lo[e], self.m_hi[e]
        lo = st.cur[e]
        # removed occurrences: absorbed ones leave sigma's bucket, others their own
        absorbed = min(lo, hi0) - lo0
        for t in ts[max(lo0, hi0):lo]:
            self._bump(t, -1)
        hi = max(hi0, lo)
        new_hi = bisect_right(ts, new, hi)
        for t in ts[hi:new_hi]:
            self._bump(t, -1)
        if old != new:
            self._bump(old, -(absorbed + hi - lo))
            if new_hi > lo:
                self._bump(new, new_hi - lo)
        elif absorbed or new_hi > hi:
            self._bump(new, new_hi - hi - absorbed)
        self.m_lo[e], self.m_hi[e] = lo, new_hi
        sup = st.sup[e]
        if old != new or sup != self.m_sup[e]:
            self.m_sig[e], self.m_sup[e] = new, sup
            heapq.heappush(self.leaf.setdefault(new, []), (sup, e))
            if old != new:
                self._refresh_leaf(old)
            self._refresh_leaf(new)

    # -- queries ---------------------------------------------------------

    def count_from(self, lo: int) -> int:
        """Number of change points in ``[lo, Te]``."""
        if lo > self.Te:
            return 0
        i = max(lo, self.Ts) - self.Ts
        return self.nz.prefix(self.nz.n) - self.nz.prefix(i)

    def change_points(self, lo: int):
        """Change points ``te >= lo`` ascending."""
        if lo > self.Te:
            return
        k = self.nz.prefix(max(lo, self.Ts) - self.Ts)
        n = self.nz.n
        while True:
            k += 1
            i = self.nz.find(k)
            if i >= n:
                return
            yield self.Ts + i

    def tti_start(self, te: int) -> Time:
        return self.minsup.prefix_min(te - self.Ts)


@dataclass
class QuerySummary:
    cores_emitted: int = 0
    ticks_processed: int = 0
    anchors_listed: int = 0
    init_ms: float = 0.0
    update_ms: float = 0.0
    list_ms: float = 0.0
    window_vertices: int = 0
    window_edges: int = 0
    window_temporal_edges: int = 0
    max_extractions: int = 0
    total_extractions: int = 0
    reentries: int = 0
    fallbacks: int = 0
    extractions_per_tick: list[int] = field(default_factory=list, repr=False)

    @property
    def total_ms(self) -> float:
        return self.init_ms + self.update_ms + self.list_ms


def _snapshot_sweep(state: CoreState, x: int, tes: list[int], starts: list[Time], sink: Sink) -> None:
    """Materialize the cores at the given ascending change points of anchor ``x``."""
    last = tes[-1]
    st = state
    entries = []
    for e, s in enumerate(st.esig):
        if s > last:
            continue
        u, v = st.eu[e], st.ev[e]
        for t in st.times[e][st.cur[e]:]:
            key = s if t <= s else t
            if key > last:
                break
            entries.append((key, t, u, v))
    entries.sort()
    vq = sorted((s, v) for v, s in enumerate(st.vsig) if s <= last)
    verts: list[int] = []
    edges: list[tuple[int, int, int]] = []
    i = j = 0
    for te, a in zip(tes, starts):
        while i < len(entries) and entries[i][0] <= te:
            _, t, u, v = entries[i]
            edges.append((u, v, t))
            i += 1
        while j < len(vq) and vq[j][0] <= te:
            verts.append(vq[j][1])
            j += 1
        _deliver(sink, x, te, (a, te), verts, edges)


def run_query(g: TemporalGraph, q: QueryInterval, sink: Sink | None = None, *,
              lister: str = "indexed", verify: bool = False,
              order: str = "descending", on_reentry: str = "fallback") -> QuerySummary:
    """All distinct temporal k-cores over sub-intervals of ``[q.Ts, q.Te]``.

    ``lister`` is ``"indexed"`` (default) or ``"registry"``, the per-anchor
    sweep with a global TTI registry. ``verify`` keeps every emitted core and
    checks that no TTI is emitted twice or maps to two cores.
    """
    q.validate(g)
    if lister not in ("indexed", "registry"):
        raise ValueError(f"unknown lister {lister!r}")
    sink = sink if sink is not None else CountSink()
    Ts, Te, k = q.Ts, q.Te, q.k
    summary = QuerySummary()

    t0 = time.perf_counter()
    state = CoreState.initialize(g, Ts, k, Te, order=order, on_reentry=on_reentry)
    g0 = state.g
    summary.window_vertices = g0.n
    summary.window_edges = len(g0.edges)
    summary.window_temporal_edges = g0.num_temporal_edges
    index = AnchorIndex(state, Ts, Te) if lister == "indexed" else None
    registry = None
    if lister == "registry" or verify:
        registry = TTIRegistry(Ts, Te, verify=verify)
    summary.init_ms = (time.perf_counter() - t0) * 1e3

    lower = Ts  # smallest te that can yield a new core at the current anchor
    x = Ts
    while True:
        t1 = time.perf_counter()
        finite = state.finite
        if finite:
            summary.anchors_listed += 1
            if index is None:
                summary.cores_emitted += core_t_list(state.sigma(), state.graph(), x, Te, registry, sink)
            else:
                summary.cores_emitted += _list_indexed(index, state, x, lower, sink, registry)
        summary.list_ms += (time.perf_counter() - t1) * 1e3
        if x >= Te or not finite:
            break

        t2 = time.perf_counter()
        stamped = state.edges_at.get(x, ())
        lower = min((state.esig[e] for e in stamped), default=INFINITY)
        changed = state.advance()
        stats = state.history[-1]
        summary.ticks_processed += 1
        summary.extractions_per_tick.append(stats.extractions)
        summary.total_extractions += stats.extractions
        summary.max_extractions = max(summary.max_extractions, stats.extractions)
        summary.reentries += stats.reentries
        summary.fallbacks += int(stats.fallback)
        if index is not None:
            for e in changed:
                index.reindex(e)
        x = state.x
        summary.update_ms += (time.perf_counter() - t2) * 1e3
    return summary


def _list_indexed(index: AnchorIndex, state: CoreState, x: int, lower: Time,
                  sink: Sink, registry: TTIRegistry | None) -> int:
    lo = max(x, lower)
    if lo == INFINITY:
        return 0
    if sink.detail == "count" and registry is None:
        n = index.count_from(lo)
        sink.emit_count(x, n)
        return n
    tes = list(index.change_points(lo))
    if not tes:
        return 0
    starts = [index.tti_start(te) for te in tes]
    if registry is not None:
        for te, a in zip(tes, starts):
            core = None
            if registry.cores is not None:
                core = reconstruct(state.sigma(), state.graph(), te)
                if core.tti != (a, te):
                    raise DuplicateCore(f"indexed TTI {(a, te)} disagrees with core TTI {core.tti}")
            if not registry.add((a, te), core):
                raise DuplicateCore(f"TTI {(a, te)} emitted twice")
    if sink.detail == "count":
        sink.emit_count(x, len(tes))
    elif sink.detail == "tti":
        for te, a in zip(tes, starts):
            sink.emit(Emission(x, te, (a, te)))
    else:
        _snapshot_sweep(state, x, tes, starts, sink)
    return len(tes)

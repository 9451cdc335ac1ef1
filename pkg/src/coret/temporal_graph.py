"""Temporal graph data model, edge-list ingestion, projection and detemporalization.

A temporal graph is stored as a list of detemporalized edges ``(u, v)`` with
``u < v``, each carrying an ascending tuple of timestamps, plus per-vertex
adjacency lists of edge ids. Vertex ids and timestamps are dense internally;
the original values are kept for output.
"""
from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

log = logging.getLogger(__name__)

INFINITY = float("inf")


class ParseError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class ParseStats:
    lines: int = 0
    duplicates: int = 0
    self_loops: int = 0


@dataclass(frozen=True)
class TemporalGraph:
    """Immutable undirected temporal multigraph.

    ``edges[e]`` is the detemporalized edge ``(u, v)`` (``u < v``) and
    ``times[e]`` its strictly increasing timestamps. Edge ids follow the
    lexicographic order of ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    times: tuple[tuple[int, ...], ...]
    adjacency: tuple[tuple[int, ...], ...]
    t_max: int
    raw_time_map: tuple[int, ...] | None = None
    vertex_ids: tuple[int, ...] | None = None
    stats: ParseStats = field(default=ParseStats(), compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        triples: Iterable[tuple[int, int, int]],
        t_max: int | None = None,
        raw_time_map: Sequence[int] | None = None,
        vertex_ids: Sequence[int] | None = None,
        stats: ParseStats | None = None,
    ) -> "TemporalGraph":
        groups: dict[tuple[int, int], set[int]] = {}
        for u, v, t in triples:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"vertex out of range in ({u}, {v}, {t})")
            if t < 0:
                raise ValueError(f"negative timestamp in ({u}, {v}, {t})")
            key = (u, v) if u < v else (v, u)
            groups.setdefault(key, set()).add(t)
        edges = tuple(sorted(groups))
        times = tuple(tuple(sorted(groups[e])) for e in edges)
        if t_max is None:
            t_max = max((ts[-1] for ts in times), default=0)
        return cls._assemble(n, edges, times, t_max, raw_time_map, vertex_ids, stats)

    @classmethod
    def _assemble(cls, n, edges, times, t_max, raw_time_map=None, vertex_ids=None, stats=None):
        adj: list[list[int]] = [[] for _ in range(n)]
        for e, (u, v) in enumerate(edges):
            adj[u].append(e)
            adj[v].append(e)
        return cls(
            n=n,
            edges=tuple(edges),
            times=tuple(times),
            adjacency=tuple(tuple(a) for a in adj),
            t_max=t_max,
            raw_time_map=tuple(raw_time_map) if raw_time_map is not None else None,
            vertex_ids=tuple(vertex_ids) if vertex_ids is not None else None,
            stats=stats or ParseStats(),
        )

    @property
    def num_temporal_edges(self) -> int:
        return sum(len(ts) for ts in self.times)

    def temporal_edges(self) -> Iterator[tuple[int, int, int]]:
        """All ``(u, v, t)`` triples, grouped by detemporalized edge."""
        for (u, v), ts in zip(self.edges, self.times):
            for t in ts:
                yield u, v, t

    def edge_groups(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return dict(zip(self.edges, self.times))

    def edge_id(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        i = bisect_left(self.edges, key)
        if i == len(self.edges) or self.edges[i] != key:
            raise KeyError(key)
        return i

    def raw_time(self, t: int) -> int:
        return self.raw_time_map[t] if self.raw_time_map is not None else t

    def raw_vertex(self, v: int) -> int:
        return self.vertex_ids[v] if self.vertex_ids is not None else v


@dataclass(frozen=True)
class QueryInterval:
    Ts: int
    Te: int
    k: int

    @property
    def delta(self) -> int:
        return self.Te - self.Ts + 1

    def validate(self, g: TemporalGraph) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.Ts <= self.Te <= g.t_max:
            raise ValueError(f"window [{self.Ts}, {self.Te}] not within [0, {g.t_max}]")


@dataclass(frozen=True)
class StaticGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...]

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"not an integer: {tok!r}") from None


def parse_edge_list(stream: TextIO | Iterable[str], normalize: bool = True) -> TemporalGraph:
    """Read ``u v t`` lines into a :class:`TemporalGraph`.

    Vertex ids are relabelled densely in ascending order of the original id.
    With ``normalize`` the distinct raw timestamps are relabelled onto
    ``0..t_max`` preserving order. Duplicate triples are collapsed and
    self-loops dropped; both are counted in ``graph.stats``.
    """
    raw: list[tuple[int, int, int]] = []
    self_loops = 0
    nlines = 0
    loop_vertices: set[int] = set()
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        toks = s.split()
        if len(toks) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(toks)}")
        u, v, t = (_parse_int(x, lineno) for x in toks)
        if u < 0 or v < 0:
            raise ParseError(lineno, "negative vertex id")
        if t < 0 and not normalize:
            raise ParseError(lineno, "negative timestamp")
        nlines += 1
        if u == v:
            self_loops += 1
            loop_vertices.add(u)
            continue
        raw.append((u, v, t))
    if self_loops:
        log.warning("dropped %d self-loop(s)", self_loops)

    ids = sorted({x for u, v, _ in raw for x in (u, v)} | loop_vertices)
    vmap = {x: i for i, x in enumerate(ids)}
    if normalize:
        stamps = sorted({t for _, _, t in raw})
        tmap = {x: i for i, x in enumerate(stamps)}
        raw_time_map: list[int] | None = stamps
        t_max = len(stamps) - 1 if stamps else 0
    else:
        tmap = None
        raw_time_map = None
        t_max = max((t for _, _, t in raw), default=0)

    triples = set()
    for u, v, t in raw:
        a, b = vmap[u], vmap[v]
        if a > b:
            a, b = b, a
        triples.add((a, b, tmap[t] if tmap is not None else t))
    duplicates = len(raw) - len(triples)
    if duplicates:
        log.info("collapsed %d duplicate temporal edge(s)", duplicates)
    identity = ids == list(range(len(ids)))
    return TemporalGraph.from_edges(
        len(ids),
        triples,
        t_max=t_max,
        raw_time_map=raw_time_map,
        vertex_ids=None if identity else ids,
        stats=ParseStats(lines=nlines, duplicates=duplicates, self_loops=self_loops),
    )


def read_edge_list(path, normalize: bool = True) -> TemporalGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, normalize=normalize)


def format_edge_list(g: TemporalGraph) -> str:
    """Serialize to ``u v t`` lines sorted by ``(t, u, v)``, original ids and times."""
    rows = sorted(
        (g.raw_time(t), g.raw_vertex(u), g.raw_vertex(v)) for u, v, t in g.temporal_edges()
    )
    return "".join(f"{u} {v} {t}\n" for t, u, v in rows)


def project(g: TemporalGraph, lo: int, hi: int) -> TemporalGraph:
    """Restrict ``g`` to temporal edges with ``lo <= t <= hi``; empty groups are dropped."""
    if lo > hi:
        raise ValueError(f"empty projection window [{lo}, {hi}]")
    edges = []
    times = []
    trimmed = False
    for e, ts in zip(g.edges, g.times):
        i, j = bisect_left(ts, lo), bisect_right(ts, hi)
        if j - i != len(ts):
            trimmed = True
        if i < j:
            edges.append(e)
            times.append(ts[i:j] if trimmed else ts)
    if not trimmed:
        return g
    return TemporalGraph._assemble(
        g.n, edges, times, g.t_max, g.raw_time_map, g.vertex_ids, g.stats
    )


def detemporalize(g: TemporalGraph) -> StaticGraph:
    nbrs = tuple(
        tuple(sorted(g.edges[e][0] + g.edges[e][1] - v for e in g.adjacency[v]))
        for v in range(g.n)
    )
    return StaticGraph(n=g.n, edges=g.edges, neighbors=nbrs)

"""Seeded generators for test instances and a message-trace surrogate."""
from __future__ import annotations

import itertools
import random

from .temporal_graph import TemporalGraph


def random_instance(rng: random.Random, max_n: int = 12, max_edges: int = 60,
                    max_t: int = 15) -> TemporalGraph:
    """Erdos-Renyi style detemporalized edges, each with 1-3 uniform timestamps.

    The edge density is drawn per instance so that about half of the
    instances have a non-empty 2-core somewhere in their span.
    """
    n = rng.randint(2, max_n)
    t_max = rng.randint(0, max_t)
    p = rng.uniform(0.1, 0.6)
    triples: list[tuple[int, int, int]] = []
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    for u, v in pairs:
        if len(triples) >= max_edges:
            break
        if rng.random() < p:
            for _ in range(rng.randint(1, 3)):
                if len(triples) < max_edges:
                    triples.append((u, v, rng.randint(0, t_max)))
    return TemporalGraph.from_edges(n, triples, t_max=t_max)


def message_trace(seed: int = 0, n: int = 1862, messages: int = 59835,
                  ticks: int = 58911) -> list[tuple[int, int, int]]:
    """Synthetic messaging log shaped like a small online social network.

    Heavy-tailed user activity, repeat contacts and reply bursts. Returns
    ``(u, v, t)`` rows with exactly ``ticks`` distinct timestamps.
    """
    rng = random.Random(seed)
    activity = [rng.paretovariate(1.3) for _ in range(n)]
    users = list(range(n))
    cum = list(itertools.accumulate(activity))
    contacts: list[list[int]] = [[] for _ in range(n)]
    rows = []
    stamps = list(range(ticks)) + [rng.randrange(ticks) for _ in range(messages - ticks)]
    stamps.sort()
    prev = None
    for t in stamps:
        if prev is not None and rng.random() < 0.35:
            u, v = prev[1], prev[0]
        else:
            u = rng.choices(users, cum_weights=cum)[0]
            if contacts[u] and rng.random() < 0.75:
                v = rng.choice(contacts[u])
            else:
                v = u
                while v == u:
                    v = rng.choices(users, cum_weights=cum)[0]
                contacts[u].append(v)
                contacts[v].append(u)
        rows.append((u, v, t))
        prev = (u, v)
    return rows


def surrogate_graph(seed: int = 0, **kw) -> TemporalGraph:
    rows = message_trace(seed, **kw)
    n = kw.get("n", 1862)
    t_max = kw.get("ticks", 58911) - 1
    return TemporalGraph.from_edges(n, rows, t_max=t_max)

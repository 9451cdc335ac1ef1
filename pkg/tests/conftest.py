import random

import pytest
from hypothesis import strategies as st

from coret.synth import random_instance
from coret.temporal_graph import TemporalGraph

ACCEPTANCE: dict[str, str] = {}


def make_t3() -> TemporalGraph:
    return TemporalGraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)], t_max=3)


def make_t3x() -> TemporalGraph:
    return TemporalGraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3), (0, 1, 4)], t_max=4)


@pytest.fixture
def t3():
    return make_t3()


@pytest.fixture
def t3x():
    return make_t3x()


def instance_family(n: int = 1000, seed: int = 20240601):
    """The seeded differential-test family: ``(graph, k)`` pairs."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        g = random_instance(rng)
        out.append((g, rng.randint(1, 4)))
    return out


@st.composite
def temporal_graphs(draw, max_n=8, max_t=8, max_edges=30):
    n = draw(st.integers(2, max_n))
    t_max = draw(st.integers(0, max_t))
    triples = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, t_max))
        .filter(lambda r: r[0] != r[1]),
        max_size=max_edges,
    ))
    return TemporalGraph.from_edges(n, triples, t_max=t_max)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])

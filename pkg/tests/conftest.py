import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from flowaug.graph_core import Digraph
from flowaug.harness import fixtures as _fixtures

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

S, A, B, T = 0, 1, 2, 3


@pytest.fixture(scope="session")
def fx():
    """Named fixture instances; arc ids follow the listed order."""
    return _fixtures()


@st.composite
def small_digraphs(draw, max_n=6, max_m=8, p_inf=0.15):
    """(graph, s, t) with s=0 and t=n-1; parallel arcs allowed, no loops."""
    n = draw(st.integers(2, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    arcs = draw(st.lists(pairs, max_size=max_m))
    infs = draw(st.lists(st.floats(0, 1), min_size=len(arcs), max_size=len(arcs)))
    g = Digraph.build(n, [(u, v, x < p_inf) for (u, v), x in zip(arcs, infs)])
    return g, 0, n - 1


def random_digraph(rnd: random.Random, n: int, m: int, p_inf: float = 0.0) -> Digraph:
    arcs = []
    while len(arcs) < m:
        u, v = rnd.randrange(n), rnd.randrange(n)
        if u != v:
            arcs.append((u, v, rnd.random() < p_inf))
    return Digraph.build(n, arcs)


@st.composite
def bounded_digraphs(draw, max_inner=5, max_m=9):
    """(graph, s, t) where s has k unit out-arcs and t has k unit in-arcs into a random core."""
    inner = draw(st.integers(1, max_inner))
    n = inner + 2
    t = n - 1
    k = draw(st.integers(1, 3))
    core = st.integers(1, inner)
    arcs = [(0, draw(core)) for _ in range(k)] + [(draw(core), t) for _ in range(k)]
    if inner > 1:
        # head = tail shifted by a nonzero offset mod inner, so no loops and no rejection
        pairs = st.tuples(core, st.integers(1, inner - 1)).map(lambda p: (p[0], (p[0] - 1 + p[1]) % inner + 1))
        extra = draw(st.lists(st.tuples(pairs, st.booleans()), max_size=max_m))
        arcs += [(u, v, inf) for (u, v), inf in extra]
    return Digraph.build(n, arcs), 0, t


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

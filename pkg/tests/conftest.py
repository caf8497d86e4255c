import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from erhitting import graph as gr

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def connected_graphs(draw, min_n=2, max_n=8):
    """Random tree (each vertex attaches to an earlier one) plus random extra edges."""
    n = draw(st.integers(min_n, max_n))
    edges = set()
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        edges.add((j, i))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    extra = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    return gr.from_edges(n, [(perm[a], perm[b]) for a, b in list(edges) + extra])


@pytest.fixture(scope="session")
def k4():
    return gr.complete_graph(4)


@pytest.fixture(scope="session")
def edge():
    return gr.complete_graph(2)


@pytest.fixture(scope="session")
def c4():
    return gr.cycle_graph(4)


@pytest.fixture(scope="session")
def path3():
    return gr.path_graph(3)


@pytest.fixture(scope="session")
def star5():
    return gr.star_graph(5)


@pytest.fixture(scope="session")
def g500():
    return gr.generate_er(500, 0.5, 11)


@pytest.fixture(scope="session")
def g1000():
    return gr.generate_er(1000, 0.5, 5)


@pytest.fixture(scope="session")
def g2000():
    return gr.generate_er(2000, 0.5, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

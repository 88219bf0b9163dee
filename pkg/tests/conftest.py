from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from homdist.graphs import Graph, WeightedGraph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    a = np.zeros((n, n), dtype=np.int64)
    iu, ju = np.triu_indices(n, 1)
    a[iu, ju] = bits
    return Graph(a + a.T)


@st.composite
def weighted_graphs(draw, max_n=4, den=6):
    n = draw(st.integers(1, max_n))
    alpha = tuple(Fraction(draw(st.integers(1, den)), draw(st.integers(1, den))) for _ in range(n))
    beta = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            d = draw(st.integers(1, den))
            beta[i][j] = beta[j][i] = Fraction(draw(st.integers(0, d)), d)
    return WeightedGraph(alpha, tuple(map(tuple, beta)))


def random_graph(rng, lo, hi, p=None):
    from homdist.generators import gen_gnp
    n = int(rng.integers(lo, hi + 1))
    return gen_gnp(n, float(rng.random()) if p is None else p, int(rng.integers(2**32)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import weighted_graphs
from homdist.errors import PreconditionError
from homdist.graphs import Graph, WeightedGraph
from homdist.inversion import (build_biregular, build_regular, choose_diagonals, diagonal_overlay,
                               invert, plan_inversion, round_edge_weights, round_vertex_weights,
                               inversion_bound, verify_inversion)
from homdist.refinement import color_refine, quotient
from homdist.suites import random_weighted

F = Fraction
COL_K3 = WeightedGraph((1,), ((F(2, 3),),))


def test_round_vertex_weights_examples():
    assert round_vertex_weights([F(1, 2), F(1, 2)], 3) == [2, 1]
    assert round_vertex_weights([1], 5) == [5]
    assert round_vertex_weights([F(1, 3)] * 3, 3) == [1, 1, 1]
    with pytest.raises(PreconditionError):
        round_vertex_weights([F(1, 2), F(1, 3)], 4)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=8).filter(any), st.integers(1, 60))
def test_round_vertex_weights_property(raw, n):
    alpha = [F(v, sum(raw)) for v in raw]
    s = round_vertex_weights(alpha, n)
    assert sum(s) == n
    assert all(abs(F(si, n) - a) < F(1, n) for si, a in zip(s, alpha))


def test_round_edge_weights_examples():
    h = WeightedGraph((1, 1), ((0, F(93, 100)), (F(93, 100), 0)))
    assert round_edge_weights(h, [1, 1], 10)[0, 1] == 9
    h = WeightedGraph((1, 1), ((0, 1), (1, 0)))
    m = round_edge_weights(h, [2, 3], 5)
    assert m[0, 1] == 15 and m[1, 0] == 10
    h = WeightedGraph((1, 1), ((0, 0), (0, 0)))
    assert not round_edge_weights(h, [2, 3], 5).any()


@given(weighted_graphs(max_n=4), st.integers(1, 30))
def test_round_edge_weights_property(h, n):
    h = h.normalized()
    s = round_vertex_weights(h.alpha, n)
    m = round_edge_weights(h, s, n)
    for u in range(h.n):
        for v in range(h.n):
            if u != v and s[u] and s[v]:
                assert m[u, v] * s[u] == m[v, u] * s[v]
                assert abs(F(int(m[u, v]), n * s[v]) - h.beta[u][v]) <= F(1, 2 * n)


def test_choose_diagonals_examples():
    m = choose_diagonals(COL_K3, [6], 6, np.zeros((1, 1), dtype=np.int64))
    assert m[0, 0] == 24
    empty = WeightedGraph((F(1, 2), F(1, 2)), ((0, 0), (0, 0)))
    m = choose_diagonals(empty, [2, 2], 4, np.zeros((2, 2), dtype=np.int64))
    # equal provisional row sums: the second class moves off zero by one valid step
    assert sorted(m.diagonal().tolist()) == [0, 1]
    with pytest.raises(PreconditionError):
        choose_diagonals(empty, [1, 2], 3, np.zeros((2, 2), dtype=np.int64))


def _degrees_ok(edges, size, d):
    g = Graph.from_edges(size, edges)
    return g.num_edges == len(edges) and set(g.degrees()) <= {d}


def test_build_regular_examples():
    assert build_regular(5, 2) == [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]
    assert len(build_regular(4, 3)) == 6
    assert _degrees_ok(build_regular(36, 24), 36, 24)
    with pytest.raises(PreconditionError):
        build_regular(5, 3)


@given(st.integers(1, 30), st.data())
def test_build_regular_property(size, data):
    d = data.draw(st.integers(0, size - 1).filter(lambda d: d * size % 2 == 0))
    edges = build_regular(size, d)
    assert len(edges) == size * d // 2 and _degrees_ok(edges, size, d)


def test_build_biregular_examples():
    assert build_biregular(2, 4, 2, 1) == [(0, 0), (0, 1), (1, 2), (1, 3)]
    assert len(build_biregular(4, 4, 4, 4)) == 16
    e = build_biregular(3, 3, 2, 2)
    g = Graph.from_edges(6, [(a, 3 + b) for a, b in e])
    assert set(g.degrees()) == {2} and g.num_edges == 6
    with pytest.raises(PreconditionError):
        build_biregular(2, 3, 2, 1)


@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_build_biregular_property(s1, s2, data):
    d1 = data.draw(st.integers(0, s2).filter(lambda d: d * s1 % s2 == 0))
    d2 = d1 * s1 // s2
    edges = build_biregular(s1, s2, d1, d2)
    assert len(set(edges)) == len(edges) == s1 * d1
    left = np.bincount([a for a, _ in edges], minlength=s1)
    right = np.bincount([b for _, b in edges], minlength=s2)
    assert set(left.tolist()) <= {d1} and set(right.tolist()) <= {d2}


def test_invert_examples():
    g, plan = invert(COL_K3, 6)
    assert g.n == 36 and set(g.degrees()) == {24}
    assert quotient(g).beta == ((F(2, 3),),)
    g, _ = invert(WeightedGraph((1,), ((0,),)), 2)
    assert g.n == 4 and g.num_edges == 0
    h = WeightedGraph((F(1, 2), F(1, 2)), ((0, 1), (1, 0)))
    g, plan = invert(h, 4)
    assert g.n == 16
    assert plan.M[0, 1] == 8 and plan.M[1, 0] == 8
    with pytest.raises(PreconditionError):
        invert(h, 3)


def test_diagonal_overlay_examples():
    x = diagonal_overlay([1, 2], 3, [F(1, 3), F(2, 3)])
    assert x.exact.tolist() == [[F(1, 3), 0], [0, F(2, 3)]]
    x = diagonal_overlay([2, 1], 3, [F(1, 3), F(2, 3)])
    assert x.exact.tolist() == [[F(1, 3), F(1, 3)], [0, F(1, 3)]]
    assert diagonal_overlay([4], 4, [1]).exact.tolist() == [[1]]


def test_inversion_bound():
    assert inversion_bound(3, 12) == F(49, 64)
    assert float(inversion_bound(1, 6)) == pytest.approx(0.5069444)
    assert all(inversion_bound(3, 4 * n) <= inversion_bound(3, n) for n in range(1, 30))


def test_verify_inversion_examples():
    out = verify_inversion(COL_K3, 6)
    assert out["achieved"] == 0 and out["bound"] == F(73, 144) and out["passed"]
    rng = np.random.default_rng(12)
    h = random_weighted(rng, max_v=3)
    while h.n != 3:
        h = random_weighted(rng, max_v=3)
    out = verify_inversion(h, 12)
    assert out["achieved"] <= F(49, 64)


def test_random_plans_satisfy_all_criteria():
    rng = np.random.default_rng(5)
    for _ in range(8):
        h = random_weighted(rng)
        for n in (2 * h.n, 4 * h.n):
            plan = plan_inversion(h, n)
            plan.check()
            g, _ = invert(h, n)
            live = [u for u in range(h.n) if plan.s[u] > 0]
            assert color_refine(g).num_colors == len(live)
            assert sorted(quotient(g).alpha) == sorted(plan.sizes[u] for u in live)

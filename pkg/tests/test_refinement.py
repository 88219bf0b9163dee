from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import graphs, random_graph
from homdist.errors import PreconditionError
from homdist.generators import three_part_graph, gen_gnp
from homdist.graphs import Graph, WeightedGraph, as_weighted, blow_up, complete_graph, cycle_graph, disjoint_union, empty_graph, path_graph, star_graph
from homdist.homomorphism import enumerate_trees, hom_path, hom_tree, path_density, tree_density_vector
from homdist.refinement import (class_degree_matrix, color_refine, cr_equivalent, is_equitable,
                                path_equivalent, path_spectrum, quotient, quotient_match)

K1, K2, K3 = complete_graph(1), complete_graph(2), complete_graph(3)
C6, TWO_C3 = cycle_graph(6), disjoint_union(cycle_graph(3), cycle_graph(3))


def coarsest_equitable(g):
    """Oracle: the coarsest equitable partition by search over all set partitions (n <= 6)."""
    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for p in partitions(rest):
            for i in range(len(p)):
                yield p[:i] + [[first] + p[i]] + p[i + 1:]
            yield [[first]] + p
    best = None
    for p in partitions(list(range(g.n))):
        colors = np.empty(g.n, dtype=int)
        for c, block in enumerate(p):
            colors[block] = c
        if is_equitable(g, colors) and (best is None or len(p) < len(best)):
            best = p
    return sorted(sorted(b) for b in best)


def test_color_refine_examples():
    assert color_refine(K3).num_colors == 1
    star = color_refine(star_graph(3))
    assert sorted(map(sorted, star.classes())) == [[0], [1, 2, 3]]
    assert color_refine(disjoint_union(C6, TWO_C3)).num_colors == 1


@given(graphs(max_n=6))
def test_color_refine_is_coarsest_equitable(g):
    coloring = color_refine(g)
    assert is_equitable(g, coloring.colors)
    assert sorted(sorted(c) for c in coloring.classes()) == coarsest_equitable(g)


@given(graphs(max_n=8), st.randoms())
def test_color_ids_are_canonical(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    relabeled = Graph.from_edges(g.n, [(perm[a], perm[b]) for a, b in g.edges()])
    a, b = color_refine(g), color_refine(relabeled)
    assert all(a.colors[u] == b.colors[perm[u]] for u in range(g.n))
    assert color_refine(g) == a


def test_quotient_examples():
    assert quotient(K3) == WeightedGraph((3,), ((Fraction(2, 3),),))
    q = quotient(star_graph(3))
    # classes come in canonical id order, so compare up to a relabeling of classes
    assert quotient_match(q, WeightedGraph((1, 3), ((0, 1), (1, 0))), 1, 1) is not None
    assert sorted(q.alpha) == [1, 3]
    q10 = quotient(three_part_graph(10))
    assert q10.alpha == (10, 10, 10)
    assert all(q10.beta[i][i] == 0 for i in range(3))
    assert {q10.beta[i][j] for i in range(3) for j in range(3) if i != j} == {1, Fraction(9, 10), Fraction(4, 5)}


def test_quotient_symmetry(rng):
    for _ in range(50):
        g = random_graph(rng, 1, 10)
        c = color_refine(g)
        m = class_degree_matrix(g, c)
        sizes = [len(x) for x in c.classes()]
        assert all(sizes[i] * m[i, j] == sizes[j] * m[j, i] for i in range(len(sizes)) for j in range(len(sizes)))


def test_quotient_preserves_tree_homs(rng):
    trees = enumerate_trees(6)
    for _ in range(100):
        g = random_graph(rng, 1, 10)
        t = trees[int(rng.integers(len(trees)))]
        assert hom_tree(t, quotient(g)) == hom_tree(t, as_weighted(g))


def test_cr_equivalent_examples():
    assert cr_equivalent(C6, TWO_C3)
    assert not cr_equivalent(K3, star_graph(3))
    g = gen_gnp(6, 0.5, 3)
    assert cr_equivalent(g, blow_up(g, 2))


def test_cr_equivalence_matches_tree_densities(rng):
    # Dvorak's characterization as an oracle: equal tree densities for all trees on <= 5 vertices
    for n in (4, 6, 8):
        pool = [random_graph(rng, n, n) for _ in range(10)]
        pool += [Graph(blow_up(random_graph(rng, n // 2, n // 2), 2).adjacency)]
        pool += _regular_pool(n)
        vectors = [tree_density_vector(g, 5) for g in pool]
        for (g, vg), (h, vh) in itertools.combinations(zip(pool, vectors), 2):
            assert cr_equivalent(g, h) == (vg == vh)


def _regular_pool(n):
    from homdist.generators import gen_regular
    return [gen_regular(n, 2, s) for s in range(3)] + [gen_regular(n, 3, s) for s in range(2)]


def test_quotient_match_examples():
    assert quotient_match(quotient(K2), quotient(cycle_graph(4)), 2, 4) == {0: 0}
    assert quotient_match(quotient(K3), quotient(star_graph(3)), 3, 4) is None
    q = quotient(three_part_graph(4))
    assert quotient_match(q, q) == {0: 0, 1: 1, 2: 2}


def test_path_spectrum_examples():
    for g in (K2, cycle_graph(4)):
        (lam, w), = path_spectrum(g).entries
        assert (lam, w) == (pytest.approx(0.5), pytest.approx(1.0))
    assert path_spectrum(K1).entries == ((0.0, 1.0),)
    with pytest.raises(PreconditionError):
        path_spectrum(K2, 0)


def test_path_equivalent_examples():
    assert path_equivalent(path_spectrum(K2), path_spectrum(cycle_graph(4)))
    assert not path_equivalent(path_spectrum(K2), path_spectrum(K3))
    s = path_spectrum(gen_gnp(7, 0.4, 2))
    assert path_equivalent(s, s)


@given(graphs(max_n=9))
def test_path_spectrum_invariants(g):
    spec = path_spectrum(g)
    assert sum(w for _, w in spec.entries) == pytest.approx(1, abs=1e-9)
    assert all(-1 <= lam <= 1 and w >= 0 for lam, w in spec.entries)
    for ell in range(9):
        assert spec.path_density(ell) == pytest.approx(float(path_density(ell, g)), abs=1e-9)

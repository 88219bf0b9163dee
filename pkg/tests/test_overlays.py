from fractions import Fraction
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homdist.distances import objective_matrix
from homdist.errors import InvariantError, PreconditionError
from homdist.graphs import blow_up, complete_graph, cycle_graph, disjoint_union
from homdist.generators import gen_gnp, gen_regular
from homdist.overlays import (FractionalOverlay, SignedOverlay, compose, dykstra_signed,
                              dykstra_transportation, lmo_vertex, path_certificate,
                              permutation_overlay, project_marginals, project_spectral_ball,
                              read_certificate, tree_certificate, uniform_marginals,
                              uniform_overlay, write_certificate)
from homdist.refinement import path_spectrum
from homdist.transport import transportation_lmo

K1, K2 = complete_graph(1), complete_graph(2)
dims = st.tuples(st.integers(1, 5), st.integers(1, 5))


def test_uniform_overlay_examples():
    assert uniform_overlay(1, 1).X.tolist() == [[1]]
    assert uniform_overlay(2, 1).X.tolist() == [[0.5], [0.5]]
    u = uniform_overlay(2, 2)
    assert u.X.tolist() == [[0.25] * 2] * 2
    assert u.exact[0, 0] == Fraction(1, 4)
    assert SignedOverlay(u.X, u.row_marginal, u.col_marginal).validate()
    with pytest.raises(PreconditionError):
        uniform_overlay(0, 1)


def test_overlay_validators():
    r, c = uniform_marginals(2, 2)
    with pytest.raises(InvariantError):
        FractionalOverlay(np.array([[0.5, 0], [0, 0.4]]), r, c).validate()
    with pytest.raises(InvariantError):
        FractionalOverlay(np.array([[0.75, -0.25], [-0.25, 0.75]]), r, c).validate()
    with pytest.raises(InvariantError):
        SignedOverlay(np.array([[0.75, -0.25], [-0.25, 0.75]]), r, c).validate()
    with pytest.raises(PreconditionError):
        FractionalOverlay(np.zeros((2, 3)), r, c)


@given(dims, st.integers(0, 2**32 - 1))
def test_project_marginals(shape, seed):
    rng = np.random.default_rng(seed)
    n, m = shape
    mat = rng.standard_normal(shape)
    r, c = uniform_marginals(n, m)
    p = project_marginals(mat, r, c)
    assert np.allclose(p.sum(axis=1), r, atol=1e-14) and np.allclose(p.sum(axis=0), c, atol=1e-14)
    assert np.allclose(project_marginals(p, r, c), p, atol=1e-15)
    # Euclidean projection onto an affine set: the residual is orthogonal to its direction space
    d = rng.standard_normal(shape)
    d -= d.mean(axis=1, keepdims=True)
    d -= d.mean(axis=0, keepdims=True)
    assert abs(np.sum((mat - p) * d)) < 1e-10


def test_project_marginals_examples():
    u = uniform_overlay(3, 4)
    assert np.allclose(project_marginals(np.zeros((3, 4)), u.row_marginal, u.col_marginal), u.X)
    x = u.X + 0.1 * np.outer([1, -2, 0.5], [0.3, 1, 0, 2])
    p = project_marginals(x, u.row_marginal, u.col_marginal)
    assert np.abs(p.sum(axis=1) - 1 / 3).max() < 1e-14
    with pytest.raises(PreconditionError):
        project_marginals(np.zeros((2, 2)), [0.5, 0.5], [0.5, 0.6])


@given(dims, st.integers(0, 2**32 - 1))
def test_dykstra_transportation_is_the_projection(shape, seed):
    rng = np.random.default_rng(seed)
    n, m = shape
    r = rng.integers(1, 5, n).astype(float)
    r /= r.sum()
    c = rng.integers(1, 5, m).astype(float)
    c /= c.sum()
    mat = rng.standard_normal(shape) / (n * m)
    p = dykstra_transportation(mat, r, c)
    # variational inequality <M - P, Y - P> <= 0 for all feasible Y; the max over Y sits at a vertex
    g = mat - p.X
    y = transportation_lmo(-g, r, c)
    assert np.sum(g * (y - p.X)) <= 1e-8
    again = dykstra_transportation(p.X, r, c)
    assert np.abs(again.X - p.X).max() <= 1e-11


def test_dykstra_transportation_examples():
    u = uniform_overlay(3, 3)
    assert np.abs(dykstra_transportation(u.X).X - u.X).max() <= 1e-12
    x = u.X.copy()
    x[0, 0] = -5
    p = dykstra_transportation(x)
    assert np.allclose(p.X.sum(axis=0), 1 / 3) and p.X.min() >= 0
    assert np.allclose(dykstra_transportation(np.array([[3.0], [-7.0]])).X, [[0.5], [0.5]])


def test_project_spectral_ball_examples():
    m = np.array([[0.1, 0.0], [0.0, 0.05]])
    assert np.array_equal(project_spectral_ball(m, 0.25), m)
    assert np.allclose(project_spectral_ball(np.eye(2) / 2, 0.25), np.eye(2) / 4)
    assert not project_spectral_ball(np.zeros((2, 3)), 1).any()
    with pytest.raises(PreconditionError):
        project_spectral_ball(m, 0)


def signed_support(g, n, m):
    """max <G, Y> over signed overlays, in closed form.

    Every feasible Y splits as J/(nm) + Z with Z centered and ||Z||_2 <= 1/sqrt(nm),
    because the all-ones directions decouple from the centered part.
    """
    gc = g - g.mean(axis=1, keepdims=True) - g.mean(axis=0, keepdims=True) + g.mean()
    return g.sum() / (n * m) + np.linalg.svd(gc, compute_uv=False).sum() / math.sqrt(n * m)


@given(dims, st.integers(0, 2**32 - 1))
def test_dykstra_signed_is_the_projection(shape, seed):
    rng = np.random.default_rng(seed)
    n, m = shape
    mat = rng.standard_normal(shape) / math.sqrt(n * m)
    p = dykstra_signed(mat)
    g = mat - p.X
    assert signed_support(g, n, m) - np.sum(g * p.X) <= 1e-7
    assert np.abs(dykstra_signed(p.X).X - p.X).max() <= 1e-10


def test_dykstra_signed_examples():
    u = uniform_overlay(3, 2)
    assert np.abs(dykstra_signed(u.X).X - u.X).max() <= 1e-12
    assert np.allclose(dykstra_signed(np.array([[4.0], [1.0]])).X, [[0.5], [0.5]])
    perm = permutation_overlay([2, 0, 1])
    assert np.abs(dykstra_signed(perm.X).X - perm.X).max() <= 1e-12


def test_compose_examples():
    z = compose(uniform_overlay(3, 4), uniform_overlay(4, 5))
    assert np.allclose(z.X, 1 / 15)
    x = dykstra_transportation(np.random.default_rng(1).random((3, 4)))
    assert np.allclose(compose(x, np.eye(4) / 4).X, x.X)
    p, q = [1, 2, 0], [2, 1, 0]
    assert np.allclose(compose(permutation_overlay(p), permutation_overlay(q)).X,
                       permutation_overlay([q[i] for i in p]).X)
    with pytest.raises(PreconditionError):
        compose(uniform_overlay(2, 3), uniform_overlay(2, 3))


@given(st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)), st.integers(0, 2**32 - 1))
def test_compose_keeps_feasibility(dims3, seed):
    rng = np.random.default_rng(seed)
    n, p, m = dims3
    f = compose(dykstra_transportation(rng.random((n, p))), dykstra_transportation(rng.random((p, m))))
    assert isinstance(f, FractionalOverlay)
    s = compose(dykstra_signed(rng.standard_normal((n, p))), dykstra_signed(rng.standard_normal((p, m))))
    assert isinstance(s, SignedOverlay)


def test_tree_certificate_examples():
    g = gen_gnp(7, 0.5, 4)
    x = tree_certificate(g, g)
    assert not np.any(objective_matrix(g, g, x.exact))
    x = tree_certificate(K2, cycle_graph(4))
    assert np.allclose(x.X, 1 / 8)
    assert not np.any(objective_matrix(K2, cycle_graph(4), x.exact))
    x = tree_certificate(cycle_graph(6), disjoint_union(cycle_graph(3), cycle_graph(3)))
    assert np.allclose(x.X, 1 / 36)
    with pytest.raises(PreconditionError):
        tree_certificate(K2, complete_graph(3))


def test_tree_certificate_blow_up(rng):
    for seed in range(10):
        g = gen_gnp(6, 0.5, seed)
        x = tree_certificate(g, blow_up(g, 3))
        assert not np.any(objective_matrix(g, blow_up(g, 3), x.exact))


def test_path_certificate_examples():
    x = path_certificate(path_spectrum(K2), path_spectrum(cycle_graph(4)))
    assert np.allclose(x.X, 1 / 8)
    g = gen_gnp(8, 0.4, 5)
    x = path_certificate(path_spectrum(g), path_spectrum(g))
    assert np.linalg.norm(objective_matrix(g, g, x.X), 2) <= 1e-9
    assert path_certificate(path_spectrum(K1), path_spectrum(K1)).X.tolist() == [[1.0]]
    with pytest.raises(PreconditionError):
        path_certificate(path_spectrum(K2), path_spectrum(complete_graph(3)))


def test_lmo_vertex_uniform_default():
    v = lmo_vertex(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(v, [[0.5, 0], [0, 0.5]])


def test_certificate_csv_round_trip():
    for over in (dykstra_transportation(np.random.default_rng(2).random((3, 5))),
                 dykstra_signed(np.random.default_rng(3).standard_normal((4, 2)))):
        buf = io.StringIO()
        write_certificate(over, buf)
        assert buf.getvalue().startswith("# kind=")
        back = read_certificate(io.StringIO(buf.getvalue()))
        assert type(back) is type(over)
        assert np.array_equal(back.X, over.X)
        back.validate()

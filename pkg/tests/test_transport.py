from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homdist.errors import PreconditionError
from homdist.transport import northwest_corner, transportation_lmo


def _solve_exact(a, b):
    """Gaussian elimination over Fractions; returns None if the system is singular."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def polytope_vertices(r, c):
    """All basic feasible solutions: n+m-1 cells whose constraint columns are independent."""
    n, m = len(r), len(c)
    cells = list(itertools.product(range(n), range(m)))
    verts = set()
    # drop the last column constraint, which is implied by the others
    rows_eq = [(0, i) for i in range(n)] + [(1, j) for j in range(m - 1)]
    rhs = list(r) + list(c[:-1])
    for basis in itertools.combinations(cells, n + m - 1):
        a = [[1 if (kind == 0 and cell[0] == idx) or (kind == 1 and cell[1] == idx) else 0
              for cell in basis] for kind, idx in rows_eq]
        sol = _solve_exact(a, rhs)
        if sol is None or any(v < 0 for v in sol):
            continue
        x = [[Fraction(0)] * m for _ in range(n)]
        for (i, j), v in zip(basis, sol):
            x[i][j] = v
        verts.add(tuple(map(tuple, x)))
    return verts


def _marginal(draw, k, den):
    w = draw(st.lists(st.integers(1, den), min_size=k, max_size=k))
    return [Fraction(v, sum(w)) for v in w]


@st.composite
def instances(draw):
    n, m = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    den = draw(st.integers(1, 6))
    r = [Fraction(draw(st.integers(1, 6)), den) for _ in range(n)]
    c_raw = draw(st.lists(st.integers(1, 6), min_size=m, max_size=m))
    c = [sum(r) * Fraction(v, sum(c_raw)) for v in c_raw]
    cost = [[Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4))) for _ in range(m)] for _ in range(n)]
    return np.array(cost, dtype=object), r, c


@given(instances())
def test_lmo_matches_vertex_enumeration(inst):
    cost, r, c = inst
    x = transportation_lmo(cost, r, c)
    verts = polytope_vertices(r, c)
    best = min(sum(cost[i, j] * v[i][j] for i in range(len(r)) for j in range(len(c))) for v in verts)
    assert sum(cost[i, j] * x[i, j] for i in range(len(r)) for j in range(len(c))) == best
    assert tuple(map(tuple, x.tolist())) in verts


@given(instances())
def test_lmo_float_mode_agrees(inst):
    cost, r, c = inst
    xf = transportation_lmo(cost.astype(float), [float(v) for v in r], [float(v) for v in c])
    xe = transportation_lmo(cost, r, c)
    assert float((cost.astype(float) * xf).sum()) == pytest.approx(float((cost * xe).sum()), abs=1e-9)
    assert np.allclose(xf.sum(axis=1), [float(v) for v in r])
    assert xf.min() >= -1e-12


def test_lmo_examples():
    h = Fraction(1, 2)
    x = transportation_lmo(np.array([[0, 1], [1, 0]], dtype=object), [h, h], [h, h])
    assert x.tolist() == [[h, 0], [0, h]]
    x = transportation_lmo(np.array([[7], [-3]], dtype=object), [h, h], [1])
    assert x.tolist() == [[h], [h]]
    zero = np.zeros((2, 3), dtype=object)
    r, c = [h, h], [Fraction(1, 3)] * 3
    nw, _ = northwest_corner(r, c)
    assert transportation_lmo(zero, r, c).tolist() == nw


def test_northwest_corner_basis_size():
    r = [Fraction(1, 4)] * 4
    c = [Fraction(1, 2)] * 2
    x, basis = northwest_corner(r, c)
    assert len(basis) == 4 + 2 - 1
    assert [sum(row) for row in x] == r


def test_lmo_rejects_mass_mismatch():
    with pytest.raises(PreconditionError):
        transportation_lmo(np.zeros((2, 2)), [0.5, 0.5], [0.5, 0.6])


def test_lmo_degenerate_square(rng):
    # many ties and degenerate bases: Bland's rule must terminate
    for n in (4, 6, 9):
        cost = rng.integers(0, 2, size=(n, n)).astype(float)
        x = transportation_lmo(cost, np.full(n, 1 / n), np.full(n, 1 / n))
        assert np.allclose(x.sum(axis=0), 1 / n) and x.min() >= -1e-12

"""Transportation simplex: exact linear minimization over the transportation polytope."""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np

from .errors import InvariantError, PreconditionError


def _is_exact(*arrays) -> bool:
    return all(isinstance(x, (int, Fraction)) for a in arrays for x in np.asarray(a, dtype=object).ravel())


def northwest_corner(r, c, eps=0.0):
    """Initial basic feasible solution; returns ``(X, basis)`` with n+m-1 basic cells."""
    n, m = len(r), len(c)
    supply, demand = list(r), list(c)
    x = [[0 * supply[0]] * m for _ in range(n)]
    basis = []
    i = j = 0
    while True:
        q = min(supply[i], demand[j])
        x[i][j] = q
        basis.append((i, j))
        supply[i] -= q
        demand[j] -= q
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif supply[i] <= eps:
            i += 1
        else:
            j += 1
    return x, basis


def _potentials(cost, basis, n, m):
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n + m)]
    for i, j in basis:
        adj[i].append((n + j, i * m + j))
        adj[n + j].append((i, i * m + j))
    pot = [None] * (n + m)
    pot[0] = 0 * cost[0][0]
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b, _ in adj[a]:
            if pot[b] is None:
                i, j = (a, b - n) if a < n else (b, a - n)
                # u_i + v_j = c_ij on basic cells
                pot[b] = cost[i][j] - pot[a]
                queue.append(b)
    if any(p is None for p in pot):
        raise InvariantError("basis is not a spanning tree")
    return pot[:n], pot[n:], adj


def _tree_path(adj, start, goal):
    prev = {start: None}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if a == goal:
            break
        for b, _ in adj[a]:
            if b not in prev:
                prev[b] = a
                queue.append(b)
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def transportation_lmo(cost, r, c, eps: float | None = None, max_pivots: int | None = None):
    """Minimize <cost, X> over {X >= 0, X 1 = r, X^T 1 = c}.

    Transportation simplex from the northwest corner with Bland's rule for both
    the entering and the leaving cell. Works in exact arithmetic when every
    input is an int or Fraction, otherwise in floats with tolerance ``eps``.
    Returns the optimal vertex as a numpy array (object dtype when exact).
    """
    cost_a = np.asarray(cost)
    n, m = cost_a.shape
    if len(r) != n or len(c) != m:
        raise PreconditionError("marginal lengths do not match the cost matrix")
    exact = _is_exact(cost, r, c)
    if eps is None:
        eps = 0 if exact else 1e-12 * max(1.0, float(np.abs(cost_a.astype(float)).max(initial=0.0)))
    conv = Fraction if exact else float
    cost = [[conv(v) for v in row] for row in cost_a.tolist()]
    r = [conv(v) for v in r]
    c = [conv(v) for v in c]
    if abs(sum(r) - sum(c)) > (0 if exact else 1e-9 * max(1.0, abs(sum(r)))):
        raise PreconditionError("marginals must have equal total mass")
    if any(v < 0 for v in list(r) + list(c)):
        raise PreconditionError("marginals must be non-negative")

    x, basis = northwest_corner(r, c, eps=0 if exact else 1e-15)
    basis_set = set(basis)
    max_pivots = max_pivots or 50 * (n * m) ** 2 + 100
    for _ in range(max_pivots):
        u, v, adj = _potentials(cost, basis_set, n, m)
        entering = None
        for i in range(n):
            for j in range(m):
                if (i, j) not in basis_set and cost[i][j] - u[i] - v[j] < -eps:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        i0, j0 = entering
        path = _tree_path(adj, i0, n + j0)
        cells = []
        for a, b in zip(path, path[1:]):
            i, j = (a, b - n) if a < n else (b, a - n)
            cells.append((i, j))
        minus = cells[0::2]
        plus = cells[1::2]
        theta = min(x[i][j] for i, j in minus)
        leaving = min(cell for cell in minus if x[cell[0]][cell[1]] == theta)
        for i, j in minus:
            x[i][j] -= theta
        for i, j in plus:
            x[i][j] += theta
        x[i0][j0] += theta
        basis_set.discard(leaving)
        basis_set.add(entering)
        if not exact:
            for i, j in minus:
                if x[i][j] < 0:
                    x[i][j] = 0.0
    else:
        raise InvariantError(f"transportation simplex exceeded {max_pivots} pivots")

    # complementary slackness: dual feasibility plus equal primal/dual objectives
    u, v, _ = _potentials(cost, basis_set, n, m)
    primal = sum(cost[i][j] * x[i][j] for i in range(n) for j in range(m))
    dual = sum(ui * ri for ui, ri in zip(u, r)) + sum(vj * cj for vj, cj in zip(v, c))
    slack = min(cost[i][j] - u[i] - v[j] for i in range(n) for j in range(m))
    scale = 1.0 if exact else max(1.0, float(np.abs(cost_a.astype(float)).max(initial=0.0)))
    tol = 0 if exact else 1e-9 * scale
    if slack < -tol - eps or abs(primal - dual) > tol:
        raise InvariantError("transportation simplex terminated without a dual certificate")
    return np.array(x, dtype=object if exact else float)

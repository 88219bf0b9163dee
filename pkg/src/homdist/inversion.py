"""Build a graph on n^2 vertices whose color-refinement quotient approximates a weighted graph."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distances import d_cut_at
from .errors import InvariantError, PreconditionError
from .graphs import Graph, WeightedGraph
from .overlays import FractionalOverlay
from .refinement import Coloring, color_refine, quotient


def round_vertex_weights(alpha, n: int) -> list[int]:
    """Integers s with sum n and |s_i/n - alpha_i| < 1/n.

    Walk left to right; if the discrepancy of the entries fixed so far is
    positive round down, otherwise round up.
    """
    alpha = [Fraction(a) for a in alpha]
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if any(a < 0 for a in alpha) or sum(alpha) != 1:
        raise PreconditionError("alpha must be a probability vector")
    s: list[int] = []
    excess = Fraction(0)
    for a in alpha:
        target = n * a
        s.append(math.floor(target) if excess > 0 else math.ceil(target))
        excess += s[-1] - target
    return s


def round_edge_weights(h: WeightedGraph, s, n: int) -> np.ndarray:
    """Off-diagonal class degrees M_uv with M_uv * n*s_u = M_vu * n*s_v.

    Both sides are k multiples of lcm(s_u, s_v) / s_u (resp. / s_v); k is the
    grid point nearest to beta_uv, ties toward smaller k.
    """
    m = h.n
    deg = np.zeros((m, m), dtype=np.int64)
    for u in range(m):
        for v in range(u + 1, m):
            if s[u] == 0 or s[v] == 0:
                continue
            g = math.gcd(s[u], s[v])
            lcm = s[u] * s[v] // g
            top = n * g
            target = h.beta[u][v] * top
            lo = math.floor(target)
            k = lo if target - lo <= Fraction(1, 2) else lo + 1
            k = min(k, top)
            deg[u, v] = k * lcm // s[u]
            deg[v, u] = k * lcm // s[v]
    return deg


def _valid_loops(size: int) -> list[int]:
    """Degrees d in 0..size-1 with d*size even."""
    return [d for d in range(size) if (d * size) % 2 == 0]


def choose_diagonals(h: WeightedGraph, s, n: int, offdiag: np.ndarray) -> np.ndarray:
    """Fill in the loop degrees so that rows of non-empty classes have distinct sums.

    Each class first takes the valid degree nearest to beta_uu * n*s_u. Classes
    are then fixed in order of increasing size (ties by index), each taking the
    valid degree closest to its first choice whose row sum clashes with no
    class fixed before it.
    """
    if n < 2 * h.n:
        raise PreconditionError(f"n = {n} must be at least 2 * v(H) = {2 * h.n}")
    deg = np.array(offdiag, dtype=np.int64).copy()
    taken: set[int] = set()
    order = sorted((u for u in range(h.n) if s[u] > 0), key=lambda u: (s[u], u))
    for u in order:
        size = n * s[u]
        target = h.beta[u][u] * size
        valid = _valid_loops(size)
        base = min(valid, key=lambda d: (abs(d - target), d))
        rest = int(deg[u].sum() - deg[u, u])
        for d in sorted(valid, key=lambda d: (abs(d - base), d)):
            if rest + d not in taken:
                break
        else:
            raise InvariantError(f"no loop degree keeps row sums distinct for class {u}")
        deg[u, u] = d
        taken.add(rest + d)
        if abs(Fraction(d, size) - h.beta[u][u]) > Fraction(2 * h.n, n):
            raise InvariantError(f"loop degree {d} of class {u} strays too far from its target")
    return deg


def build_regular(size: int, d: int) -> list[tuple[int, int]]:
    """Circulant d-regular graph on Z_size: offsets 1..d//2, plus size/2 when d is odd."""
    if not 0 <= d < size or (d * size) % 2:
        raise PreconditionError(f"no {d}-regular simple graph on {size} vertices")
    edges = set()
    for i in range(size):
        for t in range(1, d // 2 + 1):
            edges.add(tuple(sorted((i, (i + t) % size))))
        if d % 2:
            edges.add(tuple(sorted((i, (i + size // 2) % size))))
    return sorted(edges)


def build_biregular(s1: int, s2: int, d1: int, d2: int) -> list[tuple[int, int]]:
    """Bipartite (d1, d2)-biregular graph; u_i is joined to v_{(i*d1 + t) mod s2}, t < d1.

    Edges are ``(i, j)`` with ``i`` on the first side and ``j`` on the second.
    """
    if d1 * s1 != d2 * s2 or not (0 <= d1 <= s2 and 0 <= d2 <= s1):
        raise PreconditionError(f"no ({d1}, {d2})-biregular graph between {s1} and {s2} vertices")
    return [(i, (i * d1 + t) % s2) for i in range(s1) for t in range(d1)]


@dataclass(frozen=True)
class InversionPlan:
    """Class sizes ``s`` (classes hold n*s_u vertices) and the class degree matrix ``M``."""

    s: tuple[int, ...]
    M: np.ndarray
    n: int

    @property
    def sizes(self) -> list[int]:
        return [self.n * x for x in self.s]

    def check(self) -> None:
        """Raise unless all realizability criteria and the distinct-row-sum condition hold."""
        sizes, m = self.sizes, self.M
        live = [u for u in range(len(sizes)) if sizes[u] > 0]
        for i in live:
            if not (0 <= m[i, i] < sizes[i]) or (m[i, i] * sizes[i]) % 2:
                raise InvariantError(f"loop degree {m[i, i]} invalid for class {i} of size {sizes[i]}")
            for j in live:
                if m[i, j] > sizes[j] or m[i, j] * sizes[i] != m[j, i] * sizes[j]:
                    raise InvariantError(f"degrees M[{i},{j}], M[{j},{i}] are not realizable")
        sums = [int(m[u].sum()) for u in live]
        if len(set(sums)) != len(sums):
            raise InvariantError(f"row sums {sums} are not distinct")

    def weighted(self) -> WeightedGraph:
        """The weighted graph the plan realizes, on the non-empty classes."""
        live = [u for u in range(len(self.s)) if self.s[u] > 0]
        sizes = self.sizes
        alpha = tuple(Fraction(sizes[u]) for u in live)
        beta = tuple(tuple(Fraction(int(self.M[u, v]), sizes[v]) for v in live) for u in live)
        return WeightedGraph(alpha, beta)


def plan_inversion(h: WeightedGraph, n: int) -> InversionPlan:
    if n < 2 * h.n:
        raise PreconditionError(f"n = {n} must be at least 2 * v(H) = {2 * h.n}")
    h = h.normalized()
    s = round_vertex_weights(h.alpha, n)
    deg = choose_diagonals(h, s, n, round_edge_weights(h, s, n))
    plan = InversionPlan(tuple(s), deg, n)
    plan.check()
    return plan


def realize(plan: InversionPlan) -> tuple[Graph, list[list[int]]]:
    """Materialize the plan; classes occupy consecutive vertex ranges in class order."""
    sizes = plan.sizes
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    edges = []
    k = len(sizes)
    for i in range(k):
        if sizes[i] == 0:
            continue
        edges += [(offsets[i] + a, offsets[i] + b) for a, b in build_regular(sizes[i], int(plan.M[i, i]))]
        for j in range(i + 1, k):
            if sizes[j] == 0:
                continue
            block = build_biregular(sizes[i], sizes[j], int(plan.M[i, j]), int(plan.M[j, i]))
            edges += [(offsets[i] + a, offsets[j] + b) for a, b in block]
    g = Graph.from_edges(int(offsets[-1]), edges)
    classes = [list(range(offsets[i], offsets[i + 1])) for i in range(k) if sizes[i] > 0]
    # every block must be degree-exact
    live = [u for u in range(k) if sizes[u] > 0]
    for ci, u in zip(classes, live):
        for cj, v in zip(classes, live):
            counts = g.adjacency[np.ix_(ci, cj)].sum(axis=1)
            if np.any(counts != plan.M[u, v]):
                raise InvariantError(f"block ({u}, {v}) is not {plan.M[u, v]}-regular")
    return g, classes


def invert(h: WeightedGraph, n: int) -> tuple[Graph, InversionPlan]:
    """A graph on n^2 vertices whose color-refinement quotient is the plan's weighted graph."""
    plan = plan_inversion(h, n)
    g, classes = realize(plan)
    refined = sorted(sorted(c) for c in color_refine(g).classes())
    if refined != sorted(classes):
        raise InvariantError("color refinement does not reproduce the planned classes")
    return g, plan


def diagonal_overlay(s, n: int, alpha) -> FractionalOverlay:
    """Coupling of s/n with alpha that keeps min(s_i/n, alpha_i) on the diagonal.

    The diagonal is filled first; the leftover row and column masses (at most
    one of them nonzero per index) are then matched greedily in index order.
    """
    rows = [Fraction(x, n) for x in s]
    cols = [Fraction(a) for a in alpha]
    if sum(rows) != sum(cols):
        raise PreconditionError("row and column masses differ")
    k, m = len(rows), len(cols)
    x = np.full((k, m), Fraction(0), dtype=object)
    rr, cc = list(rows), list(cols)
    for i in range(min(k, m)):
        x[i, i] = min(rr[i], cc[i])
        rr[i] -= x[i, i]
        cc[i] -= x[i, i]
    i = j = 0
    while i < k and j < m:
        if rr[i] == 0:
            i += 1
        elif cc[j] == 0:
            j += 1
        else:
            q = min(rr[i], cc[j])
            x[i, j] += q
            rr[i] -= q
            cc[j] -= q
    return FractionalOverlay(x.astype(float), [float(v) for v in rows], [float(v) for v in cols], x).validate()


def inversion_bound(v: int, n: int) -> Fraction:
    """3 v/n + (v/n)^2 / 4."""
    q = Fraction(v, n)
    return 3 * q + q * q / 4


def verify_inversion(h: WeightedGraph, n: int) -> dict:
    """Invert, then bound the cut distance of the quotient to H through the diagonal overlay."""
    g, plan = invert(h, n)
    hn = h.normalized()
    live = [u for u in range(h.n) if plan.s[u] > 0]
    colors = np.empty(g.n, dtype=int)
    offsets = np.concatenate([[0], np.cumsum([plan.sizes[u] for u in live])])
    for c in range(len(live)):
        colors[offsets[c]:offsets[c + 1]] = c
    q = quotient(g, Coloring(tuple(int(c) for c in colors), 0))
    if q != plan.weighted():
        raise InvariantError("quotient differs from the planned weighted graph")
    over = diagonal_overlay(plan.s, n, hn.alpha)
    exact = over.exact[live, :]
    sub = FractionalOverlay(exact.astype(float), [float(a) for a in q.vertex_fractions()],
                            over.col_marginal, exact).validate()
    value, inner_exact = d_cut_at(q, hn, sub)
    bound = inversion_bound(h.n, n)
    out = {
        "n": n, "vertices": g.n, "v_H": h.n, "s": list(plan.s),
        "achieved": value, "bound": bound, "inner_exact": inner_exact,
        "passed": value <= bound,
    }
    if not out["passed"]:
        raise InvariantError(f"inversion bound violated: {out}; M = {plan.M.tolist()}")
    return out

"""Color refinement, equitable quotients and the main-spectrum path signature."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantError, PreconditionError
from .graphs import Graph, WeightedGraph, disjoint_union
from .linalg import jacobi_eigh

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class Coloring:
    """Stable coloring; ``colors[u]`` is a dense canonical id in ``0..num_colors-1``."""

    colors: tuple[int, ...]
    rounds: int

    @property
    def num_colors(self) -> int:
        return max(self.colors) + 1

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_colors)]
        for u, c in enumerate(self.colors):
            out[c].append(u)
        return out


def _refine(adjacency: np.ndarray) -> Coloring:
    n = adjacency.shape[0]
    colors = np.zeros(n, dtype=np.int64)
    num = 1
    rounds = 0
    while True:
        onehot = np.zeros((n, num), dtype=np.int64)
        onehot[np.arange(n), colors] = 1
        # signature = (current color, neighbor count per color); sorting the
        # unique signatures makes ids canonical and refinement monotone
        sig = np.hstack([colors[:, None], adjacency @ onehot])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.reshape(-1)
        new_num = int(new.max()) + 1
        if new_num == num:
            return Coloring(tuple(int(c) for c in colors), rounds)
        colors, num = new.astype(np.int64), new_num
        rounds += 1


def color_refine(g: Graph) -> Coloring:
    """Coarsest equitable partition of ``g`` computed by color refinement."""
    return _refine(g.adjacency)


def is_equitable(g: Graph, colors) -> bool:
    colors = np.asarray(colors)
    num = int(colors.max()) + 1
    onehot = np.zeros((g.n, num), dtype=np.int64)
    onehot[np.arange(g.n), colors] = 1
    counts = g.adjacency @ onehot
    return all(np.all(counts[colors == c] == counts[colors == c][0]) for c in range(num))


def class_degree_matrix(g: Graph, coloring: Coloring) -> np.ndarray:
    """M[C, D] = number of neighbors a vertex of class C has in class D."""
    colors = np.asarray(coloring.colors)
    num = coloring.num_colors
    onehot = np.zeros((g.n, num), dtype=np.int64)
    onehot[np.arange(g.n), colors] = 1
    counts = g.adjacency @ onehot
    m = np.zeros((num, num), dtype=np.int64)
    for c in range(num):
        rows = counts[colors == c]
        if np.any(rows != rows[0]):
            raise InvariantError(f"partition is not equitable at class {c}")
        m[c] = rows[0]
    return m


def quotient(g: Graph, coloring: Coloring | None = None) -> WeightedGraph:
    """Weighted quotient G/C: alpha_C = |C|, beta_CD = M_CD / |D|."""
    coloring = coloring or color_refine(g)
    m = class_degree_matrix(g, coloring)
    sizes = [len(c) for c in coloring.classes()]
    k = len(sizes)
    for c in range(k):
        for d in range(k):
            if sizes[c] * m[c, d] != sizes[d] * m[d, c]:
                raise InvariantError(f"edge count mismatch between classes {c} and {d}")
    beta = tuple(tuple(Fraction(int(m[c, d]), sizes[d]) for d in range(k)) for c in range(k))
    return WeightedGraph(tuple(sizes), beta)


def quotient_match(qg: WeightedGraph, qh: WeightedGraph, ng=None, nh=None) -> dict[int, int] | None:
    """Find a class bijection preserving size fractions and edge weights exactly.

    ``ng`` and ``nh`` default to the total vertex weights. Returns ``None`` if
    no such bijection exists.
    """
    ng = Fraction(ng) if ng is not None else qg.total_weight
    nh = Fraction(nh) if nh is not None else qh.total_weight
    if qg.n != qh.n:
        return None
    fg = [a / ng for a in qg.alpha]
    fh = [a / nh for a in qh.alpha]

    def signature(frac, beta, c):
        return frac[c], tuple(sorted(zip(beta[c], frac)))

    sg = [signature(fg, qg.beta, c) for c in range(qg.n)]
    sh = [signature(fh, qh.beta, d) for d in range(qh.n)]
    if sorted(sg) != sorted(sh):
        return None
    candidates = [[d for d in range(qh.n) if sh[d] == sg[c]] for c in range(qg.n)]
    order = sorted(range(qg.n), key=lambda c: len(candidates[c]))
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        c = order[i]
        for d in candidates[c]:
            if d in used:
                continue
            if any(qg.beta[c][c2] != qh.beta[d][d2] for c2, d2 in assignment.items()):
                continue
            if qg.beta[c][c] != qh.beta[d][d]:
                continue
            assignment[c] = d
            used.add(d)
            if extend(i + 1):
                return True
            del assignment[c]
            used.discard(d)
        return False

    return dict(sorted(assignment.items())) if extend(0) else None


def cr_equivalent(g: Graph, h: Graph) -> bool:
    """Whether color refinement fails to distinguish ``g`` and ``h``.

    Equal orders: refine the disjoint union and compare color histograms.
    Different orders: compare the normalized quotients.
    """
    if g.n != h.n:
        return quotient_match(quotient(g), quotient(h), g.n, h.n) is not None
    colors = color_refine(disjoint_union(g, h)).colors
    return sorted(colors[:g.n]) == sorted(colors[g.n:])


# --- path spectrum ----------------------------------------------------------------

@dataclass(frozen=True)
class PathSpectrum:
    """Main-spectrum signature of a graph.

    ``entries`` holds ``(lambda_hat, w_hat)`` pairs sorted by ``lambda_hat``;
    ``projections[k]`` is the projection of the all-ones vector onto the
    eigenspace behind ``entries[k]``.
    """

    n: int
    entries: tuple[tuple[float, float], ...]
    projections: tuple[np.ndarray, ...] = field(repr=False, compare=False, default=())

    def path_density(self, length: int) -> float:
        return float(sum(w * lam ** length for lam, w in self.entries))


def path_spectrum(g: Graph, tol: float = DEFAULT_TOL) -> PathSpectrum:
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    n = g.n
    w, v = jacobi_eigh(g.adjacency.astype(float))
    ones = np.ones(n)
    groups: list[list[int]] = []
    for i in range(n):
        if groups and w[i] - w[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    entries, projections = [], []
    for grp in groups:
        basis = v[:, grp]
        p = basis @ (basis.T @ ones)
        norm2 = float(p @ p)
        if norm2 > tol * n:
            entries.append((float(np.mean(w[grp])) / n, norm2 / n))
            projections.append(p)
    return PathSpectrum(n, tuple(entries), tuple(projections))


def match_spectra(sg: PathSpectrum, sh: PathSpectrum, tol: float = DEFAULT_TOL) -> list[tuple[int, int]] | None:
    """Greedy pairing of spectrum entries within ``tol``; ``None`` if impossible."""
    if len(sg.entries) != len(sh.entries):
        return None
    used: set[int] = set()
    pairs = []
    for i, (lam, wt) in enumerate(sg.entries):
        for j, (mu, wt2) in enumerate(sh.entries):
            if j not in used and abs(lam - mu) <= tol and abs(wt - wt2) <= tol:
                used.add(j)
                pairs.append((i, j))
                break
        else:
            return None
    return pairs


def path_equivalent(sg: PathSpectrum, sh: PathSpectrum, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    return match_spectra(sg, sh, tol) is not None

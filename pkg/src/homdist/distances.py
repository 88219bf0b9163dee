"""Tree, path, cut and color distances with certificates and declared bound types.

Every solver returns a :class:`DistanceReport` whose ``value`` is the objective
of the returned certificate, so it is an upper bound on the infimum
(``bound="upper"``). ``bound="exact"`` is reserved for singleton feasible sets
and for exact zero certificates. If the inner cut-norm maximization had to
fall back to local search, the reported value may underestimate the
certificate's objective and the bound is ``"heuristic"``.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .cutnorm import EXACT_CAP, cut_norm
from .errors import PreconditionError
from .graphs import Graph, WeightedGraph, as_weighted
from .linalg import spectral_norm, top_singular_pair
from .overlays import (FractionalOverlay, SignedOverlay, dykstra_signed, dykstra_transportation,
                       lmo_vertex, path_certificate, tree_certificate, uniform_marginals,
                       uniform_overlay)
from .refinement import DEFAULT_TOL, path_equivalent, path_spectrum, quotient, quotient_match

log = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    """Knobs shared by the solvers.

    ``restarts`` counts starting points (the uniform overlay first, then
    seeded random interior points). ``polish_iters`` bounds the projected
    subgradient phase.
    """

    tol: float = 1e-6
    max_iters: int = 5000
    restarts: int = 3
    seed: int = 0
    polish_iters: int = 200
    stall_window: int = 25
    spectrum_tol: float = DEFAULT_TOL


@dataclass
class DistanceReport:
    value: float
    bound: str
    certificate: object = field(repr=False)
    iterations: int
    residuals: dict
    objective_kind: str
    seed: int = 0
    exact_value: Fraction | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "objective_kind": self.objective_kind,
            "value": self.value,
            "exact_value": None if self.exact_value is None else str(self.exact_value),
            "bound": self.bound,
            "iterations": self.iterations,
            "residuals": self.residuals,
            "seed": self.seed,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)


def _adj(g) -> np.ndarray:
    return g.adjacency if isinstance(g, Graph) else np.asarray(g)


def _matrix(x) -> np.ndarray:
    return x.X if isinstance(x, (FractionalOverlay, SignedOverlay)) else np.asarray(x)


# --- objectives ----------------------------------------------------------------------

def objective_matrix(g, h, x) -> np.ndarray:
    """M = m*A*X - n*X*B with n = v(G), m = v(H).

    Object arrays (Fraction entries) are evaluated exactly.
    """
    a, b = _adj(g), _adj(h)
    x = _matrix(x)
    n, m = a.shape[0], b.shape[0]
    if x.shape != (n, m):
        raise PreconditionError(f"overlay shape {x.shape} does not match ({n}, {m})")
    if x.dtype == object:
        return m * (a.astype(object) @ x) - n * (x @ b.astype(object))
    return m * (a @ x) - n * (x @ b)


def cut_objective(g, h, x, mode: str = "auto") -> tuple[float, bool]:
    """||M||_cut / (nm); returns ``(value, exact_flag)``."""
    mat = objective_matrix(g, h, x)
    n, m = mat.shape
    res = cut_norm(mat, mode=mode)
    return float(res.value) / (n * m), res.exact


def spectral_objective(g, h, x, cross_check: bool = True) -> float:
    """||M||_2 / sqrt(nm)."""
    mat = objective_matrix(g, h, x).astype(float)
    n, m = mat.shape
    return spectral_norm(mat, cross_check=cross_check) / math.sqrt(n * m)


def _spec_value(a, b, x) -> float:
    n, m = x.shape
    return float(np.linalg.norm(m * (a @ x) - n * (x @ b), 2)) / math.sqrt(n * m)


def _spec_step(a, b, x):
    """Objective value and a subgradient: the adjoint applied to the top singular pair."""
    n, m = x.shape
    u, s, v = top_singular_pair(m * (a @ x) - n * (x @ b))
    uv = np.outer(u, v)
    grad = (m * (a.T @ uv) - n * (uv @ b.T)) / math.sqrt(n * m)
    return s / math.sqrt(n * m), grad


def _cut_step(a, b, x):
    """Objective value and the subgradient of the maximizing rectangle."""
    n, m = x.shape
    res = cut_norm(m * (a @ x) - n * (x @ b))
    st = np.zeros((n, m))
    st[np.ix_(list(res.rows), list(res.cols))] = 1
    grad = res.sign * (m * (a.T @ st) - n * (st @ b.T)) / (n * m)
    return float(res.value) / (n * m), grad


def _projected_subgradient(step, project, x0, iters: int, eta0: float = 1.0):
    """Projected subgradient with steps eta0/sqrt(t) in units of the overlay's own scale.

    ``step(x)`` returns ``(value, subgradient)``. Returns the best iterate and its value.
    """
    x = x0.copy()
    best_x, best_f = x, math.inf
    scale = 1 / math.sqrt(x.shape[0] * x.shape[1])
    for t in range(1, iters + 2):
        f, g = step(x)
        if f < best_f:
            best_x, best_f = x, f
        gn = np.linalg.norm(g)
        if t > iters or gn == 0 or f == 0:
            break
        x = project(x - (eta0 / math.sqrt(t)) * scale * g / gn)
    return best_x, best_f


def _starts(n: int, m: int, restarts: int, seed: int) -> list[np.ndarray]:
    """Uniform overlay first, then midpoints between it and seeded random vertices."""
    base = np.full((n, m), 1 / (n * m))
    rng = np.random.default_rng(seed)
    out = [base]
    for _ in range(max(0, restarts - 1)):
        out.append((base + lmo_vertex(rng.standard_normal((n, m)))) / 2)
    return out


def _zero_certificate(g: Graph, h: Graph):
    match = quotient_match(quotient(g), quotient(h), g.n, h.n)
    return None if match is None else tree_certificate(g, h, match)


# --- tree distance ----------------------------------------------------------------------

def _frank_wolfe(a, b, x0, opts: SolverOptions):
    """Frank-Wolfe with a bounded line search; returns ``(x, value, iterations, gap)``."""
    x = x0
    f, grad = _spec_step(a, b, x)
    history = [f]
    gap = math.inf
    it = 0
    for it in range(1, opts.max_iters + 1):
        d = lmo_vertex(grad) - x
        gap = float(-np.sum(grad * d))
        if gap <= opts.tol:
            break
        res = minimize_scalar(lambda t: _spec_value(a, b, x + t * d), bounds=(0.0, 1.0),
                              method="bounded", options={"xatol": 1e-8})
        if res.fun >= f:
            # the linearization promises descent but the nonsmooth objective does not move
            break
        x = x + float(res.x) * d
        f, grad = _spec_step(a, b, x)
        history.append(f)
        w = opts.stall_window
        if len(history) > w and history[-w - 1] - f <= opts.tol * max(1.0, f):
            break
    return x, f, it, gap


def _singleton(g: Graph, h: Graph) -> bool:
    return g.n == 1 or h.n == 1


def tree_dist_spectral(g: Graph, h: Graph, opts: SolverOptions | None = None) -> DistanceReport:
    """Upper bound on the spectral tree distance, certified by a fractional overlay.

    A tree certificate from matched quotients gives an exact zero. Otherwise
    Frank-Wolfe runs from every start and the best iterate is polished by
    projected subgradient.
    """
    opts = opts or SolverOptions()
    n, m = g.n, h.n
    cert = _zero_certificate(g, h)
    if cert is not None:
        return DistanceReport(spectral_objective(g, h, cert), "exact", cert, 0, cert.residuals(),
                              "tree_spectral", opts.seed, Fraction(0), {"init": "tree_certificate"})
    if _singleton(g, h):
        cert = uniform_overlay(n, m)
        return DistanceReport(spectral_objective(g, h, cert), "exact", cert, 0, cert.residuals(),
                              "tree_spectral", opts.seed, None, {"init": "singleton_polytope"})
    a, b = g.adjacency.astype(float), h.adjacency.astype(float)
    r, c = uniform_marginals(n, m)
    best_f, best_x, gap, iters = math.inf, None, math.nan, 0
    for x0 in _starts(n, m, opts.restarts, opts.seed):
        x, f, its, gp = _frank_wolfe(a, b, x0, opts)
        iters += its
        if f < best_f:
            best_f, best_x, gap = f, x, gp
    x, _ = _projected_subgradient(lambda z: _spec_step(a, b, z),
                                  lambda z: dykstra_transportation(z, r, c).X, best_x, opts.polish_iters)
    cert = FractionalOverlay(x, r, c).validate()
    return DistanceReport(spectral_objective(g, h, cert), "upper", cert, iters + opts.polish_iters,
                          cert.residuals(), "tree_spectral", opts.seed, None,
                          {"frank_wolfe_gap": gap, "init": "uniform"})


def tree_dist_cutnorm(g: Graph, h: Graph, opts: SolverOptions | None = None) -> DistanceReport:
    """Upper bound on the cut-norm tree distance by projected subgradient over fractional overlays."""
    opts = opts or SolverOptions()
    n, m = g.n, h.n
    cert = _zero_certificate(g, h)
    if cert is not None:
        return DistanceReport(cut_objective(g, h, cert)[0], "exact", cert, 0, cert.residuals(),
                              "tree_cut", opts.seed, Fraction(0), {"init": "tree_certificate"})
    a, b = g.adjacency.astype(float), h.adjacency.astype(float)
    r, c = uniform_marginals(n, m)
    iters = 0
    if _singleton(g, h):
        x = uniform_overlay(n, m).X
    else:
        best_f, x = math.inf, None
        for x0 in _starts(n, m, opts.restarts, opts.seed):
            xi, f = _projected_subgradient(lambda z: _cut_step(a, b, z),
                                           lambda z: dykstra_transportation(z, r, c).X, x0,
                                           opts.polish_iters)
            iters += opts.polish_iters
            if f < best_f:
                best_f, x = f, xi
    cert = FractionalOverlay(x, r, c).validate()
    value, inner_exact = cut_objective(g, h, cert)
    bound = "heuristic" if not inner_exact else ("exact" if _singleton(g, h) else "upper")
    return DistanceReport(value, bound, cert, iters, cert.residuals(), "tree_cut", opts.seed, None,
                          {"inner_exact": inner_exact, "init": "uniform"})


# --- path distance ----------------------------------------------------------------------------

def path_dist_spectral(g: Graph, h: Graph, opts: SolverOptions | None = None,
                       tree: DistanceReport | None = None) -> DistanceReport:
    """Upper bound on the spectral path distance, certified by a signed overlay.

    Matching main spectra yield an explicit certificate. Otherwise the
    certificate of :func:`tree_dist_spectral` (every fractional overlay is a
    signed overlay) seeds a projected subgradient over the signed overlays.
    Pass ``tree`` to reuse a finished tree report instead of solving again.
    """
    opts = opts or SolverOptions()
    n, m = g.n, h.n
    r, c = uniform_marginals(n, m)
    if _singleton(g, h):
        cert = SignedOverlay(uniform_overlay(n, m).X, r, c).validate()
        return DistanceReport(spectral_objective(g, h, cert), "exact", cert, 0, cert.residuals(),
                              "path_spectral", opts.seed, None, {"init": "singleton_polytope"})
    sg, sh = path_spectrum(g, opts.spectrum_tol), path_spectrum(h, opts.spectrum_tol)
    if path_equivalent(sg, sh, opts.spectrum_tol):
        cert = path_certificate(sg, sh, opts.spectrum_tol)
        return DistanceReport(spectral_objective(g, h, cert), "upper", cert, 0, cert.residuals(),
                              "path_spectral", opts.seed, None, {"init": "path_certificate"})
    a, b = g.adjacency.astype(float), h.adjacency.astype(float)
    if tree is None:
        tree = tree_dist_spectral(g, h, opts)
    x, _ = _projected_subgradient(lambda z: _spec_step(a, b, z),
                                  lambda z: dykstra_signed(z, n, m).X, tree.certificate.X,
                                  opts.polish_iters)
    cert = SignedOverlay(x, r, c).validate()
    value = spectral_objective(g, h, cert)
    if value > tree.value:
        # keep the warm start; subgradient noise must not undo it
        cert, value = SignedOverlay(tree.certificate.X, r, c).validate(), tree.value
    return DistanceReport(value, "upper", cert, tree.iterations + opts.polish_iters, cert.residuals(),
                          "path_spectral", opts.seed, None,
                          {"init": "tree_dist_spectral", "tree_value": tree.value})


# --- cut distance of weighted graphs ------------------------------------------------------------

def _to_weighted(g) -> WeightedGraph:
    return as_weighted(g) if isinstance(g, Graph) else g


def _overlay_array(x) -> np.ndarray:
    if isinstance(x, FractionalOverlay):
        return x.exact if x.exact is not None else x.X
    return np.asarray(x)


def d_cut_at(g, h, x, mode: str = "auto", seed: int = 0):
    """Cut-distance objective at one overlay; returns ``(value, exact_flag)``.

    Pairs outside the support of ``x`` have zero rows and columns, so the
    rectangle search runs over the support only. Fraction entries give a
    Fraction value.
    """
    g, h = _to_weighted(g), _to_weighted(h)
    arr = _overlay_array(x)
    if arr.shape != (g.n, h.n):
        raise PreconditionError(f"overlay shape {arr.shape} does not match ({g.n}, {h.n})")
    ii, uu = np.nonzero(arr != 0)
    if arr.dtype == object:
        w = [Fraction(v) for v in arr[ii, uu]]
        d = np.array([[w[p] * w[q] * (g.beta[ii[p]][ii[q]] - h.beta[uu[p]][uu[q]])
                       for q in range(len(w))] for p in range(len(w))], dtype=object)
    else:
        w = arr[ii, uu].astype(float)
        diff = g.beta_array()[np.ix_(ii, ii)] - h.beta_array()[np.ix_(uu, uu)]
        d = np.outer(w, w) * diff
    if mode == "auto":
        mode = "exact" if len(w) <= EXACT_CAP else "heuristic"
    res = cut_norm(d.reshape(len(w), len(w)), mode=mode, seed=seed)
    return res.value, res.exact


def twin_reduce(h: WeightedGraph) -> tuple[WeightedGraph, list[list[int]]]:
    """Merge vertices with identical edge-weight rows; returns the reduced graph and the groups."""
    groups: dict[tuple, list[int]] = {}
    for u in range(h.n):
        groups.setdefault(h.beta[u], []).append(u)
    parts = sorted(groups.values())
    alpha = tuple(sum((h.alpha[u] for u in p), Fraction(0)) for p in parts)
    beta = tuple(tuple(h.beta[p[0]][q[0]] for q in parts) for p in parts)
    return WeightedGraph(alpha, beta), parts


def _matched_overlay(g: WeightedGraph, h: WeightedGraph):
    """Exact zero-objective overlay when the twin reductions match after normalization."""
    rg, pg = twin_reduce(g)
    rh, ph = twin_reduce(h)
    match = quotient_match(rg, rh)
    if match is None:
        return None
    fg, fh = g.vertex_fractions(), h.vertex_fractions()
    x = np.full((g.n, h.n), Fraction(0), dtype=object)
    for k, l in match.items():
        mass = sum((fg[u] for u in pg[k]), Fraction(0))
        for u in pg[k]:
            for v in ph[l]:
                x[u, v] = fg[u] * fh[v] / mass
    return x


def _product_overlay(g: WeightedGraph, h: WeightedGraph) -> np.ndarray:
    return np.array([[a * b for b in h.vertex_fractions()] for a in g.vertex_fractions()], dtype=object)


def _pair_differences(g: WeightedGraph, h: WeightedGraph) -> np.ndarray:
    """Delta[(i,u),(j,v)] = beta_ij(G) - beta_uv(H), flattened row-major over (i,u)."""
    nm = g.n * h.n
    bg, bh = g.beta_array(), h.beta_array()
    return (bg[:, None, :, None] - bh[None, :, None, :]).reshape(nm, nm)


def _rectangle_step(delta: np.ndarray, x: np.ndarray, seed: int):
    """Heuristic d_cut value at ``x`` and the gradient of the active rectangle's bilinear form."""
    w = x.reshape(-1)
    res = cut_norm(np.outer(w, w) * delta, mode="heuristic", seed=seed, restarts=5)
    q = np.zeros(w.size)
    q[list(res.rows)] = 1
    s = np.zeros(w.size)
    s[list(res.cols)] = 1
    grad = res.sign * (q * (delta @ (s * w)) + s * (delta.T @ (q * w)))
    return float(res.value), grad.reshape(x.shape)


def _permutation_search(g: WeightedGraph, h: WeightedGraph):
    """Exact minimum of (1/n^2)||B_G - P B_H P^T||_cut over all permutations P."""
    n = g.n
    den = math.lcm(*(q.denominator for row in g.beta + h.beta for q in row))
    ig = np.array([[int(q * den) for q in row] for row in g.beta], dtype=np.int64)
    ih = np.array([[int(q * den) for q in row] for row in h.beta], dtype=np.int64)
    ind = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    best_val, best_perm = None, None
    for perm in itertools.permutations(range(n)):
        p = list(perm)
        cs = ind @ (ig - ih[np.ix_(p, p)])
        val = int(max(np.clip(cs, 0, None).sum(axis=1).max(), -np.clip(cs, None, 0).sum(axis=1).min()))
        if best_val is None or val < best_val:
            best_val, best_perm = val, perm
            if val == 0:
                break
    x = np.full((n, n), Fraction(0), dtype=object)
    for i, u in enumerate(best_perm):
        x[i, u] = Fraction(1, n)
    return x


def cut_distance_upper(g, h, opts: SolverOptions | None = None, seeds: int = 10,
                       local_iters: int = 60) -> DistanceReport:
    """Upper bound on the cut distance of two weighted graphs.

    Candidates are the forced overlay when one side has a single vertex, an
    exact zero overlay between matching twin reductions, the best permutation
    overlay for equal-size uniform graphs on at most 8 vertices, the product
    overlay, and multistart projected-gradient local search against the
    active rectangle. Candidates are ranked by a heuristic inner value; the
    winner is re-evaluated exactly when its support allows.
    """
    opts = opts or SolverOptions()
    g, h = _to_weighted(g), _to_weighted(h)
    rg = np.array([float(a) for a in g.vertex_fractions()])
    ch = np.array([float(a) for a in h.vertex_fractions()])

    def report(x, label, iters=0, singleton=False):
        x = np.asarray(x)
        exact_x = x if x.dtype == object else None
        over = FractionalOverlay(x.astype(float), rg, ch, exact_x).validate()
        val, inner = d_cut_at(g, h, over, seed=opts.seed)
        exact_val = val if isinstance(val, Fraction) else None
        if not inner:
            bound = "heuristic"
        elif singleton or exact_val == 0:
            bound = "exact"
        else:
            bound = "upper"
        return DistanceReport(float(val), bound, over, iters, over.residuals(), "cut_distance",
                              opts.seed, exact_val, {"init": label, "inner_exact": inner})

    if g.n == 1 or h.n == 1:
        return report(_product_overlay(g, h), "singleton_polytope", singleton=True)
    matched = _matched_overlay(g, h)
    if matched is not None:
        return report(matched, "twin_matching")

    candidates: list[tuple[float, int, np.ndarray, str]] = []
    delta = _pair_differences(g, h)

    def consider(x, label):
        xf = np.asarray(x, dtype=float)
        candidates.append((_rectangle_step(delta, xf, opts.seed)[0], len(candidates), x, label))

    if g.n == h.n <= 8 and len(set(g.alpha)) == 1 and len(set(h.alpha)) == 1:
        consider(_permutation_search(g, h), "permutation_search")
    consider(_product_overlay(g, h), "product")

    rng = np.random.default_rng(opts.seed)
    base = np.outer(rg, ch)
    starts = [base]
    for _ in range(max(0, seeds - 1)):
        lam = rng.random()
        starts.append(lam * base + (1 - lam) * lmo_vertex(rng.standard_normal((g.n, h.n)), rg, ch))
    for x0 in starts:
        x, _ = _projected_subgradient(lambda z: _rectangle_step(delta, z, opts.seed),
                                      lambda z: dykstra_transportation(z, rg, ch).X, x0, local_iters)
        consider(x, "local_search")
    _, _, x, label = min(candidates, key=lambda c: c[:2])
    return report(x, label, iters=local_iters * len(starts))


def color_distance(g: Graph, h: Graph, opts: SolverOptions | None = None) -> DistanceReport:
    """Cut distance between the color-refinement quotients of two graphs."""
    rep = cut_distance_upper(quotient(g), quotient(h), opts)
    rep.objective_kind = "color_distance"
    return rep


def evaluate_certificate(kind: str, g, h, certificate) -> float:
    """Re-evaluate a certificate with the objective that matches ``kind``."""
    if kind in ("tree_spectral", "path_spectral"):
        return spectral_objective(g, h, certificate)
    if kind == "tree_cut":
        return cut_objective(g, h, certificate)[0]
    if kind == "cut_distance":
        return float(d_cut_at(g, h, certificate)[0])
    if kind == "color_distance":
        return float(d_cut_at(quotient(g), quotient(h), certificate)[0])
    raise PreconditionError(f"unknown objective kind {kind!r}")

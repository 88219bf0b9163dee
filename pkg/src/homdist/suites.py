"""Experiment suites: each checks one family of inequalities and writes ``<suite>-<seed>.csv``.

Instances draw from child streams of ``numpy.random.SeedSequence(seed)``, so a
row depends only on the root seed and its index. Floats are written with
``repr`` and no timings are recorded, which keeps the CSV byte-identical
across runs.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cutnorm import cut_norm
from .distances import (SolverOptions, color_distance, cut_objective, objective_matrix,
                        path_dist_spectral, spectral_objective, tree_dist_cutnorm,
                        tree_dist_spectral)
from .errors import PreconditionError
from .generators import three_part_graph, gen_gnp
from .graphs import Graph, WeightedGraph, as_weighted, blow_up, complete_graph, cycle_graph
from .homomorphism import (brute_force_hom, enumerate_trees, hom_path, hom_tree, path_density,
                           tree_canonical_form)
from .inversion import verify_inversion
from .overlays import (FractionalOverlay, SignedOverlay, compose, dykstra_signed,
                       dykstra_transportation, lmo_vertex, uniform_marginals)
from .refinement import path_equivalent, path_spectrum, quotient

SUITES = ("oracle-hom", "quotient-hom", "blowup-zero", "path-counting", "norm-sandwich",
          "hierarchy", "fig1-separation", "inversion", "composition")


@dataclass
class SuiteResult:
    name: str
    seed: int
    header: list[str]
    rows: list[list] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    path: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def add(self, ok: bool, row: list, what: str = "") -> None:
        self.rows.append(row + [ok])
        if not ok:
            self.failures.append(
                f"{what or row} (reproduce: homdist verify --suite {self.name} --seed {self.seed})")


def _rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _graph(rng: np.random.Generator, lo: int, hi: int) -> Graph:
    n = int(rng.integers(lo, hi + 1))
    p = float(rng.choice([0.2, 0.35, 0.5, 0.65, 0.8]))
    return gen_gnp(n, p, int(rng.integers(2**63)))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# --- suites ------------------------------------------------------------------------------

def suite_oracle_hom(seed: int) -> SuiteResult:
    res = SuiteResult("oracle-hom", seed, ["seed", "graph", "n", "tree", "hom_tree", "brute_force", "pass"])
    trees = enumerate_trees(5)
    for gi, rng in enumerate(_rngs(seed, 200)):
        g = as_weighted(_graph(rng, 1, 5))
        for t in trees:
            a, b = hom_tree(t, g), brute_force_hom(t, g)
            res.add(a == b, [seed, gi, g.n, tree_canonical_form(t), a, b], f"graph {gi} tree {tree_canonical_form(t)}")
    return res


def suite_quotient_hom(seed: int) -> SuiteResult:
    res = SuiteResult("quotient-hom", seed, ["seed", "instance", "n", "classes", "tree", "hom_graph", "hom_quotient", "pass"])
    trees = enumerate_trees(6)
    for i, rng in enumerate(_rngs(seed, 100)):
        g = _graph(rng, 1, 10)
        t = trees[int(rng.integers(len(trees)))]
        q = quotient(g)
        a, b = hom_tree(t, as_weighted(g)), hom_tree(t, q)
        res.add(a == b, [seed, i, g.n, q.n, tree_canonical_form(t), a, b], f"instance {i}")
    return res


def all_graphs(n: int) -> list[Graph]:
    """One representative per isomorphism class of graphs on ``n`` vertices.

    Each labelled graph is an edge bitmask; its canonical form is the smallest
    mask over all vertex relabellings, computed for all masks at once.
    """
    iu, ju = np.triu_indices(n, k=1)
    pos = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(iu, ju))}
    masks = np.arange(1 << len(iu), dtype=np.int64)
    bits = (masks[:, None] >> np.arange(len(iu))) & 1
    canon = masks.copy()
    for perm in itertools.permutations(range(n)):
        target = [pos[tuple(sorted((perm[a], perm[b])))] for a, b in zip(iu, ju)]
        canon = np.minimum(canon, bits @ (np.int64(1) << np.array(target, dtype=np.int64)))
    out = []
    for mask in np.unique(canon).tolist():
        out.append(Graph.from_edges(n, [(int(iu[k]), int(ju[k])) for k in range(len(iu)) if mask >> k & 1]))
    return out


def path_equivalent_pairs(seed: int, count: int = 5, max_n: int = 6):
    """Seeded sample of non-isomorphic path-equivalent pairs among all graphs with edges on <= max_n vertices.

    Graphs are grouped by their exact walk densities; each candidate pair is
    then confirmed by comparing path spectra.
    """
    groups: dict[tuple, list[Graph]] = {}
    for n in range(2, max_n + 1):
        for g in all_graphs(n):
            if g.num_edges:
                key = tuple(path_density(l, g) for l in range(2 * max_n + 1))
                groups.setdefault(key, []).append(g)
    pairs = []
    for key in sorted(groups, key=lambda k: [str(x) for x in k]):
        for a, b in itertools.combinations(groups[key], 2):
            if path_equivalent(path_spectrum(a), path_spectrum(b)):
                pairs.append((a, b))
    rng = np.random.default_rng(seed)
    pick = sorted(rng.choice(len(pairs), size=min(count, len(pairs)), replace=False).tolist())
    return [pairs[i] for i in pick]


def suite_blowup_zero(seed: int) -> SuiteResult:
    res = SuiteResult("blowup-zero", seed, ["seed", "kind", "instance", "n_g", "n_h", "value", "bound", "init", "pass"])
    for i, rng in enumerate(_rngs(seed, 20)):
        g = _graph(rng, 1, 8)
        for k in (2, 3):
            rep = tree_dist_spectral(g, blow_up(g, k))
            ok = rep.value <= 1e-6 and rep.meta.get("init") == "tree_certificate"
            res.add(ok, [seed, f"tree_blowup_{k}", i, g.n, g.n * k, rep.value, rep.bound, rep.meta["init"]])
    pairs = [(complete_graph(2), cycle_graph(4))] + path_equivalent_pairs(seed)
    if len(pairs) < 6:
        res.failures.append(f"only {len(pairs) - 1} path-equivalent pairs found")
    for i, (a, b) in enumerate(pairs):
        rep = path_dist_spectral(a, b)
        ok = rep.value <= 1e-6 and rep.meta.get("init") == "path_certificate"
        res.add(ok, [seed, "path_equivalent", i, a.n, b.n, rep.value, rep.bound, rep.meta["init"]])
    return res


FAST = SolverOptions(max_iters=100, restarts=2, polish_iters=60)


def suite_path_counting(seed: int, opts: SolverOptions = FAST) -> SuiteResult:
    res = SuiteResult("path-counting", seed, ["seed", "pair", "n_g", "n_h", "length", "density_gap", "bound", "pass"])
    for i, rng in enumerate(_rngs(seed, 50)):
        g, h = _graph(rng, 1, 12), _graph(rng, 1, 12)
        value = path_dist_spectral(g, h, opts).value
        for l in range(1, 7):
            gap = abs(float(path_density(l, g) - path_density(l, h)))
            res.add(gap <= l * value + 1e-6, [seed, i, g.n, h.n, l, gap, l * value], f"pair {i} length {l}")
    return res


def random_fractional(n: int, m: int, rng: np.random.Generator) -> FractionalOverlay:
    """A random point of the transportation polytope with uniform marginals."""
    r, c = uniform_marginals(n, m)
    kind = int(rng.integers(3))
    if kind == 0:
        x = lmo_vertex(rng.standard_normal((n, m)))
    elif kind == 1:
        lam = rng.random()
        x = lam * lmo_vertex(rng.standard_normal((n, m))) + (1 - lam) * lmo_vertex(rng.standard_normal((n, m)))
    else:
        x = dykstra_transportation(rng.random((n, m)) / (n * m) * 2, r, c).X
    return FractionalOverlay(x, r, c).validate()


def random_signed(n: int, m: int, rng: np.random.Generator) -> SignedOverlay:
    return dykstra_signed(rng.standard_normal((n, m)) / math.sqrt(n * m), n, m)


def suite_norm_sandwich(seed: int) -> SuiteResult:
    res = SuiteResult("norm-sandwich", seed, ["seed", "instance", "n", "m", "cut_obj", "spec_obj", "upper", "pass"])
    for i, rng in enumerate(_rngs(seed, 100)):
        g, h = _graph(rng, 1, 10), _graph(rng, 1, 10)
        x = random_fractional(g.n, h.n, rng)
        cut, exact = cut_objective(g, h, x, mode="exact")
        spec = spectral_objective(g, h, x)
        upper = 4 * math.sqrt(cut)
        res.add(exact and cut <= spec + 1e-12 and spec <= upper + 1e-9,
                [seed, i, g.n, h.n, cut, spec, upper], f"instance {i}")
    return res


def suite_hierarchy(seed: int, opts: SolverOptions = FAST) -> SuiteResult:
    res = SuiteResult("hierarchy", seed, ["seed", "check", "instance", "n", "m", "lhs", "rhs", "pass"])
    rngs = _rngs(seed, 70)
    for i, rng in enumerate(rngs[:50]):
        g, h = _graph(rng, 2, 8), _graph(rng, 2, 8)
        tree = tree_dist_spectral(g, h, opts)
        tree_obj = spectral_objective(g, h, tree.certificate)
        path = path_dist_spectral(g, h, opts, tree=tree)
        res.add(path.value <= tree_obj + 1e-6, [seed, "path_le_tree", i, g.n, h.n, path.value, tree_obj])
    for i, rng in enumerate(rngs[50:]):
        n = 2 + i % 4
        g, h = gen_gnp(n, 0.5, int(rng.integers(2**63))), gen_gnp(n, 0.5, int(rng.integers(2**63)))
        a, b = g.adjacency, h.adjacency
        worst = 0
        for perm in itertools.permutations(range(n)):
            x = np.full((n, n), Fraction(0), dtype=object)
            x[np.arange(n), list(perm)] = Fraction(1, n)
            lhs = Fraction(cut_norm(objective_matrix(g, h, x), mode="exact").value) / (n * n)
            rhs = Fraction(int(cut_norm(a - b[np.ix_(perm, perm)], mode="exact").value), n * n)
            worst += lhs != rhs
        res.add(worst == 0, [seed, "permutation_identity", i, n, n, math.factorial(n) - worst, math.factorial(n)])
    return res


def suite_fig1(seed: int, opts: SolverOptions | None = None) -> SuiteResult:
    res = SuiteResult("fig1-separation", seed, ["seed", "check", "value", "target", "pass"])
    k3 = complete_graph(3)
    q = quotient(k3)
    res.add(q == WeightedGraph((3,), ((Fraction(2, 3),),)), [seed, "quotient_K3", repr(q), "alpha=3 loop=2/3"])
    g10 = three_part_graph(10)
    q10 = quotient(g10)
    off = sorted({q10.beta[i][j] for i in range(q10.n) for j in range(q10.n) if i != j})
    diag = all(q10.beta[i][i] == 0 for i in range(q10.n))
    res.add(off == [Fraction(4, 5), Fraction(9, 10), 1] and diag,
            [seed, "quotient_fig1_offdiagonal", " ".join(map(str, off)), "4/5 9/10 1"])
    col = color_distance(g10, k3, opts)
    res.add(col.exact_value == Fraction(16, 135) and col.bound == "exact",
            [seed, "color_distance_exact", col.exact_value, "16/135"])
    res.add(col.exact_value is not None and col.exact_value >= Fraction(2, 27),
            [seed, "color_distance_lower_bound", col.exact_value, ">= 2/27"])
    t10 = tree_dist_cutnorm(g10, k3, opts).value
    t40 = tree_dist_cutnorm(three_part_graph(40), k3, opts).value
    res.add(t10 <= 16 / 135 + 0.02, [seed, "tree_cut_n10", t10, "<= 16/135 + 0.02"])
    res.add(t40 < t10, [seed, "tree_cut_n40", t40, f"< {t10!r}"])
    return res


def random_weighted(rng: np.random.Generator, max_v: int = 4, den: int = 10) -> WeightedGraph:
    """Normalized weighted graph with rational weights of denominator at most ``den``."""
    v = int(rng.integers(1, max_v + 1))
    raw = [int(x) for x in rng.integers(1, den + 1, size=v)]
    alpha = tuple(Fraction(a, sum(raw)) for a in raw)
    beta = [[Fraction(0)] * v for _ in range(v)]
    for i in range(v):
        for j in range(i, v):
            d = int(rng.integers(1, den + 1))
            beta[i][j] = beta[j][i] = Fraction(int(rng.integers(0, d + 1)), d)
    return WeightedGraph(alpha, tuple(map(tuple, beta)))


def suite_inversion(seed: int) -> SuiteResult:
    res = SuiteResult("inversion", seed, ["seed", "instance", "v_H", "n", "vertices", "achieved", "bound", "pass"])
    for i, rng in enumerate(_rngs(seed, 20)):
        h = random_weighted(rng)
        for n in (2 * h.n, 4 * h.n, 8 * h.n):
            try:
                out = verify_inversion(h, n)
            except Exception as exc:  # noqa: BLE001 - a failing instance is data here
                res.add(False, [seed, i, h.n, n, n * n, "error", str(exc)], f"instance {i} n={n}: {exc}")
                continue
            res.add(out["passed"] and out["inner_exact"],
                    [seed, i, h.n, n, out["vertices"], out["achieved"], out["bound"]])
    return res


def suite_composition(seed: int) -> SuiteResult:
    res = SuiteResult("composition", seed, ["seed", "kind", "instance", "composed", "sum", "pass"])
    kinds = ("tree_cut", "tree_spectral", "path_spectral")
    for k, kind in enumerate(kinds):
        for i, rng in enumerate(_rngs(seed * 3 + k, 50)):
            g, b, h = (_graph(rng, 1, 8) for _ in range(3))
            if kind == "path_spectral":
                x1, x2 = random_signed(g.n, b.n, rng), random_signed(b.n, h.n, rng)
            else:
                x1, x2 = random_fractional(g.n, b.n, rng), random_fractional(b.n, h.n, rng)
            z = compose(x1, x2)
            if kind == "tree_cut":
                obj = lambda p, q, x: cut_objective(p, q, x, mode="exact")[0]  # noqa: E731
            else:
                obj = spectral_objective
            lhs = obj(g, h, z)
            rhs = obj(g, b, x1) + obj(b, h, x2)
            res.add(lhs <= rhs + 1e-9, [seed, kind, i, lhs, rhs])
    return res


_RUNNERS = {
    "oracle-hom": suite_oracle_hom,
    "quotient-hom": suite_quotient_hom,
    "blowup-zero": suite_blowup_zero,
    "path-counting": suite_path_counting,
    "norm-sandwich": suite_norm_sandwich,
    "hierarchy": suite_hierarchy,
    "fig1-separation": suite_fig1,
    "inversion": suite_inversion,
    "composition": suite_composition,
}


def write_csv(result: SuiteResult, out: str) -> str:
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"{result.name}-{result.seed}.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(result.header)
        for row in result.rows:
            w.writerow([_fmt(v) for v in row])
    result.path = path
    return path


def run_suite(name: str, seed: int = 0, out: str | None = None) -> SuiteResult:
    """Run one suite; when ``out`` is given, also write ``<out>/<name>-<seed>.csv``."""
    if name not in _RUNNERS:
        raise PreconditionError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    result = _RUNNERS[name](seed)
    if out is not None:
        write_csv(result, out)
    return result

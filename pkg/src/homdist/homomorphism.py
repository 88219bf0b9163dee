"""Exact homomorphism counts from trees and paths, densities, and tree enumeration."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import PreconditionError
from .graphs import Graph, WeightedGraph, as_weighted

BRUTE_FORCE_LIMIT = 10**8


def _rooted_children(t: Graph, root: int = 0) -> tuple[list[int], dict[int, list[int]]]:
    """BFS order and child lists of ``t`` rooted at ``root``."""
    order = [root]
    children: dict[int, list[int]] = {root: []}
    for u in order:
        for v in t.neighbors(u):
            if v not in children:
                children[v] = []
                children[u].append(v)
                order.append(v)
    return order, children


def hom_tree(t: Graph, h: WeightedGraph) -> Fraction:
    """Weighted number of homomorphisms from the tree ``t`` into ``h``.

    Dynamic program over ``t`` rooted at vertex 0: the table of a vertex u maps
    each target w to alpha_w times the product, over children c, of
    sum_w' beta_{w w'} * table_c(w').
    """
    if not t.is_tree():
        raise PreconditionError("hom_tree requires a tree pattern")
    order, children = _rooted_children(t)
    alpha, beta = h.alpha, h.beta
    k = h.n
    table: dict[int, list[Fraction]] = {}
    for u in reversed(order):
        f = list(alpha)
        for c in children[u]:
            fc = table.pop(c)
            for w in range(k):
                row = beta[w]
                f[w] *= sum((row[x] * fc[x] for x in range(k) if row[x]), Fraction(0))
        table[u] = f
    return sum(table[order[0]], Fraction(0))


def hom_path(length: int, g: Graph) -> int:
    """Number of walks with ``length`` edges, i.e. 1^T A^length 1."""
    if length < 0:
        raise PreconditionError("path length must be non-negative")
    n = g.n
    # int64 is exact while every walk count stays below n^(length+1)
    dtype = np.int64 if (length + 1) * math.log2(max(n, 2)) < 62 else object
    a = g.adjacency.astype(dtype)
    x = np.ones(n, dtype=dtype)
    for _ in range(length):
        x = a @ x
    return int(sum(int(v) for v in x))


def density(f: Graph, h, count) -> Fraction:
    """Normalize a homomorphism count into a density t(F, H)."""
    count = Fraction(count)
    if isinstance(h, Graph):
        return count / Fraction(h.n) ** f.n
    return count / h.total_weight ** f.n


def tree_density(t: Graph, h) -> Fraction:
    target = as_weighted(h) if isinstance(h, Graph) else h
    return density(t, h, hom_tree(t, target))


def path_density(length: int, g: Graph) -> Fraction:
    return Fraction(hom_path(length, g), g.n ** (length + 1))


def _integer_scaled(values: list[Fraction]) -> tuple[list[int], int]:
    den = math.lcm(*(v.denominator for v in values)) if values else 1
    return [int(v * den) for v in values], den


def brute_force_hom(f: Graph, h: WeightedGraph) -> Fraction:
    """Enumerate all v(H)^v(F) maps and sum their weights.

    Weights are scaled to integers so that the enumeration runs in integer
    numpy arithmetic; the result is exact.
    """
    if isinstance(h, Graph):
        h = as_weighted(h)
    k, v = h.n, f.n
    if k ** v > BRUTE_FORCE_LIMIT:
        raise PreconditionError(f"{k}^{v} maps exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    alpha_int, alpha_den = _integer_scaled(list(h.alpha))
    flat_beta, beta_den = _integer_scaled([b for row in h.beta for b in row])
    edges = f.edges()
    bound = max(alpha_int) ** v * max(max(flat_beta), 1) ** len(edges)
    dtype = np.int64 if bound * k ** v < 2**62 else object
    alpha_a = np.array(alpha_int, dtype=dtype)
    beta_a = np.array(flat_beta, dtype=dtype).reshape(k, k)

    total = 0
    # enumerate maps in chunks so memory stays bounded for larger instances
    chunk_vars = min(v, max(1, int(math.log(2**20, max(k, 2)))))
    tail = np.indices((k,) * chunk_vars).reshape(chunk_vars, -1).T
    for head in itertools.product(range(k), repeat=v - chunk_vars):
        maps = np.hstack([np.tile(np.array(head, dtype=np.int64), (len(tail), 1)), tail])
        w = np.ones(len(maps), dtype=dtype)
        for i in range(v):
            w = w * alpha_a[maps[:, i]]
        for a, b in edges:
            w = w * beta_a[maps[:, a], maps[:, b]]
        total += int(sum(int(x) for x in w)) if dtype is object else int(w.sum())
    return Fraction(total, alpha_den ** v * beta_den ** len(edges))


# --- tree enumeration -------------------------------------------------------------

def _prufer_decode(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = (i for i in range(n) if degree[i] == 1)
    edges.append((u, w))
    return edges


def _centers(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    if n <= 2:
        return list(range(n))
    degree = [len(a) for a in adj]
    layer = [i for i in range(n) if degree[i] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for u in layer:
            for v in adj[u]:
                degree[v] -= 1
                if degree[v] == 1:
                    nxt.append(v)
        layer = nxt
    return layer


def _rooted_code(adj: list[list[int]], root: int, parent: int = -1) -> str:
    return "(" + "".join(sorted(_rooted_code(adj, c, root) for c in adj[root] if c != parent)) + ")"


def _canonical_code(adj: list[list[int]]) -> str:
    return min(_rooted_code(adj, c) for c in _centers(adj))


def tree_canonical_form(t: Graph) -> str:
    """Isomorphism-invariant string: smallest rooted encoding over the tree centers."""
    return _canonical_code([t.neighbors(u) for u in range(t.n)])


def _tree_from_code(code: str) -> Graph:
    """Build a tree from a nested code; vertices are numbered in preorder."""
    edges = []
    stack: list[int] = []
    count = 0
    for ch in code:
        if ch == "(":
            if stack:
                edges.append((stack[-1], count))
            stack.append(count)
            count += 1
        else:
            stack.pop()
    return Graph.from_edges(count, edges)


def prufer_trees(n: int) -> set[str]:
    """Canonical codes of all trees on ``n`` labelled vertices via Pruefer sequences."""
    if n <= 2:
        return {_canonical_code([[v for v in range(n) if v != u] for u in range(n)])}
    codes = set()
    for seq in itertools.product(range(n), repeat=n - 2):
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in _prufer_decode(seq, n):
            adj[u].append(v)
            adj[v].append(u)
        codes.add(_canonical_code(adj))
    return codes


@lru_cache(maxsize=None)
def _tree_codes(n: int) -> frozenset[str]:
    # every tree on n vertices is a tree on n-1 vertices plus one leaf
    if n == 1:
        return frozenset({"()"})
    codes = set()
    for code in _tree_codes(n - 1):
        t = _tree_from_code(code)
        adj = [t.neighbors(u) for u in range(t.n)] + [[]]
        for u in range(t.n):
            adj[u].append(t.n)
            adj[t.n] = [u]
            codes.add(_canonical_code(adj))
            adj[u].pop()
    return frozenset(codes)


def _trees_on(n: int) -> list[Graph]:
    return [_tree_from_code(c) for c in sorted(_tree_codes(n))]


def enumerate_trees(k: int) -> list[Graph]:
    """All pairwise non-isomorphic trees with 1..k vertices, ordered by size."""
    if not 1 <= k <= 8:
        raise PreconditionError("tree enumeration supports 1 <= k <= 8")
    return [t for n in range(1, k + 1) for t in _trees_on(n)]


def tree_density_vector(g: Graph, k: int) -> tuple[Fraction, ...]:
    """Densities t(T, G) for every tree on at most ``k`` vertices."""
    target = as_weighted(g)
    return tuple(density(t, g, hom_tree(t, target)) for t in enumerate_trees(k))

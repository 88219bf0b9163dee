"""Seeded random graphs and the three-part separating construction.

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), whose
streams are fixed across platforms for a given seed.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .graphs import Graph
from .inversion import build_biregular, build_regular


def gen_gnp(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): one uniform draw per pair u < v in lexicographic order."""
    if not 0 <= p <= 1:
        raise PreconditionError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gen_regular(n: int, d: int, seed: int = 0) -> Graph:
    """Random d-regular graph: circulant start, then 10*e attempted double-edge swaps."""
    if not 0 <= d < n or (n * d) % 2:
        raise PreconditionError(f"no {d}-regular graph on {n} vertices")
    edges = build_regular(n, d)
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = adj[v, u] = True
    rng = np.random.default_rng(seed)
    e = len(edges)
    for _ in range(10 * e if e >= 2 else 0):
        i, j = rng.choice(e, size=2, replace=False)
        a, b = edges[i]
        c, d_ = edges[j]
        if rng.random() < 0.5:
            c, d_ = d_, c
        # ab, cd -> ad, cb
        if len({a, b, c, d_}) < 4 or adj[a, d_] or adj[c, b]:
            continue
        adj[a, b] = adj[b, a] = adj[c, d_] = adj[d_, c] = False
        adj[a, d_] = adj[d_, a] = adj[c, b] = adj[b, c] = True
        edges[i], edges[j] = (a, d_), (c, b)
    return Graph(adj.astype(np.int64))


def three_part_graph(n: int) -> Graph:
    """Three parts of size n; part 1 to 2 complete, 1 to 3 (n-1)-regular, 2 to 3 (n-2)-regular."""
    if n < 3:
        raise PreconditionError("the construction needs n >= 3")
    p1, p2, p3 = 0, n, 2 * n
    edges = [(p1 + i, p2 + j) for i in range(n) for j in range(n)]
    edges += [(p1 + i, p3 + j) for i, j in build_biregular(n, n, n - 1, n - 1)]
    edges += [(p2 + i, p3 + j) for i, j in build_biregular(n, n, n - 2, n - 2)]
    return Graph.from_edges(3 * n, edges)


# name used by the command-line interface and the suite tables
figure1_graph = three_part_graph

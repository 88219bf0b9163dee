"""Simple graphs, rational weighted graphs, file formats and blow-ups."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, PreconditionError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph stored as a dense symmetric 0/1 adjacency matrix.

    Vertex order is significant; it is the order used by the file format and by
    every matrix built from the graph.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise PreconditionError(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise PreconditionError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise PreconditionError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise PreconditionError("simple graphs have no loops")
        object.__setattr__(self, "adjacency", _frozen(a.astype(np.int64)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        a = np.zeros((n, n), dtype=np.int64)
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"loop at vertex {u}")
            a[u, v] = a[v, u] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v`` in lexicographic order."""
        us, vs = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(u), int(v)) for u, v in zip(us, vs)]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def neighbors(self, u: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.adjacency[u])]

    def is_tree(self) -> bool:
        if self.num_edges != self.n - 1:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Weighted graph with positive vertex weights and symmetric edge weights in [0, 1].

    Weights are exact :class:`fractions.Fraction` values; diagonal entries of
    ``beta`` are loop weights.
    """

    alpha: tuple
    beta: tuple

    def __post_init__(self):
        alpha = tuple(Fraction(a) for a in self.alpha)
        beta = tuple(tuple(Fraction(b) for b in row) for row in self.beta)
        n = len(alpha)
        if n < 1:
            raise PreconditionError("weighted graph needs at least one vertex")
        if len(beta) != n or any(len(row) != n for row in beta):
            raise PreconditionError(f"beta must be {n}x{n}")
        for u, a in enumerate(alpha):
            if a <= 0:
                raise PreconditionError(f"vertex weight alpha[{u}] = {a} is not positive")
        for u in range(n):
            for v in range(n):
                b = beta[u][v]
                if not 0 <= b <= 1:
                    raise PreconditionError(f"edge weight beta[{u}][{v}] = {b} outside [0, 1]")
                if b != beta[v][u]:
                    raise PreconditionError(f"beta is not symmetric at ({u}, {v})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.alpha, Fraction(0))

    def vertex_fractions(self) -> tuple:
        """Normalized vertex weights alpha_u / alpha_G."""
        total = self.total_weight
        return tuple(a / total for a in self.alpha)

    def normalized(self) -> "WeightedGraph":
        return WeightedGraph(self.vertex_fractions(), self.beta)

    def alpha_array(self) -> np.ndarray:
        return np.array([float(a) for a in self.alpha])

    def beta_array(self) -> np.ndarray:
        return np.array([[float(b) for b in row] for row in self.beta])

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.alpha == other.alpha and self.beta == other.beta

    def __hash__(self):
        return hash((self.alpha, self.beta))

    def __repr__(self):
        a = ", ".join(str(x) for x in self.alpha)
        b = "; ".join(" ".join(str(x) for x in row) for row in self.beta)
        return f"WeightedGraph(alpha=[{a}], beta=[{b}])"


def as_weighted(g: Graph) -> WeightedGraph:
    """View a graph as a weighted graph with unit vertex weights."""
    return WeightedGraph((1,) * g.n, tuple(tuple(int(x) for x in row) for row in g.adjacency))


def blow_up(g: Graph, k: int) -> Graph:
    """Replace every vertex by ``k`` twins; copy ``(u, i)`` has index ``u*k + i``."""
    if k < 1:
        raise PreconditionError("blow-up factor must be at least 1")
    return Graph(np.kron(g.adjacency, np.ones((k, k), dtype=np.int64)))


def disjoint_union(*graphs: Graph) -> Graph:
    n = sum(g.n for g in graphs)
    a = np.zeros((n, n), dtype=np.int64)
    offset = 0
    for g in graphs:
        a[offset:offset + g.n, offset:offset + g.n] = g.adjacency
        offset += g.n
    return Graph(a)


# --- small named graphs -------------------------------------------------------

def complete_graph(n: int) -> Graph:
    return Graph(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(length: int) -> Graph:
    """The path P_length with ``length`` edges."""
    return Graph.from_edges(length + 1, [(i, i + 1) for i in range(length)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty_graph(n: int) -> Graph:
    return Graph(np.zeros((n, n), dtype=np.int64))


# --- file formats ---------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` / ``u v`` edge-list format (0-based vertices)."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty graph file", line=1)
    lineno, header = lines[0]
    try:
        n, m = (int(t) for t in header.split())
    except ValueError:
        raise ParseError(f"expected 'n m', got {header!r}", line=lineno) from None
    if n < 1 or m < 0:
        raise ParseError(f"invalid header {header!r}", line=lineno)
    if len(lines) - 1 != m:
        raise ParseError(f"header announces {m} edges, found {len(lines) - 1}", line=lineno)
    a = np.zeros((n, n), dtype=np.int64)
    for lineno, ln in lines[1:]:
        try:
            u, v = (int(t) for t in ln.split())
        except ValueError:
            raise ParseError(f"expected 'u v', got {ln!r}", line=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex index out of range in {ln!r}", line=lineno)
        if u == v:
            raise ParseError(f"loop {ln!r}", line=lineno)
        if a[u, v]:
            raise ParseError(f"duplicate edge {ln!r}", line=lineno)
        a[u, v] = a[v, u] = 1
    return Graph(a)


def serialize_graph(g: Graph) -> str:
    edges = g.edges()
    return "\n".join([f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]) + "\n"


def _parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(f"{where}: booleans are not weights")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{where}: cannot read {value!r} as a rational") from None
    if isinstance(value, float):
        # only decimal strings are exact; floats go through their repr
        return Fraction(repr(value))
    raise ParseError(f"{where}: unsupported value {value!r}")


def parse_weighted(text: str) -> WeightedGraph:
    """Parse a JSON object with ``alpha`` and ``beta`` keys into an exact weighted graph."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(obj, dict) or "alpha" not in obj or "beta" not in obj:
        raise ParseError("expected an object with keys 'alpha' and 'beta'")
    alpha = [_parse_rational(a, f"alpha[{i}]") for i, a in enumerate(obj["alpha"])]
    beta = [[_parse_rational(b, f"beta[{i}][{j}]") for j, b in enumerate(row)]
            for i, row in enumerate(obj["beta"])]
    try:
        return WeightedGraph(tuple(alpha), tuple(tuple(r) for r in beta))
    except PreconditionError as e:
        raise ParseError(str(e)) from None


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def serialize_weighted(h: WeightedGraph) -> str:
    obj = {
        "alpha": [_fmt(a) for a in h.alpha],
        "beta": [[_fmt(b) for b in row] for row in h.beta],
    }
    return json.dumps(obj) + "\n"


def weighted_from_arrays(alpha: Sequence, beta: Sequence[Sequence]) -> WeightedGraph:
    return WeightedGraph(tuple(alpha), tuple(tuple(r) for r in beta))

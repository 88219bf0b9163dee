"""Fractional and signed overlays: validation, projections and certificate constructions."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, InvariantError, PreconditionError
from .graphs import Graph
from .refinement import (DEFAULT_TOL, PathSpectrum, color_refine, match_spectra, quotient,
                         quotient_match)
from .transport import transportation_lmo

MARGINAL_TOL = 1e-10
NONNEG_TOL = 1e-12
SPECTRAL_TOL = 1e-9


def _residuals(x: np.ndarray, r: np.ndarray, c: np.ndarray) -> dict:
    return {
        "row": float(np.abs(x.sum(axis=1) - r).max(initial=0.0)),
        "col": float(np.abs(x.sum(axis=0) - c).max(initial=0.0)),
        "neg": float(max(0.0, -x.min(initial=0.0))),
    }


@dataclass(frozen=True, eq=False)
class FractionalOverlay:
    """Non-negative coupling matrix with row sums ``row_marginal`` and column sums ``col_marginal``.

    ``exact`` optionally carries the same matrix with Fraction entries.
    """

    X: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    exact: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("X", "row_marginal", "col_marginal"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.X.shape != (len(self.row_marginal), len(self.col_marginal)):
            raise PreconditionError("overlay shape does not match its marginals")

    @property
    def shape(self):
        return self.X.shape

    def residuals(self) -> dict:
        return _residuals(self.X, self.row_marginal, self.col_marginal)

    def validate(self) -> "FractionalOverlay":
        res = self.residuals()
        if res["row"] > MARGINAL_TOL or res["col"] > MARGINAL_TOL or res["neg"] > NONNEG_TOL:
            raise InvariantError(f"invalid fractional overlay: {res}")
        return self


@dataclass(frozen=True, eq=False)
class SignedOverlay:
    """Coupling with uniform marginals whose spectral norm is at most 1/sqrt(nm)."""

    X: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray

    def __post_init__(self):
        for name in ("X", "row_marginal", "col_marginal"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def shape(self):
        return self.X.shape

    @property
    def radius(self) -> float:
        n, m = self.X.shape
        return 1 / math.sqrt(n * m)

    def residuals(self) -> dict:
        res = _residuals(self.X, self.row_marginal, self.col_marginal)
        del res["neg"]
        res["spectral_excess"] = float(max(0.0, np.linalg.norm(self.X, 2) - self.radius))
        return res

    def validate(self) -> "SignedOverlay":
        res = self.residuals()
        if res["row"] > MARGINAL_TOL or res["col"] > MARGINAL_TOL or res["spectral_excess"] > SPECTRAL_TOL:
            raise InvariantError(f"invalid signed overlay: {res}")
        return self


def uniform_marginals(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.full(n, 1 / n), np.full(m, 1 / m)


def uniform_overlay(n: int, m: int) -> FractionalOverlay:
    if n < 1 or m < 1:
        raise PreconditionError("overlay dimensions must be positive")
    r, c = uniform_marginals(n, m)
    exact = np.full((n, m), Fraction(1, n * m), dtype=object)
    return FractionalOverlay(np.full((n, m), 1 / (n * m)), r, c, exact).validate()


def project_marginals(mat, r, c) -> np.ndarray:
    """Euclidean projection onto the affine set {X 1 = r, X^T 1 = c}."""
    mat = np.asarray(mat, dtype=float)
    r = np.asarray(r, dtype=float)
    c = np.asarray(c, dtype=float)
    n, m = mat.shape
    if abs(r.sum() - c.sum()) > 1e-12 * max(1.0, abs(r.sum())):
        raise PreconditionError("row and column marginals have different total mass")
    rho = r - mat.sum(axis=1)
    gamma = c - mat.sum(axis=0)
    delta = r.sum() - mat.sum()
    return mat + rho[:, None] / m + gamma[None, :] / n - delta / (n * m)


def _round_to_polytope(x: np.ndarray, r: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Move a non-negative near-feasible matrix onto the polytope exactly.

    Scale down rows and columns that exceed their marginals, then add the
    rank-one product of the remaining deficits.
    """
    x = np.maximum(x, 0.0)
    rows = x.sum(axis=1)
    x = x * np.minimum(1.0, np.divide(r, rows, out=np.ones_like(r), where=rows > 0))[:, None]
    cols = x.sum(axis=0)
    x = x * np.minimum(1.0, np.divide(c, cols, out=np.ones_like(c), where=cols > 0))[None, :]
    er = np.maximum(r - x.sum(axis=1), 0.0)
    ec = np.maximum(c - x.sum(axis=0), 0.0)
    mass = er.sum()
    if mass > 0:
        x = x + np.outer(er, ec) / mass
    return x


def dykstra_transportation(mat, r=None, c=None, tol: float = 1e-11,
                           max_rounds: int = 10000) -> FractionalOverlay:
    """Euclidean projection onto the transportation polytope by Dykstra's algorithm.

    Alternates the affine marginal projection with clamping at zero, carrying
    Dykstra's correction terms. Default marginals are uniform.
    """
    mat = np.asarray(mat, dtype=float)
    n, m = mat.shape
    if r is None or c is None:
        r, c = uniform_marginals(n, m)
    r = np.asarray(r, dtype=float)
    c = np.asarray(c, dtype=float)
    x = mat.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for rounds in range(1, max_rounds + 1):
        y = project_marginals(x + p, r, c)
        p = x + p - y
        x_new = np.maximum(y + q, 0.0)
        q = y + q - x_new
        step = np.abs(x_new - x).max()
        x = x_new
        if step < tol:
            break
    else:
        raise ConvergenceError(
            f"Dykstra projection did not converge in {max_rounds} rounds",
            {"step": float(step), **_residuals(x, r, c)},
        )
    return FractionalOverlay(_round_to_polytope(x, r, c), r, c).validate()


def project_spectral_ball(mat, radius: float) -> np.ndarray:
    """Euclidean projection onto {X : ||X||_2 <= radius} by clamping singular values."""
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    mat = np.asarray(mat, dtype=float)
    u, s, vt = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] <= radius:
        return mat.copy()
    return (u * np.minimum(s, radius)) @ vt


def dykstra_signed(mat, n: int | None = None, m: int | None = None, tol: float = 1e-12,
                   max_rounds: int = 10000) -> SignedOverlay:
    """Euclidean projection onto the signed overlays by Dykstra's algorithm."""
    mat = np.asarray(mat, dtype=float)
    n = n or mat.shape[0]
    m = m or mat.shape[1]
    r, c = uniform_marginals(n, m)
    radius = 1 / math.sqrt(n * m)
    x = mat.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for rounds in range(1, max_rounds + 1):
        y = project_marginals(x + p, r, c)
        p = x + p - y
        x_new = project_spectral_ball(y + q, radius)
        q = y + q - x_new
        step = np.abs(x_new - x).max()
        x = x_new
        if step < tol:
            break
    else:
        raise ConvergenceError(
            f"signed Dykstra projection did not converge in {max_rounds} rounds",
            {"step": float(step)},
        )
    # the last iterate lies in the ball; re-impose the marginals, which keeps the
    # centered part and therefore the norm bound (within rounding)
    x = project_marginals(x, r, c)
    return SignedOverlay(x, r, c).validate()


def compose(x1, x2):
    """Compose overlays of (G, B) and (B, H) into an overlay of (G, H): Z = v(B) X1 X2."""
    a1 = x1.X if hasattr(x1, "X") else np.asarray(x1, dtype=float)
    a2 = x2.X if hasattr(x2, "X") else np.asarray(x2, dtype=float)
    if a1.shape[1] != a2.shape[0]:
        raise PreconditionError(f"cannot compose {a1.shape} with {a2.shape}")
    p = a1.shape[1]
    z = p * a1 @ a2
    n, m = z.shape
    r, c = uniform_marginals(n, m)
    if isinstance(x1, SignedOverlay) or isinstance(x2, SignedOverlay):
        return SignedOverlay(z, r, c).validate()
    return FractionalOverlay(z, r, c).validate()


# --- certificates ------------------------------------------------------------------

def tree_certificate(g: Graph, h: Graph, match: dict[int, int] | None = None) -> FractionalOverlay:
    """Block-uniform overlay between matched color classes; satisfies m*A*X = n*X*B exactly."""
    n, m = g.n, h.n
    cg, ch = color_refine(g), color_refine(h)
    if match is None:
        match = quotient_match(quotient(g, cg), quotient(h, ch), n, m)
    if match is None:
        raise PreconditionError("color refinement distinguishes the graphs; no tree certificate")
    classes_g, classes_h = cg.classes(), ch.classes()
    exact = np.full((n, m), Fraction(0), dtype=object)
    for k, l in match.items():
        val = Fraction(1, n * len(classes_h[l]))
        for u in classes_g[k]:
            for v in classes_h[l]:
                exact[u, v] = val
    # exact commutation check in integers: scale X by n * lcm(|D|)
    scale = n * math.lcm(*(len(d) for d in classes_h))
    xi = np.array([[int(v * scale) for v in row] for row in exact], dtype=object)
    if not np.array_equal(m * (g.adjacency.astype(object) @ xi), n * (xi @ h.adjacency.astype(object))):
        raise InvariantError("tree certificate does not commute")
    r, c = uniform_marginals(n, m)
    return FractionalOverlay(exact.astype(float), r, c, exact).validate()


def path_certificate(sg: PathSpectrum, sh: PathSpectrum, tol: float = DEFAULT_TOL,
                     pairs: list[tuple[int, int]] | None = None) -> SignedOverlay:
    """Signed overlay sum_k p_k q_k^T / (sqrt(nm) |p_k| |q_k|) over matched spectrum entries."""
    if pairs is None:
        pairs = match_spectra(sg, sh, tol)
    if pairs is None:
        raise PreconditionError("path spectra do not match; no path certificate")
    if not sg.projections or not sh.projections:
        raise PreconditionError("path spectra carry no eigenspace projections")
    n, m = sg.n, sh.n
    x = np.zeros((n, m))
    for i, j in pairs:
        p, q = sg.projections[i], sh.projections[j]
        x += np.outer(p, q) / (np.linalg.norm(p) * np.linalg.norm(q))
    x /= math.sqrt(n * m)
    r, c = uniform_marginals(n, m)
    return SignedOverlay(x, r, c).validate()


def permutation_overlay(perm) -> FractionalOverlay:
    """X = P / n for the permutation u -> perm[u]."""
    n = len(perm)
    x = np.zeros((n, n))
    x[np.arange(n), np.asarray(perm)] = 1 / n
    r, c = uniform_marginals(n, n)
    return FractionalOverlay(x, r, c).validate()


def lmo_vertex(cost, r=None, c=None) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if r is None or c is None:
        r, c = uniform_marginals(n, m)
    return np.asarray(transportation_lmo(cost, r, c), dtype=float)


# --- CSV certificate files -------------------------------------------------------------

def write_certificate(overlay, path_or_buf) -> None:
    """Write the matrix as CSV with a one-line ``#`` header of marginals and residuals."""
    res = overlay.residuals()
    head = ("# kind={kind} rows={rows} cols={cols} row_marginal={rm} col_marginal={cm} {res}".format(
        kind="signed" if isinstance(overlay, SignedOverlay) else "fractional",
        rows=overlay.X.shape[0], cols=overlay.X.shape[1],
        rm=";".join(repr(float(v)) for v in overlay.row_marginal),
        cm=";".join(repr(float(v)) for v in overlay.col_marginal),
        res=" ".join(f"residual_{k}={v:.3e}" for k, v in res.items()),
    ))
    buf = io.StringIO()
    np.savetxt(buf, overlay.X, delimiter=",", fmt="%.17g")
    text = head + "\n" + buf.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_certificate(path_or_buf):
    text = path_or_buf.read() if hasattr(path_or_buf, "read") else open(path_or_buf, encoding="utf-8").read()
    head, _, body = text.partition("\n")
    fields = dict(tok.split("=", 1) for tok in head.lstrip("# ").split() if "=" in tok)
    x = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    r = np.array([float(v) for v in fields["row_marginal"].split(";")])
    c = np.array([float(v) for v in fields["col_marginal"].split(";")])
    cls = SignedOverlay if fields.get("kind") == "signed" else FractionalOverlay
    return cls(x, r, c)

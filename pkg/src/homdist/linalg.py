"""Dense symmetric eigensolver and spectral norm."""

from __future__ import annotations

import logging

import numpy as np

from .errors import ConvergenceError

log = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of 0..n-1 such that every pair occurs exactly once per sweep.

    Circle-method tournament; pairs within one step are disjoint, so their
    rotations commute and can be applied together.
    """
    m = n + (n % 2)
    players = list(range(m))
    steps = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        steps.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return steps


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns. Iterates until the off-diagonal Frobenius norm is
    at most ``tol`` times the Frobenius norm of ``a``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("jacobi_eigh needs a square matrix")
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("jacobi_eigh needs a symmetric matrix")
    a = (a + a.T) / 2
    v = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    steps = _round_robin(n)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps",
                {"off_diagonal_norm": float(off), "scale": float(scale)},
            )
        for p, q in steps:
            if len(p) == 0:
                continue
            apq = a[p, q]
            nz = apq != 0
            if not np.any(nz):
                continue
            p, q, apq = p[nz], q[nz], apq[nz]
            with np.errstate(over="ignore"):
                tau = (a[q, q] - a[p, p]) / (2 * apq)
                # t underflows to 0 when tau overflows, i.e. no rotation needed
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1 / np.sqrt(1 + t * t)
            s = t * c
            # A <- J^T A J with J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c - aq * s
            a[:, q] = ap * s + aq * c
            a[p, q] = a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def spectral_norm(m: np.ndarray, rtol: float = 1e-10, max_iter: int = 10**5,
                  cross_check: bool = True) -> float:
    """Largest singular value of ``m``.

    Power iteration on M^T M from the all-ones vector, restarted from a vector
    orthogonal to it and from a fixed pseudo-random vector. When ``cross_check`` is set and the
    smaller side is at most 50, the result is compared with the Jacobi
    eigenvalues of the Gram matrix and the larger of the two is returned.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0 or not np.any(m):
        return 0.0
    if m.shape[0] < m.shape[1]:
        m = m.T
    gram = m.T @ m
    k = gram.shape[0]

    def power(x):
        x = x / np.linalg.norm(x)
        lam = 0.0
        for it in range(1, max_iter + 1):
            y = gram @ x
            new = float(x @ y)
            ny = np.linalg.norm(y)
            if ny == 0:
                return 0.0, it
            x = y / ny
            if abs(new - lam) <= rtol * abs(new):
                return new, it
            lam = new
        raise ConvergenceError("power iteration hit its cap", {"estimate": lam, "iterations": max_iter})

    starts = [np.ones(k)]
    if k > 1:
        starts.append(np.arange(k, dtype=float) - (k - 1) / 2)
        # both structured starts can be orthogonal to the top singular vector
        starts.append(np.random.default_rng(0).standard_normal(k))
    best = 0.0
    for x0 in starts:
        lam, _ = power(x0)
        best = max(best, lam)
    sigma = float(np.sqrt(max(best, 0.0)))
    if cross_check and k <= 50:
        w, _ = jacobi_eigh(gram)
        ref = float(np.sqrt(max(w[-1], 0.0)))
        if abs(ref - sigma) > 1e-8 * max(ref, 1.0):
            log.debug("power iteration %.3e vs Jacobi %.3e", sigma, ref)
        sigma = max(sigma, ref)
    return sigma


def top_singular_pair(m: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """Leading singular triple ``(u, sigma, v)`` via LAPACK; used inside solver loops."""
    u, s, vt = np.linalg.svd(np.asarray(m, dtype=float), full_matrices=False)
    return u[:, 0], float(s[0]), vt[0]

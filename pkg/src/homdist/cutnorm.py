"""Cut norm of a matrix: exact enumeration over the smaller side, or randomized local search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError

EXACT_CAP = 22
HEURISTIC_RESTARTS = 20


@dataclass(frozen=True)
class CutNormResult:
    """Cut norm value with a maximizing rectangle.

    ``sign`` is +1 if the rectangle sum is positive and -1 otherwise. ``exact``
    is False for heuristic results, whose value is only a lower bound.
    """

    value: float | Fraction
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    sign: int
    exact: bool


def _integer_form(mat: np.ndarray):
    """Scale a Fraction/int matrix to integers; returns ``(int_matrix, denominator)``."""
    flat = [Fraction(v) for v in mat.ravel()]
    den = math.lcm(*(q.denominator for q in flat)) if flat else 1
    ints = [int(q * den) for q in flat]
    bound = sum(abs(v) for v in ints)
    dtype = np.int64 if bound < 2**62 else object
    return np.array(ints, dtype=dtype).reshape(mat.shape), den


def _masks_to_indicator(masks: np.ndarray, k: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(k)[None, :]) & 1)


def _exact(mat: np.ndarray) -> tuple:
    """Enumerate row subsets of ``mat`` (rows = smaller side). Returns (value, mask, cols, sign)."""
    k, m = mat.shape
    best = None
    chunk = max(1, min(1 << k, (1 << 22) // max(m, 1)))
    for start in range(0, 1 << k, chunk):
        masks = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        ind = _masks_to_indicator(masks, k).astype(mat.dtype)
        colsums = ind @ mat
        zero = colsums.dtype.type(0) if colsums.dtype != object else 0
        pos = np.where(colsums > 0, colsums, zero).sum(axis=1)
        neg = -np.where(colsums < 0, colsums, zero).sum(axis=1)
        vals = np.maximum(pos, neg) if colsums.dtype != object else np.array(
            [max(a, b) for a, b in zip(pos, neg)], dtype=object)
        i = int(np.argmax(vals)) if colsums.dtype != object else max(range(len(vals)), key=lambda t: (vals[t], -t))
        if best is None or vals[i] > best[0]:
            sign = 1 if pos[i] >= neg[i] else -1
            cols = np.flatnonzero(colsums[i] > 0) if sign > 0 else np.flatnonzero(colsums[i] < 0)
            best = (vals[i], int(masks[i]), tuple(int(c) for c in cols), sign)
    return best


def _heuristic(mat: np.ndarray, restarts: int, seed: int) -> tuple:
    """Best rectangle found by single-flip local search over row subsets."""
    k, m = mat.shape
    rng = np.random.default_rng(seed)
    best = (-1.0, (), (), 1)

    def score(colsums):
        pos = np.clip(colsums, 0, None).sum(axis=-1)
        neg = -np.clip(colsums, None, 0).sum(axis=-1)
        return np.maximum(pos, neg), pos >= neg

    for _ in range(restarts):
        member = rng.random(k) < 0.5
        colsum = member.astype(float) @ mat
        val = score(colsum)[0]
        while True:
            # column sums after flipping each row, all at once
            flips = colsum[None, :] + np.where(member, -1.0, 1.0)[:, None] * mat
            vals, _ = score(flips)
            i = int(np.argmax(vals))
            if vals[i] <= val + 1e-15 * max(1.0, abs(val)):
                break
            member[i] = ~member[i]
            colsum = flips[i]
            val = vals[i]
        if val > best[0]:
            _, positive = score(colsum)
            sign = 1 if positive else -1
            cols = np.flatnonzero(colsum > 0) if sign > 0 else np.flatnonzero(colsum < 0)
            best = (float(val), tuple(int(i) for i in np.flatnonzero(member)),
                    tuple(int(c) for c in cols), sign)
    return best


def cut_norm(mat, mode: str = "auto", seed: int = 0, restarts: int = HEURISTIC_RESTARTS) -> CutNormResult:
    """max over row set S and column set T of |sum_{i in S, j in T} M_ij|.

    ``mode`` is ``"exact"``, ``"heuristic"`` or ``"auto"`` (exact when the
    smaller side is at most 22). Fraction input gives a Fraction value in exact
    mode. Among maximizers the row set of the smaller side with the smallest
    bitmask (bit i = index i) is reported.
    """
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise PreconditionError("cut norm needs a matrix")
    n, m = arr.shape
    if n == 0 or m == 0:
        return CutNormResult(0.0, (), (), 1, True)
    transposed = n > m
    work = arr.T if transposed else arr
    k = work.shape[0]
    if mode == "auto":
        mode = "exact" if k <= EXACT_CAP else "heuristic"
    if mode == "exact":
        if k > EXACT_CAP:
            raise PreconditionError(f"exact cut norm needs min side <= {EXACT_CAP}, got {k}")
        if arr.dtype == object:
            ints, den = _integer_form(work)
            val, mask, cols, sign = _exact(ints)
            value = Fraction(int(val), den)
        else:
            val, mask, cols, sign = _exact(work.astype(float))
            value = float(val) + 0.0  # no negative zero
        small = tuple(i for i in range(k) if mask >> i & 1)
        exact = True
    elif mode == "heuristic":
        value, small, cols, sign = _heuristic(work.astype(float), restarts, seed)
        exact = False
    else:
        raise PreconditionError(f"unknown cut norm mode {mode!r}")
    rows, cols = (cols, small) if transposed else (small, cols)
    return CutNormResult(value, tuple(rows), tuple(cols), sign, exact)

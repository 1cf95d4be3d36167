"""Pure-Python elimination kernels.

These are the hot loops of the toolkit: exact fraction-free row reduction
over big integers and threshold-pivoted reduction over extended floats.
webrank._speedups is a compiled twin with identical semantics; webrank.linalg
picks whichever is available.

All functions modify their row lists in place; callers pass copies.
"""

from __future__ import annotations

import math


def rank_int_rows(rows: list[list[int]]) -> tuple[int, list[tuple[int, int]]]:
    """Exact rank of an integer matrix by fraction-free elimination.

    Cross-multiplication updates keep everything integral; every updated row
    is divided by its content (gcd) to bound entry growth.  Pivots are chosen
    with smallest absolute value to keep multipliers small.

    Returns (rank, pivot positions).
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    piv_r = 0
    pivots: list[tuple[int, int]] = []
    for col in range(n):
        best_r = -1
        best_abs = 0
        for i in range(piv_r, m):
            v = rows[i][col]
            if v != 0:
                a = -v if v < 0 else v
                if best_r < 0 or a < best_abs:
                    best_r = i
                    best_abs = a
        if best_r < 0:
            continue
        if best_r != piv_r:
            rows[piv_r], rows[best_r] = rows[best_r], rows[piv_r]
        pivots.append((piv_r, col))
        pivot_row = rows[piv_r]
        p = pivot_row[col]
        for i in range(piv_r + 1, m):
            ri = rows[i]
            f = ri[col]
            if f == 0:
                continue
            for j in range(col + 1, n):
                ri[j] = ri[j] * p - pivot_row[j] * f
            ri[col] = 0
            g = 0
            for j in range(col + 1, n):
                v = ri[j]
                if v:
                    g = math.gcd(g, v)
                    if g == 1:
                        break
            if g > 1:
                for j in range(col + 1, n):
                    ri[j] //= g
        piv_r += 1
        if piv_r == m:
            break
    return len(pivots), pivots


def det_int_rows(rows: list[list[int]]) -> int:
    """Exact determinant of a square integer matrix (single-step Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        rk = rows[k]
        for i in range(k + 1, n):
            ri = rows[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def rank_float_rows(rows: list[list], tol_ratio, gap: int):
    """Numerical rank by Gaussian elimination with complete pivoting.

    A pivot is accepted while its magnitude exceeds tol_ratio times the first
    (largest) pivot.  Returns (rank, pivot magnitudes, largest discarded
    magnitude, marginal flag); the result is marginal when an accepted pivot
    sits within a factor `gap` above the threshold or a discarded one within
    `gap` below it.

    Entries may be any type supporting abs, -, * and /; callers set the
    working precision.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    rank = 0
    pivot_mags: list = []
    threshold = None
    max_discarded = None
    limit = m if m < n else n
    while rank < limit:
        best = None
        best_i = best_j = -1
        for i in range(rank, m):
            ri = rows[i]
            for j in range(rank, n):
                v = abs(ri[j])
                if best is None or v > best:
                    best = v
                    best_i = i
                    best_j = j
        if best is None or best == 0:
            break
        if threshold is None:
            threshold = tol_ratio * best
        if best <= threshold:
            max_discarded = best
            break
        if best_i != rank:
            rows[rank], rows[best_i] = rows[best_i], rows[rank]
        if best_j != rank:
            for row in rows:
                row[rank], row[best_j] = row[best_j], row[rank]
        pivot_mags.append(best)
        pivot_row = rows[rank]
        p = pivot_row[rank]
        for i in range(rank + 1, m):
            ri = rows[i]
            f = ri[rank]
            if f == 0:
                continue
            ratio = f / p
            for j in range(rank + 1, n):
                ri[j] = ri[j] - ratio * pivot_row[j]
        rank += 1
    marginal = False
    if threshold is not None:
        if pivot_mags and min(pivot_mags) < gap * threshold:
            marginal = True
        if max_discarded is not None and max_discarded * gap > threshold:
            marginal = True
    return rank, pivot_mags, max_discarded, marginal

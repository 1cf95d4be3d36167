# cython: language_level=3
"""Compiled elimination kernels; semantics identical to webrank._purekernels.

Entries stay Python objects (big ints, mpf) because exactness and extended
precision are the whole point; the win over the pure twins comes from typed
loop indices and list accesses in the O(rank * rows * cols) inner loops.
"""

import math


def rank_int_rows(list rows):
    """Exact rank of an integer matrix by fraction-free elimination."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if m else 0
    cdef Py_ssize_t piv_r = 0
    cdef Py_ssize_t col, i, j, best_r
    cdef list pivots = []
    cdef list pivot_row, ri
    for col in range(n):
        best_r = -1
        best_abs = None
        for i in range(piv_r, m):
            v = (<list>rows[i])[col]
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
        pivot_row = <list>rows[piv_r]
        p = pivot_row[col]
        for i in range(piv_r + 1, m):
            ri = <list>rows[i]
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
                    ri[j] = ri[j] // g
        piv_r += 1
        if piv_r == m:
            break
    return len(pivots), pivots


def det_int_rows(list rows):
    """Exact determinant of a square integer matrix (single-step Bareiss)."""
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t k, i, j
    cdef int sign = 1
    cdef list rk, ri
    if n == 0:
        return 1
    prev = 1
    for k in range(n - 1):
        if (<list>rows[k])[k] == 0:
            for i in range(k + 1, n):
                if (<list>rows[i])[k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = (<list>rows[k])[k]
        rk = <list>rows[k]
        for i in range(k + 1, n):
            ri = <list>rows[i]
            f = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - f * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * (<list>rows[n - 1])[n - 1]


def rank_float_rows(list rows, tol_ratio, gap):
    """Numerical rank by Gaussian elimination with complete pivoting."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if m else 0
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t i, j, best_i, best_j, limit
    cdef list pivot_mags = []
    cdef list ri, pivot_row, row
    threshold = None
    max_discarded = None
    limit = m if m < n else n
    while rank < limit:
        best = None
        best_i = -1
        best_j = -1
        for i in range(rank, m):
            ri = <list>rows[i]
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
            for i in range(m):
                row = <list>rows[i]
                row[rank], row[best_j] = row[best_j], row[rank]
        pivot_mags.append(best)
        pivot_row = <list>rows[rank]
        p = pivot_row[rank]
        for i in range(rank + 1, m):
            ri = <list>rows[i]
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

"""Exact and floating rank/determinant front ends over the elimination kernels.

The compiled kernels (webrank._speedups, built by setup.py) are preferred;
set WEBRANK_FORCE_PURE=1 to insist on the pure-Python twins.  Both expose the
same three functions with identical semantics, so results never depend on the
backend.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Sequence

import mpmath

from . import _purekernels

if os.environ.get("WEBRANK_FORCE_PURE"):
    _impl = _purekernels
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _purekernels
        BACKEND = "pure"

FLOAT_GAP = 16  # accepted and discarded pivots must clear the threshold by 2^4


def _integer_rows(rows: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators; row scaling keeps rank."""
    cleared: list[list[int]] = []
    scales: list[int] = []
    for row in rows:
        denlcm = 1
        for value in row:
            if isinstance(value, Fraction):
                denlcm = denlcm * value.denominator // math.gcd(
                    denlcm, value.denominator
                )
        cleared.append(
            [
                int(value * denlcm) if isinstance(value, Fraction) else value * denlcm
                for value in row
            ]
        )
        scales.append(denlcm)
    return cleared, scales


def exact_rank(rows: Sequence[Sequence]) -> tuple[int, list[tuple[int, int]]]:
    """Exact rank of a matrix with Fraction or int entries."""
    if not rows:
        return 0, []
    cleared, _ = _integer_rows(rows)
    return _impl.rank_int_rows(cleared)


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square matrix with Fraction or int entries."""
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ValueError("determinant requires a square matrix")
    if size == 0:
        return Fraction(1)
    cleared, scales = _integer_rows(rows)
    det = _impl.det_int_rows(cleared)
    out = Fraction(det)
    for scale in scales:
        out /= scale
    return out


def float_rank(
    rows: Sequence[Sequence], precision: int
) -> tuple[int, dict]:
    """Numerical rank at the given mantissa precision.

    The pivot threshold is 2^(-precision/2) times the largest pivot; the
    certificate records pivot magnitudes, the gap ratio used, and whether any
    decision was marginal (within 2^4 of the threshold on either side).
    """
    with mpmath.workprec(precision):
        copies = [[mpmath.mpf(v) for v in row] for row in rows]
        tol_ratio = mpmath.mpf(2) ** (-(precision // 2))
        rank, pivot_mags, max_discarded, marginal = _impl.rank_float_rows(
            copies, tol_ratio, FLOAT_GAP
        )
    certificate = {
        "pivot_magnitudes": [mpmath.nstr(p, 8) for p in pivot_mags],
        "largest_discarded": None
        if max_discarded is None
        else mpmath.nstr(max_discarded, 8),
        "tolerance_ratio": f"2^-{precision // 2}",
        "gap": FLOAT_GAP,
    }
    return rank, {"marginal": marginal, "certificate": certificate}


def exact_nullspace(rows: Sequence[Sequence], unknowns: int) -> list[list[Fraction]]:
    """Basis of the solution space of (rows) * x = 0 over the rationals.

    Not performance-critical: plain reduced row echelon over Fractions.
    """
    reduced = [[Fraction(v) for v in row] for row in rows]
    m = len(reduced)
    pivot_cols: list[int] = []
    r = 0
    for col in range(unknowns):
        pivot = next((i for i in range(r, m) if reduced[i][col] != 0), None)
        if pivot is None:
            continue
        reduced[r], reduced[pivot] = reduced[pivot], reduced[r]
        head = reduced[r][col]
        reduced[r] = [v / head for v in reduced[r]]
        for i in range(m):
            if i != r and reduced[i][col] != 0:
                factor = reduced[i][col]
                reduced[i] = [
                    a - factor * b for a, b in zip(reduced[i], reduced[r])
                ]
        pivot_cols.append(col)
        r += 1
    free_cols = [c for c in range(unknowns) if c not in pivot_cols]
    basis = []
    for free in free_cols:
        vector = [Fraction(0)] * unknowns
        vector[free] = Fraction(1)
        for row_idx, col in enumerate(pivot_cols):
            vector[col] = -reduced[row_idx][free]
        basis.append(vector)
    return basis

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from webrank import _purekernels, linalg

try:
    from webrank import _speedups
except ImportError:
    _speedups = None

BACKENDS = [("pure", _purekernels)] + (
    [("compiled", _speedups)] if _speedups is not None else []
)


def naive_rank(rows):
    """Oracle: plain Fraction row reduction, no pivot strategy tricks."""
    work = [[Fraction(v) for v in row] for row in rows]
    m = len(work)
    n = len(work[0]) if m else 0
    rank = 0
    for col in range(n):
        pivot = next((i for i in range(rank, m) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        head = work[rank][col]
        for i in range(rank + 1, m):
            factor = work[i][col] / head
            if factor:
                work[i] = [a - factor * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_rank_int_examples(name, impl):
    assert impl.rank_int_rows([[1, -1], [1, 1]])[0] == 2
    assert impl.rank_int_rows([[0, 0], [0, 0]])[0] == 0
    assert impl.rank_int_rows([[1, 2], [2, 4], [3, 6]])[0] == 1


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_det_int_examples(name, impl):
    assert impl.det_int_rows([[1, -1], [1, 1]]) == 2
    assert impl.det_int_rows([[2, 0], [0, 3]]) == 6
    assert impl.det_int_rows([[1, 2], [2, 4]]) == 0
    assert impl.det_int_rows([[0, 1], [1, 0]]) == -1
    assert impl.det_int_rows([]) == 1


matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda n: st.integers(min_value=1, max_value=6).flatmap(
        lambda m: st.lists(
            st.lists(
                st.fractions(min_value=-5, max_value=5, max_denominator=6),
                min_size=n,
                max_size=n,
            ),
            min_size=m,
            max_size=m,
        )
    )
)


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_exact_rank_matches_naive_oracle(rows):
    assert linalg.exact_rank(rows)[0] == naive_rank(rows)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_backends_agree(rows):
    cleared, _ = linalg._integer_rows(rows)
    results = {
        name: impl.rank_int_rows([row[:] for row in cleared])[0]
        for name, impl in BACKENDS
    }
    assert len(set(results.values())) == 1


square_matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda n: st.lists(
        st.lists(
            st.fractions(min_value=-4, max_value=4, max_denominator=5),
            min_size=n,
            max_size=n,
        ),
        min_size=n,
        max_size=n,
    )
)


def naive_det(rows):
    n = len(rows)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        sign = -1 if j % 2 else 1
        total += sign * Fraction(rows[0][j]) * naive_det(minor)
    return total


@settings(max_examples=40, deadline=None)
@given(square_matrices)
def test_exact_det_matches_cofactor_expansion(rows):
    assert linalg.exact_det(rows) == naive_det(rows)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_float_rank_agrees_with_exact_on_rationals(rows):
    exact = linalg.exact_rank(rows)[0]
    with mpmath.workprec(128):
        floats = [
            [mpmath.mpf(v.numerator) / v.denominator for v in row] for row in rows
        ]
    rank, info = linalg.float_rank(floats, 128)
    assert rank == exact
    assert not info["marginal"]


def test_float_rank_zero_matrix():
    rank, info = linalg.float_rank([[mpmath.mpf(0)] * 3] * 2, 128)
    assert rank == 0
    assert not info["marginal"]


def test_float_rank_flags_marginal_pivot():
    with mpmath.workprec(128):
        tiny = mpmath.mpf(2) ** -62  # between the threshold 2^-64 and 16*threshold
        rows = [[mpmath.mpf(1), mpmath.mpf(0)], [mpmath.mpf(0), tiny]]
    rank, info = linalg.float_rank(rows, 128)
    assert info["marginal"]


def test_exact_nullspace_known_kernel():
    # x + y + z = 0 has a 2-dimensional kernel
    rows = [[1, 1, 1]]
    basis = linalg.exact_nullspace(rows, 3)
    assert len(basis) == 2
    for vector in basis:
        assert sum(vector) == 0


@settings(max_examples=30, deadline=None)
@given(matrices)
def test_exact_nullspace_dimension_and_membership(rows):
    n = len(rows[0])
    basis = linalg.exact_nullspace(rows, n)
    assert len(basis) == n - linalg.exact_rank(rows)[0]
    for vector in basis:
        for row in rows:
            assert sum(Fraction(a) * b for a, b in zip(row, vector)) == 0


def test_integer_rows_clears_denominators():
    cleared, scales = linalg._integer_rows([[Fraction(1, 2), Fraction(1, 3)]])
    assert cleared == [[3, 2]]
    assert scales == [6]

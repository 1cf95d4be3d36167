"""Truncated multivariate polynomials and structural Taylor expansion.

A TruncatedPoly is a polynomial in n offset variables with all terms of total
degree above the cap discarded.  Taylor expansion walks the expression tree
once using this arithmetic; it never differentiates repeatedly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath

from .expr import (
    EvalError,
    Exp,
    Expr,
    IntPower,
    Log,
    Neg,
    Product,
    Quotient,
    RationalConst,
    Sum,
    Variable,
)
from .scalars import EXACT, Mode, to_scalar


class TruncatedPoly:
    """Sparse truncated polynomial: coeffs maps exponent tuples to scalars.

    All stored keys have total degree <= cap; zero coefficients are pruned.
    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("n", "cap", "coeffs")

    def __init__(self, n: int, cap: int, coeffs: dict[tuple[int, ...], object]):
        self.n = n
        self.cap = cap
        self.coeffs = coeffs

    @staticmethod
    def constant(n: int, cap: int, value) -> "TruncatedPoly":
        if value == 0:
            return TruncatedPoly(n, cap, {})
        return TruncatedPoly(n, cap, {(0,) * n: value})

    @property
    def constant_term(self):
        return self.coeffs.get((0,) * self.n, 0)

    def coefficient(self, key: tuple[int, ...], zero=0):
        return self.coeffs.get(key, zero)

    def _compatible(self, other: "TruncatedPoly") -> None:
        if self.n != other.n or self.cap != other.cap:
            raise ValueError("mismatched truncated-polynomial shapes")

    def add(self, other: "TruncatedPoly") -> "TruncatedPoly":
        self._compatible(other)
        coeffs = dict(self.coeffs)
        for key, value in other.coeffs.items():
            total = coeffs.get(key, 0) + value
            if total == 0:
                coeffs.pop(key, None)
            else:
                coeffs[key] = total
        return TruncatedPoly(self.n, self.cap, coeffs)

    def scale(self, factor) -> "TruncatedPoly":
        if factor == 0:
            return TruncatedPoly(self.n, self.cap, {})
        return TruncatedPoly(
            self.n, self.cap, {k: v * factor for k, v in self.coeffs.items()}
        )

    def negate(self) -> "TruncatedPoly":
        return TruncatedPoly(
            self.n, self.cap, {k: -v for k, v in self.coeffs.items()}
        )

    def mul(self, other: "TruncatedPoly") -> "TruncatedPoly":
        self._compatible(other)
        # bucket keys by total degree so pairs over the cap are skipped wholesale
        mine = _degree_buckets(self.coeffs)
        theirs = _degree_buckets(other.coeffs)
        coeffs: dict[tuple[int, ...], object] = {}
        for deg_a, bucket_a in mine.items():
            for deg_b, bucket_b in theirs.items():
                if deg_a + deg_b > self.cap:
                    continue
                for key_a, val_a in bucket_a:
                    for key_b, val_b in bucket_b:
                        key = tuple(a + b for a, b in zip(key_a, key_b))
                        total = coeffs.get(key, 0) + val_a * val_b
                        if total == 0:
                            coeffs.pop(key, None)
                        else:
                            coeffs[key] = total
        return TruncatedPoly(self.n, self.cap, coeffs)

    def power(self, exponent: int) -> "TruncatedPoly":
        if exponent < 0:
            return self.inverse().power(-exponent)
        result = TruncatedPoly.constant(self.n, self.cap, _one_like(self.coeffs))
        base = self
        remaining = exponent
        while remaining:
            if remaining & 1:
                result = result.mul(base)
            remaining >>= 1
            if remaining:
                base = base.mul(base)
        return result

    def drop_constant(self) -> "TruncatedPoly":
        key = (0,) * self.n
        if key not in self.coeffs:
            return self
        coeffs = dict(self.coeffs)
        del coeffs[key]
        return TruncatedPoly(self.n, self.cap, coeffs)

    def truncate(self, cap: int) -> "TruncatedPoly":
        if cap >= self.cap:
            return TruncatedPoly(self.n, cap, dict(self.coeffs))
        return TruncatedPoly(
            self.n, cap, {k: v for k, v in self.coeffs.items() if sum(k) <= cap}
        )

    def powers(self, m_max: int) -> list["TruncatedPoly"]:
        """[self^1, ..., self^m_max], each truncated at the cap."""
        out = [self]
        for _ in range(1, m_max):
            out.append(out[-1].mul(self))
        return out

    def compose_series(self, series: Sequence) -> "TruncatedPoly":
        """sum series[m] * self^m for a one-variable series; needs zero constant term."""
        if self.constant_term != 0:
            raise ValueError("composition requires a zero constant term")
        result = TruncatedPoly.constant(self.n, self.cap, series[0])
        if len(series) > 1:
            for coeff, pw in zip(series[1:], self.powers(len(series) - 1)):
                if coeff != 0:
                    result = result.add(pw.scale(coeff))
        return result

    def inverse(self) -> "TruncatedPoly":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term
        if c0 == 0:
            raise EvalError("expansion point is singular (zero constant term)")
        # 1/(c0 (1 + u)) = (1/c0) sum (-u)^m with u = (self - c0)/c0
        tail = self.drop_constant().scale(-(_one_like(self.coeffs) / c0))
        series = [_one_like(self.coeffs) / c0] * (self.cap + 1)
        return tail.compose_series(series)

    def __repr__(self) -> str:
        terms = ", ".join(
            f"{key}: {value}" for key, value in sorted(self.coeffs.items())
        )
        return f"TruncatedPoly(n={self.n}, cap={self.cap}, {{{terms}}})"


def _degree_buckets(coeffs: dict) -> dict[int, list]:
    buckets: dict[int, list] = {}
    for key, value in coeffs.items():
        buckets.setdefault(sum(key), []).append((key, value))
    return buckets


def _one_like(coeffs: dict):
    for value in coeffs.values():
        if isinstance(value, Fraction):
            return Fraction(1)
        if isinstance(value, int):
            return Fraction(1)
        return mpmath.mpf(1)
    return Fraction(1)


def taylor(e: Expr, point: Sequence, cap: int, mode: Mode = EXACT) -> TruncatedPoly:
    """Taylor expansion of e at point with all terms of total degree <= cap.

    The expansion variables are the offsets (x_j - point[j-1]).  Exact mode
    requires a tree free of exp/log; poles at the expansion point raise
    EvalError.
    """
    if cap < 0:
        raise ValueError(f"degree cap must be >= 0, got {cap}")
    if mode.is_exact:
        scalars = tuple(Fraction(v) for v in point)
        return _taylor(e, scalars, cap, mode)
    with mode.workprec():
        scalars = tuple(to_scalar(Fraction(v), mode) for v in point)
        return _taylor(e, scalars, cap, mode)


def _taylor(e: Expr, point: tuple, cap: int, mode: Mode) -> TruncatedPoly:
    n = len(point)
    if isinstance(e, Variable):
        if e.index > n:
            raise EvalError(f"point of length {n} cannot feed variable x{e.index}")
        coeffs: dict[tuple[int, ...], object] = {}
        value = point[e.index - 1]
        if value != 0:
            coeffs[(0,) * n] = value
        if cap >= 1:
            key = tuple(1 if j == e.index - 1 else 0 for j in range(n))
            coeffs[key] = _unit_scalar(mode)
        return TruncatedPoly(n, cap, coeffs)
    if isinstance(e, RationalConst):
        return TruncatedPoly.constant(n, cap, to_scalar(e.value, mode))
    if isinstance(e, Sum):
        result = TruncatedPoly(n, cap, {})
        for term in e.terms:
            result = result.add(_taylor(term, point, cap, mode))
        return result
    if isinstance(e, Product):
        result = TruncatedPoly.constant(n, cap, _unit_scalar(mode))
        for factor in e.factors:
            result = result.mul(_taylor(factor, point, cap, mode))
        return result
    if isinstance(e, Quotient):
        num = _taylor(e.numerator, point, cap, mode)
        den = _taylor(e.denominator, point, cap, mode)
        return num.mul(den.inverse())
    if isinstance(e, Neg):
        return _taylor(e.child, point, cap, mode).negate()
    if isinstance(e, IntPower):
        return _taylor(e.base, point, cap, mode).power(e.exponent)
    if isinstance(e, Exp):
        if mode.is_exact:
            raise EvalError("exact mode cannot expand exp/log nodes")
        child = _taylor(e.child, point, cap, mode)
        scale = mpmath.exp(child.constant_term)
        series = [scale]
        for m in range(1, cap + 1):
            series.append(series[-1] / m)
        return child.drop_constant().compose_series(series)
    if isinstance(e, Log):
        if mode.is_exact:
            raise EvalError("exact mode cannot expand exp/log nodes")
        child = _taylor(e.child, point, cap, mode)
        c0 = child.constant_term
        if c0 <= 0:
            raise EvalError("log of a non-positive value at the expansion point")
        series = [mpmath.log(c0)]
        sign = 1
        for m in range(1, cap + 1):
            series.append(sign / (m * c0**m))
            sign = -sign
        return child.drop_constant().compose_series(series)
    raise TypeError(f"not an expression node: {e!r}")


def _unit_scalar(mode: Mode):
    return Fraction(1) if mode.is_exact else mpmath.mpf(1)

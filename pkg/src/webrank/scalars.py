"""Scalar models shared by the whole toolkit.

Two models: exact rationals (fractions.Fraction over Python big ints) and
arbitrary-precision binary floats (mpmath, configurable mantissa).  Exact is
the default wherever the inputs are free of exp/log.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

DEFAULT_PRECISION = 128


@dataclass(frozen=True)
class Mode:
    """Scalar model selector: kind is "exact" or "float" (with mantissa bits)."""

    kind: str
    precision: int = 0

    @staticmethod
    def exact() -> "Mode":
        return Mode("exact")

    @staticmethod
    def floating(precision: int = DEFAULT_PRECISION) -> "Mode":
        if precision < 8:
            raise ValueError(f"float precision too small: {precision}")
        return Mode("float", precision)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def label(self) -> str:
        return "exact" if self.is_exact else f"float{self.precision}"

    def workprec(self):
        """mpmath context manager for this mode's precision (float mode only)."""
        if self.is_exact:
            raise ValueError("workprec is only meaningful in float mode")
        return mpmath.workprec(self.precision)

    def escalate(self) -> "Mode":
        """Next precision level for marginal-pivot retries (doubles the mantissa)."""
        if self.is_exact:
            return self
        return Mode.floating(self.precision * 2)


EXACT = Mode.exact()


def to_scalar(value: Fraction | int, mode: Mode):
    """Convert an exact rational to the mode's scalar type."""
    if mode.is_exact:
        return value if isinstance(value, Fraction) else Fraction(value)
    frac = Fraction(value)
    with mode.workprec():
        return mpmath.mpf(frac.numerator) / frac.denominator


def scalar_is_zero(value, mode: Mode) -> bool:
    """Zero test: exact equality, or magnitude below 2^(-precision/2)."""
    if mode.is_exact:
        return value == 0
    with mode.workprec():
        return abs(value) <= mpmath.mpf(2) ** (-(mode.precision // 2))


def scalar_to_str(value) -> str:
    """Serialize a scalar for reports: "p/q" for rationals, decimal for floats."""
    if isinstance(value, (int, Fraction)):
        return str(value)
    return mpmath.nstr(value, 24)

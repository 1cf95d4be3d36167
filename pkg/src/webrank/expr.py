"""Expression trees for first integrals.

The node set is deliberately small: rational constants, indexed variables,
sums, products, quotients, negation, integer powers, exp and log.  Trees are
immutable; construction goes through the folding constructors below, which
flatten nested sums/products and evaluate constant subexpressions, but never
reassociate or otherwise simplify.

The text grammar (parse/to_text) is a stable interface: variables x1..xN,
integer and decimal literals, + - * / ^ with the usual precedence
(^ binds tighter than unary minus, which binds tighter than * and /),
^ right-associative with integer-literal exponents, exp(...) and log(...).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .scalars import EXACT, Mode, scalar_is_zero


class ExprError(Exception):
    """Base class for expression-level failures."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(ExprError):
    """A pole, a log of a non-positive value, or a scalar-model mismatch."""


class Expr:
    """Base class for expression nodes; concrete nodes are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Variable(Expr):
    index: int  # 1-based


@dataclass(frozen=True, slots=True)
class RationalConst(Expr):
    value: Fraction


@dataclass(frozen=True, slots=True)
class Sum(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Product(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Quotient(Expr):
    numerator: Expr
    denominator: Expr


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True, slots=True)
class IntPower(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, slots=True)
class Exp(Expr):
    child: Expr


@dataclass(frozen=True, slots=True)
class Log(Expr):
    child: Expr


# ---------------------------------------------------------------------------
# folding constructors

def rational(value) -> RationalConst:
    return RationalConst(Fraction(value))


_ZERO = rational(0)
_ONE = rational(1)


def var(index: int) -> Variable:
    if index < 1:
        raise ValueError(f"variable index must be >= 1, got {index}")
    return Variable(index)


def sum_of(terms: Iterable[Expr]) -> Expr:
    """Sum with flattening of nested sums and merging of constant terms."""
    flat: list[Expr] = []
    const = Fraction(0)
    for term in terms:
        if isinstance(term, Sum):
            for sub in term.terms:
                if isinstance(sub, RationalConst):
                    const += sub.value
                else:
                    flat.append(sub)
        elif isinstance(term, RationalConst):
            const += term.value
        else:
            flat.append(term)
    if not flat:
        return rational(const)
    if const != 0:
        flat.append(rational(const))
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def sub(left: Expr, right: Expr) -> Expr:
    return sum_of([left, neg(right)])


def product_of(factors: Iterable[Expr]) -> Expr:
    """Product with flattening, constant folding, and 0/1 absorption."""
    flat: list[Expr] = []
    const = Fraction(1)
    for factor in factors:
        if isinstance(factor, Product):
            for sub_ in factor.factors:
                if isinstance(sub_, RationalConst):
                    const *= sub_.value
                else:
                    flat.append(sub_)
        elif isinstance(factor, RationalConst):
            const *= factor.value
        else:
            flat.append(factor)
    if const == 0:
        return _ZERO
    if not flat:
        return rational(const)
    if const != 1:
        flat.insert(0, rational(const))
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def quotient(numerator: Expr, denominator: Expr) -> Expr:
    if isinstance(denominator, RationalConst):
        if denominator.value == 0:
            raise ZeroDivisionError("division by constant zero")
        return product_of([numerator, rational(1 / denominator.value)])
    if isinstance(numerator, RationalConst) and numerator.value == 0:
        return _ZERO
    return Quotient(numerator, denominator)


def neg(e: Expr) -> Expr:
    if isinstance(e, RationalConst):
        return rational(-e.value)
    if isinstance(e, Neg):
        return e.child
    return Neg(e)


def int_power(base: Expr, exponent: int) -> Expr:
    if not isinstance(exponent, int):
        raise TypeError(f"exponent must be an integer, got {exponent!r}")
    if exponent == 0:
        return _ONE
    if exponent == 1:
        return base
    if isinstance(base, RationalConst):
        if base.value == 0 and exponent < 0:
            raise ZeroDivisionError("zero raised to a negative power")
        return rational(base.value**exponent)
    return IntPower(base, exponent)


def exp_of(e: Expr) -> Expr:
    return Exp(e)


def log_of(e: Expr) -> Expr:
    return Log(e)


# ---------------------------------------------------------------------------
# structural queries

def max_var_index(e: Expr) -> int:
    """Largest variable index syntactically present (0 for constant trees)."""
    if isinstance(e, Variable):
        return e.index
    if isinstance(e, RationalConst):
        return 0
    if isinstance(e, Sum):
        return max(max_var_index(t) for t in e.terms)
    if isinstance(e, Product):
        return max(max_var_index(f) for f in e.factors)
    if isinstance(e, Quotient):
        return max(max_var_index(e.numerator), max_var_index(e.denominator))
    if isinstance(e, (Neg, Exp, Log)):
        return max_var_index(e.child)
    if isinstance(e, IntPower):
        return max_var_index(e.base)
    raise TypeError(f"not an expression node: {e!r}")


def has_transcendental(e: Expr) -> bool:
    """True if the tree contains an exp or log node."""
    if isinstance(e, (Exp, Log)):
        return True
    if isinstance(e, Sum):
        return any(has_transcendental(t) for t in e.terms)
    if isinstance(e, Product):
        return any(has_transcendental(f) for f in e.factors)
    if isinstance(e, Quotient):
        return has_transcendental(e.numerator) or has_transcendental(e.denominator)
    if isinstance(e, Neg):
        return has_transcendental(e.child)
    if isinstance(e, IntPower):
        return has_transcendental(e.base)
    return False


def substitute(e: Expr, mapping: dict[int, Expr]) -> Expr:
    """Replace each Variable(j) with mapping[j]; unmapped variables stay."""
    if isinstance(e, Variable):
        return mapping.get(e.index, e)
    if isinstance(e, RationalConst):
        return e
    if isinstance(e, Sum):
        return sum_of(substitute(t, mapping) for t in e.terms)
    if isinstance(e, Product):
        return product_of(substitute(f, mapping) for f in e.factors)
    if isinstance(e, Quotient):
        return quotient(
            substitute(e.numerator, mapping), substitute(e.denominator, mapping)
        )
    if isinstance(e, Neg):
        return neg(substitute(e.child, mapping))
    if isinstance(e, IntPower):
        return int_power(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Exp):
        return exp_of(substitute(e.child, mapping))
    if isinstance(e, Log):
        return log_of(substitute(e.child, mapping))
    raise TypeError(f"not an expression node: {e!r}")


def relabel(e: Expr, positions: Sequence[int]) -> Expr:
    """Send the j-th formal variable to Variable(positions[j-1])."""
    return substitute(e, {j + 1: Variable(p) for j, p in enumerate(positions)})


# ---------------------------------------------------------------------------
# differentiation

def diff(e: Expr, j: int) -> Expr:
    """Symbolic partial derivative with respect to variable j, folded."""
    if j < 1:
        raise ValueError(f"variable index must be >= 1, got {j}")
    if isinstance(e, Variable):
        return _ONE if e.index == j else _ZERO
    if isinstance(e, RationalConst):
        return _ZERO
    if isinstance(e, Sum):
        return sum_of(diff(t, j) for t in e.terms)
    if isinstance(e, Product):
        terms = []
        for i, factor in enumerate(e.factors):
            dfactor = diff(factor, j)
            if isinstance(dfactor, RationalConst) and dfactor.value == 0:
                continue
            terms.append(
                product_of([*e.factors[:i], dfactor, *e.factors[i + 1 :]])
            )
        return sum_of(terms)
    if isinstance(e, Quotient):
        num, den = e.numerator, e.denominator
        top = sum_of(
            [
                product_of([diff(num, j), den]),
                neg(product_of([num, diff(den, j)])),
            ]
        )
        return quotient(top, int_power(den, 2))
    if isinstance(e, Neg):
        return neg(diff(e.child, j))
    if isinstance(e, IntPower):
        return product_of(
            [rational(e.exponent), int_power(e.base, e.exponent - 1), diff(e.base, j)]
        )
    if isinstance(e, Exp):
        return product_of([e, diff(e.child, j)])
    if isinstance(e, Log):
        return quotient(diff(e.child, j), e.child)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: Expr, point: Sequence, mode: Mode = EXACT):
    """Value of e at point (point[j-1] feeds Variable(j)).

    Exact mode returns a Fraction and rejects exp/log nodes; float mode
    returns an mpf computed at the mode's precision.
    """
    if mode.is_exact:
        return _eval_exact(e, point)
    with mode.workprec():
        converted = tuple(_to_mpf(v) for v in point)
        return _eval_float(e, converted)


def _to_mpf(value):
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def _point_value(point: Sequence, index: int):
    if index > len(point):
        raise EvalError(f"point of length {len(point)} cannot feed variable x{index}")
    return point[index - 1]


def _eval_exact(e: Expr, point: Sequence) -> Fraction:
    if isinstance(e, Variable):
        return Fraction(_point_value(point, e.index))
    if isinstance(e, RationalConst):
        return e.value
    if isinstance(e, Sum):
        return sum(_eval_exact(t, point) for t in e.terms)
    if isinstance(e, Product):
        out = Fraction(1)
        for f in e.factors:
            out *= _eval_exact(f, point)
        return out
    if isinstance(e, Quotient):
        den = _eval_exact(e.denominator, point)
        if den == 0:
            raise EvalError("division by zero")
        return _eval_exact(e.numerator, point) / den
    if isinstance(e, Neg):
        return -_eval_exact(e.child, point)
    if isinstance(e, IntPower):
        base = _eval_exact(e.base, point)
        if base == 0 and e.exponent < 0:
            raise EvalError("division by zero")
        return base**e.exponent
    if isinstance(e, (Exp, Log)):
        raise EvalError("exact mode cannot evaluate exp/log nodes")
    raise TypeError(f"not an expression node: {e!r}")


def _eval_float(e: Expr, point: tuple):
    if isinstance(e, Variable):
        return _point_value(point, e.index)
    if isinstance(e, RationalConst):
        return _to_mpf(e.value)
    if isinstance(e, Sum):
        out = mpmath.mpf(0)
        for t in e.terms:
            out += _eval_float(t, point)
        return out
    if isinstance(e, Product):
        out = mpmath.mpf(1)
        for f in e.factors:
            out *= _eval_float(f, point)
        return out
    if isinstance(e, Quotient):
        den = _eval_float(e.denominator, point)
        if den == 0:
            raise EvalError("division by zero")
        return _eval_float(e.numerator, point) / den
    if isinstance(e, Neg):
        return -_eval_float(e.child, point)
    if isinstance(e, IntPower):
        base = _eval_float(e.base, point)
        if base == 0 and e.exponent < 0:
            raise EvalError("division by zero")
        return base**e.exponent
    if isinstance(e, Exp):
        return mpmath.exp(_eval_float(e.child, point))
    if isinstance(e, Log):
        arg = _eval_float(e.child, point)
        if arg <= 0:
            raise EvalError("log of a non-positive value")
        return mpmath.log(arg)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# used-variable detection

_ZERO_TEST_SEED = 0x7EB5
_ZERO_TEST_POINTS = 8


def _zero_test_points(n: int) -> list[tuple[Fraction, ...]]:
    rng = random.Random(_ZERO_TEST_SEED)
    points = []
    for _ in range(_ZERO_TEST_POINTS):
        coords = []
        for _ in range(n):
            den = rng.randint(1, 64)
            num = rng.randint(-3 * den, 3 * den)
            coords.append(Fraction(num, den))
        points.append(tuple(coords))
    return points


def vars_used(e: Expr) -> set[int]:
    """Indices j whose partial derivative is not identically zero.

    A folded derivative that is not the literal zero constant is evaluated at
    8 seeded rational sample points and declared zero only if every sample is
    zero.  Sample points where the derivative has a pole are skipped (a
    function with a pole is not identically zero, so such a variable counts
    as used when no sample point evaluates).
    """
    top = max_var_index(e)
    if top == 0:
        return set()
    points = _zero_test_points(top)
    used: set[int] = set()
    for j in range(1, top + 1):
        derivative = diff(e, j)
        if isinstance(derivative, RationalConst):
            if derivative.value != 0:
                used.add(j)
            continue
        mode = (
            Mode.floating() if has_transcendental(derivative) else EXACT
        )
        evaluated_any = False
        for point in points:
            try:
                value = evaluate(derivative, point, mode)
            except EvalError:
                continue
            evaluated_any = True
            if not scalar_is_zero(value, mode):
                used.add(j)
                break
        else:
            if not evaluated_any:
                used.add(j)
    return used


# ---------------------------------------------------------------------------
# printing

_LEVEL_SUM = 1
_LEVEL_TERM = 2
_LEVEL_UNARY = 3
_LEVEL_POWER = 4
_LEVEL_ATOM = 5


def _node_level(e: Expr) -> int:
    if isinstance(e, Sum):
        return _LEVEL_SUM
    if isinstance(e, (Product, Quotient)):
        return _LEVEL_TERM
    if isinstance(e, Neg):
        return _LEVEL_UNARY
    if isinstance(e, IntPower):
        return _LEVEL_POWER
    return _LEVEL_ATOM


def _render(e: Expr, min_level: int) -> str:
    text = _render_bare(e)
    if _node_level(e) < min_level:
        return f"({text})"
    return text


def _render_bare(e: Expr) -> str:
    if isinstance(e, Variable):
        return f"x{e.index}"
    if isinstance(e, RationalConst):
        return str(e.value)
    if isinstance(e, Sum):
        parts = [_render(e.terms[0], _LEVEL_TERM)]
        for term in e.terms[1:]:
            if isinstance(term, Neg):
                parts.append(f" - {_render(term.child, _LEVEL_UNARY)}")
            elif isinstance(term, RationalConst) and term.value < 0:
                parts.append(f" - {-term.value}")
            else:
                parts.append(f" + {_render(term, _LEVEL_TERM)}")
        return "".join(parts)
    if isinstance(e, Product):
        return "*".join(_render(f, _LEVEL_UNARY) for f in e.factors)
    if isinstance(e, Quotient):
        return (
            f"{_render(e.numerator, _LEVEL_TERM)}/"
            f"{_render(e.denominator, _LEVEL_UNARY)}"
        )
    if isinstance(e, Neg):
        return f"-{_render(e.child, _LEVEL_POWER)}"
    if isinstance(e, IntPower):
        exponent = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_render(e.base, _LEVEL_ATOM)}^{exponent}"
    if isinstance(e, Exp):
        return f"exp({_render(e.child, _LEVEL_SUM)})"
    if isinstance(e, Log):
        return f"log({_render(e.child, _LEVEL_SUM)})"
    raise TypeError(f"not an expression node: {e!r}")


def to_text(e: Expr) -> str:
    """Grammar-conformant rendering; parse(to_text(e)) reproduces e."""
    return _render(e, 0)


# ---------------------------------------------------------------------------
# parsing

_MAX_EXPONENT = 1_000_000


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < length and text[i].isdigit():
                i += 1
            if i + 1 < length and text[i] == "." and text[i + 1].isdigit():
                i += 1
                while i < length and text[i].isdigit():
                    i += 1
            tokens.append(_Token("number", text[start:i], start))
            continue
        if ch.isalpha():
            start = i
            while i < length and text[i].isalnum():
                i += 1
            tokens.append(_Token("ident", text[start:i], start))
            continue
        if ch in "+-*/^()":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", length))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], arity: int):
        self.tokens = tokens
        self.arity = arity
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def expect(self, kind: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {token.text or 'end of input'!r}", token.pos
            )
        return self.advance()

    def expression(self) -> Expr:
        result = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            rhs = self.term()
            result = sum_of([result, rhs if op.kind == "+" else neg(rhs)])
        return result

    def term(self) -> Expr:
        result = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.kind == "*":
                result = product_of([result, rhs])
            else:
                try:
                    result = quotient(result, rhs)
                except ZeroDivisionError:
                    raise ParseError("division by constant zero", op.pos) from None
        return result

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "^":
            op = self.advance()
            exponent = self.exponent()
            try:
                return int_power(base, exponent)
            except ZeroDivisionError:
                raise ParseError("zero raised to a negative power", op.pos) from None
        return base

    def exponent(self) -> int:
        token = self.peek()
        if token.kind == "(":
            self.advance()
            value = self.exponent()
            self.expect(")")
            return value
        sign = 1
        if token.kind == "-":
            self.advance()
            sign = -1
            token = self.peek()
        if token.kind != "number" or "." in token.text:
            raise ParseError("exponent must be an integer literal", token.pos)
        self.advance()
        value = sign * int(token.text)
        if self.peek().kind == "^":
            caret = self.advance()
            upper = self.exponent()
            if upper < 0:
                raise ParseError("exponent tower is not an integer", caret.pos)
            value = value**upper
        if abs(value) > _MAX_EXPONENT:
            raise ParseError(f"exponent exceeds {_MAX_EXPONENT}", token.pos)
        return value

    def atom(self) -> Expr:
        token = self.peek()
        if token.kind == "number":
            self.advance()
            return rational(Fraction(token.text))
        if token.kind == "ident":
            self.advance()
            name = token.text
            if name in ("exp", "log"):
                self.expect("(")
                inner = self.expression()
                self.expect(")")
                return exp_of(inner) if name == "exp" else log_of(inner)
            if name[0] == "x" and len(name) > 1 and name[1:].isdigit():
                index = int(name[1:])
                if index < 1:
                    raise ParseError("variable index must be >= 1", token.pos)
                if index > self.arity:
                    raise ParseError(
                        f"variable {name} exceeds arity {self.arity}", token.pos
                    )
                return Variable(index)
            raise ParseError(f"unknown identifier {name!r}", token.pos)
        if token.kind == "(":
            self.advance()
            inner = self.expression()
            self.expect(")")
            return inner
        raise ParseError(
            f"expected a value, found {token.text or 'end of input'!r}", token.pos
        )


def parse(text: str, arity: int) -> Expr:
    """Parse a first-integral expression over variables x1..x<arity>."""
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}")
    parser = _Parser(_tokenize(text), arity)
    result = parser.expression()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected {trailing.text!r} after expression", trailing.pos)
    return result

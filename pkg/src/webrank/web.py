"""Balanced sets of generating webs and their assembled pullback webs.

A balanced set E of order k0 holds one generating web per arity k = 1..k0,
the k-ary web carrying monomial_count(k, k0-k) first integrals.  Pulling every
integral back along every coordinate projection of n-space and superposing
yields the assembled web of E in dimension n, whose entry count is
monomial_count(n, k0).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .combin import binom, monomial_count
from .expr import (
    EvalError,
    Expr,
    diff,
    evaluate,
    has_transcendental,
    max_var_index,
    parse,
    rational,
    relabel,
    substitute,
    to_text,
    vars_used,
)
from .report import FALSE, INCONCLUSIVE, TRUE, VerificationReport, combine_verdicts
from .scalars import DEFAULT_PRECISION, EXACT, Mode, scalar_is_zero


@dataclass(frozen=True)
class GeneratingWeb:
    """A web on k-space given by an ordered tuple of first integrals."""

    k: int
    integrals: tuple[Expr, ...]


@dataclass(frozen=True)
class BalancedSet:
    """Candidate balanced set: one generating web per arity 1..k0."""

    k0: int
    webs: tuple[GeneratingWeb, ...]

    def generating_web(self, k: int) -> GeneratingWeb:
        if not 1 <= k <= self.k0:
            raise ValueError(f"no generating web of arity {k} (k0={self.k0})")
        return self.webs[k - 1]

    def all_integrals(self) -> list[Expr]:
        return [u for web in self.webs for u in web.integrals]

    def is_rational(self) -> bool:
        return not any(has_transcendental(u) for u in self.all_integrals())

    def default_mode(self, precision: int = DEFAULT_PRECISION) -> Mode:
        """Exact when every integral is exp/log-free, else extended floats."""
        return EXACT if self.is_rational() else Mode.floating(precision)


def balanced_set(k0: int, webs_integrals: Sequence[Sequence[Expr]]) -> BalancedSet:
    """Assemble a BalancedSet from per-arity integral lists (index 0 is arity 1)."""
    if k0 < 2:
        raise ValueError(f"k0 must be >= 2, got {k0}")
    if len(webs_integrals) != k0:
        raise ValueError(f"expected {k0} generating webs, got {len(webs_integrals)}")
    webs = tuple(
        GeneratingWeb(k=k, integrals=tuple(integrals))
        for k, integrals in enumerate(webs_integrals, start=1)
    )
    return BalancedSet(k0=k0, webs=webs)


@dataclass(frozen=True)
class WebEntry:
    """One assembled first integral with its (k, a, b) label and source indices."""

    label: tuple[int, int, int]
    integral: Expr
    source: tuple[int, ...]


@dataclass(frozen=True)
class AssembledWeb:
    """The superposed pullback web in dimension n, entries in (k, a, b) order."""

    n: int
    entries: tuple[WebEntry, ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def integrals(self) -> list[Expr]:
        return [entry.integral for entry in self.entries]


def multi_indices(k: int, n: int) -> list[tuple[int, ...]]:
    """All strictly increasing k-tuples from {1..n}, lexicographically."""
    if not 1 <= k <= n:
        raise ValueError(f"multi_indices requires 1 <= k <= n, got k={k}, n={n}")
    return list(itertools.combinations(range(1, n + 1), k))


def assemble(E: BalancedSet, n: int) -> AssembledWeb:
    """Superpose the pullbacks of every generating web along every projection.

    Only arities k <= n contribute.  The entry count always equals
    monomial_count(n, k0).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    entries = []
    for k in range(1, min(n, E.k0) + 1):
        web = E.generating_web(k)
        for a, index in enumerate(multi_indices(k, n), start=1):
            for b, integral in enumerate(web.integrals, start=1):
                entries.append(
                    WebEntry(
                        label=(k, a, b),
                        integral=relabel(integral, index),
                        source=index,
                    )
                )
    assembled = AssembledWeb(n=n, entries=tuple(entries))
    expected = monomial_count(n, E.k0)
    if assembled.size != expected:
        raise AssertionError(
            f"assembled web has {assembled.size} entries, expected {expected}"
        )
    return assembled


# ---------------------------------------------------------------------------
# differential helpers shared with the jet and rank layers

def gradient_at(e: Expr, n: int, point: Sequence, mode: Mode):
    """The n partial derivatives of e evaluated at point."""
    return [evaluate(diff(e, j), point, mode) for j in range(1, n + 1)]


def gradients_proportional(g1, g2, mode: Mode) -> bool:
    """True when all 2x2 minors of the two gradient vectors vanish."""
    n = len(g1)
    if mode.is_exact:
        return all(
            g1[i] * g2[j] - g1[j] * g2[i] == 0
            for i in range(n)
            for j in range(i + 1, n)
        )
    scale = max(abs(v) for v in g1) * max(abs(v) for v in g2)
    if scale == 0:
        return True
    return all(
        scalar_is_zero((g1[i] * g2[j] - g1[j] * g2[i]) / scale, mode)
        for i in range(n)
        for j in range(i + 1, n)
    )


def web_gradients(W: AssembledWeb, point: Sequence, mode: Mode):
    """Gradient of every entry at point; EvalError is tagged with the label."""
    out = []
    for entry in W.entries:
        try:
            out.append(gradient_at(entry.integral, W.n, point, mode))
        except EvalError as err:
            raise EvalError(f"entry {entry.label}: {err}") from None
    return out


# ---------------------------------------------------------------------------
# validation

def validate_balanced(
    E: BalancedSet, n_check: int, sampler
) -> VerificationReport:
    """Check the balanced-set definition and the web condition at one dimension.

    (a) each generating web carries monomial_count(k, k0-k) integrals;
    (b) every integral explicitly uses all of its k variables;
    (c) at a sampled generic point of n_check-space, the differentials of all
        assembled entries are pairwise non-proportional.
    """
    checks: list[dict] = []
    verdicts: list[str] = []
    mode = E.default_mode()

    for k in range(1, E.k0 + 1):
        web = E.generating_web(k)
        expected = monomial_count(k, E.k0 - k)
        ok = len(web.integrals) == expected
        checks.append(
            {
                "check": "cardinality",
                "k": k,
                "expected": expected,
                "actual": len(web.integrals),
                "verdict": TRUE if ok else FALSE,
            }
        )
        verdicts.append(TRUE if ok else FALSE)
        for b, integral in enumerate(web.integrals, start=1):
            used = vars_used(integral)
            ok = used == set(range(1, k + 1))
            checks.append(
                {
                    "check": "all_variables_used",
                    "k": k,
                    "b": b,
                    "used": sorted(used),
                    "verdict": TRUE if ok else FALSE,
                }
            )
            verdicts.append(TRUE if ok else FALSE)

    if combine_verdicts(verdicts) == TRUE:
        verdicts.append(_web_condition(E, n_check, sampler, mode, checks))
    else:
        checks.append(
            {
                "check": "web_condition",
                "n": n_check,
                "verdict": INCONCLUSIVE,
                "reason": "structural checks failed",
            }
        )
        verdicts.append(INCONCLUSIVE)

    return VerificationReport(
        name="validate_balanced",
        verdict=combine_verdicts(verdicts),
        checks=checks,
        witnesses={"n_check": n_check, "seed": sampler.seed, "mode": mode.label()},
    )


def _web_condition(E, n_check, sampler, mode, checks) -> str:
    W = assemble(E, n_check)
    for _ in range(sampler.max_retries):
        point = sampler.point(n_check)
        try:
            gradients = web_gradients(W, point, mode)
        except EvalError:
            continue
        if any(all(v == 0 for v in g) for g in gradients):
            continue
        failures = []
        for i in range(len(gradients)):
            for j in range(i + 1, len(gradients)):
                if gradients_proportional(gradients[i], gradients[j], mode):
                    failures.append(
                        [list(W.entries[i].label), list(W.entries[j].label)]
                    )
        checks.append(
            {
                "check": "web_condition",
                "n": n_check,
                "point": [str(c) for c in point],
                "proportional_pairs": failures,
                "verdict": TRUE if not failures else FALSE,
            }
        )
        return TRUE if not failures else FALSE
    checks.append(
        {
            "check": "web_condition",
            "n": n_check,
            "verdict": INCONCLUSIVE,
            "reason": f"no generic point found in {sampler.max_retries} attempts",
        }
    )
    return INCONCLUSIVE


def is_quasi_symmetric(E: BalancedSet, trials: int, sampler) -> dict[int, bool]:
    """Per-arity verdicts: is each generating web invariant under permutations?

    For every adjacent transposition, each permuted integral must define a
    foliation already present in the web, tested by gradient proportionality
    at `trials` sampled points.  Heuristic: a sampled "yes" is a
    probably-yes.
    """
    out: dict[int, bool] = {}
    mode = E.default_mode()
    for k in range(1, E.k0 + 1):
        web = E.generating_web(k)
        if k == 1:
            out[k] = True
            continue
        invariant = True
        for swap_at in range(1, k):
            positions = list(range(1, k + 1))
            positions[swap_at - 1], positions[swap_at] = (
                positions[swap_at],
                positions[swap_at - 1],
            )
            for integral in web.integrals:
                permuted = relabel(integral, positions)
                if not _foliation_present(permuted, web, k, trials, sampler, mode):
                    invariant = False
                    break
            if not invariant:
                break
        out[k] = invariant
    return out


def _foliation_present(candidate, web, k, trials, sampler, mode) -> bool:
    points = []
    attempts = 0
    while len(points) < trials and attempts < sampler.max_retries:
        attempts += 1
        point = sampler.point(k)
        try:
            gradient_at(candidate, k, point, mode)
            for member in web.integrals:
                gradient_at(member, k, point, mode)
        except EvalError:
            continue
        points.append(point)
    if not points:
        return False
    for member in web.integrals:
        if all(
            gradients_proportional(
                gradient_at(candidate, k, p, mode),
                gradient_at(member, k, p, mode),
                mode,
            )
            for p in points
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# generated families

def cross_ratio_family(f: Expr, marks: Sequence) -> BalancedSet:
    """Balanced set generated by specializing trailing arguments of f to marks.

    f has arity k0; marks is a list of k0-1 distinct finite rationals.  The
    arity-k web consists of f with every increasing choice of k0-k marks
    substituted for its last k0-k variables.
    """
    k0 = max_var_index(f)
    if k0 < 2:
        raise ValueError("generator must use at least two variables")
    mark_values = [Fraction(m) for m in marks]
    if len(mark_values) != k0 - 1:
        raise ValueError(
            f"need exactly {k0 - 1} marks for a generator of arity {k0}, "
            f"got {len(mark_values)}"
        )
    if len(set(mark_values)) != len(mark_values):
        raise ValueError("marks must be pairwise distinct")
    webs: list[list[Expr]] = []
    for k in range(1, k0 + 1):
        integrals = []
        for chosen in itertools.combinations(range(k0 - 1), k0 - k):
            mapping = {
                k + 1 + slot: rational(mark_values[i])
                for slot, i in enumerate(chosen)
            }
            integrals.append(substitute(f, mapping))
        expected = binom(k0 - 1, k0 - k)
        if len(integrals) != expected:
            raise AssertionError(
                f"arity {k}: generated {len(integrals)} integrals, expected {expected}"
            )
        webs.append(integrals)
    return balanced_set(k0, webs)


# ---------------------------------------------------------------------------
# web-definition files

def balanced_set_to_json(E: BalancedSet) -> dict:
    """{"k0": ..., "webs": [[expression strings] per arity 1..k0]}."""
    return {
        "k0": E.k0,
        "webs": [[to_text(u) for u in web.integrals] for web in E.webs],
    }


def balanced_set_from_json(obj: dict) -> BalancedSet:
    if not isinstance(obj, dict) or "k0" not in obj or "webs" not in obj:
        raise ValueError('web definition must be {"k0": int, "webs": [[...], ...]}')
    k0 = obj["k0"]
    if not isinstance(k0, int):
        raise ValueError("k0 must be an integer")
    raw_webs = obj["webs"]
    if not isinstance(raw_webs, list) or len(raw_webs) != k0:
        raise ValueError(f"webs must list integral strings for each arity 1..{k0}")
    webs = []
    for k, raw in enumerate(raw_webs, start=1):
        webs.append([parse(text, k) for text in raw])
    return balanced_set(k0, webs)


def load_balanced_set(path: str) -> BalancedSet:
    with open(path, "r", encoding="utf-8") as handle:
        return balanced_set_from_json(json.load(handle))


def save_balanced_set(E: BalancedSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(balanced_set_to_json(E), handle, indent=2, sort_keys=True)
        handle.write("\n")

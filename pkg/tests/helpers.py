"""Shared builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from webrank.expr import (
    Expr,
    has_transcendental,
    int_power,
    product_of,
    rational,
    relabel,
    sum_of,
    var,
)
from webrank.web import AssembledWeb, BalancedSet, GeneratingWeb, WebEntry


def cube_plus_self(e: Expr) -> Expr:
    """The reparametrization u -> u^3 + u (derivative 3u^2 + 1 never vanishes
    on rational points)."""
    return sum_of([int_power(e, 3), e])


def reparametrize_entry(W: AssembledWeb, index: int) -> AssembledWeb:
    entries = list(W.entries)
    old = entries[index]
    entries[index] = WebEntry(
        label=old.label, integral=cube_plus_self(old.integral), source=old.source
    )
    return AssembledWeb(n=W.n, entries=tuple(entries))


def reparametrize_generating(E: BalancedSet, k: int, b: int) -> BalancedSet:
    webs = []
    for web in E.webs:
        integrals = list(web.integrals)
        if web.k == k:
            integrals[b] = cube_plus_self(integrals[b])
        webs.append(GeneratingWeb(k=web.k, integrals=tuple(integrals)))
    return BalancedSet(k0=E.k0, webs=tuple(webs))


def permute_ambient(W: AssembledWeb, positions: list[int]) -> AssembledWeb:
    """Relabel the ambient variables of every entry (j -> positions[j-1])."""
    entries = tuple(
        WebEntry(
            label=e.label,
            integral=relabel(e.integral, positions),
            source=e.source,
        )
        for e in W.entries
    )
    return AssembledWeb(n=W.n, entries=entries)


def single_integral_web(n: int, integral: Expr) -> AssembledWeb:
    return AssembledWeb(
        n=n,
        entries=(WebEntry(label=(1, 1, 1), integral=integral, source=(1,)),),
    )


def perturb_family(E: BalancedSet, seed: int) -> BalancedSet:
    """Add a small seeded rational multiple of a low-degree monomial to one
    integral of arity >= 2 (exp/log-free integrals only, so the scalar mode
    of the family is preserved)."""
    rng = random.Random(seed)
    candidates = [
        (web.k, b)
        for web in E.webs
        if web.k >= 2
        for b, u in enumerate(web.integrals)
        if not has_transcendental(u)
    ]
    k, b = candidates[rng.randrange(len(candidates))]
    epsilon = rational(Fraction(rng.randint(1, 4), 16))
    i = rng.randint(1, k)
    j = rng.randint(1, k)
    monomial = var(i) if rng.random() < 0.5 else product_of([var(i), var(j)])
    webs = []
    for web in E.webs:
        integrals = list(web.integrals)
        if web.k == k:
            integrals[b] = sum_of(
                [integrals[b], product_of([epsilon, monomial])]
            )
        webs.append(GeneratingWeb(k=web.k, integrals=tuple(integrals)))
    return BalancedSet(k0=E.k0, webs=tuple(webs))

"""Abelian-relation space dimensions from truncated jet systems.

A relation among the first integrals u_1..u_d is a functional identity
sum_i g_i(u_i) = constant with each g_i a function of one variable.  Working
modulo constants, g_i is represented near a base point p by its coefficients
on powers of (u_i - u_i(p)) with no constant term.  For each truncation order
M the coefficients of an order-M relation jet form the kernel of a linear
map, and the kernel dimension as a function of M stabilizes at the rank of
the web (reported as an order-M certificate, never as a proof).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import linalg
from .combin import binom, calibrated_max_rank, exact_support_dims
from .expr import EvalError, evaluate
from .jets import degree_multi_indices
from .report import FALSE, INCONCLUSIVE, TRUE, VerificationReport, combine_verdicts
from .scalars import DEFAULT_PRECISION, Mode
from .tpoly import taylor
from .web import (
    AssembledWeb,
    BalancedSet,
    assemble,
    gradients_proportional,
    web_gradients,
)

ESCALATION_LIMIT = 512


class EstimateInconclusive(Exception):
    """A kernel dimension could not be decided (marginal pivots persisted)."""


@dataclass(frozen=True)
class RelationJet:
    """Order-M jet of one relation: per-entry coefficients of g_i.

    coefficients[label][m-1] multiplies (u_i - u_i(p))^m; the induced map
    x -> sum_i g_i(u_i(x)) has vanishing Taylor coefficients in degrees 1..M.
    """

    base_point: tuple
    order: int
    coefficients: dict[tuple[int, int, int], tuple]


@dataclass
class RankEstimate:
    """Kernel dimensions per truncation order and the stabilized value, if any."""

    dims: dict[int, int]
    stabilized_at: int | None
    value: int | None
    method: str
    note: str | None = None


def _relation_keys(n: int, order: int) -> list[tuple[int, ...]]:
    keys: list[tuple[int, ...]] = []
    for h in range(1, order + 1):
        keys.extend(degree_multi_indices(n, h))
    return keys


def _expansion_rows(W: AssembledWeb, point, order: int, mode: Mode):
    """Rows of the transposed jet system: one row per unknown (entry, power).

    The row for (i, m) holds the Taylor coefficients of (u_i - u_i(p))^m on
    all multi-indices of degree 1..order; the kernel dimension of the
    relation map is (#unknowns - rank of these rows).
    """
    keys = _relation_keys(W.n, order)
    position = {key: idx for idx, key in enumerate(keys)}
    zero = Fraction(0) if mode.is_exact else mpmath.mpf(0)
    rows = []
    for entry in W.entries:
        try:
            offset = taylor(entry.integral, point, order, mode).drop_constant()
        except EvalError as err:
            raise EvalError(f"entry {entry.label}: {err}") from None
        for power in offset.powers(order):
            row = [zero] * len(keys)
            for key, value in power.coeffs.items():
                row[position[key]] = value
            rows.append(row)
    return rows


def _kernel_dim(W: AssembledWeb, point, order: int, mode: Mode):
    """Kernel dimension at one truncation order; returns (dim, mode used)."""
    unknowns = W.size * order
    if mode.is_exact:
        rank, _ = linalg.exact_rank(_expansion_rows(W, point, order, mode))
        return unknowns - rank, mode
    current = mode
    while True:
        with current.workprec():
            rows = _expansion_rows(W, point, order, current)
        rank, info = linalg.float_rank(rows, current.precision)
        if not info["marginal"]:
            return unknowns - rank, current
        if current.precision >= ESCALATION_LIMIT:
            raise EstimateInconclusive(
                f"marginal pivots persist at order {order} up to "
                f"{ESCALATION_LIMIT}-bit precision"
            )
        current = current.escalate()


def rank_estimate(
    W: AssembledWeb, point, m_start: int, m_cap: int, mode: Mode
) -> RankEstimate:
    """Kernel dimensions for orders m_start..m_cap until two agree.

    The stabilized dimension is reported as the web's rank at this point; if
    the cap is reached without stabilization the estimate is inconclusive
    (value None) and the dims trace is still returned for audit.
    """
    if m_start < 1 or m_cap < m_start:
        raise ValueError(f"need 1 <= m_start <= m_cap, got {m_start}..{m_cap}")
    dims: dict[int, int] = {}
    previous = None
    method = mode.label()
    for order in range(m_start, m_cap + 1):
        try:
            dim, used = _kernel_dim(W, point, order, mode)
        except EstimateInconclusive as err:
            return RankEstimate(
                dims=dims,
                stabilized_at=None,
                value=None,
                method=method,
                note=str(err),
            )
        method = used.label()
        dims[order] = dim
        if previous is not None and previous == dim:
            return RankEstimate(
                dims=dims, stabilized_at=order - 1, value=dim, method=method
            )
        previous = dim
    return RankEstimate(
        dims=dims,
        stabilized_at=None,
        value=None,
        method=method,
        note=f"no stabilization up to order {m_cap}",
    )


def relation_jets(
    W: AssembledWeb, point, order: int
) -> list[RelationJet]:
    """Basis of order-M relation jets at a point (exact scalars only)."""
    mode = Mode.exact()
    rows_by_unknown = _expansion_rows(W, point, order, mode)
    keys = _relation_keys(W.n, order)
    unknowns = W.size * order
    equations = [
        [rows_by_unknown[u][e] for u in range(unknowns)] for e in range(len(keys))
    ]
    basis = linalg.exact_nullspace(equations, unknowns)
    jets = []
    for vector in basis:
        coefficients = {
            entry.label: tuple(vector[i * order : (i + 1) * order])
            for i, entry in enumerate(W.entries)
        }
        jets.append(
            RelationJet(
                base_point=tuple(point), order=order, coefficients=coefficients
            )
        )
    return jets


def relation_residual(W: AssembledWeb, jet: RelationJet, mode: Mode = Mode.exact()):
    """Taylor coefficients of sum_i g_i(u_i) for a relation jet.

    Degrees 1..order must all vanish; used to audit kernel vectors.
    """
    total = None
    for entry in W.entries:
        offset = taylor(
            entry.integral, jet.base_point, jet.order, mode
        ).drop_constant()
        series = [Fraction(0), *jet.coefficients[entry.label]]
        term = offset.compose_series(series)
        total = term if total is None else total.add(term)
    return total.drop_constant()


# ---------------------------------------------------------------------------
# the finite verification pipeline

def generic_point_for_web(W: AssembledWeb, sampler, mode: Mode):
    """A sampled point where all entries evaluate and differentials are
    pairwise non-proportional; None when sampling is exhausted."""
    for _ in range(sampler.max_retries):
        point = sampler.point(W.n)
        try:
            for entry in W.entries:
                evaluate(entry.integral, point, mode)
            gradients = web_gradients(W, point, mode)
        except EvalError:
            continue
        if any(all(v == 0 for v in g) for g in gradients):
            continue
        proportional = any(
            gradients_proportional(gradients[i], gradients[j], mode)
            for i in range(len(gradients))
            for j in range(i + 1, len(gradients))
        )
        if proportional:
            continue
        return point
    return None


def support_decomposition(
    E: BalancedSet,
    n: int,
    point,
    m_cap: int,
    mode: Mode,
    m_start: int | None = None,
) -> tuple[dict[int, int], dict[int, RankEstimate]]:
    """Empirical exact-support dimensions from sub-web rank estimates.

    For h = 2..min(n, k0) the rank r(h) of the assembled web in dimension h
    is estimated at the first h coordinates of `point`; the table follows the
    recursion delta(2) = r(2), delta(h) = r(h) - sum_j delta(j)*binom(h, j).
    Raises EstimateInconclusive if any estimate fails to stabilize.
    """
    if n < 2:
        raise ValueError(f"support decomposition needs n >= 2, got {n}")
    start = m_start if m_start is not None else E.k0 + 1
    estimates: dict[int, RankEstimate] = {}
    delta: dict[int, int] = {}
    for h in range(2, min(n, E.k0) + 1):
        estimate = rank_estimate(assemble(E, h), point[:h], start, m_cap, mode)
        if estimate.value is None:
            raise EstimateInconclusive(
                f"rank estimate at h={h} did not stabilize: {estimate.note}"
            )
        estimates[h] = estimate
        delta[h] = estimate.value - sum(
            delta[j] * binom(h, j) for j in range(2, h)
        )
    return delta, estimates


def verify_max_rank(
    E: BalancedSet,
    sampler,
    m_cap: int | None = None,
    corroborate: bool = False,
    precision: int = DEFAULT_PRECISION,
) -> VerificationReport:
    """Rank estimates for n = 2..k0 against the calibrated maximal rank.

    When every estimate matches, the assembled webs have maximal rank in
    every dimension (granted ordinariness, certified separately), and the
    empirical exact-support table is reported next to the counting table.
    With corroborate=True the check is repeated at n = k0 + 1 as an
    independent desk-scale corroboration.
    """
    k0 = E.k0
    mode = E.default_mode(precision)
    m_start = k0 + 1
    cap = m_cap if m_cap is not None else k0 + 5
    n_values = list(range(2, k0 + 1)) + ([k0 + 1] if corroborate else [])
    per_n = []
    verdicts = []
    estimates_low: dict[int, RankEstimate] = {}
    for n in n_values:
        W = assemble(E, n)
        expected = calibrated_max_rank(n, k0)
        point = generic_point_for_web(W, sampler, mode)
        if point is None:
            per_n.append(
                {
                    "n": n,
                    "expected": expected,
                    "verdict": INCONCLUSIVE,
                    "reason": "no generic point found",
                }
            )
            verdicts.append(INCONCLUSIVE)
            continue
        estimate = rank_estimate(W, point, m_start, cap, mode)
        if estimate.value is None:
            verdict = INCONCLUSIVE
        elif estimate.value == expected:
            verdict = TRUE
        else:
            verdict = FALSE
        per_n.append(
            {
                "n": n,
                "expected": expected,
                "value": estimate.value,
                "dims_trace": dict(sorted(estimate.dims.items())),
                "stabilized_at": estimate.stabilized_at,
                "method": estimate.method,
                "point": [str(c) for c in point],
                "note": estimate.note,
                "verdict": verdict,
            }
        )
        verdicts.append(verdict)
        if n <= k0:
            estimates_low[n] = estimate
    empirical: dict[int, int] | None = None
    if all(n in estimates_low and estimates_low[n].value is not None for n in range(2, k0 + 1)):
        empirical = {}
        for h in range(2, k0 + 1):
            empirical[h] = estimates_low[h].value - sum(
                empirical[j] * binom(h, j) for j in range(2, h)
            )
    expected_table = exact_support_dims(k0, k0).N_values
    verdict = combine_verdicts(verdicts)
    return VerificationReport(
        name="verify_max_rank",
        verdict=verdict,
        checks=per_n,
        witnesses={
            "k0": k0,
            "seed": sampler.seed,
            "mode": mode.label(),
            "m_start": m_start,
            "m_cap": cap,
            "N_table_empirical": empirical,
            "N_table": expected_table,
            "N_table_match": empirical == expected_table if empirical else None,
        },
    )

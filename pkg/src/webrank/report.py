"""Verification reports: verdicts plus the witnesses needed to re-check them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import scalar_to_str

TRUE = "true"
FALSE = "false"
INCONCLUSIVE = "inconclusive"

_EXIT_CODES = {TRUE: 0, FALSE: 1, INCONCLUSIVE: 2}


def combine_verdicts(verdicts) -> str:
    """false dominates, then inconclusive; true only if everything is true."""
    verdicts = list(verdicts)
    if any(v == FALSE for v in verdicts):
        return FALSE
    if any(v == INCONCLUSIVE for v in verdicts):
        return INCONCLUSIVE
    return TRUE


@dataclass
class VerificationReport:
    """Outcome of one check: a verdict, per-item records, and shared witnesses."""

    name: str
    verdict: str
    checks: list[dict] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    config: dict | None = None

    def exit_code(self) -> int:
        return _EXIT_CODES[self.verdict]

    def to_jsonable(self) -> dict:
        out = {
            "name": self.name,
            "verdict": self.verdict,
            "checks": jsonable(self.checks),
            "witnesses": jsonable(self.witnesses),
        }
        if self.config is not None:
            out["config"] = jsonable(self.config)
        return out


def jsonable(value):
    """Recursively convert report payloads to JSON-safe primitives.

    Fractions and mpf scalars become strings so nothing is rounded silently.
    """
    if isinstance(value, VerificationReport):
        return value.to_jsonable()
    if isinstance(value, dict):
        return {_key(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return scalar_to_str(value)
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return scalar_to_str(value)


def _key(key) -> str:
    if isinstance(key, tuple):
        return ",".join(str(part) for part in key)
    return str(key)

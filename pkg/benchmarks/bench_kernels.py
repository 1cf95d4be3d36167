#!/usr/bin/env python3
"""Benchmark the compiled elimination kernels against the pure-Python twins.

Builds the largest linear systems the verification pipeline actually
produces (the relation-jet systems of the two built-in calibration-order-4
families in dimension 4) and times the exact and float rank kernels on
identical copies with both backends.

Run after `pip install -e . --no-build-isolation`:

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import mpmath

from webrank import _purekernels, linalg
from webrank.abelrank import _expansion_rows, generic_point_for_web
from webrank.catalog import get_family
from webrank.ordinary import GenericPointSampler
from webrank.scalars import EXACT

try:
    from webrank import _speedups
except ImportError:
    _speedups = None


def _time(fn, repeat: int) -> float:
    best = None
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


def bench_exact(repeat: int):
    from webrank.web import assemble

    E, _ = get_family("k0_4_WB_sum")
    W = assemble(E, 4)
    point = generic_point_for_web(W, GenericPointSampler(seed=0), EXACT)
    rows = _expansion_rows(W, point, 6, EXACT)
    ints, _ = linalg._integer_rows(rows)
    shape = f"{len(ints)}x{len(ints[0])}"

    def run(impl):
        return lambda: impl.rank_int_rows([row[:] for row in ints])

    results = {"pure": _time(run(_purekernels), repeat)}
    if _speedups is not None:
        results["compiled"] = _time(run(_speedups), repeat)
    rank = _purekernels.rank_int_rows([row[:] for row in ints])[0]
    return "exact rank (big-int, fraction-free)", shape, rank, results


def bench_float(repeat: int):
    from webrank.web import assemble

    E, _ = get_family("k0_4_exp")
    mode = E.default_mode()
    W = assemble(E, 4)
    point = generic_point_for_web(W, GenericPointSampler(seed=0), mode)
    with mpmath.workprec(mode.precision):
        rows = _expansion_rows(W, point, 6, mode)
        tol = mpmath.mpf(2) ** (-(mode.precision // 2))
    shape = f"{len(rows)}x{len(rows[0])}"

    def run(impl):
        def inner():
            with mpmath.workprec(mode.precision):
                impl.rank_float_rows([row[:] for row in rows], tol, linalg.FLOAT_GAP)

        return inner

    results = {"pure": _time(run(_purekernels), repeat)}
    if _speedups is not None:
        results["compiled"] = _time(run(_speedups), repeat)
    with mpmath.workprec(mode.precision):
        rank = _purekernels.rank_float_rows(
            [row[:] for row in rows], tol, linalg.FLOAT_GAP
        )[0]
    return "float rank (128-bit, complete pivoting)", shape, rank, results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    args = parser.parse_args()

    print(f"active backend: {linalg.BACKEND}")
    if _speedups is None:
        print("compiled kernels not built; timing the pure backend only")
    for bench in (bench_exact, bench_float):
        label, shape, rank, results = bench(args.repeat)
        print(f"\n{label}  [{shape}, rank {rank}]")
        for backend, seconds in results.items():
            print(f"  {backend:9s} {seconds * 1000:9.1f} ms")
        if "compiled" in results:
            print(f"  speedup   {results['pure'] / results['compiled']:9.2f} x")


if __name__ == "__main__":
    main()

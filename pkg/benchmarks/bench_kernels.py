#!/usr/bin/env python3
"""Benchmark the certified scan kernels: numba vs numpy (vs python reference).

The kernels do 64-bit modular floor sweeps and corner classification over a
range of multipliers; these dominate the runtime of the certificate searches
and iteration sweeps, which is why they carry a numba path.

Usage: python benchmarks/bench_kernels.py [--m 2000000] [--repeat 3] [--with-python]
"""
from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from geomorse import _kernels
from geomorse.exactnum import scaled_floor, sqrt_scalar


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--with-python", action="store_true", help="include the slow reference loop")
    args = ap.parse_args()

    x = scaled_floor(sqrt_scalar(2, Fraction(1, 2)))
    th = _kernels.corner_thresholds(Fraction(1, 8), args.m)
    names = ["numba", "numpy"] + (["python"] if args.with_python else [])
    backends = {}
    for name in names:
        try:
            backends[name] = _kernels.get_backend(name)
        except ImportError:
            print(f"{name:8s}  unavailable")

    results = {}
    for name, (floor_chunk, corner_chunk) in backends.items():
        # warm up (numba compiles on first call)
        floor_chunk(x, 1, 1024, args.m)
        corner_chunk(x, 1, 1024, th)
        t_floor = _time(lambda: floor_chunk(x, 1, args.m, args.m), args.repeat)
        t_corner = _time(lambda: corner_chunk(x, 1, args.m, th), args.repeat)
        results[name] = (t_floor, t_corner)

    ref = next(iter(results))
    q_ref, amb_ref = backends[ref][0](x, 1, args.m, args.m)
    for name, (floor_chunk, corner_chunk) in backends.items():
        q, amb = floor_chunk(x, 1, args.m, args.m)
        assert np.array_equal(q, q_ref) and np.array_equal(amb, amb_ref), name

    print(f"m = {args.m:,}   (best of {args.repeat})")
    print(f"{'backend':8s}  {'floor sweep':>12s}  {'corner scan':>12s}")
    for name, (t_floor, t_corner) in results.items():
        print(f"{name:8s}  {t_floor * 1e3:>10.1f}ms  {t_corner * 1e3:>10.1f}ms")
    if "numba" in results and "numpy" in results:
        f = results["numpy"][0] / results["numba"][0]
        c = results["numpy"][1] / results["numba"][1]
        print(f"numba speedup over numpy: floor {f:.1f}x, corner {c:.1f}x")


if __name__ == "__main__":
    main()

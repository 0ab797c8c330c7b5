#!/usr/bin/env python3
"""Time the compiled stencil kernels against the NumPy fallback.

Runs the public wrappers (first and second derivative, weighted box sum)
on a representative 3-d array with both backends, checks that the two
return identical arrays, and prints best-of-N wall times with the speedup
ratio.  If the compiled extension is unavailable the NumPy column is
timed alone and the script still exits 0; a numerical mismatch between
backends exits 1.

Usage:
    python3 benchmarks/bench_stencils.py
    python3 benchmarks/bench_stencils.py --shape 192 192 192 --repeats 7
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from bohmdisp import kernels


def _best_time(fn, repeats):
    fn()  # warm-up: first call pays allocation and cache misses
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _cases(shape, rng):
    real = rng.standard_normal(shape)
    cplx = real + 1j * rng.standard_normal(shape)
    spacings = (0.01, 0.02, 0.015)
    return [
        ("diff1 axis=0 order=2",
         lambda be: kernels.diff1(real, 0, 0.01, 2, backend=be)),
        ("diff1 axis=2 order=2",
         lambda be: kernels.diff1(real, 2, 0.015, 2, backend=be)),
        ("diff2 axis=1 order=2",
         lambda be: kernels.diff2(real, 1, 0.02, 2, backend=be)),
        ("diff2 axis=1 order=4",
         lambda be: kernels.diff2(real, 1, 0.02, 4, backend=be)),
        ("diff2 axis=1 complex",
         lambda be: kernels.diff2(cplx, 1, 0.02, 2, backend=be)),
        ("box order=2 (fused)",
         lambda be: kernels.box(real, spacings, -1.0, 2, backend=be)),
        ("box order=4 (composed)",
         lambda be: kernels.box(real, spacings, -1.0, 4, backend=be)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare stencil kernel backends")
    parser.add_argument("--shape", type=int, nargs=3,
                        default=[128, 128, 128],
                        help="3-d array shape to differentiate")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per case (best is kept)")
    parser.add_argument("--seed", type=int, default=20260825)
    args = parser.parse_args(argv)

    try:
        kernels.get_backend("cython")
        have_compiled = True
    except ImportError:
        have_compiled = False
        print("compiled backend unavailable; timing the NumPy fallback only")

    shape = tuple(args.shape)
    rng = np.random.default_rng(args.seed)
    cases = _cases(shape, rng)
    n_points = int(np.prod(shape))
    print(f"array shape {shape} ({n_points:,} points), "
          f"best of {args.repeats}; default backend: {kernels.BACKEND}")

    header = f"{'case':24s} {'numpy':>10s}"
    if have_compiled:
        header += f" {'cython':>10s} {'speedup':>8s}"
    print(header)

    mismatch = False
    for name, run in cases:
        t_np = _best_time(lambda: run("numpy"), args.repeats)
        line = f"{name:24s} {t_np * 1e3:8.2f} ms"
        if have_compiled:
            t_cy = _best_time(lambda: run("cython"), args.repeats)
            out_np, out_cy = run("numpy"), run("cython")
            if not np.array_equal(out_np, out_cy):
                gap = float(np.max(np.abs(out_np - out_cy)))
                print(f"{name}: BACKEND MISMATCH, max |difference| {gap:.3e}")
                mismatch = True
                continue
            line += f" {t_cy * 1e3:8.2f} ms {t_np / t_cy:7.2f}x"
        print(line)

    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())

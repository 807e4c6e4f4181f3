#!/usr/bin/env python3
"""Compare the jitted Monte Carlo kernels against the vectorized numpy
fallbacks on the array sizes the samplers actually use.

Both kernel families live in admlab.graybill_deal.kernels, so the
comparison runs in one process.  The public names (loss_sums, ...) are
whichever family the package selected at import time; set
ADMLAB_DISABLE_NUMBA=1 before running to see the fallback path as the
active one (the two columns then time the same code).

Usage:
    python benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import time

import numpy as np

from admlab.graybill_deal import kernels


def time_call(fn, args, repeat):
    fn(*args)  # warm-up; compiles on first call when jitted
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def rel_gap(a, b):
    gap = 0.0
    for x, y in zip(a, b):
        scale = max(abs(x), abs(y), 1.0)
        gap = max(gap, abs(x - y) / scale)
    return gap


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=1 << 16,
                        help="array length per call (default: one shard, 65536)")
    parser.add_argument("--repeat", type=int, default=30,
                        help="timed repetitions per kernel (default 30)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n = args.size
    xbar1 = rng.normal(size=n)
    xbar2 = rng.normal(size=n)
    phi = rng.uniform(0.1, 0.9, size=n)
    t1 = rng.chisquare(4, size=n)
    t2 = rng.chisquare(4, size=n)
    u1 = rng.uniform(0.01, 0.99, size=n)
    u2 = rng.uniform(0.01, 0.99, size=n)

    cases = [
        ("loss_sums", (xbar1, xbar2, phi, 0.3)),
        ("moment_sums", (t1,)),
        ("diff_sums", (phi, u1, 0.4)),
        ("excess_sums", (t1, t2, 1e-3, 0.25)),
        ("excess_upper_sums", (t1, t2, 1e-3, 0.25)),
        ("beta_route_sums", (u1, u2, 5e-4)),
        ("rect_count", (t1, t2, 1.0, 2.0, 1.0, 2.0)),
    ]

    print(f"numba active: {kernels.USE_NUMBA}   size={n}   repeat={args.repeat}")
    print(f"{'kernel':<20} {'numpy':>10} {'active':>10} {'speedup':>8} {'rel gap':>10}")
    for name, call_args in cases:
        active = getattr(kernels, name)
        fallback = getattr(kernels, f"_{name}_numpy")
        t_np, out_np = time_call(fallback, call_args, args.repeat)
        t_act, out_act = time_call(active, call_args, args.repeat)
        gap = rel_gap(np.atleast_1d(out_np), np.atleast_1d(out_act))
        print(f"{name:<20} {t_np * 1e6:>8.1f}us {t_act * 1e6:>8.1f}us"
              f" {t_np / t_act:>7.2f}x {gap:>10.2e}")


if __name__ == "__main__":
    main()

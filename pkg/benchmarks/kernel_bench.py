#!/usr/bin/env python3
"""Timing comparison of the JIT kernels against their numpy fallbacks.

Run twice to see both lanes:

    python3 benchmarks/kernel_bench.py
    HYPERDISC_NO_NUMBA=1 python3 benchmarks/kernel_bench.py

The power-sum kernel is the one scored once per tuple inside the blocked
search, so it dominates float-lane solve time at larger block sizes.
"""

import time

import numpy as np

from hyperdisc import _kernels


def bench(label, fn, *args, repeats=5):
    fn(*args)  # warm-up (and JIT compile on the numba lane)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    print(f"{label:34s} {best * 1e3:9.3f} ms")
    return best


def main():
    lane = "numba" if _kernels.USING_NUMBA else "numpy fallback"
    print(f"kernel lane: {lane}\n")
    rng = np.random.default_rng(0)

    coeffs = rng.normal(size=25)
    xs = rng.normal(size=200_000)
    bench("horner_many (deg 24, 200k pts)", _kernels.horner_many, coeffs, xs)
    bench("horner numpy reference", _kernels.horner_many_numpy, coeffs, xs)

    tops = np.ascontiguousarray(rng.normal(size=(100_000, 8)))
    bench("power_sums_batch (100k rows, k=8)", _kernels.power_sums_batch, tops, 8)
    bench("power sums numpy reference", _kernels.power_sums_batch_numpy, tops, 8)

    dcoeffs = np.arange(1, 25) * coeffs[1:]
    roots = rng.normal(size=50_000)
    bench("newton_polish (50k roots, deg 24)", _kernels.newton_polish,
          coeffs, dcoeffs, roots, 8)


if __name__ == "__main__":
    main()

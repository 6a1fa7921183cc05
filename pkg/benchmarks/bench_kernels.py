#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

Runs every hot kernel on workloads sized like the real scans and prints a
table of per-call times and speedups.  Both implementations are imported
explicitly, so the RKTLAB_BACKEND env var does not matter here.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from rktlab._kernels import NUMBA_IMPLS, NUMPY_IMPLS


def time_call(fn, args, repeat):
    fn(*args)  # warm-up / JIT
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng):
    thetas = rng.uniform(0, 2 * np.pi, 4096)
    weights = rng.uniform(0.1, 1.0, 4096)
    rhos = rng.uniform(0.0, 1.0, 4096)
    ts = rng.uniform(1e-6, 0.1, 160)
    wts = rng.uniform(0.1, 1.0, 160)
    angs = rng.uniform(-0.3, 0.3, 416)
    wangs = rng.uniform(0.1, 1.0, 416)
    points = np.sort(np.concatenate([np.arange(-1024, 0), np.arange(1, 1025)]) + 0.125)
    res = np.linspace(0.0, 4.0, 128)
    ims = np.linspace(-2.0, 2.0, 128)
    b = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    herm = np.ascontiguousarray(0.5 * (b + b.conj().T))
    return {
        "kernel_pow_circle_sum": (thetas, weights, 1.0 - 2.0**-16, 0.3, 2.0),
        "kernel_pow_disk_sum": (rhos, thetas, weights, 0.95, 1.1, 3.0),
        "phi_h_window_sum": (ts, wts, angs, wangs, 1.0, 0.05, 2.0),
        "pw_rkt_grid": (points, res, ims),
        "jacobi_eigh": (herm,),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    loads = workloads(rng)
    print(f"{'kernel':<24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    print("-" * 60)
    for name, call_args in loads.items():
        t_np = time_call(NUMPY_IMPLS[name], call_args, args.repeat)
        if NUMBA_IMPLS is None:
            print(f"{name:<24} {t_np * 1e3:>10.3f}ms {'n/a':>12} {'n/a':>9}")
            continue
        t_nb = time_call(NUMBA_IMPLS[name], call_args, args.repeat)
        print(
            f"{name:<24} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
            f"{t_np / t_nb:>8.1f}x"
        )
    if NUMBA_IMPLS is None:
        print("\nnumba unavailable: only the numpy path was timed")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on a representative Monte Carlo workload and prints
per-call timings plus the speedup.  Select the backend used by the library
itself with LEVYOU_BACKEND={auto,numba,numpy}; this script always times both
implementations directly.
"""

import time

import numpy as np

from levyou import _kernels


def _time(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_segment_sums(rng, n=200_000, lam=1.0, beta=1.0, rho=0.5, T=10.0):
    counts = rng.poisson(lam * T, n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    tau = rng.uniform(0.0, T, offsets[-1])
    sizes = rng.exponential(1.0, offsets[-1])
    args = (tau, sizes, offsets, lam, beta, rho, T)
    return "segment_weighted_sums", args, f"{n} replicates, {offsets[-1]} jumps"


def bench_jump_steps(rng, n=100_000, lam=1.0, dt=0.05):
    counts = rng.poisson(1.0 * dt, n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    jt = rng.uniform(0.0, dt, offsets[-1])
    js = rng.exponential(1.0, offsets[-1])
    args = (jt, js, offsets, lam, dt)
    return "jump_step_sums", args, f"{n} steps"


def bench_path(rng, n=100_000):
    g1 = rng.standard_normal(n)
    g2 = rng.standard_normal(n)
    dxj = np.zeros(n)
    ij = np.zeros(n)
    args = (0.5, 0.99, 0.0099, 0.0, 0.0, 0.01, 0.005, 0.003,
            g1, g2, dxj, ij, 1.0, 1.0, 0.0, 0.5, 0.01)
    return "path_recursion", args, f"{n} steps"


def bench_moments(rng, n=1_000_000):
    x = rng.standard_normal(n)
    idx = rng.integers(0, n, n)
    return "gathered_central_moments", (x, idx), f"n = {n}"


def main():
    if not _kernels.HAVE_NUMBA:
        print("numba not importable: nothing to compare")
        return
    rng = np.random.default_rng(0)
    cases = [bench_segment_sums(rng), bench_jump_steps(rng),
             bench_path(rng), bench_moments(rng)]
    print(f"{'kernel':<28} {'numba':>12} {'numpy':>12} {'speedup':>9}   workload")
    for name, args, workload in cases:
        fn_nb = getattr(_kernels, name + "_numba")
        fn_np = getattr(_kernels, name + "_numpy")
        fn_nb(*args)  # JIT warmup
        t_nb = _time(fn_nb, *args)
        t_np = _time(fn_np, *args)
        print(f"{name:<28} {t_nb * 1e3:>10.2f}ms {t_np * 1e3:>10.2f}ms "
              f"{t_np / t_nb:>8.1f}x   {workload}")


if __name__ == "__main__":
    main()

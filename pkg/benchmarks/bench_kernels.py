"""Timing comparison of the numba kernels against the pure-numpy fallbacks.

Runs each hot kernel on both backends in this process (the numba functions
are imported directly, so no re-exec is needed) and prints a small table.
JIT compilation happens on a warmup call and is excluded from the timings.

Usage: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from regmest import backend
from regmest import kernels


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cd(n, p, lam, repeats=5):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[: p // 3] = rng.standard_normal(p // 3)
    y = X @ beta + 0.5 * rng.standard_normal(n)
    gamma = np.full(p, lam)
    args = (X, y, gamma, np.zeros(p), 1e-10, 10000)
    rows = []
    t_np = _time(kernels._cd_fit_numpy, args, repeats)
    rows.append(("cd_fit", f"{n}x{p}", "numpy", t_np, 1.0))
    if backend.NUMBA_ENABLED:
        kernels._cd_fit_numba(*args)  # warmup / compile
        t_nb = _time(kernels._cd_fit_numba, args, repeats)
        rows.append(("cd_fit", f"{n}x{p}", "numba", t_nb, t_np / t_nb))
        d_np = kernels._cd_fit_numpy(*args)[0]
        d_nb = kernels._cd_fit_numba(*args)[0]
        rows.append(("cd_fit", f"{n}x{p}", "max|diff|",
                     float(np.max(np.abs(d_np - d_nb))), float("nan")))
    return rows


def bench_ranking(n, p, repeats=5):
    rng = np.random.default_rng(1)
    X = rng.standard_normal((n, p))
    theta = rng.standard_normal(p)
    y = X @ theta + rng.standard_normal(n)
    args = (X, y, theta)
    rows = []
    t_np = _time(kernels._ranking_pairs_numpy, args, repeats)
    rows.append(("ranking_pairs", f"{n}x{p}", "numpy", t_np, 1.0))
    if backend.NUMBA_ENABLED:
        kernels._ranking_pairs_numba(*args)
        t_nb = _time(kernels._ranking_pairs_numba, args, repeats)
        rows.append(("ranking_pairs", f"{n}x{p}", "numba", t_nb, t_np / t_nb))
        d = np.max(np.abs(kernels._ranking_pairs_numpy(*args)
                          - kernels._ranking_pairs_numba(*args)))
        rows.append(("ranking_pairs", f"{n}x{p}", "max|diff|", float(d),
                     float("nan")))
    return rows


def main():
    if not backend.NUMBA_ENABLED:
        print("numba backend disabled (REGMEST_NO_NUMBA set or numba missing); "
              "showing numpy timings only")
    rows = []
    for n, p, lam in [(500, 20, 0.1), (2000, 50, 0.1), (5000, 100, 0.05)]:
        rows += bench_cd(n, p, lam)
    for n, p in [(100, 5), (400, 10), (1000, 20)]:
        rows += bench_ranking(n, p)
    print(f"{'kernel':<14} {'size':<10} {'backend':<10} {'seconds':<12} {'speedup':<8}")
    for kernel, size, which, val, speed in rows:
        if which == "max|diff|":
            print(f"{kernel:<14} {size:<10} {which:<10} {val:<12.3e}")
        else:
            print(f"{kernel:<14} {size:<10} {which:<10} {val:<12.6f} {speed:<8.1f}")


if __name__ == "__main__":
    main()

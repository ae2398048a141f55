"""Benchmark the compiled kernels against the pure-numpy fallback.

Both bindings are imported side by side from gprot._kernels, so the
comparison runs in a single process regardless of the GPROT_NUMBA flag.
The first call to each compiled kernel triggers numba compilation; a
warm-up pass keeps that cost out of the timings.

Usage: python3 benchmarks/bench_kernels.py [--repeats N] [--starts Q]
"""

import argparse
import time

import numpy as np

from gprot._backend import HAVE_NUMBA
from gprot._kernels import (
    gpr_jit,
    gpr_numpy,
    pairwise_jit,
    pairwise_numpy,
    varimax_fg_jit,
    varimax_fg_numpy,
)
from gprot.multistart import random_orthonormal
from gprot.seeding import derive_rng

# (rows, columns) mirroring the simulation grid's matrix shapes
SIZES = [(18, 3), (36, 6), (54, 9), (72, 12)]

ALPHA0 = 1.0
MAX_ITER = 1000
GRAD_TOL = 1e-6
MAX_HALVINGS = 30
MAX_CYCLES = 250
ANGLE_TOL = 1e-9


def _loadings(m, k, rng):
    return rng.uniform(-0.9, 0.9, size=(m, k))


def _time(fn, repeats):
    best = np.inf
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def bench_varimax_fg(rng, repeats):
    rows = []
    for m, k in SIZES:
        L = _loadings(m, k, rng)
        # amplify the per-call work so the timer resolution does not dominate
        def run(kernel, L=L):
            f = 0.0
            for _ in range(1000):
                f, _g = kernel(L)
            return f

        t_np, f_np = _time(lambda: run(varimax_fg_numpy), repeats)
        t_jit, f_jit = _time(lambda: run(varimax_fg_jit), repeats)
        assert abs(f_np - f_jit) < 1e-12
        rows.append((f"varimax_fg {m}x{k} (x1000)", t_np, t_jit))
    return rows


def bench_gpr(rng, repeats, q):
    rows = []
    for m, k in SIZES:
        A = _loadings(m, k, rng)
        starts = [random_orthonormal(k, rng) for _ in range(q)]

        def run(kernel, A=A, starts=starts):
            total = 0.0
            for T0 in starts:
                _T, trace, _it, _conv = kernel(
                    A, T0, ALPHA0, MAX_ITER, GRAD_TOL, MAX_HALVINGS
                )
                total += trace[-1]
            return total

        t_np, f_np = _time(lambda: run(gpr_numpy), repeats)
        t_jit, f_jit = _time(lambda: run(gpr_jit), repeats)
        assert abs(f_np - f_jit) < 1e-6 * q
        rows.append((f"gpr {m}x{k} ({q} starts)", t_np, t_jit))
    return rows


def bench_pairwise(rng, repeats):
    rows = []
    for m, k in SIZES:
        A = _loadings(m, k, rng)

        def run(kernel, A=A, k=k):
            trace, _cycles, _conv = kernel(A.copy(), np.eye(k), MAX_CYCLES, ANGLE_TOL)
            return trace[-1]

        t_np, v_np = _time(lambda: run(pairwise_numpy), repeats)
        t_jit, v_jit = _time(lambda: run(pairwise_jit), repeats)
        assert abs(v_np - v_jit) < 1e-9
        rows.append((f"pairwise {m}x{k}", t_np, t_jit))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions; the best is reported")
    parser.add_argument("--starts", type=int, default=10,
                        help="random starts per gpr measurement")
    args = parser.parse_args()

    if not HAVE_NUMBA:
        print("numba is not importable; both columns run the numpy path")

    print("warming up compiled kernels ...")
    rng = derive_rng(20260818, "bench")
    A = _loadings(12, 3, rng)
    varimax_fg_jit(A)
    gpr_jit(A, np.eye(3), ALPHA0, MAX_ITER, GRAD_TOL, MAX_HALVINGS)
    pairwise_jit(A.copy(), np.eye(3), MAX_CYCLES, ANGLE_TOL)

    rows = []
    rows += bench_varimax_fg(rng, args.repeats)
    rows += bench_gpr(rng, args.repeats, args.starts)
    rows += bench_pairwise(rng, args.repeats)

    width = max(len(r[0]) for r in rows)
    print(f"\n{'kernel'.ljust(width)}  {'numpy':>10}  {'numba':>10}  {'speedup':>7}")
    for name, t_np, t_jit in rows:
        ratio = t_np / t_jit if t_jit > 0 else float("inf")
        print(
            f"{name.ljust(width)}  {t_np * 1e3:>8.2f}ms  {t_jit * 1e3:>8.2f}ms"
            f"  {ratio:>6.1f}x"
        )


if __name__ == "__main__":
    main()

"""Benchmark the numba and numpy kernel backends on identical inputs.

The hot loops are the O(N^2) pairwise sums behind pv_quadrature / apply_K;
everything else in the package is FFT-bound and backend-independent.  Both
backends consume the same offset-indexed weight table, so the comparison is
pure loop machinery.  Run:

    python benchmarks/bench_kernels.py [--sizes 1024,4096,8192]

The dispatch layer picks numba by default; setting FKPP_NO_NUMBA=1 switches
production code to the numpy path benchmarked here.
"""

import argparse
import time

import numpy as np

from fkpp import _kernels_numba as knb
from fkpp import _kernels_numpy as knp
from fkpp.fracop import _weight_table, frac_order
from fkpp.grid import make_grid


def time_call(fn, *args, repeat=3):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_1d(n):
    ordr = frac_order(0.25, 1)
    g = make_grid(1, n, n / 20.0, origin_centered=True)
    W = _weight_table(g, ordr.p, 2 * max(g.h), min(g.L) / 2)
    x = g.axis_coords(0)
    f = np.exp(-(x / 4.0) ** 2)
    phi = 1.0 + 0.3 * np.cos(2 * np.pi * x)

    knb.diff_sum_1d(f, W)  # JIT warmup
    knb.bilin_sum_1d(phi, f, W)

    rows = []
    for label, fnb, fnp, args in (
        ("diff_sum", knb.diff_sum_1d, knp.diff_sum_1d, (f, W)),
        ("bilin_sum", knb.bilin_sum_1d, knp.bilin_sum_1d, (phi, f, W)),
    ):
        t_nb, out_nb = time_call(fnb, *args)
        t_np, out_np = time_call(fnp, *args)
        scale = np.abs(out_nb).max()
        rows.append((f"1d n={n} {label}", t_nb, t_np,
                     np.abs(out_nb - out_np).max() / scale))
    return rows


def bench_2d(n):
    ordr = frac_order(0.3, 2)
    g = make_grid(2, n, n / 8.0, origin_centered=True)
    W = _weight_table(g, ordr.p, 2 * max(g.h), min(g.L) / 2)
    X, Y = g.coords()
    f = np.exp(-(X ** 2 + Y ** 2) / 8.0)
    phi = 1.0 + 0.3 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)

    knb.diff_sum_2d(f, W)
    knb.bilin_sum_2d(phi, f, W)

    rows = []
    for label, fnb, fnp, args in (
        ("diff_sum", knb.diff_sum_2d, knp.diff_sum_2d, (f, W)),
        ("bilin_sum", knb.bilin_sum_2d, knp.bilin_sum_2d, (phi, f, W)),
    ):
        t_nb, out_nb = time_call(fnb, *args, repeat=2)
        t_np, out_np = time_call(fnp, *args, repeat=2)
        scale = np.abs(out_nb).max()
        rows.append((f"2d n={n}^2 {label}", t_nb, t_np,
                     np.abs(out_nb - out_np).max() / scale))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1024,4096,8192")
    ap.add_argument("--sizes-2d", default="64,128")
    args = ap.parse_args()

    rows = []
    for n in (int(s) for s in args.sizes.split(",")):
        rows += bench_1d(n)
    for n in (int(s) for s in args.sizes_2d.split(",")):
        rows += bench_2d(n)

    w = max(len(r[0]) for r in rows)
    print(f"{'case':<{w}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speedup':>8}  {'rel diff':>9}")
    for name, t_nb, t_np, diff in rows:
        print(f"{name:<{w}}  {t_nb:10.4f}  {t_np:10.4f}  {t_np / t_nb:8.2f}  {diff:9.2e}")


if __name__ == "__main__":
    main()

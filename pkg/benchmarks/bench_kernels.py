"""Compare the numba and numpy paths of the hot kernels.

Run with ``python benchmarks/bench_kernels.py``.  Timings are best-of-n wall
clock after a warm-up call (so JIT compilation is excluded); the max abs
difference between the two paths is printed alongside.
"""
import argparse
import time

import numpy as np

from oseenlab import _kernels as K


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_legendre(rng, m, deg, n, repeat):
    c = rng.standard_normal((m, deg + 1, deg + 1))
    x1 = rng.uniform(-1, 1, n)
    x2 = rng.uniform(-1, 1, n)
    t_np = best_of(lambda: K.tensor_legendre_eval_np(c, x1, x2), repeat)
    t_nb = best_of(lambda: K.tensor_legendre_eval_nb(c, x1, x2), repeat)
    err = np.abs(K.tensor_legendre_eval_np(c, x1, x2) - K.tensor_legendre_eval_nb(c, x1, x2)).max()
    return t_np, t_nb, err


def bench_cumint(rng, m, nl, ns, repeat):
    s = rng.standard_normal((ns, ns))
    v = rng.standard_normal((m, nl, ns))
    t_np = best_of(lambda: K.line_cumint_np(s, v), repeat)
    t_nb = best_of(lambda: K.line_cumint_nb(s, v), repeat)
    err = np.abs(K.line_cumint_np(s, v) - K.line_cumint_nb(s, v)).max()
    return t_np, t_nb, err


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAS_NUMBA:
        print("numba not importable; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'size':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}{'max diff':>11}")
    for m, deg, n in ((16, 8, 4096), (64, 12, 4096), (128, 16, 16384)):
        t_np, t_nb, err = bench_legendre(rng, m, deg, n, args.repeat)
        print(f"{'tensor_legendre_eval':<28}{f'm={m} p={deg} n={n}':<22}{1e3*t_np:>12.2f}{1e3*t_nb:>12.2f}"
              f"{t_np/t_nb:>9.2f}{err:>11.1e}")
    for m, nl, ns in ((8, 64, 32), (64, 128, 48), (128, 256, 64)):
        t_np, t_nb, err = bench_cumint(rng, m, nl, ns, args.repeat)
        print(f"{'line_cumint':<28}{f'm={m} l={nl} s={ns}':<22}{1e3*t_np:>12.2f}{1e3*t_nb:>12.2f}"
              f"{t_np/t_nb:>9.2f}{err:>11.1e}")


if __name__ == "__main__":
    main()

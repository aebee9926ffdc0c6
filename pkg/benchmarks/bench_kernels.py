"""Time the dense kernels under both backends.

    python benchmarks/bench_kernels.py [--sizes 10 26 40 80] [--repeat 200]

Prints one row per (kernel, size) with the median time per call for the numpy
and numba paths and their ratio.  The first numba call (compilation) is
excluded.  A full solver restart for comparison is timed at the end: with
``m <= 40`` these kernels are a small share of a cycle, most of which is
spent in sparse triangular solves.
"""
import argparse
import statistics
import time

import numpy as np

from irsoar import _kernels
from irsoar.driver import SolverConfig, solve
from irsoar.generators import EXAMPLES


def timed(fn, repeat):
    fn()  # warm-up / compile
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def kernel_cases(m, rng):
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    x = A[:, 0].copy()
    return {
        "reflector": lambda be: _kernels.reflector(x, m - 1, backend=be),
        "householder_qr": lambda be: _kernels.householder_qr(A, backend=be),
        "restore_chain": lambda be: _kernels.restore_chain(A, backend=be),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 26, 40, 80])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--solver-example", default="ex42a")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'m':>5}{'numpy us':>12}{'numba us':>12}{'speedup':>10}")
    for m in args.sizes:
        for name, fn in kernel_cases(m, rng).items():
            t_np = timed(lambda: fn("numpy"), args.repeat)
            t_nb = timed(lambda: fn("numba"), args.repeat)
            print(f"{name:<16}{m:>5}{t_np * 1e6:>12.1f}{t_nb * 1e6:>12.1f}{t_np / t_nb:>10.2f}")

    ex = EXAMPLES[args.solver_example]
    cfg = SolverConfig(m=ex.m, f=ex.f, sigma=ex.sigma, variant="irgsoar0", max_restarts=3)
    res = solve(ex.build(), cfg)
    tot = res.totals()
    print(f"\n{args.solver_example}, 3 restarts ({_kernels.BACKEND} backend): "
          + ", ".join(f"{k} {v:.3f} s" for k, v in tot.items()))


if __name__ == "__main__":
    main()

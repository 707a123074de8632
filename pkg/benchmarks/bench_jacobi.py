"""Compare the compiled and pure-Python Jacobi kernels.

    python benchmarks/bench_jacobi.py [--sizes 4 9 16] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from channelforge import _jacobi_py
from channelforge.matcore import JACOBI_MAX_SWEEPS, JACOBI_TOL

try:
    from channelforge import _jacobi
except ImportError:
    _jacobi = None


def random_hermitian(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def bench(fn, h, repeat):
    t = timeit.repeat(lambda: fn(h, JACOBI_TOL, JACOBI_MAX_SWEEPS), number=1, repeat=repeat)
    return min(t)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 9, 16])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>4} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for n in args.sizes:
        h = random_hermitian(n, rng)
        tp = bench(_jacobi_py.jacobi_sweeps, h, args.repeat)
        if _jacobi is None:
            print(f"{n:>4} {tp * 1e3:12.3f} {'n/a':>12} {'n/a':>8}")
            continue
        tc = bench(_jacobi.jacobi_sweeps, h, args.repeat)
        print(f"{n:>4} {tp * 1e3:12.3f} {tc * 1e3:12.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()

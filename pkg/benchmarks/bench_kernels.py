"""Timing of the compiled and pure numpy kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 100,500,2000] [--m 200] [--repeat 3]

Prints one line per (kernel, n, backend) with the best wall time over
``--repeat`` runs and the speedup of the compiled core over the fallback.
"""

import argparse
import timeit

import numpy as np

from hkmtest import _backend
from hkmtest.permutation import sign_matrix


def cases(y, a, m):
    signs = sign_matrix(7, m, y.shape[0])
    return {
        "pair_sum": lambda k: k.pair_sum(y, a),
        "rho_rows": lambda k: k.rho_rows(y, a),
        f"tperm_sums[m={m}]": lambda k: k.tperm_sums(y, signs, a),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,500,2000")
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--a", type=float, default=1.0)
    parser.add_argument("--m", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = _backend.available()
    print(f"backends: {', '.join(backends)}   d={args.d}  a={args.a}")
    rng = np.random.default_rng(0)
    for n in (int(s) for s in args.sizes.split(",")):
        y = rng.standard_normal((n, args.d))
        for name, fn in cases(y, args.a, args.m).items():
            best = {}
            for b in backends:
                k = _backend.get(b)
                best[b] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                print(f"{name:<20} n={n:<6} {b:<7} {best[b] * 1e3:10.2f} ms")
            if len(best) == 2:
                print(f"{'':<20} {'':<8} speedup {best['python'] / best['cython']:8.2f}x")


if __name__ == "__main__":
    main()

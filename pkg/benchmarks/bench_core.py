"""Compare the compiled core against the NumPy fallback.

Usage: ``python benchmarks/bench_core.py [--repeat R]``. Prints one row per
(kernel, size) with the best-of-R wall time for each backend and the speedup.
"""
import argparse
import timeit

import numpy as np

from twopoint import _backend
from twopoint.linalg import jacobi_eigh
from twopoint.special_functions import JacobiParams, jacobi_table


def cases(rng):
    params = JacobiParams(3.0, 1.0)
    for kmax, npts in ((60, 1_000), (200, 10_000)):
        t = rng.uniform(-1, 1, npts)
        yield f"jacobi_table k<={kmax} n={npts}", lambda b, t=t, k=kmax: jacobi_table(params, k, t, backend=b)
    for n in (20, 60, 120):
        a = rng.standard_normal((n, n))
        a = a + a.T
        yield f"jacobi_eigh n={n}", lambda b, a=a: jacobi_eigh(a, backend=b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    names = sorted(_backend.BACKENDS)
    if "cython" not in names:
        print("compiled core not built; timing the NumPy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'case':<32}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases(rng):
        best = {}
        for name in names:
            fn(name)  # warm-up
            best[name] = min(timeit.repeat(lambda: fn(name), number=1, repeat=args.repeat))
        row = f"{label:<32}" + "".join(f"{1e3 * best[n]:>16.3f}" for n in names)
        if "cython" in best:
            row += f"{best['python'] / best['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Time the numpy and compiled contour kernels on the same evaluation workload.

    python bench/bench_contour.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from hoairy import _core
from hoairy.specfun import HigherAiryEvaluator


def workload(backend, x):
    for n in (1, 2, 3):
        ev = HigherAiryEvaluator(n, backend=backend)
        for j in (0, 2 * n):
            ev(x, j)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--points", type=int, default=2000)
    args = p.parse_args()
    x = np.linspace(-30.0, 30.0, args.points)
    ref = None
    print(f"{'backend':8s} {'best [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for name in ("numpy", "cython"):
        if name not in _core.BACKENDS:
            print(f"{name:8s} {'not built':>10s}")
            continue
        best = min(timeit.repeat(lambda: workload(name, x), number=1, repeat=args.repeat))
        vals = HigherAiryEvaluator(2, backend=name)(x, 0)
        if ref is None:
            ref = (best, vals)
        print(f"{name:8s} {best:10.4f} {ref[0] / best:8.2f} {np.max(np.abs(vals - ref[1])):10.2e}")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Both backends are imported
directly, so the environment switch does not matter here.
"""

import argparse
import timeit

import numpy as np

from bmotv import _pykernels

try:
    from bmotv import _ckernels
except ImportError:
    _ckernels = None

R = 1 / 3
DEPTH = 20


def cases(rng, n):
    y = rng.uniform(0, 1, n)
    lo = rng.uniform(0, 0.9, n)
    hi = lo + 0.1
    w = 0.5 * (lo + hi)
    d = np.full(n, 0.05)
    coefs = np.array([0.0, 0.0, 1.0])
    starts = np.sort(rng.uniform(0, 1, n))
    values = rng.uniform(0, 1, n)
    return {
        "cantor_eval": lambda m: m.cantor_eval(y, R, DEPTH),
        "cantor_primitive": lambda m: m.cantor_primitive(y, R, DEPTH),
        "cantor_window": lambda m: m.cantor_window(lo, hi, w, d, coefs, R, DEPTH),
        "max_disjoint_sum": lambda m: m.max_disjoint_sum(starts, values, 0.01, 1e-12),
    }


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=20000, help="points per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the numpy fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18} {'python (s)':>12} {'cython (s)':>12} {'speedup':>9}")
    for name, call in cases(rng, args.n).items():
        tp = best_time(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<18} {tp:12.5f} {'-':>12} {'-':>9}")
            continue
        tc = best_time(lambda: call(_ckernels), args.repeat)
        print(f"{name:<18} {tp:12.5f} {tc:12.5f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()

"""Timing comparison of the compiled and numpy shrinkage kernels.

Runs shrink_weighted and lp_power_sum on a random field at the benchmark
image size and reports best-of-N wall times per backend. The compiled
backend is optional; when the extension is unavailable only the numpy
column is shown.

Usage: python3 benchmarks/bench_kernels.py [--side 512] [--repeats 7]
"""

import argparse
import timeit

import numpy as np

from lptv._core import _numpy

try:
    from lptv._core import _speedups
except ImportError:
    _speedups = None


def bench(fn, args, repeats, number=10):
    return min(timeit.repeat(lambda: fn(*args), number=number,
                             repeat=repeats)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--side", type=int, default=512)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(5)
    v = rng.standard_normal((args.side, args.side)) * 40
    w = rng.standard_normal((args.side, args.side)) * 40
    p, lam, eps = 0.1, 30.0 / 0.009, 1e-8

    cases = [
        ("shrink_weighted", (v, p, lam, eps)),
        ("lp_power_sum", (v, w, p)),
    ]
    backends = [("numpy", _numpy)]
    if _speedups is not None:
        backends.append(("cython", _speedups))
    else:
        print("compiled extension not built; timing the numpy backend only")

    print(f"{args.side}x{args.side} field, best of {args.repeats} x10 calls\n")
    header = f"{'kernel':<18}" + "".join(f"{name:>12}" for name, _ in backends)
    if _speedups is not None:
        header += f"{'speedup':>10}"
    print(header)
    for name, call_args in cases:
        times = [bench(getattr(mod, name), call_args, args.repeats)
                 for _, mod in backends]
        row = f"{name:<18}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)

    if _speedups is not None:
        # The two backends must agree to float precision, not just be fast.
        a = _numpy.shrink_weighted(v, p, lam, eps)
        b = _speedups.shrink_weighted(v, p, lam, eps)
        print(f"\nmax |numpy - cython| = {np.abs(a - b).max():.3e}")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from heckedist import _fallback
from heckedist.chebyshev import _NODES, _WEIGHTS, CDF_TOL, MeasureP, _cdf_panels

try:
    from heckedist import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(-2, 2, 100_000)
    u = rng.random(10_000)
    mu = MeasureP(2)
    c, A, B = mu.theta_params()
    panels = _cdf_panels(mu, CDF_TOL)
    F = np.sort(rng.random(100_000))
    return [
        ("cheb_sum n=30, 1e5 pts", "cheb_sum", (x, 30)),
        ("cheb_power_sums n<=10, 1e5 pts", "cheb_power_sums", (x, 10)),
        ("theta_cdf 1e5 pts", "theta_cdf", (x, c, A, B, _NODES, _WEIGHTS, panels)),
        ("inverse_cdf 1e4 draws", "inverse_cdf", (u, c, A, B, _NODES, _WEIGHTS, panels, 1e-10)),
        ("ks_from_cdf 1e5 pts", "ks_from_cdf", (F,)),
    ]


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':34} {'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8}")
    for label, name, call in cases():
        slow = best(getattr(_fallback, name), call, args.repeat)
        if _kernels is None:
            print(f"{label:34} {slow * 1e3:11.2f} {'n/a':>12} {'':>8}")
            continue
        fast = best(getattr(_kernels, name), call, args.repeat)
        print(f"{label:34} {slow * 1e3:11.2f} {fast * 1e3:12.2f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()

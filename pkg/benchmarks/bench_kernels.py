"""Compare the compiled kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Each kernel is timed on a
workload of the size met in the rate experiments; the ratio column is
fallback time over compiled time.
"""
import timeit

import numpy as np

from ridgerate import _fallback

try:
    from ridgerate import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def workloads(rng):
    x1 = rng.random((2048, 1))
    x2 = rng.random((4096, 2))
    n = 384
    amp = rng.normal(size=n) + 1j * rng.normal(size=n)
    om = rng.normal(size=(n, 2))
    om /= np.linalg.norm(om, axis=1, keepdims=True)
    b = rng.uniform(-1, 1, n)
    proj = x1 @ np.ones((1, 17))
    m = 4000
    di = rng.integers(0, 17, m)
    sc = 2.0 ** rng.integers(1, 8, m)
    of = rng.integers(-2, 100, m).astype(float)
    cost = np.triu(rng.random((257, 257)), 1)
    freq = rng.normal(size=(128, 2))
    return {
        "ridge_eval (4096 pts x 384 units, k=1)": lambda mod: mod.ridge_eval(amp, om, b, 1, x2),
        "bspline_columns (2048 pts x 4000 atoms, k=1)": lambda mod: mod.bspline_columns(proj, di, sc, of, 1),
        "minplus_dp (257 grid, 32 layers)": lambda mod: mod.minplus_dp(cost, 32),
        "exp_sum (4096 pts x 128 terms)": lambda mod: mod.exp_sum(amp[:128], freq, x2),
    }


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':48s} {'python [ms]':>12s} {'cython [ms]':>12s} {'ratio':>8s}")
    for name, fn in workloads(rng).items():
        tp = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=3)) * 1e3
        if _kernels is None:
            print(f"{name:48s} {tp:12.2f} {'n/a':>12s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=3)) * 1e3
        print(f"{name:48s} {tp:12.2f} {tc:12.2f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()

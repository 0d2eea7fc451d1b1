"""Benchmark the compiled tangency kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--planes N] [--repeats R]
"""

import argparse
import time

import numpy as np

from conelab._kernels import _tangency_py

try:
    from conelab._kernels import _tangency as compiled
except ImportError:
    compiled = None


def _pnorm_batch(planes, rng):
    c = rng.normal(size=(planes, 3, 2)) * 0.6
    c[:, 0, 0] += 1.4
    c[:, 1, 1] += 1.4
    xi = rng.uniform(2.0, 4.0, planes) * np.where(rng.uniform(size=planes) > 0.5, 1, -1)
    return c, xi


def _radial_batch(planes, rng):
    par = np.zeros((planes, 13))
    par[:, 0] = rng.uniform(0.6, 2.0, planes)
    par[:, 2] = rng.uniform(0.6, 2.0, planes)
    par[:, 1] = rng.uniform(-0.2, 0.2, planes)
    par[:, 3:12] = rng.normal(size=(planes, 9)) * 0.03
    par[:, 12] = 1.0
    xi = rng.uniform(2.5, 4.0, planes) * np.where(rng.uniform(size=planes) > 0.5, 1, -1)
    return par, xi


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--planes", type=int, default=4096)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    c, xi_p = _pnorm_batch(args.planes, rng)
    par, xi_r = _radial_batch(args.planes, rng)

    rows = []
    for name, fn_py, fn_c in (
        ("pnorm_tangent_angles (p=4)",
         lambda: _tangency_py.pnorm_tangent_angles(c, 4.0, xi_p),
         (lambda: compiled.pnorm_tangent_angles(c, 4.0, xi_p)) if compiled else None),
        ("radial_tangent_angles",
         lambda: _tangency_py.radial_tangent_angles(par, xi_r),
         (lambda: compiled.radial_tangent_angles(par, xi_r)) if compiled else None),
    ):
        t_py = _time(fn_py, args.repeats)
        if fn_c is not None:
            a = fn_py()
            b = fn_c()
            assert np.abs(a - b).max() < 1e-12, "backend mismatch"
            t_c = _time(fn_c, args.repeats)
            rows.append((name, t_py, t_c, t_py / t_c))
        else:
            rows.append((name, t_py, None, None))

    print(f"batch size: {args.planes} planes, best of {args.repeats}")
    print(f"{'kernel':36s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, t_py, t_c, ratio in rows:
        if t_c is None:
            print(f"{name:36s} {t_py * 1e3:10.2f}ms {'n/a':>12s} {'n/a':>9s}")
        else:
            print(f"{name:36s} {t_py * 1e3:10.2f}ms {t_c * 1e3:10.2f}ms {ratio:8.1f}x")
    if compiled is None:
        print("compiled backend not available; only the fallback was timed")


if __name__ == "__main__":
    main()

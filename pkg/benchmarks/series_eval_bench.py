"""Head-to-head timing of the numba and numpy series kernels.

Usage::

    python benchmarks/series_eval_bench.py [--points 257] [--repeats 50]

Times every kernel on realistic mode tables (both truncations used by
the verification suite) and prints the per-call medians and speedups.
"""

import argparse
import math
import statistics
import time

import numpy as np

from mirrorheat.kernels import HAS_NUMBA, NUMBA_IMPLS, NUMPY_IMPLS


def _problem(n_points, n_modes, seed=0):
    rng = np.random.default_rng(seed)
    x = np.linspace(-math.pi, math.pi, n_points)
    t = np.full(n_points, 0.4)
    half = n_modes // 2
    kappa = np.concatenate([np.arange(1.0, half + 1), np.arange(n_modes - half) + 0.5])
    lam = 1.2 * kappa**2
    c = rng.normal(0, 1, n_modes) / (1 + kappa**3)
    is_sin = rng.random(n_modes) < 0.5
    return x, t, kappa, lam, c, is_sin


def _time_call(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=257)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba is not importable; nothing to compare")
        return 1

    print(f"points={args.points} repeats={args.repeats} (medians in ms)")
    print(f"{'kernel':<12} {'modes':>6} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for n_modes in (129, 258):
        x, t, kappa, lam, c, is_sin = _problem(args.points, n_modes)
        for name in ("u_series", "f_series", "ut_series", "uxx_series"):
            if name == "f_series":
                np_args = (x, kappa, lam, c, is_sin)
                nb_args = np_args
            elif name == "uxx_series":
                np_args = (x, t, kappa, lam, c, is_sin, True)
                nb_args = np_args
            else:
                np_args = (x, t, kappa, lam, c, is_sin)
                nb_args = np_args
            NUMBA_IMPLS[name](*nb_args)  # compile before timing
            t_np = _time_call(NUMPY_IMPLS[name], np_args, args.repeats)
            t_nb = _time_call(NUMBA_IMPLS[name], nb_args, args.repeats)
            print(f"{name:<12} {n_modes:>6} {t_np * 1e3:>10.3f} {t_nb * 1e3:>10.3f} "
                  f"{t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

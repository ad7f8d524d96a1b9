#!/usr/bin/env python3
"""Timing comparison of the hot kernels against their numpy twins.

The backend is fixed at import time (numba when importable, unless
NMRQREG_DISABLE_NUMBA=1), so this script measures the kernels in the
current process and again in a child process started with the numpy
twins forced, then prints both columns side by side.

Usage: python3 benchmarks/bench_kernels.py [repeats]
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def _best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def collect(repeats):
    from nmrqreg._kernels import (
        HAVE_NUMBA,
        dipolar_moment_sum,
        lattice_flux,
        phase_factor_matrix,
    )

    rng = np.random.default_rng(1)
    # xs, ys span a product grid: 64 x 256 = 16384 dipoles per plane
    planes = np.linspace(-1.6e-6, 1.6e-6, 256)
    xs = np.linspace(-1.2e-6, 1.2e-6, 64)
    ys = np.linspace(-1.6e-6, 1.6e-6, 256)
    phi = rng.standard_normal((3, 500_000))
    cos_t = rng.uniform(-1.0, 1.0, 1_000_000)
    radii = rng.uniform(3e-10, 3e-9, 1_000_000)

    # first calls trigger compilation; keep them out of the timings
    lattice_flux(planes[:4], xs[:16], ys[:16], 1.6e-6, 1.5e-8)
    phase_factor_matrix(phi[0][:1024], phi[1][:1024], phi[2][:1024])
    dipolar_moment_sum(cos_t[:1024], radii[:1024])

    return {
        "backend": "numba" if HAVE_NUMBA else "numpy",
        "timings": {
            "lattice_flux (256 planes x 64x256 grid)": _best(
                lambda: lattice_flux(planes, xs, ys, 1.6e-6, 1.5e-8),
                repeats),
            "phase_factor_matrix (5e5 draws)": _best(
                lambda: phase_factor_matrix(phi[0], phi[1], phi[2]),
                repeats),
            "dipolar_moment_sum (1e6 draws)": _best(
                lambda: dipolar_moment_sum(cos_t, radii), repeats),
        },
    }


def main():
    if "--collect" in sys.argv:
        repeats = int(sys.argv[-1]) if sys.argv[-1].isdigit() else 5
        print(json.dumps(collect(repeats)))
        return 0
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    here = collect(repeats)
    env = dict(os.environ, NMRQREG_DISABLE_NUMBA="1")
    child = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--collect",
         str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    numpy_side = json.loads(child.stdout)
    if here["backend"] == "numpy":
        print("numba unavailable or disabled here; both columns use "
              "the numpy twins")
    width = max(len(k) for k in here["timings"])
    print("%-*s  %12s  %12s  %8s"
          % (width, "kernel (best of %d)" % repeats, here["backend"],
             "numpy", "ratio"))
    for name, fast in here["timings"].items():
        slow = numpy_side["timings"][name]
        print("%-*s  %10.4f s  %10.4f s  %7.1fx"
              % (width, name, fast, slow, slow / fast))
    return 0


if __name__ == "__main__":
    sys.exit(main())

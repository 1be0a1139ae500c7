"""Compare the compiled and numpy kernel backends.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``.  Prints the best
wall time per backend and the speedup for each kernel, after checking that
both backends agree.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from latticewigner import kernels
from latticewigner.core import wigner_grid
from latticewigner.states import random_density


def cases(rng):
    rho = random_density(rng, 40).matrix
    values = wigner_grid(random_density(rng, 200), 1024).values
    eps = 1e-14 * np.max(np.abs(values), axis=1)
    w1 = wigner_grid(random_density(rng, 4), 16).values
    w2 = wigner_grid(random_density(rng, 4), 16).values
    return {
        "direct_grid (L=40, N_k=512)": lambda b: kernels.direct_grid(rho, 512, b),
        "sign_filter (399 x 1024)": lambda b: kernels.sign_filter(values, eps, -200, b),
        "product_grid (7 x 16)": lambda b: kernels.product_grid(w1, w2, b),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = sorted(kernels.BACKENDS)
    print(f"backends: {', '.join(backends)}; threads: {kernels.thread_count()}")
    for name, fn in cases(np.random.default_rng(0)).items():
        results = {b: fn(b) for b in backends}
        ref = results["python"]
        for b in backends:
            assert np.allclose(results[b], ref, atol=1e-12), f"{name}: {b} disagrees"
        times = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
                 for b in backends}
        cells = "  ".join(f"{b} {1e3 * t:8.2f} ms" for b, t in times.items())
        extra = ""
        if "cython" in times:
            extra = f"  speedup x{times['python'] / times['cython']:.1f}"
        print(f"{name:30s} {cells}{extra}")


if __name__ == "__main__":
    main()

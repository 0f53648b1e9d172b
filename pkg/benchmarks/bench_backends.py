#!/usr/bin/env python3
"""Timing comparison of the numba and numpy kernel backends.

Runs every hot kernel on representative inputs under both implementations
and prints per-call times plus the speedup. The package selects its backend
at import time through LNOPT_BACKEND (auto|numba|numpy); this script imports
both implementation modules directly so a single process can time them
side by side.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from lnopt._kernels import numpy_impl

try:
    from lnopt._kernels import numba_impl
except ImportError:
    numba_impl = None


def _time(fn, args, repeats):
    fn(*args)  # warm-up (and JIT compile for the numba lane)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def cases(rng):
    bits100 = (rng.random(100) < 0.5).astype(float)
    z10 = rng.standard_normal(10)
    img = rng.random((64, 64, 3))
    pert = rng.random((64, 64, 3)) * 0.06 - 0.03
    plane = rng.random((64, 64))
    return [
        ("onemax_loss n=100", "onemax_loss", (bits100,), 20000),
        ("leadingones_loss n=100", "leadingones_loss", (bits100,), 20000),
        ("ising_ring_loss n=100", "ising_ring_loss", (bits100,), 20000),
        ("sphere_loss d=10", "sphere_loss", (z10,), 20000),
        ("illcond_loss d=10", "illcond_loss", (z10,), 20000),
        ("multimodal_loss d=10", "multimodal_loss", (z10,), 20000),
        ("path_loss d=10", "path_loss", (z10,), 20000),
        ("clamp_add 64x64x3", "clamp_add", (img, pert), 2000),
        ("gray_pool 64x64x3 -> 8x8", "gray_pool", (img, 8, 8), 2000),
        ("neighborhood_mean_2d 64x64", "neighborhood_mean_2d", (plane,), 2000),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=None,
                        help="override per-kernel repeat counts")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':34} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    print("-" * 70)
    for label, name, fnargs, repeats in cases(rng):
        reps = args.repeats or repeats
        t_np = _time(getattr(numpy_impl, name), fnargs, reps)
        if numba_impl is None:
            print(f"{label:34} {t_np * 1e6:10.1f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_nb = _time(getattr(numba_impl, name), fnargs, reps)
        print(
            f"{label:34} {t_np * 1e6:10.1f}us {t_nb * 1e6:10.1f}us {t_np / t_nb:8.1f}x"
        )
    if numba_impl is None:
        print("\nnumba unavailable: only the numpy fallback was timed")


if __name__ == "__main__":
    main()

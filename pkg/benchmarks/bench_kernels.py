"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with the best wall time of each backend, the
speedup and whether the two outputs agree exactly.
"""
import argparse
import time

import numpy as np

from kinetikos.kernels import backends


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return a.shape == b.shape and np.array_equal(a, b)


def cases(rng):
    coeffs = rng.uniform(-1, 1, (4000, 5))
    centers = rng.uniform(0, 1, (256, 2))
    radii_sq = rng.uniform(0.001, 0.05, 256)
    queries = rng.uniform(0, 1, (20000, 2))
    points = rng.uniform(0, 1, (20000, 2))
    sites = rng.uniform(0, 1, (64, 2))
    return {
        "real_roots_batch (4000 quartics)": lambda m: m.real_roots_batch(coeffs, 0.0, 1.0, 1e-10),
        "ball_depth (20000 x 256)": lambda m: m.ball_depth(queries, centers, radii_sq, 1e-9, 0.0),
        "nearest_sites (20000 x 64)": lambda m: m.nearest_sites(points, sites),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    mods = backends()
    if "native" not in mods:
        print("native extension not built; only the fallback is available")
    for name, fn in cases(np.random.default_rng(args.seed)).items():
        times, outs = {}, {}
        for key, mod in mods.items():
            times[key], outs[key] = _best(lambda: fn(mod), args.repeat)
        line = f"{name:36s} python {times['python'] * 1e3:9.2f} ms"
        if "native" in times:
            same = _same(outs["python"], outs["native"])
            line += (f"  native {times['native'] * 1e3:9.2f} ms  speedup {times['python'] / times['native']:6.1f}x"
                     f"  identical={same}")
        print(line)


if __name__ == "__main__":
    main()

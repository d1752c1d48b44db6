"""Compare the compiled and NumPy successive-cancellation kernels.

Usage: python3 benchmarks/bench_sc.py [--trials T ...] [--blocklen N ...]
"""

import argparse
import time

import numpy as np

from polar_mismatch import _kernels
from polar_mismatch.channels import bsc_pair
from polar_mismatch.codec import leaf_llr_table


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, action="append", help="blocks per kernel call")
    ap.add_argument("--blocklen", type=int, action="append")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    sizes = args.blocklen or [64, 256, 1024]
    batches = args.trials or [1, 16, 2000]

    pair = bsc_pair(0.11, 0.89)
    table = leaf_llr_table(pair.v)
    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["cython"] if _kernels.BACKEND == "cython" else [])
    print(f"{'N':>6} {'batch':>6} {'backend':>8} {'blocks/s':>12} {'speedup':>8}")
    for N in sizes:
        for T in batches:
            llr = table[rng.integers(0, 2, (T, N))]
            known = np.zeros(N, dtype=np.uint8)
            u = np.zeros((T, N), dtype=np.uint8)
            reps = max(1, 2000 // T)

            def run(b):
                for _ in range(reps):
                    _kernels.sc_decode_batch(llr, known, u, backend=b)

            base = None
            for b in backends:
                t = _time(lambda: run(b), args.repeat) / reps
                base = base or t
                print(f"{N:>6} {T:>6} {b:>8} {T / t:>12.0f} {base / t:>7.1f}x")
    if len(backends) == 1:
        print("compiled kernel not built; only the NumPy backend was timed")


if __name__ == "__main__":
    main()

#!/usr/bin/env python
"""Time the numba kernels against their pure-numpy counterparts.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --bound 2000000 --repeat 5 --output bench.json

Each kernel is called once to trigger compilation, then timed ``--repeat``
times; the best time is reported.  Outputs of the two paths are compared
and any disagreement aborts the run.
"""
import argparse
import json
import sys
import time
from math import isqrt

import numpy as np

from delicate_primes import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def cases(bound, seed):
    base_primes = K.small_primes(isqrt(bound) + 1)
    primes = np.flatnonzero(K._sieve_segment_np(0, bound, base_primes)).astype(np.int64)
    rng = np.random.default_rng(seed)
    words = rng.integers(1 << 40, 1 << 61, size=20_000, dtype=np.int64)
    # the classic covering plus two idle large moduli: a full scan of ~1.2e8
    moduli = np.array([2, 3, 4, 6, 12, 9973, 1009], dtype=np.int64)
    residues = np.array([0, 0, 1, 5, 7, 0, 0], dtype=np.int64)
    period = 12 * 9973 * 1009
    return {
        "sieve_segment": (
            lambda: K._sieve_segment_nb(0, bound, base_primes),
            lambda: K._sieve_segment_np(0, bound, base_primes)),
        "first_uncovered": (
            lambda: K._first_uncovered_nb(moduli, residues, period, 1 << 22),
            lambda: K._first_uncovered_np(moduli, residues, period, 1 << 22)),
        "delicate_mask": (
            lambda: K._delicate_mask_nb(primes, 10, True),
            lambda: K._delicate_mask_np(primes, 10, True)),
        "is_prime_words": (
            lambda: K._is_prime_words_nb(words),
            lambda: K._is_prime_words_np(words)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", help="write results as JSON")
    args = ap.parse_args(argv)

    if not K.NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare", file=sys.stderr)
        return 1

    rows = []
    print(f"{'kernel':<18}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, (nb, npy) in cases(args.bound, args.seed).items():
        nb()  # compile
        t_nb, r_nb = best_of(nb, args.repeat)
        t_np, r_np = best_of(npy, args.repeat)
        if not np.array_equal(np.asarray(r_nb), np.asarray(r_np)):
            print(f"{name}: numba and numpy results differ", file=sys.stderr)
            return 2
        rows.append({"kernel": name, "numba_s": t_nb, "numpy_s": t_np,
                     "speedup": t_np / t_nb if t_nb else None})
        print(f"{name:<18}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>9.1f}x")

    if args.output:
        with open(args.output, "w") as fh:
            json.dump({"bound": args.bound, "repeat": args.repeat, "results": rows}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())

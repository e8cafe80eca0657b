"""Time the hot kernels under the numba backend and the numpy fallback.

Run twice, once per backend, and print one row per kernel:

    python3 benchmarks/bench_backends.py            # current backend
    SKEWLAB_BACKEND=numpy python3 benchmarks/bench_backends.py

or let the script orchestrate both via subprocesses:

    python3 benchmarks/bench_backends.py --compare
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_sieve():
    from skewlab.primes import PrimeSource

    src = PrimeSource()
    src.primes_in(2, 10**5)  # warm the JIT outside the clock
    t0 = time.perf_counter()
    n = len(src.primes_in(2, 10**7))
    return time.perf_counter() - t0, n


def bench_window_stat():
    from skewlab.char_sums import huxley_stat_progressions
    from skewlab.primes import default_source

    default_source().primes_in(2, 2 * 10**6)  # cache outside the clock
    t0 = time.perf_counter()
    res = huxley_stat_progressions(10**6, 10**4, 997, 31)
    return time.perf_counter() - t0, round(res["value"], 3)


def bench_dd_frac():
    from skewlab.dd import frac01_int_mult

    n = np.arange(1, 5 * 10**6, dtype=np.int64)
    hi, lo = 0.6180339887498949, -5.4e-17
    frac01_int_mult(n[:10], hi, lo)  # warm the JIT
    t0 = time.perf_counter()
    out = frac01_int_mult(n, hi, lo)
    return time.perf_counter() - t0, round(float(out.mean()), 6)


def bench_prime_average():
    from skewlab.presets import prime_pair
    from skewlab.skew_dynamics import Observable, SkewProduct, prime_weighted_average

    cf, g, _ = prime_pair()
    T = SkewProduct(cf, g)
    prime_weighted_average(T, Observable(0, 1), 10**4, 0.0, 0.0)  # warm
    t0 = time.perf_counter()
    avg, _ = prime_weighted_average(T, Observable(0, 1), 10**6, 0.0, 0.0)
    return time.perf_counter() - t0, round(abs(avg), 6)


BENCHES = {
    "segmented_sieve_1e7": bench_sieve,
    "huxley_window_1e6": bench_window_stat,
    "dd_frac_5e6": bench_dd_frac,
    "prime_average_1e6": bench_prime_average,
}


def run_current():
    import skewlab

    rows = {}
    for name, fn in BENCHES.items():
        seconds, checksum = fn()
        rows[name] = {"seconds": seconds, "checksum": checksum}
    return {"backend": skewlab.backend_name(), "rows": rows}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--compare", action="store_true",
                    help="run both backends in subprocesses and print a table")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    if not args.compare:
        result = run_current()
        if args.json:
            print(json.dumps(result))
        else:
            print(f"backend: {result['backend']}")
            for name, row in result["rows"].items():
                print(f"  {name:24s} {row['seconds']*1e3:9.1f} ms   (check {row['checksum']})")
        return

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, SKEWLAB_BACKEND=backend)
        out = subprocess.run([sys.executable, __file__, "--json"], env=env,
                             capture_output=True, text=True, check=True)
        results[backend] = json.loads(out.stdout.strip().splitlines()[-1])
    print(f"{'kernel':24s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for name in BENCHES:
        tb = results["numba"]["rows"][name]["seconds"]
        tn = results["numpy"]["rows"][name]["seconds"]
        cb = results["numba"]["rows"][name]["checksum"]
        cn = results["numpy"]["rows"][name]["checksum"]
        flag = "" if cb == cn else "  CHECKSUM MISMATCH"
        print(f"{name:24s} {tb*1e3:10.1f}ms {tn*1e3:10.1f}ms {tn/tb:8.2f}x{flag}")


if __name__ == "__main__":
    main()

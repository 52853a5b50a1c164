"""Compare the numba and numpy row reduction kernels.

    python3 benchmarks/bench_rref.py            # kernel timings
    python3 benchmarks/bench_rref.py --e2e B2   # whole pipeline, both paths

The end-to-end mode runs each path in a fresh interpreter because the
dispatch flag is read from the environment.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from soergelcalc._kernels import DISABLE_ENV, rref_mod_numba, rref_mod_numpy

PRIME = 2147483629  # largest prime below 2**31, as used by the multi-modular solver


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_bench(sizes, repeat, seed):
    rng = np.random.default_rng(seed)
    rref_mod_numba(np.eye(2, dtype=np.int64), 3)  # compile outside the timing
    print(f"{'shape':>12} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for rows, cols in sizes:
        a = rng.integers(0, PRIME, size=(rows, cols), dtype=np.int64)
        # low rank input looks more like the Hom systems than a dense random one
        a[rows // 2:] = (a[: rows - rows // 2] * 3) % PRIME
        r1, p1 = rref_mod_numpy(a, PRIME)
        r2, p2 = rref_mod_numba(a, PRIME)
        assert np.array_equal(r1, r2) and np.array_equal(p1, p2)
        t_np = best_of(lambda: rref_mod_numpy(a, PRIME), repeat)
        t_nb = best_of(lambda: rref_mod_numba(a, PRIME), repeat)
        print(f"{rows:>5}x{cols:<6} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:8.1f}")


E2E = """
import time
from soergelcalc.linalg import CoefRing
from soergelcalc.pipeline import Engine
Engine().results("A1", CoefRing.{ring})  # import and compile outside the timing
t = time.perf_counter()
Engine().results({preset!r}, CoefRing.{ring})
print(time.perf_counter() - t)
"""


def e2e_bench(preset, ring):
    code = E2E.format(preset=preset, ring=ring)
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, **{DISABLE_ENV: flag})
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        out[label] = float(res.stdout.strip().splitlines()[-1])
    print(f"{preset} {ring}: numba {out['numba']:.2f}s  numpy {out['numpy']:.2f}s")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--e2e", metavar="PRESET")
    args = ap.parse_args()
    if args.e2e:
        e2e_bench(args.e2e, "rationals()")
        e2e_bench(args.e2e, "prime_field(5)")
        return
    kernel_bench([(20, 40), (60, 120), (150, 300), (300, 600)], args.repeat, args.seed)


if __name__ == "__main__":
    main()

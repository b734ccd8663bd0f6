"""Compare the compiled kernels with the pure-Python fallback.

Kernel-level rows call both implementations on identical inputs (and check
the outputs match).  The pipeline rows run a small campaign in a
subprocess per backend, selected with LAMBDACHI_PURE_PYTHON.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--skip-pipeline]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

from lambdachi import _kernels_py as py
from lambdachi.modules import cyclotomic_block

try:
    from lambdachi import _kernels as cy
except ImportError:
    sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")


def random_matrix(rng, n, m, bound):
    return [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(n)]


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def kernel_cases(rng):
    small = random_matrix(rng, 10, 10, 3)
    yield "smith 10x10 (transforms)", lambda k: k.smith(small, 10, 10, True)
    yield "column_hermite 10x10", lambda k: k.column_hermite(small, 10, 10)

    # dense 30x30 minors reach ~1e40, so these exercise the overflow fallback
    d = 30
    a = random_matrix(rng, d, d, 20)
    b = random_matrix(rng, d, d, 20)
    yield "matmul 30x30", lambda k: k.matmul(a, b, d, d, d)
    yield "smith 30x30 (transforms)", lambda k: k.smith(a, d, d, True)
    yield "smith 30x30 (divisors only)", lambda k: k.smith(a, d, d, False)
    yield "column_hermite 30x30", lambda k: k.column_hermite(a, d, d)
    yield "rank 30x30", lambda k: k.rank(a, d, d)
    yield "local_valuations 30x30 mod 3^12", lambda k: k.local_valuations(a, d, d, 3, 12)

    C = cyclotomic_block(5, 3)  # 100x100 companion block
    n = C.rows
    T = (C.power(5) - C.identity(n)).tolist()
    yield "column_hermite cyclotomic 100x100", lambda k: k.column_hermite(T, n, n)
    H, _, r, piv = py.column_hermite(T, n, n)
    Y = C.tolist()
    yield "solve_echelon cyclotomic 100x100", lambda k: k.solve_echelon(H, piv, r, Y, n, n)

    big = [[x * (2 ** 70) + 1 for x in row] for row in random_matrix(rng, 8, 8, 5)]
    yield "smith 8x8 bigint (fallback path)", lambda k: k.smith(big, 8, 8, True)


PIPELINE = ("from lambdachi.harness import CampaignConfig, run_campaign; import time; "
            "t = time.perf_counter(); "
            "s = run_campaign(CampaignConfig(seed=1, primes=(2, 3, 5), exponents=(1, 2, 3), trials={trials})); "
            "print(time.perf_counter() - t, s.all_passed)")


def pipeline(trials: int, pure: bool) -> float:
    env = dict(os.environ)
    env.pop("LAMBDACHI_PURE_PYTHON", None)
    if pure:
        env["LAMBDACHI_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", PIPELINE.format(trials=trials)], env=env, check=True,
                         capture_output=True, text=True).stdout.split()
    if out[1] != "True":
        raise SystemExit("campaign reported failures")
    return float(out[0])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=10, help="campaign trials per (p, n) for the pipeline rows")
    ap.add_argument("--skip-pipeline", action="store_true")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print(f"{'case':40s} {'python':>10s} {'cython':>10s} {'speedup':>8s}  compiled path")
    for name, fn in kernel_cases(rng):
        t_py, out_py = best_of(lambda: fn(py), args.repeat)
        before = cy.fallback_calls
        t_cy, out_cy = best_of(lambda: fn(cy), args.repeat)
        # a fallback means some intermediate left the int64 range and the exact Python kernel reran
        path = "int64" if cy.fallback_calls == before else "overflow -> python"
        if out_py != out_cy:
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:40s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms {t_py / t_cy:7.1f}x  {path}")
    if not args.skip_pipeline:
        t_py = pipeline(args.trials, True)
        t_cy = pipeline(args.trials, False)
        name = f"campaign, {9 * args.trials} trials"
        print(f"{name:40s} {t_py * 1e3:9.0f}ms {t_cy * 1e3:9.0f}ms {t_py / t_cy:7.1f}x")
    print(f"compiled calls: {cy.fast_calls}, fallbacks to Python: {cy.fallback_calls}")


if __name__ == "__main__":
    main()

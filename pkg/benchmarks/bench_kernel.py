#!/usr/bin/env python3
"""Benchmark the compiled q-product kernel against the pure-Python fallback.

Times the two hot loops at several precisions and term counts, then a
whole-pipeline comparison (the degree-16 class polynomial).  Run from the
repository root:

    python benchmarks/bench_kernel.py
"""

import os
import statistics
import subprocess
import sys
import time

import gmpy2
from gmpy2 import mpc, mpfr

from siegelinv import _qkernel_py

try:
    from siegelinv import _qkernel
except ImportError:
    _qkernel = None


def sample_inputs(prec):
    with gmpy2.context(precision=prec):
        q = gmpy2.exp(mpc(mpfr("-1.4"), mpfr("2.0")))
        qz = gmpy2.exp(mpc(mpfr("0.3"), mpfr("-0.9")))
    return q, qz


def best_of(fn, repeats=7):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def bench_kernels():
    print(f"{'prec':>6} {'terms':>6} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for prec in (128, 256, 512, 1024, 2048):
        terms = max(200, prec + 32)  # roughly the Im(tau) ~ 0.35 regime
        q, qz = sample_inputs(prec)
        py_best, _ = best_of(lambda: _qkernel_py.qprod(q, qz, terms, prec))
        if _qkernel is None:
            print(f"{prec:>6} {terms:>6} {py_best * 1e3:>12.3f} {'n/a':>14} {'n/a':>8}")
            continue
        cy_best, _ = best_of(lambda: _qkernel.qprod(q, qz, terms, prec))
        assert _qkernel.qprod(q, qz, terms, prec) == _qkernel_py.qprod(q, qz, terms, prec)
        print(f"{prec:>6} {terms:>6} {py_best * 1e3:>12.3f} {cy_best * 1e3:>14.3f} "
              f"{py_best / cy_best:>7.2f}x")


def bench_pipeline():
    code = (
        "import time; from siegelinv import make_field, minimal_polynomial; "
        "t0 = time.perf_counter(); "
        "minimal_polynomial(make_field(-20), 12, prec=1024, force=True); "
        "print(time.perf_counter() - t0)"
    )
    rows = []
    for label, env in (("compiled", {}), ("python", {"SIEGELINV_PURE": "1"})):
        if label == "compiled" and _qkernel is None:
            continue
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, **env},
            capture_output=True, text=True, check=True,
        )
        rows.append((label, float(out.stdout)))
    print("\ndegree-16 class polynomial at 1024 bits:")
    for label, seconds in rows:
        print(f"  {label:>9}: {seconds * 1e3:.1f} ms")


if __name__ == "__main__":
    print(f"compiled kernel available: {_qkernel is not None}\n")
    bench_kernels()
    bench_pipeline()

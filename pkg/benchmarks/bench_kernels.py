"""Compare the compiled and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--points 1000000] [--repeat 5]

Reports per-kernel throughput, the largest disagreement between the two
backends relative to the largest value, and end-to-end time for one
dephasing curve with each backend (run in a subprocess so the import-time
selection applies).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from becqsl.kernels import backend_module

CURVE_SNIPPET = """
import time
from becqsl import default_params, to_internal, reduce, sample_curve
from becqsl.kernels import BACKEND
r = reduce(to_internal(default_params()))
t0 = time.perf_counter()
sample_curve(r, r.time_scale * __import__('numpy').logspace(-2, 3, 64))
print(BACKEND, time.perf_counter() - t0)
"""


def bench(name, fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    try:
        native = backend_module("native")
    except ImportError:
        sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    python = backend_module("python")

    rng = np.random.default_rng(0)
    x = rng.uniform(0, 60, args.points)
    k = rng.uniform(0, 0.25, args.points)
    cases = {
        "j0": lambda m: m.j0(x),
        "one_minus_sinc": lambda m: m.one_minus_sinc(x),
        "angular_factor(2)": lambda m: m.angular_factor(2, x),
        "gamma_integrands(3)": lambda m: m.gamma_integrands(k, 3, 7.7e-7, 14.45, 45.0, 150.0, 3e4),
    }
    print(f"{'kernel':22s} {'python ms':>10s} {'native ms':>10s} {'speedup':>8s} {'rel diff':>11s}")
    for label, fn in cases.items():
        tp = bench(label, lambda: fn(python), args.repeat)
        tn = bench(label, lambda: fn(native), args.repeat)
        a, b = np.asarray(fn(python)), np.asarray(fn(native))
        diff = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
        print(f"{label:22s} {1e3 * tp:10.2f} {1e3 * tn:10.2f} {tp / tn:8.2f} {diff:11.2e}")

    print("\nend-to-end, 64-point dephasing curve:")
    for pure in ("", "1"):
        env = dict(os.environ, BECQSL_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", CURVE_SNIPPET], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:8s} {float(secs):.3f} s")


if __name__ == "__main__":
    main()

"""Time the compiled orbit kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --iterations 20000 --repeats 3
"""

import argparse
import json
import time

import numpy as np

from crossk import TorusMap
from crossk._kernels import c_backend, py_backend
from crossk.trigpoly import TrigPoly


def _best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(map, N, repeats):
    packed = map.packed()
    x0 = np.full(map.dim, 0.1)
    obs = TrigPoly.character([1] + [0] * (map.dim - 1))
    of = np.array([k for k, _ in obs.items()], dtype=np.int64)
    ore = np.array([c.real for _, c in obs.items()])
    oim = np.array([c.imag for _, c in obs.items()])
    calls = {
        "orbit": lambda b: b.orbit(*packed, x0, N),
        "ergodic_sum": lambda b: b.ergodic_sum(*packed, x0, of, ore, oim, N),
        "winding_sums": lambda b: b.winding_sums(*packed, x0, map.dim - 1, N),
    }
    rows = []
    for name, call in calls.items():
        row = {"map": map.name, "kernel": name, "iterations": N,
               "python_s": _best(lambda: call(py_backend), repeats)}
        if c_backend is not None:
            row["cython_s"] = _best(lambda: call(c_backend), repeats)
            row["speedup"] = row["python_s"] / row["cython_s"]
            a, b = np.asarray(call(py_backend)), np.asarray(call(c_backend))
            row["max_abs_diff"] = float(np.max(np.abs(a - b)))
        rows.append(row)
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iterations", type=int, default=20000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    maps = [TorusMap.ji(2, 3), TorusMap.rouhani(r=TrigPoly.sin(1, 0, 0.05))]
    rows = [r for m in maps for r in bench(m, args.iterations, args.repeats)]
    print(json.dumps({"compiled_available": c_backend is not None, "results": rows}, indent=2))


if __name__ == "__main__":
    main()

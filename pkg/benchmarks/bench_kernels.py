"""Benchmark the accelerated kernels against the pure-numpy fallback.

Runs each workload in two subprocesses (one per dispatch mode, since the
mode is fixed at import) and prints a timing table.

Usage: python benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = """
import json, time
import numpy as np
from rmtkit import accel, kernels, linalg

sizes = json.loads({sizes!r})
repeat = {repeat}
rng = np.random.default_rng(0)
out = {{"mode": "numba" if accel.USE_NUMBA else "numpy"}}

# warm up the jit compiler outside the timed region
A0 = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
linalg.singular_values(A0)
linalg.eigenvalues(A0)
kernels.max_ball_count(rng.normal(size=64), rng.normal(size=64), 0.5)
kernels.lattice_mean_dist2_grid(
    np.array([0.5 + 0j]), np.ones(4, dtype=np.complex128),
    (rng.normal(size=(100, 4)) + 1j * rng.normal(size=(100, 4))))

rows = []
for n in sizes:
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    t0 = time.perf_counter()
    for _ in range(repeat):
        linalg.singular_values(A)
    t_sv = (time.perf_counter() - t0) / repeat

    t0 = time.perf_counter()
    for _ in range(repeat):
        linalg.eigenvalues(A)
    t_eig = (time.perf_counter() - t0) / repeat

    pts = rng.normal(size=20000) + 1j * rng.normal(size=20000)
    t0 = time.perf_counter()
    for _ in range(repeat):
        kernels.max_ball_count(pts.real, pts.imag, 0.05)
    t_ball = (time.perf_counter() - t0) / repeat

    Xt = rng.normal(size=(20000, 8)) + 1j * rng.normal(size=(20000, 8))
    thetas = np.exp(2j * np.pi * np.arange(64) / 64)
    v = np.ones(8, dtype=np.complex128) / np.sqrt(8)
    t0 = time.perf_counter()
    for _ in range(repeat):
        kernels.lattice_mean_dist2_grid(thetas, v, Xt)
    t_lat = (time.perf_counter() - t0) / repeat

    rows.append({{"n": n, "singular_values": t_sv, "eigenvalues": t_eig,
                  "max_ball_20k": t_ball, "lattice_64x20k": t_lat}})
out["rows"] = rows
print("BENCH " + json.dumps(out))
"""


def run_mode(no_numba, sizes, repeat):
    env = dict(os.environ)
    env["RMTKIT_NO_NUMBA"] = "1" if no_numba else "0"
    code = WORKER.format(sizes=json.dumps(sizes), repeat=repeat)
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True, check=True)
    line = [l for l in proc.stdout.splitlines() if l.startswith("BENCH ")][-1]
    return json.loads(line[len("BENCH "):])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="32,64,128")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    fast = run_mode(False, sizes, args.repeat)
    slow = run_mode(True, sizes, args.repeat)
    keys = ["singular_values", "eigenvalues", "max_ball_20k", "lattice_64x20k"]
    print(f"{'workload':<22}{'n':>6}{fast['mode']:>12}{slow['mode']:>12}"
          f"{'speedup':>10}")
    for fa, sl in zip(fast["rows"], slow["rows"]):
        for k in keys:
            ratio = sl[k] / fa[k] if fa[k] > 0 else float("inf")
            print(f"{k:<22}{fa['n']:>6}{fa[k] * 1e3:>10.2f}ms"
                  f"{sl[k] * 1e3:>10.2f}ms{ratio:>9.1f}x")


if __name__ == "__main__":
    main()

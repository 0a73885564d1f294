"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--quick]

Times the two hot kernels directly, then a full L1-CN run with each backend
in a fresh interpreter (the backend is fixed at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from fracsav import _pykernels, kernels
from fracsav.time_mesh import build_graded_mesh

RUN_SNIPPET = """
import time
from fracsav import kernels
from fracsav.experiments import make_problem
from fracsav.stepper import SchemeConfig, solve
from fracsav.time_mesh import build_graded_mesh
p = make_problem("ex3", grid_n={grid})
cfg = SchemeConfig(0.5, p.eps2, scheme="l1cn")
t0 = time.perf_counter()
solve(p.grid, p.phi0, build_graded_mesh(1.0, {steps}, 3.0), cfg)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def best(fn, repeat=5, number=3):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_history_sum(backends, n, npts):
    rng = np.random.default_rng(0)
    incr = rng.standard_normal((n, npts))
    coeffs = rng.uniform(size=n + 1)
    out = np.empty(npts)
    return {name: best(lambda m=mod: m.history_sum(coeffs, incr, n, out))
            for name, mod in backends.items()}


def bench_kernel_row(backends, M):
    mesh = build_graded_mesh(1.0, M, 2.5)
    out = np.empty(M)
    n = M - 1
    return {name: best(lambda m=mod: m.kernel_row(mesh.nodes, mesh.steps, n, 0.4, True, out),
                       number=50)
            for name, mod in backends.items()}


def bench_full_run(grid, steps):
    times = {}
    for name in kernels.BACKENDS:
        env = dict(os.environ, FRACSAV_BACKEND=name)
        proc = subprocess.run([sys.executable, "-c", RUN_SNIPPET.format(grid=grid, steps=steps)],
                              env=env, capture_output=True, text=True, check=True)
        backend, secs = proc.stdout.split()
        times[backend] = float(secs)
    return times


def show(title, times):
    base = times.get("python")
    parts = []
    for name, secs in times.items():
        ratio = f" ({base / secs:.2f}x)" if base and name != "python" else ""
        parts.append(f"{name} {secs * 1e3:9.3f} ms{ratio}")
    print(f"{title:<40s} " + "   ".join(parts))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args()
    backends = {"python": _pykernels}
    if "cython" in kernels.BACKENDS:
        backends["cython"] = kernels.BACKENDS["cython"]
    else:
        print("compiled extension not built; timing the numpy fallback only")
    npts = 65 * 65 if args.quick else 129 * 129
    for n in ((200, 1000) if args.quick else (200, 1000, 4000)):
        show(f"history_sum n={n}, {npts} pts", bench_history_sum(backends, n, npts))
    for M in ((1000, 10000) if args.quick else (1000, 10000, 100000)):
        show(f"kernel_row n={M - 1}", bench_kernel_row(backends, M))
    grid, steps = (32, 400) if args.quick else (64, 1500)
    show(f"L1-CN run {grid}^2 grid, {steps} steps", bench_full_run(grid, steps))


if __name__ == "__main__":
    main()

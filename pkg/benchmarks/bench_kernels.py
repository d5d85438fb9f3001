"""Compare the compiled and pure-Python kernel backends.

Each workload runs once per backend with the kernels rebound in place, and the
results are checked to agree before timings are printed.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--points 40401]
"""

import argparse
import statistics
import time
from contextlib import contextmanager

import numpy as np

from convextime import kernels
from convextime.fixtures import dynamics_fixtures, target_fixtures
from convextime.geometry import as_hpolyhedron
from convextime.mintime import mintime


@contextmanager
def backend(module):
    saved = kernels.simplex_iterate, kernels.bisect_hgauge
    kernels.simplex_iterate, kernels.bisect_hgauge = module.simplex_iterate, module.bisect_hgauge
    try:
        yield
    finally:
        kernels.simplex_iterate, kernels.bisect_hgauge = saved


def bisection_workload(n_points, seed):
    H = as_hpolyhedron(dynamics_fixtures()["triangle"])
    X = np.random.default_rng(seed).uniform(-5, 5, (n_points, 2))
    A, b = np.ascontiguousarray(H.A), np.ascontiguousarray(H.b)
    return lambda: kernels.bisect_hgauge(A, b, X, 1e-11)


def mintime_workload(n_points, seed):
    F = dynamics_fixtures()["box"]
    omega = target_fixtures()["triangle"]
    X = np.random.default_rng(seed).uniform(-4, 4, (n_points, 2))
    return lambda: np.array([mintime(F, omega, x) for x in X])


def simplex_workload(n_problems, seed):
    rng = np.random.default_rng(seed)
    tableaus = []
    for _ in range(n_problems):
        # max c.x s.t. A x <= b, x >= 0, in slack form with b > 0 so the slack basis is feasible
        m, n = 12, 8
        A = rng.uniform(0, 1, (m, n))
        T = np.zeros((m + 1, n + m + 1))
        T[:m, :n] = A
        T[:m, n:n + m] = np.eye(m)
        T[:m, -1] = rng.uniform(1, 2, m)
        T[m, :n] = -rng.uniform(0, 1, n)
        tableaus.append((T, np.arange(n, n + m, dtype=np.int64), n + m))

    def run():
        out = []
        for T0, basis0, ncols in tableaus:
            T, basis = T0.copy(), basis0.copy()
            kernels.simplex_iterate(T, basis, ncols, 10**6, 1e-9)
            out.append(T[-1, -1])
        return np.array(out)

    return run


def time_it(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--points", type=int, default=201 * 201)
    p.add_argument("--seed", type=lambda t: int(t, 0), default=0x5EED)
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    workloads = {
        f"bisect_hgauge ({args.points} pts)": bisection_workload(args.points, args.seed),
        "simplex_iterate (200 LPs 12x8)": simplex_workload(200, args.seed),
        "mintime LP path (300 pts)": mintime_workload(300, args.seed),
    }
    print(f"backends: {', '.join(backends)}  (import default: {kernels.BACKEND})")
    header = f"{'workload':36s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup"
    print(header)
    for label, fn in workloads.items():
        timings, results = {}, {}
        for name, module in backends.items():
            with backend(module):
                timings[name], results[name] = time_it(fn, args.repeat)
        ref = results["python"]
        for name, res in results.items():
            if not np.allclose(res, ref, rtol=1e-12, atol=1e-12, equal_nan=True):
                raise SystemExit(f"{label}: backend {name} disagrees with python")
        row = f"{label:36s}" + "".join(f"{timings[n] * 1e3:10.2f}ms" for n in backends)
        if "cython" in timings:
            row += f"   {timings['python'] / timings['cython']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Timing comparison between the compiled extension and the pure-Python
fallback on the three hot kernels.

Run from the repository root:

    python3 benchmarks/bench_backends.py

Each kernel is timed on both backends with identical inputs; the table
reports median wall time per call and the speedup factor.
"""

import time

import numpy as np

from structbandits._backend import get_backend
from structbandits.algorithms import OssbConfig
from structbandits.core import RngStream


def median_time(fn, repeats=7):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def bench_kl(backend):
    p = np.linspace(0.02, 0.98, 400)
    q = np.linspace(0.98, 0.02, 400)

    def body():
        for a in p:
            for b in q:
                backend.kl_bernoulli(a, b)

    return body


def bench_simplex(backend):
    rng = np.random.default_rng(7)
    costs = rng.uniform(0.1, 2.0, 40)
    rows = rng.uniform(0.05, 1.0, (60, 40))
    rhs = rng.uniform(0.5, 1.5, 60)

    def body():
        backend.simplex_min(costs, -rows, -rhs, 10000)

    return body


def bench_episode(backend):
    cfg = OssbConfig()
    theta = np.array([0.5, 0.6])
    gaps = np.array([0.1, 0.0])
    noise = RngStream(42, 0).generator().random(100000)
    cps = np.array([100000], dtype=np.int64)

    def body():
        backend.run_rate_matching_episode(
            0, 0, theta, gaps, noise, 100000, cfg.epsilon_for(2),
            cfg.gamma, cfg.solver.c_max, cps)

    return body


def main():
    pure = get_backend("pure")
    compiled = None
    try:
        compiled = get_backend("compiled")
    except Exception as exc:
        print("compiled backend unavailable (%s); timing pure only" % exc)

    rows = []
    for label, make in (
            ("bernoulli kl, 160k scalar calls", bench_kl),
            ("covering LP, 60x40 simplex", bench_simplex)):
        t_pure = median_time(make(pure))
        t_comp = median_time(make(compiled)) if compiled else float("nan")
        rows.append((label, t_pure, t_comp))

    t_pure = median_time(bench_episode(pure), repeats=3)
    t_comp = (median_time(bench_episode(compiled), repeats=3)
              if compiled else float("nan"))
    rows.append(("rate-matching episode, T=1e5", t_pure, t_comp))

    print("%-36s %12s %12s %9s" % ("kernel", "pure (s)", "compiled (s)",
                                   "speedup"))
    for label, tp, tc in rows:
        speed = tp / tc if tc == tc and tc > 0 else float("nan")
        print("%-36s %12.4f %12.4f %8.1fx" % (label, tp, tc, speed))


if __name__ == "__main__":
    main()

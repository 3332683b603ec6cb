"""Timing comparison of the Monte Carlo kernels: numba vs numpy.

Run from the repo root:

    python3 benchmarks/bench_kernels.py [--steps N] [--realizations R]

The first numba call includes JIT compilation; a warmup run is timed
separately so the steady-state numbers are comparable. Both backends
produce bit-identical per-realization outputs on re-runs; cross-backend
agreement is also reported here (last-ulp differences are expected).
"""

import argparse
import time

import anderson1d as a1
from anderson1d import kernels


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200000)
    ap.add_argument("--realizations", type=int, default=100)
    ap.add_argument("--energy", type=float, default=5.0)
    args = ap.parse_args()

    p = a1.example1_potential(1.0)
    cfg = a1.EnsembleConfig(
        p_one=0.5,
        n_steps=args.steps,
        n_realizations=args.realizations,
        master_seed=0,
    )
    small = a1.EnsembleConfig(p_one=0.5, n_steps=1000, n_realizations=4, master_seed=0)

    print(f"steps={args.steps} realizations={args.realizations} E={args.energy}")
    print(f"numba importable: {kernels.HAS_NUMBA}, default backend: {kernels.active_backend()}")

    if kernels.HAS_NUMBA:
        t0 = time.perf_counter()
        a1.lyapunov_vector_estimate(p, args.energy, small, backend="numba")
        a1.lyapunov_matrix_estimate(p, args.energy, small, backend="numba")
        print(f"numba warmup (JIT compile + tiny run): {time.perf_counter() - t0:.2f}s")

    results = {}
    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    for backend in backends:
        for name, fn in (
            ("vector", a1.lyapunov_vector_estimate),
            ("matrix", a1.lyapunov_matrix_estimate),
        ):
            t0 = time.perf_counter()
            est = fn(p, args.energy, cfg, backend=backend)
            dt = time.perf_counter() - t0
            rate = args.steps * args.realizations / dt / 1e6
            results[(backend, name)] = (est.gamma_hat, dt)
            print(f"{backend:>5} {name}: {dt:7.2f}s  ({rate:7.1f} M steps/s)  gamma_hat={est.gamma_hat:.8f}")

    if kernels.HAS_NUMBA:
        for name in ("vector", "matrix"):
            g_np, t_np = results[("numpy", name)]
            g_nb, t_nb = results[("numba", name)]
            print(f"{name}: speedup x{t_np / t_nb:.1f}, |gamma diff| = {abs(g_np - g_nb):.2e}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback path.

Run directly (both paths are imported explicitly, so no env flag is needed):

    python benchmarks/bench_kernels.py [--n-steps 5]

The workload is the pseudo-separated greedy scan on the chains of the
doubling map at grid-scale tolerance, the dominant inner loop of the
pseudo-entropy estimators.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from chaindyn import _kernels
from chaindyn.graph import build_chain_graph, enumerate_chains
from chaindyn.presets import doubling


def build_workload(n_steps: int):
    g = doubling(128)
    cg = build_chain_graph(g, 1.0 / 128)
    chains = enumerate_chains(cg, g.word([0] * n_steps))
    return chains, g.space.dist_matrix, 1.0 / 128, n_steps


def time_fn(fn, *args, repeats: int = 3) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n-steps", type=int, default=5)
    args = parser.parse_args()

    chains, dist, eps, n_check = build_workload(args.n_steps)
    print(f"workload: {chains.shape[0]} chains of length {n_check + 1}")

    rows = []
    if _kernels.HAVE_NUMBA:
        # warm the JIT before timing
        _kernels._greedy_separated_njit(chains[:64], dist, eps, n_check, True)
        t, kept = time_fn(
            _kernels._greedy_separated_njit, chains, dist, eps, n_check, True
        )
        rows.append(("numba @njit", t, int(kept.sum())))
    else:
        print("numba unavailable; benchmarking fallback only")
    t, kept = time_fn(
        _kernels._greedy_separated_numpy, chains, dist, eps, n_check, True
    )
    rows.append(("numpy fallback", t, int(kept.sum())))

    print(f"{'path':16s} {'best (s)':>10s} {'kept':>8s}")
    for name, t, k in rows:
        print(f"{name:16s} {t:10.4f} {k:8d}")
    if len(rows) == 2:
        print(f"speedup: {rows[1][1] / rows[0][1]:.1f}x")


if __name__ == "__main__":
    main()

"""Benchmark the compiled edge-sampling kernels against the numpy fallback.

Run as: python3 benchmarks/bench_kernels.py [--pairs 5e7]

Both backends draw per-pair uniforms from the same counter-based stream,
so besides timing, the script asserts that the sampled edge sets are
identical.
"""

import argparse
import importlib
import time

import numpy as np

from lrperc import _kernels_py
from lrperc.params import BoxSpec, make_params, sample_weights

try:
    from lrperc import _kernels

    BACKENDS = [("cython", _kernels), ("python", _kernels_py)]
except ImportError:
    BACKENDS = [("python", _kernels_py)]


def bench(backend, coords, weights, lam, alpha, seed, repeats=3):
    best = float("inf")
    edges = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        ei, ej = backend.sample_edges(coords, weights, lam, alpha, seed, -1.0)
        best = min(best, time.perf_counter() - t0)
        edges = (ei, ej)
    return best, edges


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=float, default=5e7, help="approximate pair count")
    ap.add_argument("--seed", type=int, default=1234)
    args = ap.parse_args()

    n = int((2 * args.pairs) ** 0.5)
    params = make_params(d=1, alpha=1.5, beta=2.0, lam=1.0)
    box = BoxSpec.corner((0,), n)
    wf = sample_weights(box, params.beta, args.seed)
    coords = box.coords()
    pairs = n * (n - 1) // 2
    print(f"box: {n} vertices, {pairs:.3g} pairs")

    results = {}
    for name, backend in BACKENDS:
        dt, (ei, ej) = bench(backend, coords, wf.weights, params.lam, params.alpha, args.seed)
        results[name] = (dt, ei, ej)
        print(f"{name:>7}: {dt:8.3f} s  {pairs / dt:.3g} pairs/s  {len(ei)} edges")

    if len(results) == 2:
        (_, ei_c, ej_c), (_, ei_p, ej_p) = results["cython"], results["python"]
        assert np.array_equal(ei_c, ei_p) and np.array_equal(ej_c, ej_p), "edge sets differ"
        speedup = results["python"][0] / results["cython"][0]
        print(f"identical edge sets; compiled speedup {speedup:.1f}x")


if __name__ == "__main__":
    main()

"""Time each kernel under the compiled and the pure-Python backend.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from stedi import kernels
from stedi.constructors import bose
from stedi.hypertree import largest_perfect_at_most
from stedi.instances import near_regular
from stedi.rng import bit_generator


def _cases():
    H = near_regular(20_000, 30, seed=1)
    order = np.random.default_rng(1).permutation(len(H.edges)).astype(np.int64)
    S = bose(3003)
    T = largest_perfect_at_most(1, 1400)
    tree_edges = np.ascontiguousarray(T.edges[T.bfs_edges], dtype=np.int32)
    partner = S.partner

    def hill(mod):
        return mod.hill_climb_sts(451, bit_generator(0), 50 * 451 * 451)

    def greedy(mod):
        return mod.greedy_scan(H.edges, order, np.zeros(H.n_vertices, dtype=np.uint8))

    def nibble(mod):
        return mod.nibble_rounds(H.edges, np.zeros(H.n_vertices, dtype=np.uint8),
                                 bit_generator(0), 2.0, 2.0, 200, 10**7)

    def first_fit(mod):
        phi = np.full(T.n, -1, dtype=np.int32)
        phi[0] = 0
        allowed = np.ones(S.m, dtype=np.uint8)
        allowed[0] = 0
        return mod.first_fit_extend(partner, tree_edges, phi, allowed)

    return [("hill_climb_sts n=451", hill),
            (f"greedy_scan {len(H.edges)} edges", greedy),
            (f"nibble_rounds {len(H.edges)} edges", nibble),
            (f"first_fit_extend {len(tree_edges)} edges", first_fit)]


def _best(fn, mod, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(mod)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        cy = kernels.backend("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    py = kernels.backend("python")
    print(f"{'kernel':<34}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for name, fn in _cases():
        tc = _best(fn, cy, args.repeat)
        tp = _best(fn, py, 1)
        print(f"{name:<34}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()

"""Compiled kernels against the numpy fallback.

Times the max-plus product, the border-table grid DP and the oracle fill on
both backends, checks that their outputs agree, and prints the speed-up.

    python benchmarks/bench_kernels.py [--repeat 3] [--sizes 32,64,128]
"""

from __future__ import annotations

import argparse
import random
import timeit

import numpy as np

from tedkit.alignment_graph import src_points, tgt_points
from tedkit.costs import NEG, CostModel
from tedkit.generate import random_tree
from tedkit.minplus import backend_module
from tedkit.oracle import all_pairs_sim


def _maxplus_case(n: int, rng: np.random.Generator):
    A = rng.integers(-50, 50, size=(n, n)).astype(np.int64)
    B = rng.integers(-50, 50, size=(n, n)).astype(np.int64)
    A[rng.random((n, n)) < 0.1] = NEG
    return lambda k: k.maxplus(A, B)


def _grid_case(n: int, rng: np.random.Generator):
    r = random.Random(n)
    F, G = random_tree(n, r), random_tree(n, r)
    W = rng.integers(0, 10, size=(n + 1, n + 1)).astype(np.int64)
    su, sv = src_points(n, n)
    tu, tv = tgt_points(n, n)
    return lambda k: k.grid_border(F.pi, G.pi, W, n, n, su, sv, tu, tv)


def _oracle_case(n: int, rng: np.random.Generator):
    r = random.Random(n)
    F, G = random_tree(n // 2, r), random_tree(n // 2, r)
    t = all_pairs_sim(F, G, CostModel.unweighted(), sparse=True)
    cf, cg = t.cf, t.cg
    rows = np.arange(1, cf.count)

    def run(k):
        T = np.zeros_like(t.table)
        k.oracle_fill(T, t.eta, cf.root, cf.dele, cf.sub, cf.ch, cg.root, cg.dele, cg.sub, cg.ch, rows)
        return T

    return run


CASES = {"maxplus": _maxplus_case, "grid_border": _grid_case, "oracle_fill": _oracle_case}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="32,64,128")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    try:
        fast = backend_module("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return
    slow = backend_module("python")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12} {'n':>5} {'compiled s':>11} {'fallback s':>11} {'speed-up':>9}")
    for name, make in CASES.items():
        for n in sizes:
            fn = make(n, rng)
            if not np.array_equal(fn(fast), fn(slow)):
                raise SystemExit(f"{name} n={n}: backends disagree")
            tf = min(timeit.repeat(lambda: fn(fast), number=1, repeat=args.repeat))
            ts = min(timeit.repeat(lambda: fn(slow), number=1, repeat=args.repeat))
            print(f"{name:<12} {n:>5} {tf:>11.4f} {ts:>11.4f} {ts / max(tf, 1e-9):>8.1f}x")


if __name__ == "__main__":
    main()

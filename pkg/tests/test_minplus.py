"""Max-plus products: naive, tiled and structured kernels."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tedkit import minplus
from tedkit.costs import NEG, NEG_INF
from tedkit.minplus import (
    INSTR,
    ExtMatrix,
    MonotoneTag,
    MonotoneTagError,
    Orientation,
    instrumented,
    maxplus,
    maxplus3,
    maxplus_structured,
    mp,
)


def brute(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    r, k = A.shape
    c = B.shape[1]
    out = np.full((r, c), NEG, dtype=np.int64)
    for i in range(r):
        for j in range(c):
            for t in range(k):
                if A[i, t] != NEG and B[t, j] != NEG:
                    out[i, j] = max(out[i, j], A[i, t] + B[t, j])
    return out


def rand_ext(rng, r, c, p_neg=0.2):
    A = rng.integers(-20, 20, size=(r, c)).astype(np.int64)
    A[rng.random((r, c)) < p_neg] = NEG
    return A


def test_hand_example():
    A = ExtMatrix.from_rows([[1, 2], [3, NEG_INF]])
    B = ExtMatrix.from_rows([[0, NEG_INF], [0, 0]])
    assert maxplus(A, B).to_rows() == [[2, 2], [3, NEG_INF]]


def test_identity_and_absorption():
    rng = np.random.default_rng(0)
    A = ExtMatrix(rand_ext(rng, 4, 5))
    assert maxplus(A, ExtMatrix.identity(5)) == A
    assert maxplus3(ExtMatrix.identity(4), A, ExtMatrix.identity(5)) == A
    Z = ExtMatrix.neg(5, 3)
    assert maxplus3(A, Z, ExtMatrix(rand_ext(rng, 3, 2))) == ExtMatrix.neg(4, 2)


def test_empty_inner_dimension():
    assert maxplus(ExtMatrix.neg(2, 0), ExtMatrix.neg(0, 3)) == ExtMatrix.neg(2, 3)


@pytest.mark.parametrize("seed", range(5))
def test_random_vs_brute(seed):
    rng = np.random.default_rng(seed)
    A, B = rand_ext(rng, 8, 8), rand_ext(rng, 8, 8)
    assert np.array_equal(mp(A, B), brute(A, B))


def test_associativity_chain():
    rng = np.random.default_rng(1)
    A, B, C = (ExtMatrix(rand_ext(rng, *s)) for s in ((5, 6), (6, 7), (7, 4)))
    assert maxplus3(A, B, C) == maxplus(A, maxplus(B, C))


@settings(max_examples=40)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 20), st.integers(1, 7), st.integers(0, 10**6))
def test_tiling_invariant(r, k, c, block, seed):
    rng = np.random.default_rng(seed)
    A, B = rand_ext(rng, r, k), rand_ext(rng, k, c)
    assert np.array_equal(mp(A, B, block=block), mp(A, B))


def test_structured_none_tag():
    rng = np.random.default_rng(2)
    A, B = ExtMatrix(rand_ext(rng, 6, 7)), ExtMatrix(rand_ext(rng, 7, 5))
    assert maxplus_structured(A, B, MonotoneTag()) == maxplus(A, B)


@pytest.mark.parametrize("orientation", [Orientation.ROW, Orientation.COLUMN])
def test_structured_random(orientation):
    rng = np.random.default_rng(3)
    axis = 1 if orientation == Orientation.ROW else 0
    for _ in range(20):
        A = ExtMatrix(rand_ext(rng, 16, 16))
        B = ExtMatrix(np.sort(rng.integers(0, 17, size=(16, 16)), axis=axis).astype(np.int64))
        assert maxplus_structured(A, B, MonotoneTag(orientation, 16)) == maxplus(A, B)


def test_structured_all_zero():
    rng = np.random.default_rng(4)
    A = rand_ext(rng, 5, 6, p_neg=0.0)
    B = np.zeros((6, 3), dtype=np.int64)
    C = maxplus_structured(ExtMatrix(A), ExtMatrix(B), MonotoneTag(Orientation.ROW, 0))
    assert np.array_equal(C.data, np.repeat(A.max(axis=1)[:, None], 3, axis=1))


def test_tag_violation_named():
    B = np.array([[0, 2, 1]], dtype=np.int64)
    with pytest.raises(MonotoneTagError, match="row 0 decreases at column 2"):
        maxplus_structured(ExtMatrix(np.zeros((1, 1), dtype=np.int64)), ExtMatrix(B), MonotoneTag(Orientation.ROW))
    with pytest.raises(MonotoneTagError, match="outside"):
        minplus.check_tag(np.array([[5]]), MonotoneTag(Orientation.ROW, 3))


def test_instrumentation_counts():
    with instrumented() as ins:
        mp(np.zeros((3, 4), dtype=np.int64), np.zeros((4, 5), dtype=np.int64))
    assert (ins.calls, ins.madds, ins.max_dim) == (1, 60, 5)
    assert INSTR.report()["multiply_adds"] == 60


def test_backends_agree():
    rng = np.random.default_rng(5)
    A, B = rand_ext(rng, 9, 11), rand_ext(rng, 11, 7)
    ref = minplus.backend_module("python").maxplus(A, B)
    assert np.array_equal(ref, brute(A, B))
    assert np.array_equal(minplus.backend_module().maxplus(A, B), ref)


def test_grid_and_oracle_kernels_agree():
    import random

    from tedkit.alignment_graph import src_points, tgt_points
    from tedkit.costs import CostModel
    from tedkit.generate import random_tree
    from tedkit.oracle import all_pairs_sim

    fast, slow = minplus.backend_module(), minplus.backend_module("python")
    r = random.Random(6)
    F, G = random_tree(15, r), random_tree(12, r)
    W = np.random.default_rng(6).integers(0, 9, size=(16, 13)).astype(np.int64)
    su, sv = src_points(15, 12)
    tu, tv = tgt_points(15, 12)
    a = fast.grid_border(F.pi, G.pi, W, 15, 12, su, sv, tu, tv)
    assert np.array_equal(a, slow.grid_border(F.pi, G.pi, W, 15, 12, su, sv, tu, tv))
    t = all_pairs_sim(F, G, CostModel.unweighted(), sparse=True)
    rows = np.arange(1, t.cf.count)
    out = []
    for k in (fast, slow):
        T = np.zeros_like(t.table)
        k.oracle_fill(T, t.eta, t.cf.root, t.cf.dele, t.cf.sub, t.cf.ch, t.cg.root, t.cg.dele, t.cg.sub, t.cg.ch, rows)
        out.append(T)
    assert np.array_equal(out[0], out[1])


def test_pure_fallback_pipeline():
    import os
    import subprocess
    import sys

    code = (
        "import tedkit.minplus as m, random\n"
        "from tedkit import ted, ted_reference, CostModel\n"
        "from tedkit.generate import random_forest\n"
        "assert m.BACKEND == 'python'\n"
        "r = random.Random(1)\n"
        "for _ in range(5):\n"
        "    F, G = random_forest(r.randint(0, 15), r), random_forest(r.randint(0, 15), r)\n"
        "    assert ted(F, G, CostModel.unweighted()) == ted_reference(F, G, CostModel.unweighted())\n"
    )
    env = dict(os.environ, TEDKIT_PURE="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr

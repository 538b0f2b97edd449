"""The reference all-pairs DP against independent computations."""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np
import pytest

from tedkit.costs import CostModel
from tedkit.forest_core import Forest, parse_forest, subforest
from tedkit.generate import random_costs, random_forest
from tedkit.oracle import (
    CanonicalSets,
    OracleLimitError,
    all_pairs_sim,
    enum_mappings_sim,
    superadditive_split,
    ted_reference,
)

U = CostModel.unweighted()


def classic_ted(F: Forest, G: Forest, m: CostModel) -> int:
    """Textbook forest recursion on nested tuples, removing rightmost roots."""

    def tup(X: Forest, v: int):
        return (X.label(v), tuple(tup(X, c) for c in X.children[v]))

    f = tuple(tup(F, r) for r in F.roots)
    g = tuple(tup(G, r) for r in G.roots)

    def size(t) -> int:
        return sum(1 + size(k) for _, k in t)

    def dcost(t) -> int:
        return sum(m.del_cost(a) + dcost(k) for a, k in t)

    def icost(t) -> int:
        return sum(m.ins_cost(a) + icost(k) for a, k in t)

    @lru_cache(maxsize=None)
    def d(x, y) -> int:
        if not x:
            return icost(y)
        if not y:
            return dcost(x)
        (a, ka), (b, kb) = x[-1], y[-1]
        return min(
            d(x[:-1] + ka, y) + m.del_cost(a),
            d(x, y[:-1] + kb) + m.ins_cost(b),
            d(ka, kb) + d(x[:-1], y[:-1]) + m.sub_cost(a, b),
        )

    return d(f, g)


def test_enum_examples():
    assert enum_mappings_sim(parse_forest(""), parse_forest("a(b)"), U) == 0
    assert enum_mappings_sim(parse_forest("a"), parse_forest("a"), U) == 2
    assert enum_mappings_sim(parse_forest("a(b,c)"), parse_forest("a(c,b)"), U) == 4
    assert ted_reference(parse_forest("a(b,c)"), parse_forest("a(c,b)"), U) == 2


def test_enum_limit():
    with pytest.raises(OracleLimitError):
        enum_mappings_sim(parse_forest("a,b,c,d,e,f,g"), parse_forest("a,b,c,d,e,f"), U)


def test_cell_limit():
    with pytest.raises(OracleLimitError):
        all_pairs_sim(parse_forest("a(b,c)"), parse_forest("a(b,c)"), U, cell_limit=4)


@pytest.mark.parametrize("seed", range(4))
def test_against_classic_recursion(seed):
    rng = random.Random(seed)
    for i in range(25):
        F, G = random_forest(rng.randint(0, 9), rng), random_forest(rng.randint(0, 9), rng)
        m = random_costs(rng) if i % 2 else U
        assert ted_reference(F, G, m) == classic_ted(F, G, m)


def test_sparse_equals_dense():
    rng = random.Random(11)
    for _ in range(10):
        F, G = random_forest(rng.randint(1, 15), rng), random_forest(rng.randint(1, 15), rng)
        dense = all_pairs_sim(F, G, U)
        sparse = all_pairs_sim(F, G, U, sparse=True)
        assert np.array_equal(sparse.node_table(), dense.node_table())
        assert sparse.full() == dense.full()
        assert sparse.filled.sum() <= dense.filled.sum()


def test_canonical_sets_match_intervals():
    rng = random.Random(12)
    F = random_forest(12, rng)
    cs = CanonicalSets(F)
    seen: dict[tuple[int, ...], int] = {}
    for x in range(1, 2 * F.n + 2):
        for y in range(x, 2 * F.n + 2):
            key = tuple(subforest(F, x, y).nodes())
            k = int(cs.canon[x, y])
            assert int(cs.size[k]) == len(key)
            assert seen.setdefault(key, k) == k


def test_identical_unweighted_diagonal():
    F = parse_forest("a(b,c(d)),e")
    t = all_pairs_sim(F, F, U).node_table()
    for v in range(1, F.n + 1):
        assert t[v, v] == 2 * F.size[v]


def test_superadditive_split():
    rng = random.Random(13)
    F, G = random_forest(8, rng), random_forest(8, rng)
    t = all_pairs_sim(F, G, U)
    N, M = 2 * F.n + 1, 2 * G.n + 1
    for _ in range(100):
        x, z, y = sorted(rng.randint(1, N) for _ in range(3))
        x2, z2, y2 = sorted(rng.randint(1, M) for _ in range(3))
        assert superadditive_split(t, x, y, x2, y2, z, z2)

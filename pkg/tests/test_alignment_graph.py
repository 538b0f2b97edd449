"""Alignment graphs, longest paths and the border-table DP."""

from __future__ import annotations

import random

import numpy as np
import pydot
import pytest

from tedkit.alignment_graph import (
    BorderDistances,
    border_distances_dp,
    build,
    longest_dist,
    src_index,
    src_points,
    tgt_index,
    tgt_points,
    to_dot,
)
from tedkit.costs import NEG, NEG_INF, CostModel
from tedkit.forest_core import parse_forest
from tedkit.generate import random_forest
from tedkit.oracle import all_pairs_sim

FIVE_F = parse_forest("a(b,c(d,e))")
FIVE_G = parse_forest("a(b,c),d(e)")


def zeros(F, G) -> np.ndarray:
    return np.zeros((F.n + 1, G.n + 1), dtype=np.int64)


def test_five_node_diagonal():
    g = build(zeros(FIVE_F, FIVE_G), FIVE_F, FIVE_G)
    assert (int(g.piF[1]), int(g.piG[1])) == (6, 4)


def test_single_node_trees_are_string_grid():
    F, G = parse_forest("a,b,c"), parse_forest("a,b")
    g = build(zeros(F, G), F, G)
    assert list(g.piF[1:]) == [2, 3, 4] and list(g.piG[1:]) == [2, 3]


def test_empty_second_forest():
    F = parse_forest("a(b)")
    g = build(np.zeros((3, 1), dtype=np.int64), F, parse_forest(""))
    assert longest_dist(g, (1, 1), (3, 1)) == 0


def test_build_callable_and_shape_check():
    F, G = parse_forest("a"), parse_forest("b")
    assert build(lambda i, j: 5, F, G).W[1, 1] == 5
    with pytest.raises(ValueError):
        build(np.zeros((3, 3), dtype=np.int64), F, G)


def test_longest_dist_unreachable_and_bounds():
    g = build(zeros(FIVE_F, FIVE_G), FIVE_F, FIVE_G)
    assert longest_dist(g, (3, 3), (2, 4)) is NEG_INF
    with pytest.raises(IndexError):
        longest_dist(g, (0, 1), (2, 2))


def test_full_path_is_similarity():
    rng = random.Random(21)
    m = CostModel.unweighted()
    for _ in range(20):
        F, G = random_forest(rng.randint(0, 10), rng), random_forest(rng.randint(0, 10), rng)
        t = all_pairs_sim(F, G, m)
        g = build(t.node_table(), F, G)
        assert longest_dist(g, (1, 1), (F.n + 1, G.n + 1)) == t.full()


def test_border_index_order():
    n, m = 3, 2
    su, sv = src_points(n, m)
    assert list(src_index(n, m, su, sv)) == list(range(n + m + 1))
    tu, tv = tgt_points(n, m)
    assert list(tgt_index(n, m, tu, tv)) == list(range(n + m + 1))
    assert (su[0], sv[0], su[-1], sv[-1]) == (1, 1, n + 1, 1)
    assert (tu[0], tv[0], tu[-1], tv[-1]) == (1, m + 1, n + 1, 1)


def test_dp_one_by_one_grid():
    F, G = parse_forest(""), parse_forest("")
    res = border_distances_dp(build(np.zeros((1, 1), dtype=np.int64), F, G))
    assert res.table.tolist() == [[0]]


def test_dp_all_neg_is_plain_grid():
    F, G = parse_forest("a(b),c"), parse_forest("d,e(f)")
    W = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    res = border_distances_dp(build(W, F, G))
    su, sv = src_points(F.n, G.n)
    tu, tv = tgt_points(F.n, G.n)
    reach = (tu[None, :] >= su[:, None]) & (tv[None, :] >= sv[:, None])
    assert np.array_equal(res.table == 0, reach)
    assert np.all(res.table[~reach] == NEG)


def test_dp_matches_longest_dist():
    rng = random.Random(22)
    npr = np.random.default_rng(22)
    F, G = random_forest(7, rng), random_forest(6, rng)
    W = npr.integers(0, 9, size=(F.n + 1, G.n + 1)).astype(np.int64)
    g = build(W, F, G)
    res = border_distances_dp(g)
    for p in zip(*src_points(F.n, G.n)):
        for q in zip(*tgt_points(F.n, G.n)):
            assert res.get(p, q) == longest_dist(g, p, q)
    left = border_distances_dp(g, left_only=True)
    assert left == res.left_rows()


def test_border_distances_shape_check():
    with pytest.raises(ValueError):
        BorderDistances(2, 2, np.zeros((3, 3), dtype=np.int64))


def test_dot_counts_and_parse():
    W = all_pairs_sim(FIVE_F, FIVE_G, CostModel.unweighted()).node_table()
    text = to_dot(build(W, FIVE_F, FIVE_G))
    (graph,) = pydot.graph_from_dot_data(text)
    assert len(graph.get_nodes()) == 36
    diag = [e for e in graph.get_edges() if e.get("style") == "bold"]
    assert len(diag) == 25
    assert len(graph.get_edges()) == 25 + 2 * 5 * 6


def test_dot_single_nodes():
    F, G = parse_forest("a"), parse_forest("b")
    (graph,) = pydot.graph_from_dot_data(to_dot(build(np.ones((2, 2), dtype=np.int64), F, G)))
    assert len(graph.get_nodes()) == 4
    assert sum(e.get("style") == "bold" for e in graph.get_edges()) == 1

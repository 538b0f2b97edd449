"""Spine edit distance: index sets, partition, the divide step and the solvers."""

from __future__ import annotations

import random

import numpy as np
import pytest

from tedkit.bbd import BBDConfig
from tedkit.costs import NEG, CostModel, eta_matrix
from tedkit.fed import augmented_graph
from tedkit.alignment_graph import border_distances_dp
from tedkit.forest_core import Spine, heavy_spine, parse_forest
from tedkit.generate import random_costs, random_tree
from tedkit.oracle import all_pairs_sim
from tedkit.sed import (
    BorderIndexSets,
    DisedInstance,
    SedState,
    dised,
    dised_base,
    dised_patch,
    partition,
    segment_size,
    sim_w_cut,
    solve_sed,
    solve_udised,
    top_level_inputs,
)

U = CostModel.unweighted()


def setup(seed: int, n: int, n2: int, weighted: bool = False, bias: float = 0.6):
    rng = random.Random(seed)
    F = random_tree(n, rng, bias=bias)
    G = random_tree(n2, rng, bias=bias)
    m = random_costs(rng) if weighted else U
    O = all_pairs_sim(F, G, m)
    return F, G, m, O, heavy_spine(F), heavy_spine(G)


def long_setup(seed: int, n: int, n2: int, weighted: bool = False):
    """``setup`` redrawn until ``S`` has 3 nodes and ``S'`` has 2."""
    for k in range(100):
        out = setup(seed + 1000 * k, n, n2, weighted, bias=0.8)
        if len(out[4].nodes) >= 3 and len(out[5].nodes) >= 2:
            return out
    raise AssertionError("no draw with long enough spines")


def blank(T, S, S2):
    P = T.copy()
    P[np.ix_(list(S.nodes), list(S2.nodes))] = NEG
    return P


def state_for(F, G, m, T, S, S2, s, q, s2, q2) -> SedState:
    """State with every pair known except the unknowns of ``(s, s', q, q')``."""
    P = T.copy()
    segF = S.nodes[S.nodes.index(s) : S.nodes.index(q)]
    segG = S2.nodes[S2.nodes.index(s2) : S2.nodes.index(q2)]
    P[np.ix_(segF, segG)] = NEG
    return SedState(F, G, S, S2, eta_matrix(m, F, G), P, BBDConfig())


# -- index sets --------------------------------------------------------------


def _spine_pick(rng, S, k=3):
    idx = sorted(rng.sample(range(len(S.nodes)), k))
    return [S.nodes[i] for i in idx]


@pytest.mark.parametrize("seed", range(5))
def test_index_set_identities(seed):
    F, G, _, _, S, S2 = long_setup(seed, 30, 25)
    rng = random.Random(seed)
    s, r, q = _spine_pick(rng, S)
    s2, q2 = _spine_pick(rng, S2, 2)
    I = BorderIndexSets(F, G, s, s2, q, q2)
    outer = BorderIndexSets(F, G, s, s2, r, q2)
    inner = BorderIndexSets(F, G, r, s2, q, q2)
    five, six, seven, eight = (getattr(I, f"input_set_{k}")(r) for k in (5, 6, 7, 8))
    assert five | six | seven | eight == outer.input_quads()
    assert five <= I.input_quads()
    assert eight <= inner.output_quads()
    # sets 6 and 7 pair one side of this input with one side of the inner output
    assert {(x, x2) for x, x2, _, _ in six} <= set(I.top_l())
    assert {(y, y2) for _, _, y, y2 in six} <= set(inner.bot_r())
    assert {(x, x2) for x, x2, _, _ in seven} <= set(inner.bot_l())
    assert {(y, y2) for _, _, y, y2 in seven} <= set(I.top_r())
    nine, ten, eleven, twelve = (getattr(I, f"output_set_{k}")(r) for k in (9, 10, 11, 12))
    assert nine | ten | eleven | twelve == I.output_quads()
    assert nine == outer.output_quads()
    assert twelve <= inner.output_quads()


def test_border_shapes():
    F = parse_forest("a(b(c))")
    I = BorderIndexSets(F, F, 1, 1, 3, 3)
    assert I.bot_l() == [(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)]
    assert I.top_l() == [(1, 3), (2, 3), (3, 3), (3, 2), (3, 1)]
    assert I.bot_r()[0] == (5, 7) and I.top_r()[0] == (5, 5)


# -- partition ---------------------------------------------------------------


def test_partition_large_delta():
    F = random_tree(40, random.Random(1), bias=0.7)
    S = heavy_spine(F)
    s, q = S.nodes[0], S.nodes[-1]
    assert partition(F, S, s, q, segment_size(F, s, q)) == [s, q]


def test_partition_path():
    F = parse_forest("a(b(c(d(e))))")
    S = heavy_spine(F)
    assert partition(F, S, 1, 5, 1) == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("seed", range(10))
def test_partition_bound(seed):
    F = random_tree(120, random.Random(seed), bias=0.7)
    S = heavy_spine(F)
    s, q = S.nodes[0], S.nodes[-1]
    m = segment_size(F, s, q)
    delta = max(1, m // 4)
    R = partition(F, S, s, q, delta)
    assert R[0] == s and R[-1] == q
    assert len(R) - 1 <= 2 * m / delta + 1
    for a, b in zip(R, R[1:]):
        assert segment_size(F, a, b) <= delta or S.nodes.index(b) == S.nodes.index(a) + 1


def test_partition_rejects_order():
    F = parse_forest("a(b)")
    with pytest.raises(ValueError):
        partition(F, heavy_spine(F), 2, 1, 1)


# -- solvers -----------------------------------------------------------------


def test_single_nodes():
    F, G = parse_forest("a"), parse_forest("a")
    E = eta_matrix(U, F, G)
    R = solve_sed(F, G, heavy_spine(F), heavy_spine(G), np.full((2, 2), NEG, dtype=np.int64), eta=E)
    assert R.pairs() == {(1, 1): 2}
    m = CostModel(delete={"a": 0}, insert={"b": 0}, substitute={("a", "b"): 5})
    F2, G2 = parse_forest("a"), parse_forest("b")
    R = solve_sed(F2, G2, heavy_spine(F2), heavy_spine(G2), np.full((2, 2), NEG, dtype=np.int64),
                  eta=eta_matrix(m, F2, G2))
    assert R.pairs() == {(1, 1): 0}


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("cutoff", [0, None])
def test_solve_sed_matches_oracle(seed, cutoff):
    rng = random.Random(100 + seed)
    F, G, m, O, S, S2 = setup(seed, rng.randint(1, 28), rng.randint(1, 28), weighted=seed % 3 == 0)
    T = O.node_table()
    R = solve_sed(F, G, S, S2, blank(T, S, S2), eta=eta_matrix(m, F, G), cutoff=cutoff)
    assert np.array_equal(R.sims, T)


def test_solve_sed_callable_input():
    F, G, m, O, S, S2 = setup(3, 15, 15)
    T = O.node_table()
    P = blank(T, S, S2)
    R = solve_sed(F, G, S, S2, lambda v, v2: int(P[v, v2]), eta=eta_matrix(m, F, G))
    assert np.array_equal(R.sims[1:, 1:], T[1:, 1:])


def test_spine_errors():
    F, G = parse_forest("a(b)"), parse_forest("a(b)")
    with pytest.raises(ValueError):
        Spine(F, (1,))
    other = parse_forest("x(y,z)")
    with pytest.raises(ValueError):
        solve_sed(F, G, heavy_spine(other), heavy_spine(G), np.zeros((3, 3), dtype=np.int64),
                  eta=eta_matrix(U, F, G))


@pytest.mark.parametrize("seed", range(4))
def test_udised_agrees_with_sed(seed):
    F, G, m, O, S, S2 = setup(seed, 20, 20, weighted=seed % 2 == 1)
    P, E = blank(O.node_table(), S, S2), eta_matrix(m, F, G)
    a = solve_sed(F, G, S, S2, P, eta=E)
    b = solve_udised(F, G, S, S2, P, BBDConfig(base_limit=4), eta=E)
    assert np.array_equal(a.sims, b.sims)


@pytest.mark.parametrize("n,n2,weighted", [(140, 10, False), (100, 8, True)])
def test_udised_unbalanced(n, n2, weighted):
    rng = random.Random(n)
    F, G = random_tree(n, rng, bias=0.5), random_tree(n2, rng)
    m = random_costs(rng) if weighted else U
    T = all_pairs_sim(F, G, m, sparse=True).node_table()
    S, S2 = heavy_spine(F), heavy_spine(G)
    R = solve_udised(F, G, S, S2, blank(T, S, S2), eta=eta_matrix(m, F, G))
    assert np.array_equal(R.sims, T)


# -- divide step -------------------------------------------------------------


def _instance(seed, n=26, n2=22):
    F, G, m, O, S, S2 = long_setup(seed, n, n2, weighted=seed % 2 == 1)
    rng = random.Random(seed)
    s, q = _spine_pick(rng, S, 2)
    s2, q2 = _spine_pick(rng, S2, 2)
    T = O.node_table()
    st = state_for(F, G, m, T, S, S2, s, q, s2, q2)
    return DisedInstance(st, s, q, s2, q2), O, T


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("cutoff", [0, 48])
def test_dised_outputs_match_oracle(seed, cutoff):
    inst, O, T = _instance(seed)
    out = dised(inst, cutoff)
    for (x, x2, y, y2), val in out.items():
        assert val == O.sims(x, y, x2, y2)
    assert np.array_equal(inst.state.sims, T)
    assert {k for k, _ in out.items()} == inst.sets.output_quads()


def test_dised_base_immediate():
    F, G, m, O, S, S2 = setup(5, 12, 12, bias=0.9)
    T = O.node_table()
    s, q = S.nodes[-2], S.nodes[-1]
    s2, q2 = S2.nodes[0], S2.nodes[-1]
    st = state_for(F, G, m, T, S, S2, s, q, s2, q2)
    dised_base(DisedInstance(st, s, q, s2, q2))
    assert np.array_equal(st.sims, T)
    if S.nodes[0] != s:
        with pytest.raises(ValueError):
            dised_base(DisedInstance(st, S.nodes[0], q, s2, q2))


@pytest.mark.parametrize("seed", range(6))
def test_dised_patch_routes_agree(seed):
    F, G, m, O, S, S2 = long_setup(seed, 30, 20, weighted=seed % 2 == 1)
    T = O.node_table()
    s, q, s2, q2 = S.nodes[0], S.nodes[-1], S2.nodes[0], S2.nodes[-1]
    inst = DisedInstance(state_for(F, G, m, T, S, S2, s, q, s2, q2), s, q, s2, q2)
    seg = inst.spine_segment()
    r = seg[len(seg) // 2 or 1]
    dised_patch(inst, r)
    assert np.array_equal(inst.state.sims, T)
    assert inst.state.trace[-1] == ("patch", r, inst.s2)


def test_dised_patch_rejects_bad_split():
    inst, _, _ = _instance(1, 30, 20)
    with pytest.raises(ValueError):
        dised_patch(inst, inst.q)


def test_instance_validation():
    inst, _, _ = _instance(2)
    with pytest.raises(ValueError):
        DisedInstance(inst.state, inst.q, inst.s, inst.s2, inst.q2)


# -- cut similarities and top-level inputs -----------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_sim_w_cut_never_exceeds_sim(seed):
    F, G, m, O, S, _ = setup(seed, 16, 12, weighted=seed % 2 == 1)
    T = O.node_table()
    q = S.nodes[min(1, len(S.nodes) - 1)]
    cut = sim_w_cut(F, G, q, T).table
    full = border_distances_dp(augmented_graph(F, G, T)).table
    assert np.all(cut <= full)


def test_sim_w_cut_forced_alignment():
    m = CostModel(delete={"r": 50, "q": 0, "a": 0}, insert={"R": 50, "x": 0},
                  substitute={("r", "R"): 0}, default=(1, 1, 1))
    F, G = parse_forest("r(q(a))"), parse_forest("R(x)")
    T = all_pairs_sim(F, G, m)
    cut = sim_w_cut(F, G, 2, T.node_table())
    assert cut.get((1, 1), (2 * F.n + 1, 2 * G.n + 1)) == T.full() == 100


def test_sim_w_cut_whole_tree_is_plain_grid():
    F, G, m, O, _, _ = setup(9, 8, 6)
    cut = sim_w_cut(F, G, 1, O.node_table()).table
    plain = border_distances_dp(augmented_graph(F, G, np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64))).table
    assert np.array_equal(cut, plain)


@pytest.mark.parametrize("seed", range(5))
def test_top_level_inputs_match_oracle(seed):
    F, G, m, O, S, S2 = setup(seed, 18, 16, weighted=seed % 2 == 1)
    T = O.node_table()
    fam = top_level_inputs(F, G, S, S2, blank(T, S, S2), eta_matrix(m, F, G))
    whole = BorderIndexSets(F, G, S.nodes[0], S2.nodes[0], S.nodes[-1], S2.nodes[-1])
    assert set(fam["i"]) == whole.input_quads()
    for key in fam:
        for (x, x2, y, y2), val in fam[key].items():
            assert val == O.sims(x, y, x2, y2), (key, x, x2, y, y2)

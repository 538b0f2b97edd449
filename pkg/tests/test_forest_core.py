"""Forests: parsing, bi-order positions, pi, subforests, spines."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tedkit.forest_core import (
    Forest,
    ForestSyntaxError,
    Spine,
    heavy_spine,
    is_synchronous,
    parse_forest,
    pi_map,
    reverse,
    spine_left_right,
    subforest,
    with_virtual_root,
)
from tedkit.generate import random_forest


@st.composite
def forests(draw, max_n: int = 30):
    n = draw(st.integers(0, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_forest(n, random.Random(seed))


def test_single_node_positions():
    F = parse_forest("a")
    assert F.n == 1
    assert [F.label(int(v)) for v in F.biorder[1:3]] == ["a", "a"]
    assert (F.lpos[1], F.rpos[1]) == (1, 3)


def test_child_positions():
    F = parse_forest("a(b)")
    assert [F.label(int(v)) for v in F.biorder[1:5]] == ["a", "b", "b", "a"]
    assert (F.lpos[2], F.rpos[2]) == (2, 4)


def test_pi_tree_example():
    assert pi_map(parse_forest("a(b,c(d,e))")) == [6, 3, 6, 5, 6]


def test_pi_definition_on_forest():
    # pi(i) = i + |sub(v_i)|
    assert pi_map(parse_forest("a(b),c(d),e")) == [3, 3, 5, 5, 6]
    assert pi_map(parse_forest("a(b,c),d(e)")) == [4, 3, 4, 6, 6]


def test_pi_path_and_singletons():
    assert pi_map(parse_forest("a(b(c(d)))")) == [5, 5, 5, 5]
    assert pi_map(parse_forest("a,b,c")) == [2, 3, 4]


@pytest.mark.parametrize("text,offset", [("a(b", 3), ("a,,b", 2), ("(a)", 0), ("a)b", 1)])
def test_syntax_errors(text, offset):
    with pytest.raises(ForestSyntaxError) as e:
        parse_forest(text)
    assert e.value.offset == offset


def test_empty_and_whitespace():
    assert parse_forest("").n == 0
    assert parse_forest(" a ( b , c ) ") == parse_forest("a(b,c)")


@given(forests())
def test_round_trip(F):
    assert parse_forest(F.to_text()) == F


@given(forests())
def test_interval_of_subtree(F):
    for v in range(1, F.n + 1):
        assert subforest(F, int(F.lpos[v]), int(F.rpos[v])).nodes() == list(range(v, v + int(F.size[v])))
    assert subforest(F, 1, 2 * F.n + 1).materialize() == F


def test_subforest_materialize():
    assert subforest(parse_forest("a(b,c)"), 2, 4).materialize() == parse_forest("b")


@given(forests())
def test_reverse_is_involution(F):
    assert reverse(reverse(F)) == F
    assert reverse(F).n == F.n


def test_virtual_root():
    T = with_virtual_root(parse_forest("a,b"))
    assert T.n == 3 and T.children[1] == (2, 3)


def test_heavy_spine_path():
    F = parse_forest("a(b(c(d)))")
    S = heavy_spine(F)
    assert S.nodes == (1, 2, 3, 4)
    assert spine_left_right(F, S) == ([], [])


def test_heavy_spine_star():
    # rightmost child w with |F[1..lpos(w))| <= |F|/2 = 3 is the 4th child
    F = parse_forest("r(a,b,c,d,e)")
    S = heavy_spine(F)
    left, right = spine_left_right(F, S)
    assert S.nodes == (1, 5)
    assert len(left) <= F.n / 2 and len(right) <= F.n / 2


def test_heavy_spine_complete_binary():
    t = "x"
    for _ in range(3):
        t = f"x({t},{t})"
    F = parse_forest(t)
    assert F.n == 15
    left, right = spine_left_right(F, heavy_spine(F))
    assert len(left) <= 7 and len(right) <= 7


@settings(max_examples=60)
@given(forests(max_n=40))
def test_heavy_spine_balance(F):
    if F.n == 0:
        with pytest.raises(ValueError):
            heavy_spine(F)
        return
    left, right = spine_left_right(F, heavy_spine(F))
    assert 2 * len(left) <= F.n and 2 * len(right) <= F.n


def test_spine_validation():
    F = parse_forest("a(b,c)")
    with pytest.raises(ValueError):
        Spine(F, (2,))
    with pytest.raises(ValueError):
        Spine(F, (1,))


def test_synchronous_examples():
    F = parse_forest("a(b,c)")
    assert is_synchronous(F, 2, 6)
    assert is_synchronous(F, 1, 7)
    assert is_synchronous(F, 2, 4)
    G = parse_forest("a(b(c),d)")
    assert not is_synchronous(G, 3, 8)  # {c, d}: not siblings


def _sync_brute(F: Forest, x: int, y: int) -> bool:
    nodes = set(subforest(F, x, y).nodes())
    for p in range(0, F.n + 1):
        kids = F.children[p]
        for i in range(len(kids)):
            for j in range(i, len(kids)):
                got = set()
                for c in kids[i : j + 1]:
                    got.update(range(c, c + int(F.size[c])))
                if got == nodes:
                    return True
    return False


@settings(max_examples=40)
@given(forests(max_n=10))
def test_synchronous_brute_force(F):
    for x in range(1, 2 * F.n + 2):
        for y in range(x, 2 * F.n + 2):
            assert is_synchronous(F, x, y) == _sync_brute(F, x, y)

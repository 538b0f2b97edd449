"""Cost models, match weights and the similarity/distance conversion."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tedkit.costs import (
    NEG,
    NEG_INF,
    CostFileError,
    CostModel,
    eta,
    eta_matrix,
    ext_add,
    ext_max,
    from_ext,
    load_cost_file,
    sim_to_ed,
    to_ext,
)
from tedkit.forest_core import VIRTUAL_ROOT, parse_forest


def test_eta_unweighted():
    m = CostModel.unweighted()
    assert eta(m, "a", "a") == 2
    assert eta(m, "a", "b") == 1


def test_eta_weighted_arithmetic():
    m = CostModel(delete={"a": 3}, insert={"b": 4}, substitute={("a", "b"): 5})
    assert eta(m, "a", "b") == 2


def test_virtual_root_weights():
    m = CostModel.unweighted()
    assert eta(m, VIRTUAL_ROOT, VIRTUAL_ROOT) == 0
    assert eta(m, VIRTUAL_ROOT, "a") is NEG_INF
    assert m.del_cost(VIRTUAL_ROOT) == 0


def test_cost_validation():
    with pytest.raises(ValueError):
        CostModel(delete={"a": -1})
    with pytest.raises(ValueError):
        CostModel(delete={"a": 2**31 + 1})


def test_neg_inf_algebra():
    assert ext_add(NEG_INF, 5) is NEG_INF
    assert ext_max(NEG_INF, -3) == -3
    assert NEG_INF < -(10**30)
    assert to_ext(NEG) is NEG_INF and from_ext(NEG_INF) == NEG


@given(st.integers(-(10**12), 10**12))
def test_ext_round_trip(x):
    assert from_ext(to_ext(x)) == x


def test_sim_to_ed_examples():
    m = CostModel.unweighted()
    F = parse_forest("a(b,c)")
    assert sim_to_ed(m, F, F, 2 * F.n) == 0
    assert sim_to_ed(m, F, parse_forest(""), 0) == 3
    assert sim_to_ed(m, F, parse_forest("a(c,b)"), 4) == 2
    with pytest.raises(ValueError):
        sim_to_ed(m, F, F, NEG_INF)


def test_eta_matrix_layout():
    F, G = parse_forest("a(b)"), parse_forest("b,a")
    E = eta_matrix(CostModel.unweighted(), F, G)
    assert E.shape == (3, 3)
    assert E[1, 2] == 2 and E[1, 1] == 1 and E[0, 0] == NEG


def test_load_cost_file(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("# costs\nDEL\ta\t3\nINS b 4\nSUB a b 5\nDEFAULT 2 2 3\n")
    m = load_cost_file(p)
    assert (m.del_cost("a"), m.ins_cost("b"), m.sub_cost("a", "b")) == (3, 4, 5)
    assert (m.del_cost("z"), m.sub_cost("y", "z"), m.sub_cost("z", "z")) == (2, 3, 0)


@pytest.mark.parametrize("text", ["SUB a 1\n", "DEL a x\n", "FOO a 1\n", "DEL a -2\n"])
def test_load_cost_file_errors(tmp_path, text):
    p = tmp_path / "c.tsv"
    p.write_text(text)
    with pytest.raises(CostFileError):
        load_cost_file(p)


def test_load_cost_file_missing(tmp_path):
    with pytest.raises(CostFileError):
        load_cost_file(tmp_path / "nope.tsv")

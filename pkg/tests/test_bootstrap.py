import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fsc.bootstrap import (
    BootstrapPath,
    BootstrapStep,
    check_step,
    plan_bootstrap,
    random_admissible,
    seed,
    step_bound,
    validate_path,
)
from fsc.errors import CoefficientsNotHolder, SetEmpty, TargetNotInS
from fsc.operators import IndexTriple, OperatorClass, in_index_set
from fsc.spaces import Kind, parse_space

from .conftest import SEED

P = parse_space
H2 = P("H[s=2,p=2;n=3]")


def triples(path):
    return [t.render() for t in path.triples]


def test_fixed_lebesgue_shape():
    path = plan_bootstrap(OperatorClass(2, 0, H2), IndexTriple(2, Fr(1, 2)))
    assert triples(path) == ["(-1,1/2)", "(0,1/2)", "(1,1/2)", "(2,1/2)"]
    assert path.stage_labels == ["initial", "raise_sigma_fixed_a", "raise_sigma_fixed_a"]


def test_lebesgue_line_shape():
    path = plan_bootstrap(OperatorClass(2, 0, H2), IndexTriple(1, Fr(2, 3)))
    assert triples(path) == ["(-1,1/2)", "(0,1/2)", "(1/2,2/3)", "(1,2/3)"]
    assert path.stage_labels == ["initial", "raise_sigma_on_line", "raise_sigma_fixed_a"]
    # the middle leg keeps 1/a - sigma/n fixed at 1/2
    assert {t.reg(3) for t in path.triples[1:3]} == {Fr(1, 2)}


def test_lower_lebesgue_branch():
    path = plan_bootstrap(OperatorClass(2, 0, H2), IndexTriple(1, Fr(1, 6)))
    assert triples(path) == ["(-1,1/2)", "(0,1/2)", "(0,1/6)", "(1,1/6)"]
    assert path.stage_labels[1] == "lower_lebesgue"


def test_d0_reduction_ends_with_one_step():
    op = OperatorClass(2, 1, H2)
    path = plan_bootstrap(op, IndexTriple(3, Fr(1, 2)))
    assert path.stage_labels[-1] == "d0_reduction"
    assert path.steps[-1].source == IndexTriple(2, Fr(1, 2))
    assert validate_path(op, path).verdict


@pytest.mark.parametrize("kind", ["F", "B"])
def test_fine_parameter_set_on_last_step(kind):
    op = OperatorClass(2, 0, P(f"{kind}[s=2,p=2,q=3;n=3]"))
    path = plan_bootstrap(op, IndexTriple(2, Fr(1, 2), Fr(1, 3)))
    assert [t.inv_b for t in path.triples[:-1]] == [Fr(2, 3)] * 3
    assert path.triples[-1].inv_b == Fr(1, 3)
    assert validate_path(op, path).verdict


def test_seed():
    assert seed(OperatorClass(2, 0, H2)) == IndexTriple(-1, Fr(1, 2))
    assert seed(OperatorClass(3, 1, P("B[s=5/2,p=3,q=4;n=2]"))) == IndexTriple(Fr(-1, 2), Fr(2, 3), Fr(3, 4))


def test_step_bound_formula():
    op = OperatorClass(2, 1, H2)
    # 4 + d0 + ceil(3*|1/2-1/6|) + ceil(3-0) + 1
    assert step_bound(op, IndexTriple(3, Fr(1, 6))) == 4 + 1 + 1 + 3 + 1


def test_corrupted_raise_violates_h3():
    op = OperatorClass(2, 0, H2)
    a, b = IndexTriple(-1, Fr(1, 2)), IndexTriple(Fr(1, 2), Fr(1, 2))
    path = BootstrapPath(op, IndexTriple(2, Fr(1, 2)), [BootstrapStep(a, b, "initial")])
    dec = validate_path(op, path)
    assert not dec.verdict
    assert "step1:H3" in [c.tag for c in dec.violated]


def test_wrong_terminal():
    op = OperatorClass(2, 0, H2)
    good = plan_bootstrap(op, IndexTriple(2, Fr(1, 2)))
    bad = BootstrapPath(op, IndexTriple(1, Fr(1, 2)), good.steps)
    tags = [c.tag for c in validate_path(op, bad).violated]
    assert "terminal mismatch" in tags


def test_broken_chain_and_seed():
    op = OperatorClass(2, 0, H2)
    s1 = BootstrapStep(IndexTriple(0, Fr(1, 2)), IndexTriple(1, Fr(1, 2)), "initial")
    s2 = BootstrapStep(IndexTriple(Fr(3, 2), Fr(1, 2)), IndexTriple(2, Fr(1, 2)), "raise_sigma_fixed_a")
    tags = [c.tag for c in validate_path(op, BootstrapPath(op, IndexTriple(2, Fr(1, 2)), [s1, s2])).violated]
    assert "seed" in tags and "step2:chain" in tags
    assert not validate_path(op, BootstrapPath(op, IndexTriple(2, Fr(1, 2)), [])).verdict


def test_h6_caveat_in_fine_scales():
    op = OperatorClass(2, 0, P("F[s=2,p=2,q=3;n=3]"))
    a = IndexTriple(0, Fr(1, 2), Fr(1, 3))
    b = IndexTriple(1, Fr(1, 2), Fr(1, 2))
    log = check_step(op, a, b, IndexTriple(2, Fr(1, 2), Fr(1, 3)))
    assert {c.tag for c in log.clauses if c.status == "violated"} == {"H6"}


def test_planner_errors():
    with pytest.raises(TargetNotInS):
        plan_bootstrap(OperatorClass(2, 0, H2), IndexTriple(9, Fr(1, 2)))
    with pytest.raises(CoefficientsNotHolder):
        plan_bootstrap(OperatorClass(2, 0, P("H[s=1,p=2;n=3]")), IndexTriple(1, Fr(1, 2)))
    with pytest.raises(SetEmpty):
        plan_bootstrap(OperatorClass(4, 0, P("H[s=7/4,p=2;n=3]")), IndexTriple(2, Fr(1, 2)))


def test_path_serialization():
    d = plan_bootstrap(OperatorClass(2, 0, H2), IndexTriple(2, Fr(1, 2))).to_dict()
    assert d["triples"][0] == ["-1", "1/2"]
    assert set(d["steps"][0]) == {"from", "to", "stage", "justification"}
    assert d["steps"][0]["justification"]["commutator"] == "satisfied"


@pytest.mark.parametrize("kind", list(Kind))
@given(st.integers(0, 2**31))
def test_planner_sound(kind, salt):
    rng = random.Random(SEED ^ salt)
    op, target = random_admissible(kind, rng)
    path = plan_bootstrap(op, target)
    assert validate_path(op, path).verdict
    assert len(path.steps) <= step_bound(op, target)
    assert all(in_index_set(op, t).verdict for t in path.triples[1:])
    if kind.has_fine and op.d0 == 0:
        pinned = 1 - op.coeff.inv_q
        assert all(t.inv_b == pinned for t in path.triples[:-1])

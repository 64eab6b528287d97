from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fsc.errors import CoefficientsNotHolder, EmptyRegion, ParseError, RangeError
from fsc.operators import (
    IndexTriple,
    OperatorClass,
    canonical_members,
    commutator_ok,
    in_index_set,
    index_set_nonempty,
    mapping_ok,
    parse_operator,
    parse_triple,
    region_polygon,
)
from fsc.spaces import Kind, SpaceSpec, parse_space

from .strategies import spaces

P = parse_space
FINES = [Fr(1, 3), Fr(1, 2), Fr(2, 3)]


def op(d, d0, text):
    return OperatorClass(d, d0, P(text))


def grid_points(o: OperatorClass):
    c = o.coeff
    sig = o.sigma_low - 1
    while sig <= o.sigma_high + 1:
        for j in range(1, 12):
            for b in FINES if c.kind.has_fine else [None]:
                yield IndexTriple(sig, Fr(j, 12), b)
        sig += Fr(1, 4)


@st.composite
def operators(draw, kind=None, holder=False):
    c = draw(spaces(kind=kind).filter(lambda sp: (not holder) or sp.s > sp.n * sp.inv_p))
    d = draw(st.integers(1, 4))
    return OperatorClass(d, draw(st.integers(0, d)), c)


# ---------------------------------------------------------------- examples


@pytest.mark.parametrize(
    "o, x, verdict",
    [
        (op(2, 0, "H[s=77/34,p=17/10;n=3]"), IndexTriple(1, Fr(1, 2)), True),
        (op(2, 0, "H[s=2,p=2;n=3]"), IndexTriple(2, Fr(1, 2)), True),
        (op(2, 0, "H[s=2,p=2;n=3]"), IndexTriple(Fr(5, 2), Fr(1, 2)), False),
        (op(2, 0, "F[s=2,p=2,q=3;n=3]"), IndexTriple(2, Fr(1, 2), Fr(1, 2)), False),
        (op(2, 0, "F[s=2,p=2,q=3;n=3]"), IndexTriple(2, Fr(1, 2), Fr(1, 3)), True),
    ],
)
def test_mapping_examples(o, x, verdict):
    assert mapping_ok(o, x).verdict is verdict


def test_marginal_fine_caveat_without_holder_coefficients():
    # q=3 at the marginal smoothness s=(d-d0)/2 rules out 1/b=1/2; the coefficients
    # here are not Hölder, so only the set itself is queried.
    o = op(2, 0, "F[s=1,p=2,q=3;n=3]")
    dec = in_index_set(o, IndexTriple(1, Fr(1, 2), Fr(1, 2)))
    assert not dec.verdict
    assert [c.citation for c in dec.violated] == ["S.F.fine.top", "S.F.fine.bottom"]
    with pytest.raises(CoefficientsNotHolder):
        mapping_ok(o, IndexTriple(1, Fr(1, 2), Fr(1, 2)))


@pytest.mark.parametrize(
    "o, verdict",
    [
        (op(2, 0, "H[s=1,p=2;n=3]"), True),
        (op(2, 0, "H[s=1/2,p=2;n=3]"), False),
        (op(2, 0, "F[s=1,p=2,q=3;n=3]"), False),
        (op(2, 0, "F[s=1,p=2,q=2;n=3]"), True),
        (op(2, 0, "B[s=1,p=2,q=3/2;n=3]"), True),
        (op(2, 0, "W[s=1/2,p=3;n=1]"), False),
    ],
)
def test_nonempty_examples(o, verdict):
    assert index_set_nonempty(o).verdict is verdict


def test_canonical_members_listed():
    dec = index_set_nonempty(op(2, 0, "H[s=1,p=2;n=3]"))
    assert ["1", "1/2"] in dec.info["canonical_members"]
    assert [m.render() for m in canonical_members(op(2, 1, "F[s=2,p=3,q=4;n=2]"))] == [
        "(3,1/3,1/4)",
        "(0,2/3,3/4)",
        "(3/2,1/2,1/2)",
    ]


def test_commutator_examples():
    o = op(2, 0, "H[s=2,p=2;n=3]")
    dec = commutator_ok(o, IndexTriple(-1, Fr(1, 2)))
    assert dec.verdict and dec.info["route"] == "shift"
    assert not commutator_ok(op(2, 1, "H[s=2,p=2;n=3]"), IndexTriple(3, Fr(1, 2))).verdict
    relaxed = commutator_ok(o, IndexTriple(2, Fr(1, 2)))
    assert relaxed.verdict and relaxed.info["route"] == "d0=0"


def test_holder_precondition():
    o = op(2, 0, "H[s=1,p=2;n=3]")
    with pytest.raises(CoefficientsNotHolder):
        mapping_ok(o, IndexTriple(1, Fr(1, 2)))
    with pytest.raises(CoefficientsNotHolder):
        commutator_ok(o, IndexTriple(1, Fr(1, 2)))


def test_fine_index_presence():
    with pytest.raises(RangeError):
        in_index_set(op(2, 0, "F[s=2,p=2,q=2;n=1]"), IndexTriple(1, Fr(1, 2)))
    with pytest.raises(RangeError):
        in_index_set(op(2, 0, "H[s=2,p=2;n=1]"), IndexTriple(1, Fr(1, 2), Fr(1, 2)))
    with pytest.raises(RangeError):
        OperatorClass(1, 2, P("H[s=2,p=2;n=1]"))


def test_parsing():
    assert parse_operator("L[d=3,d0=1]", P("H[s=2,p=2;n=1]")).render() == "L[d=3,d0=1]"
    assert parse_triple("(1, 1/2, 2/3)") == IndexTriple(1, Fr(1, 2), Fr(2, 3))
    for bad in ("1,1/2", "(1)", "(1,x)"):
        with pytest.raises(ParseError):
            parse_triple(bad)
    with pytest.raises(ParseError):
        parse_operator("L[d=2]", P("H[s=2,p=2;n=1]"))


# ---------------------------------------------------------------- polygon


def _vset(poly):
    return {(x, y) for x, y in poly.vertices}


def test_polygon_corners():
    o = op(2, 0, "H[s=2,p=2;n=3]")
    unclipped = region_polygon(o, clip=False)
    assert unclipped.shape == "polygon"
    assert _vset(unclipped) == {(0, Fr(-1, 6)), (2, Fr(1, 2)), (2, Fr(7, 6)), (0, Fr(1, 2))}
    clipped = region_polygon(o)
    assert _vset(clipped) == {(0, 0), (Fr(1, 2), 0), (2, Fr(1, 2)), (2, 1), (Fr(3, 2), 1), (0, Fr(1, 2))}


def test_polygon_is_counterclockwise():
    vs = region_polygon(op(2, 0, "H[s=77/34,p=17/10;n=3]")).vertices
    area2 = sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(vs, vs[1:] + vs[:1]))
    assert area2 > 0


def test_degenerate_shapes():
    seg = region_polygon(op(2, 0, "H[s=1,p=3;n=3]"))
    assert seg.shape == "segment" and _vset(seg) == {(1, Fr(1, 3)), (1, Fr(2, 3))}
    pt = region_polygon(op(2, 0, "H[s=1,p=2;n=3]"))
    assert pt.shape == "point" and pt.vertices == [(1, Fr(1, 2))]
    with pytest.raises(EmptyRegion):
        region_polygon(op(2, 0, "H[s=1/2,p=2;n=3]"))


def test_besov_edges_flag_fine_caveats():
    poly = region_polygon(op(2, 0, "B[s=2,p=2,q=3;n=3]"))
    flagged = {e.constraint for e in poly.edges if e.fine_caveat}
    assert flagged == {"reg=low", "reg=high", "sigma=s+d0", "sigma=d-s"}
    poly = region_polygon(op(2, 0, "F[s=2,p=2,q=3;n=3]"))
    assert {e.constraint for e in poly.edges if e.fine_caveat} == {"sigma=s+d0", "sigma=d-s"}


@given(st.data())
def test_polygon_membership_matches_mapping(data):
    text = data.draw(st.sampled_from(["H[s=77/34,p=17/10;n=3]", "H[s=2,p=2;n=3]", "W[s=3,p=3;n=2]"]))
    o = op(2, data.draw(st.integers(0, 2)), text)
    poly = region_polygon(o)
    sig = Fr(data.draw(st.integers(-48, 96)), 24)
    inv_a = Fr(data.draw(st.integers(1, 47)), 48)
    assert poly.contains(sig, inv_a) == mapping_ok(o, IndexTriple(sig, inv_a)).verdict


# ---------------------------------------------------------------- invariants


@given(operators(holder=True))
def test_nonempty_iff_a_grid_member(o):
    found = any(mapping_ok(o, x).verdict for x in grid_points(o))
    assert index_set_nonempty(o).verdict == found


@given(operators(holder=True))
def test_canonical_members_map(o):
    if index_set_nonempty(o).verdict:
        assert all(mapping_ok(o, m).verdict for m in canonical_members(o))


@given(operators().filter(lambda o: o.d >= 2))
def test_nesting(o):
    lower = OperatorClass(o.d - 1, 0, o.coeff)
    high = OperatorClass(o.d, 0, o.coeff)
    for x in grid_points(high):
        if in_index_set(high, x).verdict:
            assert in_index_set(lower, x).verdict


@given(operators().filter(lambda o: o.d >= 1))
def test_shift_identity(o):
    one = OperatorClass(o.d, 1, o.coeff)
    base = OperatorClass(o.d - 1, 0, o.coeff)
    for x in grid_points(base):
        assert in_index_set(one, x.shift(1)).verdict == in_index_set(base, x).verdict


@given(operators(kind=Kind.BesovB, holder=True))
def test_besov_conflicting_caveats_both_required(o):
    # at a corner where both boundary families meet, both fine bounds apply
    c = o.coeff
    x = IndexTriple(o.sigma_high, c.inv_p, Fr(1, 2))
    if mapping_ok(o, x).verdict and o.reg_high == x.reg(c.n):
        assert 1 - c.inv_q <= Fr(1, 2) <= c.inv_q

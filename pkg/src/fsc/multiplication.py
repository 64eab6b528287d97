"""Legality of pointwise products X1 x X2 -> X for the four scales.

The condition lists are written once, over "prepared" factor records, and
evaluated either with a :class:`ClauseLog` (full decision with citations) or
with a fail-fast checker used by the grid sweep.  Every condition is
homogeneous-affine in the indices, so the sweep can run on integers scaled
by a common denominator without changing any verdict.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .spaces import ClauseLog, Decision, Kind, SpaceSpec, check_compatible, is_integer, lebesgue_regularity


class MultQuery(NamedTuple):
    f1: SpaceSpec
    f2: SpaceSpec
    target: SpaceSpec


class _Idx(NamedTuple):
    s: object
    inv_p: object
    fine: object
    reg: object
    s_int: bool


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _prepare(sp: SpaceSpec) -> _Idx:
    return _Idx(sp.s, sp.inv_p, sp.fine, lebesgue_regularity(sp), is_integer(sp.s))


class _Violation(Exception):
    pass


class _FailFast:
    """Checker with the ClauseLog interface that stops at the first failure."""

    __slots__ = ()
    _ops = {
        "<=": lambda a, b: a <= b,
        ">=": lambda a, b: a >= b,
        "<": lambda a, b: a < b,
        "==": lambda a, b: a == b,
        "!=": lambda a, b: a != b,
    }

    def check(self, tag, citation, lhs, rel, rhs, *, when=True):
        if when and not self._ops[rel](lhs, rhs):
            raise _Violation
        return True

    def skip(self, *args, **kwargs):
        pass


_FAST = _FailFast()


def _core(log, a: _Idx, b: _Idx, t: _Idx, one, cite: str) -> None:
    log.check("s1+s2>=0", f"{cite}.core.a", a.s + b.s, ">=", 0)
    log.check("min(s1,s2)>=s", f"{cite}.core.b", min(a.s, b.s), ">=", t.s)
    log.check("max(1/r1,1/r2)<=1/r", f"{cite}.core.c", max(a.reg, b.reg), "<=", t.reg)
    log.check("1/r1+1/r2<=1", f"{cite}.core.d", a.reg + b.reg, "<=", one)


def _lebesgue(log, a: _Idx, b: _Idx, t: _Idx, one, cite: str) -> None:
    if min(a.reg, b.reg, one - t.reg) == 0:
        log.check("1/r1+1/r2<1/r", f"{cite}.core.strict", a.reg + b.reg, "<", t.reg)
    else:
        log.check("1/r1+1/r2<=1/r", f"{cite}.core.e", a.reg + b.reg, "<=", t.reg)


def _caveats_f(log, a: _Idx, b: _Idx, t: _Idx, one, half) -> None:
    cite = "mult.F"
    for i, f in ((1, a), (2, b)):
        log.check(f"s{i}=s=>1/q<=1/q{i}", f"{cite}.cav.si", t.fine, "<=", f.fine, when=f.s == t.s)
    log.check("s1+s2=0=>1/q1+1/q2>=1", f"{cite}.cav.sum", a.fine + b.fine, ">=", one, when=a.s + b.s == 0)
    zero = a.s == 0 and b.s == 0 and t.s == 0
    log.check("s=0=>1/q<=1/2", f"{cite}.cav.zero", t.fine, "<=", half, when=zero)
    for i, f in ((1, a), (2, b)):
        log.check(f"s=0=>1/2<=1/q{i}", f"{cite}.cav.zero", half, "<=", f.fine, when=zero)


def _caveats_w(log, a: _Idx, b: _Idx, t: _Idx, one) -> None:
    cite = "mult.W"
    for i, f in ((1, a), (2, b)):
        pinned = f.s == t.s and not t.s_int
        log.check(f"s=s{i}notZ=>p=p{i}", f"{cite}.cav.si", t.inv_p, "==", f.inv_p, when=pinned)
    frac_pair = not a.s_int and not b.s_int and a.s + b.s == 0
    log.check("s1+s2=0notZ=>1/p1+1/p2=1", f"{cite}.cav.sum", a.inv_p + b.inv_p, "==", one, when=frac_pair)


def _caveats_b(log, a: _Idx, b: _Idx, t: _Idx, one, half) -> None:
    cite = "mult.B"
    pair = ((1, a), (2, b))
    for i, f in pair:
        trig = f.s == t.s or f.reg == t.reg
        log.check(f"s=s{i}|r=r{i}=>1/q<=1/q{i}", f"{cite}.cav.si", t.fine, "<=", f.fine, when=trig)
    dual_edge = a.s + b.s == 0 or a.reg + b.reg == one
    log.check("s1+s2=0|1/r1+1/r2=1=>1/q1+1/q2>=1", f"{cite}.cav.sum", a.fine + b.fine, ">=", one, when=dual_edge)

    eq = a.reg + b.reg == t.reg
    lo, hi = min(a.s, b.s), max(a.s, b.s)
    log.check("eq:min(1/r1,1/r2,1-1/r)!=0", f"{cite}.cav.eq.nonzero", min(a.reg, b.reg, one - t.reg), "!=", 0, when=eq)
    nonpos = eq and lo <= 0
    log.check("eq&min(s)<=0=>1/q1+1/q2>=1", f"{cite}.cav.eq.nonpos", a.fine + b.fine, ">=", one, when=nonpos)
    log.check("eq&min(s)<=0=>1/q<=1/r", f"{cite}.cav.eq.nonpos", t.fine, "<=", t.reg, when=nonpos)
    for i, f in pair:
        same = eq and _sign(f.s) == _sign(lo)
        log.check(f"eq&sign(s{i})=sign(min)=>1/q<=1/q{i}", f"{cite}.cav.eq.minsign", t.fine, "<=", f.fine, when=same)
    for i, f in pair:
        same = eq and _sign(f.s) == _sign(hi)
        log.check(f"eq&sign(s{i})=sign(max)=>1/r{i}<=1/q{i}", f"{cite}.cav.eq.maxsign", f.reg, "<=", f.fine, when=same)
    szero = eq and t.s == 0
    for i, f in pair:
        log.check(f"eq&s=0=>1/q<=1/q{i}", f"{cite}.cav.eq.szero", t.fine, "<=", f.fine, when=szero)
        log.check(f"eq&s=0=>1/r{i}<=1/q{i}", f"{cite}.cav.eq.szero", f.reg, "<=", f.fine, when=szero)

    zero = a.s == 0 and b.s == 0 and t.s == 0
    log.check("s=0=>1/q<=min(1/2,1/r)", f"{cite}.cav.zero", t.fine, "<=", min(half, t.reg), when=zero)
    for i, f in pair:
        log.check(f"s=0=>max(1/2,1/r{i})<=1/q{i}", f"{cite}.cav.zero", max(half, f.reg), "<=", f.fine, when=zero)


def _evaluate(log, kind: Kind, a: _Idx, b: _Idx, t: _Idx, one, half) -> None:
    cite = f"mult.{kind.value}"
    _core(log, a, b, t, one, cite)
    if kind is Kind.BesovB:
        # The Besov list phrases the edge-case strictness via its equality block.
        log.check("1/r1+1/r2<=1/r", f"{cite}.core.e", a.reg + b.reg, "<=", t.reg)
        _caveats_b(log, a, b, t, one, half)
        return
    _lebesgue(log, a, b, t, one, cite)
    if kind is Kind.TriebelF:
        _caveats_f(log, a, b, t, one, half)
    elif kind is Kind.SlobodeckijW:
        _caveats_w(log, a, b, t, one)


def may_multiply(q: MultQuery | SpaceSpec, f2: SpaceSpec | None = None, target: SpaceSpec | None = None) -> Decision:
    """Decide whether multiplication maps ``f1 x f2 -> target`` continuously.

    Accepts a :class:`MultQuery` or the three spaces positionally.  Clauses
    met with equality are reported as ``marginal``; the verdict only depends
    on whether some clause is violated.
    """
    query = q if isinstance(q, MultQuery) else MultQuery(q, f2, target)
    check_compatible(query.f1, query.f2, query.target)
    log = ClauseLog()
    a, b, t = (_prepare(sp) for sp in query)
    _evaluate(log, query.f1.kind, a, b, t, Fraction(1), Fraction(1, 2))
    return log.decision()


# ---------------------------------------------------------------- sweeps


class _Scaled:
    """Indices scaled by a common denominator D to plain integers."""

    def __init__(self, spaces: Sequence[SpaceSpec]):
        dens = [1, 2]
        for sp in spaces:
            for v in (sp.s, sp.inv_p, sp.fine, lebesgue_regularity(sp)):
                dens.append(v.denominator)
        self.D = math.lcm(*dens)

    def idx(self, sp: SpaceSpec) -> _Idx:
        D = self.D
        return _Idx(
            int(sp.s * D), int(sp.inv_p * D), int(sp.fine * D), int(lebesgue_regularity(sp) * D), is_integer(sp.s)
        )


def fast_verdict(kind: Kind, a: _Idx, b: _Idx, t: _Idx, one, half) -> bool:
    try:
        _evaluate(_FAST, kind, a, b, t, one, half)
    except _Violation:
        return False
    return True


@dataclass(frozen=True)
class SweepRow:
    f1: SpaceSpec
    f2: SpaceSpec
    target: SpaceSpec
    verdict: bool


def mult_grid_sweep(
    kind: Kind,
    n: int,
    s_range: Iterable[Fraction],
    invp_set: Iterable[Fraction],
    invq_set: Iterable[Fraction] = (),
    *,
    symmetric: bool = True,
) -> list[SweepRow]:
    """Exhaustive verdict table over a product grid; deterministic order.

    With ``symmetric=True`` the factor pair is enumerated unordered
    (``i <= j``), which is lossless because every list is symmetric.
    """
    s_range = [Fraction(x) for x in s_range]
    invp_set = [Fraction(x) for x in invp_set]
    invq_set = [Fraction(x) for x in invq_set]
    fines = invq_set if kind.has_fine else [None]
    spaces = [SpaceSpec(kind, s, ip, iq, n) for s in s_range for ip in invp_set for iq in fines]
    scale = _Scaled(spaces)
    idx = [scale.idx(sp) for sp in spaces]
    one, half = scale.D, scale.D // 2
    rows = []
    m = len(spaces)
    for i in range(m):
        for j in range(i if symmetric else 0, m):
            for k in range(m):
                ok = fast_verdict(kind, idx[i], idx[j], idx[k], one, half)
                rows.append(SweepRow(spaces[i], spaces[j], spaces[k], ok))
    return rows


def sweep_verdicts(kind: Kind, spaces: Sequence[SpaceSpec], triples: Iterable[tuple[int, int, int]]) -> list[bool]:
    """Verdicts for index triples into ``spaces`` (no row objects)."""
    scale = _Scaled(spaces)
    idx = [scale.idx(sp) for sp in spaces]
    one, half = scale.D, scale.D // 2
    return [fast_verdict(kind, idx[i], idx[j], idx[k], one, half) for i, j, k in triples]


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["f1", "f2", "target", "verdict"])
    for row in rows:
        writer.writerow([str(row.f1), str(row.f2), str(row.target), "true" if row.verdict else "false"])
    return buf.getvalue()


# Default sweep grid shared by the CLI and the consistency checks.
SWEEP_S = [Fraction(k, 2) for k in range(-4, 7)]
SWEEP_INVP = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)]
SWEEP_N = (1, 2, 3)

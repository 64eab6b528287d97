"""Operator classes L^d_{d0}, their compatible index sets S^d_{d0}, and the
mapping/commutator predicates built on them.

An index triple (sigma, 1/a, 1/b) names the target space X^{sigma,a}_b that an
operator acts on.  The set S is kept intensional: a membership predicate plus
an exact polygon of its (sigma, 1/a) projection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

from .errors import CoefficientsNotHolder, EmptyRegion, ParseError, RangeError
from .spaces import (
    INAPPLICABLE,
    SATISFIED,
    VIOLATED,
    Clause,
    ClauseLog,
    Decision,
    Kind,
    SpaceSpec,
    fmt_rat,
    is_integer,
    rat,
)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class OperatorClass:
    d: int
    d0: int
    coeff: SpaceSpec

    def __post_init__(self):
        if not (0 <= self.d0 <= self.d):
            raise RangeError(f"need 0 <= d0 <= d, got d={self.d}, d0={self.d0}")

    @property
    def n(self) -> int:
        return self.coeff.n

    @property
    def kind(self) -> Kind:
        return self.coeff.kind

    def with_d(self, d: int | None = None, d0: int | None = None) -> "OperatorClass":
        return OperatorClass(self.d if d is None else d, self.d0 if d0 is None else d0, self.coeff)

    @cached_property
    def sigma_low(self) -> Fraction:
        return self.d - self.coeff.s

    @cached_property
    def sigma_high(self) -> Fraction:
        return self.coeff.s + self.d0

    @cached_property
    def reg_low(self) -> Fraction:
        """Lower Lebesgue-regularity line 1/p - (s+d0)/n."""
        c = self.coeff
        return c.inv_p - (c.s + self.d0) / c.n

    @cached_property
    def reg_high(self) -> Fraction:
        """Upper Lebesgue-regularity line 1/p* - (d-s)/n."""
        c = self.coeff
        return (1 - c.inv_p) - (self.d - c.s) / c.n

    def render(self) -> str:
        return f"L[d={self.d},d0={self.d0}]"


@dataclass(frozen=True)
class IndexTriple:
    sigma: Fraction
    inv_a: Fraction
    inv_b: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "sigma", rat(self.sigma))
        object.__setattr__(self, "inv_a", rat(self.inv_a))
        if self.inv_b is not None:
            object.__setattr__(self, "inv_b", rat(self.inv_b))
            if not 0 < self.inv_b < 1:
                raise RangeError("1/b must lie in (0,1)")
        if not 0 < self.inv_a < 1:
            raise RangeError("1/a must lie in (0,1)")

    def shift(self, k=1) -> "IndexTriple":
        return IndexTriple(self.sigma + k, self.inv_a, self.inv_b)

    def reg(self, n: int) -> Fraction:
        return self.inv_a - self.sigma / n

    def render(self) -> str:
        parts = [fmt_rat(self.sigma), fmt_rat(self.inv_a)]
        if self.inv_b is not None:
            parts.append(fmt_rat(self.inv_b))
        return "(" + ",".join(parts) + ")"

    def to_list(self) -> list[str]:
        return [fmt_rat(v) for v in (self.sigma, self.inv_a, self.inv_b) if v is not None]

    def __str__(self) -> str:
        return self.render()


_OP_RE = re.compile(r"^L\[d=(\d+),d0=(\d+)\]$")


def parse_operator(text: str, coeff: SpaceSpec) -> OperatorClass:
    m = _OP_RE.match(text.strip())
    if not m:
        raise ParseError("expected L[d=INT,d0=INT]", 0)
    return OperatorClass(int(m.group(1)), int(m.group(2)), coeff)


def parse_triple(text: str) -> IndexTriple:
    """Parse ``(sigma,1/a[,1/b])``; entries are reciprocals, e.g. ``(1,1/2)``."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ParseError("expected '(sigma,1/a[,1/b])'", 0)
    try:
        values = [Fraction(v.strip()) for v in body[1:-1].split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational in triple: {exc}", 1) from None
    if len(values) not in (2, 3):
        raise ParseError("triple needs two or three entries", 0)
    return IndexTriple(*values)


def _check_fine(op: OperatorClass, x: IndexTriple) -> None:
    if op.kind.has_fine and x.inv_b is None:
        raise RangeError(f"{op.kind.value} coefficients need a fine index 1/b")
    if not op.kind.has_fine and x.inv_b is not None:
        raise RangeError(f"{op.kind.value} coefficients take no fine index")


def require_holder(op: OperatorClass) -> None:
    c = op.coeff
    if c.s <= c.n * c.inv_p:
        raise CoefficientsNotHolder(f"coefficient space {c} has s <= n/p")


def _membership(log: ClauseLog, op: OperatorClass, x: IndexTriple, cite: str) -> None:
    c = op.coeff
    kind = c.kind
    sig, reg = x.sigma, x.reg(c.n)
    lo, hi = op.sigma_low, op.sigma_high
    rlo, rhi = op.reg_low, op.reg_high
    log.check("sigma>=d-s", f"{cite}.sigma", sig, ">=", lo)
    log.check("sigma<=s+d0", f"{cite}.sigma", sig, "<=", hi)
    log.check("reg>=1/p-(s+d0)/n", f"{cite}.reg", reg, ">=", rlo)
    log.check("reg<=1/p*-(d-s)/n", f"{cite}.reg", reg, "<=", rhi)
    if kind is Kind.TriebelF:
        log.check("sigma=s+d0=>1/b<=1/q", f"{cite}.fine.top", x.inv_b, "<=", c.inv_q, when=sig == hi)
        log.check("sigma=d-s=>1/b>=1/q*", f"{cite}.fine.bottom", x.inv_b, ">=", 1 - c.inv_q, when=sig == lo)
    elif kind is Kind.BesovB:
        top = sig == hi or reg == rlo
        bottom = sig == lo or reg == rhi
        log.check("sigma=s+d0|reg=low=>1/b<=1/q", f"{cite}.fine.top", x.inv_b, "<=", c.inv_q, when=top)
        log.check("sigma=d-s|reg=high=>1/b>=1/q*", f"{cite}.fine.bottom", x.inv_b, ">=", 1 - c.inv_q, when=bottom)
    elif kind is Kind.SlobodeckijW:
        frac = not is_integer(c.s)
        log.check("s!Z&sigma=s+d0=>a=p", f"{cite}.pin.top", x.inv_a, "==", c.inv_p, when=frac and sig == hi)
        log.check("s!Z&sigma=d-s=>a=p*", f"{cite}.pin.bottom", x.inv_a, "==", 1 - c.inv_p, when=frac and sig == lo)


def in_index_set(op: OperatorClass, x: IndexTriple) -> Decision:
    """Membership of x in S^d_{d0}(coeff).  No coefficient precondition."""
    _check_fine(op, x)
    log = ClauseLog()
    _membership(log, op, x, f"S.{op.kind.value}")
    return log.decision()


def mapping_ok(op: OperatorClass, x: IndexTriple) -> Decision:
    """Whether op maps X^{sigma,a}_b -> X^{sigma-d,a}_b (needs Hölder coefficients)."""
    require_holder(op)
    _check_fine(op, x)
    log = ClauseLog()
    _membership(log, op, x, f"map.{op.kind.value}")
    return log.decision()


def canonical_members(op: OperatorClass) -> list[IndexTriple]:
    c = op.coeff
    fine = c.kind.has_fine
    return [
        IndexTriple(op.sigma_high, c.inv_p, c.inv_q if fine else None),
        IndexTriple(op.sigma_low, 1 - c.inv_p, 1 - c.inv_q if fine else None),
        IndexTriple(Fraction(op.d + op.d0, 2), HALF, HALF if fine else None),
    ]


def index_set_nonempty(op: OperatorClass) -> Decision:
    """Closed-form nonemptiness test for S^d_{d0}; lists canonical members when true.

    The set is defined for any coefficient smoothness, so no Hölder
    precondition is imposed here.
    """
    c = op.coeff
    cite = f"Snonempty.{c.kind.value}"
    half_gap = Fraction(op.d - op.d0, 2)
    log = ClauseLog()
    log.check("s>=(d-d0)/2", f"{cite}.s", c.s, ">=", half_gap)
    reg, bound = c.inv_p - c.s / c.n, HALF - half_gap / c.n
    log.check("1/p-s/n<=1/2-(d-d0)/(2n)", f"{cite}.reg", reg, "<=", bound)
    if c.kind is Kind.TriebelF:
        log.check("marginal s=>q<=2", f"{cite}.fine", c.inv_q, ">=", HALF, when=c.s == half_gap)
    elif c.kind is Kind.BesovB:
        log.check("marginal s=>q<=2", f"{cite}.fine.s", c.inv_q, ">=", HALF, when=c.s == half_gap)
        log.check("marginal reg=>q<=2", f"{cite}.fine.reg", c.inv_q, ">=", HALF, when=reg == bound)
    elif c.kind is Kind.SlobodeckijW:
        pinned = not is_integer(c.s) and c.s == half_gap
        log.check("marginal s!Z=>p=2", f"{cite}.pin", c.inv_p, "==", HALF, when=pinned)
    dec = log.decision()
    if dec.verdict:
        dec.info["canonical_members"] = [m.to_list() for m in canonical_members(op)]
    return dec


def commutator_ok(op: OperatorClass, x: IndexTriple) -> Decision:
    """Whether [L, phi] maps X^{sigma,a}_b -> X^{sigma-d+1,a}_b.

    Holds when (sigma+1, a, b) lies in S^d_{d0}, or when d0 = 0 and x itself
    lies in S^d_0.  The route that was used is recorded in ``info``.
    """
    require_holder(op)
    _check_fine(op, x)
    cite = f"comm.{op.kind.value}"
    shifted = in_index_set(op, x.shift(1))
    if shifted.verdict:
        return Decision(True, [Clause("(sigma+1,a,b) in S^d_d0", f"{cite}.shift", SATISFIED)], {"route": "shift"})
    clauses = [Clause("(sigma+1,a,b) in S^d_d0", f"{cite}.shift", INAPPLICABLE, "fails; alternative route tried")]
    if op.d0 == 0 and in_index_set(op, x).verdict:
        clauses.append(Clause("d0=0 and (sigma,a,b) in S^d_0", f"{cite}.d0zero", SATISFIED))
        return Decision(True, clauses, {"route": "d0=0"})
    clauses = [Clause("(sigma+1,a,b) in S^d_d0", f"{cite}.shift", VIOLATED)]
    if op.d0 == 0:
        clauses.append(Clause("d0=0 and (sigma,a,b) in S^d_0", f"{cite}.d0zero", VIOLATED))
    return Decision(False, clauses, {"route": None})


# ---------------------------------------------------------------- polygon


@dataclass(frozen=True)
class Edge:
    start: tuple
    end: tuple
    constraint: str
    fine_caveat: bool


@dataclass(frozen=True)
class RegionPolygon:
    vertices: list
    edges: list
    shape: str  # polygon | segment | point

    def contains(self, sigma: Fraction, inv_a: Fraction) -> bool:
        """Exact closed-polygon membership."""
        vs = self.vertices
        pt = (sigma, inv_a)
        if len(vs) == 1:
            return pt == vs[0]
        if len(vs) == 2:
            a, b = vs
            if _cross(a, b, pt) != 0:
                return False
            return min(a[0], b[0]) <= sigma <= max(a[0], b[0]) and min(a[1], b[1]) <= inv_a <= max(a[1], b[1])
        return all(_cross(vs[i], vs[(i + 1) % len(vs)], pt) >= 0 for i in range(len(vs)))

    def to_dict(self) -> dict:
        return {
            "shape": self.shape,
            "vertices": [[fmt_rat(x), fmt_rat(y)] for x, y in self.vertices],
            "edges": [
                {"constraint": e.constraint, "fine_caveat": e.fine_caveat} for e in self.edges
            ],
        }


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _halfplanes(op: OperatorClass, clip: bool):
    """Constraints a*sigma + b*y <= c with labels."""
    n = op.n
    inv_n = Fraction(1, n)
    planes = [
        (Fraction(-1), Fraction(0), -op.sigma_low, "sigma=d-s"),
        (Fraction(1), Fraction(0), op.sigma_high, "sigma=s+d0"),
        (inv_n, Fraction(-1), -op.reg_low, "reg=low"),
        (-inv_n, Fraction(1), op.reg_high, "reg=high"),
    ]
    if clip:
        planes += [
            (Fraction(0), Fraction(-1), Fraction(0), "1/a=0"),
            (Fraction(0), Fraction(1), Fraction(1), "1/a=1"),
        ]
    return planes


def _fine_edge(kind: Kind, label: str) -> bool:
    if kind is Kind.BesovB:
        return label in ("sigma=d-s", "sigma=s+d0", "reg=low", "reg=high")
    if kind in (Kind.TriebelF, Kind.SlobodeckijW):
        return label in ("sigma=d-s", "sigma=s+d0")
    return False


def region_polygon(op: OperatorClass, *, clip: bool = True) -> RegionPolygon:
    """Exact vertices (counterclockwise) of the (sigma, 1/a) projection of S.

    With ``clip=True`` the region is intersected with 0 <= 1/a <= 1, the
    closure of the admissible exponent range.
    """
    planes = _halfplanes(op, clip)

    def feasible(pt):
        return all(a * pt[0] + b * pt[1] <= c for a, b, c, _ in planes)

    pts = set()
    for i in range(len(planes)):
        a1, b1, c1, _ = planes[i]
        for j in range(i + 1, len(planes)):
            a2, b2, c2, _ = planes[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if feasible((x, y)):
                pts.add((x, y))
    if not pts:
        raise EmptyRegion(f"S^{op.d}_{op.d0}({op.coeff}) has empty (sigma,1/a) projection")
    verts = _convex_order(list(pts))
    shape = {1: "point", 2: "segment"}.get(len(verts), "polygon")
    pairs = [(verts[k], verts[(k + 1) % len(verts)]) for k in range(len(verts))] if len(verts) > 2 else []
    if len(verts) == 2:
        pairs = [(verts[0], verts[1])]
    edges = []
    for p, q in pairs:
        labels = [lab for a, b, c, lab in planes if a * p[0] + b * p[1] == c and a * q[0] + b * q[1] == c]
        edges.append(Edge(p, q, "|".join(labels), any(_fine_edge(op.kind, lab) for lab in labels)))
    return RegionPolygon(verts, edges, shape)


def _convex_order(pts: list) -> list:
    """Hull of the feasible corner points in counterclockwise order (exact)."""
    pts = sorted(set(pts))
    if len(pts) <= 1:
        return pts

    def half(pts_iter):
        chain = []
        for p in pts_iter:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2:
        return [pts[0], pts[-1]]
    return hull

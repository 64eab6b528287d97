"""Exact index arithmetic for Sobolev-scale function spaces.

Every exponent is stored as a reciprocal (``inv_p = 1/p``) because all the
conditions downstream are affine in reciprocals.  Values are
:class:`fractions.Fraction` throughout, so ``<=`` and ``<`` are decided
exactly.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import DimensionMismatch, DualUndefined, KindMismatch, ParseError, RangeError

RationalLike = Union[Fraction, int, str]


def rat(x: RationalLike) -> Fraction:
    """Coerce ints, strings like ``"3/2"`` and Fractions to a Fraction."""
    if isinstance(x, float):
        raise TypeError("floating point indices are not accepted; use a Fraction or 'a/b' string")
    return Fraction(x)


def fmt_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_integer(x: Fraction) -> bool:
    return x.denominator == 1


class Kind(enum.Enum):
    BesselH = "H"
    SlobodeckijW = "W"
    TriebelF = "F"
    BesovB = "B"

    @property
    def has_fine(self) -> bool:
        return self in (Kind.TriebelF, Kind.BesovB)


class DomainKind(enum.Enum):
    WholeSpace = "rn"
    BoundedOpen = "bounded"
    BoundedSmooth = "smooth"

    @property
    def bounded(self) -> bool:
        return self is not DomainKind.WholeSpace


@dataclass(frozen=True)
class SpaceSpec:
    kind: Kind
    s: Fraction
    inv_p: Fraction
    inv_q: Optional[Fraction]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "s", rat(self.s))
        object.__setattr__(self, "inv_p", rat(self.inv_p))
        if self.inv_q is not None:
            object.__setattr__(self, "inv_q", rat(self.inv_q))
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        if not 0 < self.inv_p < 1:
            raise RangeError(f"1/p must lie in (0,1), got {fmt_rat(self.inv_p)}")
        if self.kind.has_fine:
            if self.inv_q is None:
                raise RangeError(f"{self.kind.value} spaces require a fine parameter q")
            if not 0 < self.inv_q < 1:
                raise RangeError(f"1/q must lie in (0,1), got {fmt_rat(self.inv_q)}")
        elif self.inv_q is not None:
            raise RangeError(f"{self.kind.value} spaces carry no fine parameter")
        if int(self.n) != self.n or self.n < 1:
            raise RangeError(f"dimension must be a positive integer, got {self.n}")

    @classmethod
    def make(cls, kind, s, inv_p, inv_q=None, n: int = 1) -> "SpaceSpec":
        kind = kind if isinstance(kind, Kind) else Kind(kind)
        return cls(kind, rat(s), rat(inv_p), None if inv_q is None else rat(inv_q), int(n))

    @property
    def fine(self) -> Fraction:
        """Effective fine parameter 1/q, including the H and W identifications."""
        if self.kind.has_fine:
            return self.inv_q
        if self.kind is Kind.BesselH or is_integer(self.s):
            return Fraction(1, 2)
        return self.inv_p

    @property
    def conj_p(self) -> Fraction:
        return 1 - self.inv_p

    def with_(self, **changes) -> "SpaceSpec":
        return replace(self, **changes)

    def __str__(self) -> str:
        return render_space(self)


def lebesgue_regularity(sp: SpaceSpec) -> Fraction:
    """1/r = 1/p - s/n."""
    return sp.inv_p - sp.s / sp.n


def dual_space(sp: SpaceSpec) -> SpaceSpec:
    if sp.kind is Kind.SlobodeckijW and not is_integer(sp.s):
        raise DualUndefined("the dual of a fractional W space is not a W space")
    inv_q = None if sp.inv_q is None else 1 - sp.inv_q
    return SpaceSpec(sp.kind, -sp.s, 1 - sp.inv_p, inv_q, sp.n)


def _check_same(a: SpaceSpec, b: SpaceSpec) -> None:
    if a.kind is not b.kind:
        raise KindMismatch(f"{a.kind.value} vs {b.kind.value}")
    if a.n != b.n:
        raise DimensionMismatch(f"n={a.n} vs n={b.n}")


def check_compatible(*spaces: SpaceSpec) -> None:
    first = spaces[0]
    for other in spaces[1:]:
        _check_same(first, other)


def interpolate(a: SpaceSpec, b: SpaceSpec, theta: RationalLike) -> SpaceSpec:
    """Complex interpolation indices: affine combination with weight theta."""
    _check_same(a, b)
    theta = rat(theta)
    if not 0 < theta < 1:
        raise RangeError("theta must lie strictly between 0 and 1")

    def mix(x, y):
        return (1 - theta) * x + theta * y

    inv_q = None if a.inv_q is None else mix(a.inv_q, b.inv_q)
    return SpaceSpec(a.kind, mix(a.s, b.s), mix(a.inv_p, b.inv_p), inv_q, a.n)


# ---------------------------------------------------------------- grammar

_INT = re.compile(r"-?\d+")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def fail(self, message: str):
        raise ParseError(message, self.offset())

    def literal(self, token: str) -> None:
        if not self.text.startswith(token, self.pos):
            self.fail(f"expected {token!r}")
        self.pos += len(token)

    def peek(self, token: str) -> bool:
        return self.text.startswith(token, self.pos)

    def integer(self) -> int:
        m = _INT.match(self.text, self.pos)
        if not m:
            self.fail("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def rational(self) -> Fraction:
        num = self.integer()
        if self.peek("/"):
            self.pos += 1
            start = self.pos
            den = self.integer()
            if den <= 0:
                self.pos = start
                self.fail("denominator must be positive")
            return Fraction(num, den)
        return Fraction(num)


def _reciprocal(value: Fraction, name: str) -> Fraction:
    if value <= 1:
        raise RangeError(f"{name}={fmt_rat(value)} is outside (1, inf)")
    return 1 / value


def parse_space(text: str) -> SpaceSpec:
    """Parse ``KIND[s=RAT,p=RAT(,q=RAT)?;n=INT]``."""
    cur = _Cursor(text.strip())
    if not cur.text or cur.text[0] not in "HWFB":
        cur.fail("expected kind letter H, W, F or B")
    kind = Kind(cur.text[0])
    cur.pos = 1
    cur.literal("[s=")
    s = cur.rational()
    cur.literal(",p=")
    p = cur.rational()
    q = None
    q_at = None
    if cur.peek(",q="):
        cur.pos += 3
        q_at = cur.offset()
        q = cur.rational()
    cur.literal(";n=")
    n_at = cur.offset()
    n = cur.integer()
    cur.literal("]")
    if cur.pos != len(cur.text):
        cur.fail("trailing characters")
    inv_p = _reciprocal(p, "p")
    if kind.has_fine and q is None:
        raise ParseError(f"{kind.value} spaces require ',q='", n_at - 3)
    if not kind.has_fine and q is not None:
        raise ParseError(f"{kind.value} spaces take no fine parameter", q_at)
    if n < 1:
        raise ParseError("n must be positive", n_at)
    inv_q = None if q is None else _reciprocal(q, "q")
    return SpaceSpec(kind, s, inv_p, inv_q, n)


def render_space(sp: SpaceSpec) -> str:
    body = f"s={fmt_rat(sp.s)},p={fmt_rat(1 / sp.inv_p)}"
    if sp.inv_q is not None:
        body += f",q={fmt_rat(1 / sp.inv_q)}"
    return f"{sp.kind.value}[{body};n={sp.n}]"


# ---------------------------------------------------------------- decisions

SATISFIED = "satisfied"
VIOLATED = "violated"
INAPPLICABLE = "inapplicable"
MARGINAL = "marginal"


class _Comparison:
    """Deferred ``lhs rel rhs`` text; most clauses are never rendered."""

    __slots__ = ("lhs", "rel", "rhs")

    def __init__(self, lhs, rel, rhs):
        self.lhs, self.rel, self.rhs = lhs, rel, rhs

    def __str__(self) -> str:
        return f"{_show(self.lhs)} {self.rel} {_show(self.rhs)}"

    def __eq__(self, other) -> bool:
        return str(self) == str(other)

    def __hash__(self) -> int:
        return hash(str(self))


@dataclass(frozen=True)
class Clause:
    tag: str
    citation: str
    status: str
    detail: Union[str, _Comparison] = ""

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "citation": self.citation, "status": self.status}
        if self.detail:
            out["detail"] = str(self.detail)
        return out


@dataclass
class Decision:
    verdict: bool
    clauses: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def marginal(self) -> bool:
        return any(c.status == MARGINAL for c in self.clauses)

    @property
    def violated(self) -> list:
        return [c for c in self.clauses if c.status == VIOLATED]

    @property
    def citations(self) -> list:
        return [c.citation for c in self.clauses if c.status != INAPPLICABLE]

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "marginal": self.marginal,
            "clauses": [c.to_dict() for c in self.clauses],
        }
        if self.info:
            out["info"] = self.info
        return out


_RELATIONS = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


class ClauseLog:
    """Accumulates clause evaluations; non-strict inequalities met with
    equality are logged as ``marginal``."""

    def __init__(self):
        self.clauses: list[Clause] = []

    def check(self, tag: str, citation: str, lhs, rel: str, rhs, *, when: bool = True) -> bool:
        detail = _Comparison(lhs, rel, rhs)
        if not when:
            self.clauses.append(Clause(tag, citation, INAPPLICABLE, detail))
            return True
        ok = _RELATIONS[rel](lhs, rhs)
        if not ok:
            status = VIOLATED
        elif rel in ("<=", ">=") and lhs == rhs:
            status = MARGINAL
        else:
            status = SATISFIED
        self.clauses.append(Clause(tag, citation, status, detail))
        return ok

    def note(self, tag: str, citation: str, ok: bool, detail: str = "") -> bool:
        self.clauses.append(Clause(tag, citation, SATISFIED if ok else VIOLATED, detail))
        return ok

    def skip(self, tag: str, citation: str, detail: str = "") -> None:
        self.clauses.append(Clause(tag, citation, INAPPLICABLE, detail))

    def decision(self, **info) -> Decision:
        verdict = not any(c.status == VIOLATED for c in self.clauses)
        return Decision(verdict, list(self.clauses), dict(info))


def _show(x) -> str:
    if isinstance(x, Fraction):
        return fmt_rat(x)
    return str(x)


def spaces_grid(
    kind: Kind,
    n: int,
    s_values: Iterable[Fraction],
    invp_values: Iterable[Fraction],
    invq_values: Iterable[Fraction] = (),
) -> list[SpaceSpec]:
    """Deterministic product grid of spaces of one kind."""
    s_values = list(s_values)
    invp_values = list(invp_values)
    fines = list(invq_values) if kind.has_fine else [None]
    return [SpaceSpec(kind, s, ip, iq, n) for s in s_values for ip in invp_values for iq in fines]

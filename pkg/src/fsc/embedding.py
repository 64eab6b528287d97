"""Continuous embeddings within a single scale, and Hölder embeddings.

The direct clauses follow the standard embedding lists for each scale.  The
public :func:`embeds` additionally closes them under composition, so a chain
such as "Sobolev embedding, then drop derivatives at fixed p" is found.
W spaces are decided through their Triebel-Lizorkin identification.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .spaces import (
    SATISFIED,
    VIOLATED,
    Clause,
    Decision,
    DomainKind,
    Kind,
    SpaceSpec,
    check_compatible,
    lebesgue_regularity,
)

CITE = {
    Kind.BesselH: "embed.H",
    Kind.TriebelF: "embed.F",
    Kind.BesovB: "embed.B",
    Kind.SlobodeckijW: "embed.W",
}


def _as_fine_space(sp: SpaceSpec) -> SpaceSpec:
    """Put H and W spaces on the F scale so one clause list serves all."""
    if sp.kind is Kind.BesovB or sp.kind is Kind.TriebelF:
        return sp
    return SpaceSpec(Kind.TriebelF, sp.s, sp.inv_p, sp.fine, sp.n)


def direct_clauses(src: SpaceSpec, dst: SpaceSpec, dom: DomainKind) -> list[int]:
    """Numbers of the generator clauses that give src -> dst in one step."""
    bounded = dom.bounded
    s1, s2 = src.s, dst.s
    r1, r2 = lebesgue_regularity(src), lebesgue_regularity(dst)
    same_p = src.inv_p == dst.inv_p
    hits = []
    if src.kind is Kind.BesselH:
        if s1 > s2 and same_p:
            hits.append(1)
        if bounded and s1 == s2 and src.inv_p <= dst.inv_p:
            hits.append(2)
        if s1 > s2 and r1 == r2:
            hits.append(3)
        if bounded and s1 > s2 and r1 <= r2:
            hits.append(4)
        return hits

    q1, q2 = src.inv_q, dst.inv_q
    same_q = q1 == q2
    if src.kind is Kind.TriebelF:
        if s1 > s2 and same_p:
            hits.append(1)
        if s1 == s2 and same_p and q1 >= q2:
            hits.append(2)
        if bounded and s1 == s2 and same_q and src.inv_p <= dst.inv_p:
            hits.append(3)
        if s1 > s2 and r1 == r2:
            hits.append(4)
        if bounded and s1 > s2 and r1 <= r2:
            hits.append(5)
        return hits

    if src.kind is Kind.BesovB:
        if s1 > s2 and same_p:
            hits.append(1)
        if s1 == s2 and same_p and q1 >= q2:
            hits.append(2)
        if bounded and s1 == s2 and same_q and src.inv_p <= dst.inv_p:
            hits.append(3)
        if s1 > s2 and r1 == r2 and same_q:
            hits.append(4)
        if bounded and s1 > s2 and r1 < r2:
            hits.append(5)
        return hits
    raise ValueError(f"no direct clause list for {src.kind}")


def _candidates(src: SpaceSpec, dst: SpaceSpec) -> list[SpaceSpec]:
    """Intermediate spaces for the closure search.

    Every generator either keeps a coordinate or moves it to the
    destination's value; smoothness can also land where a Lebesgue
    regularity line of src or dst crosses an available 1/p.
    """
    n = src.n
    inv_ps = {src.inv_p, dst.inv_p}
    regs = {lebesgue_regularity(src), lebesgue_regularity(dst)}
    s_vals = {src.s, dst.s} | {n * (ip - r) for ip in inv_ps for r in regs}
    fines = [None] if src.inv_q is None else sorted({src.inv_q, dst.inv_q})
    out = []
    for s in sorted(s_vals):
        for ip in sorted(inv_ps):
            for iq in fines:
                out.append(SpaceSpec(src.kind, s, ip, iq, n))
    return out


@dataclass(frozen=True)
class _Hop:
    src: SpaceSpec
    dst: SpaceSpec
    clause: int


def _closure_path(src: SpaceSpec, dst: SpaceSpec, dom: DomainKind) -> Optional[list[_Hop]]:
    if src == dst:
        return []
    nodes = _candidates(src, dst)
    if dst not in nodes:
        nodes.append(dst)
    prev: dict = {src: None}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        for nxt in nodes:
            if nxt in prev:
                continue
            hits = direct_clauses(cur, nxt, dom)
            if not hits:
                continue
            prev[nxt] = _Hop(cur, nxt, hits[0])
            if nxt == dst:
                path = []
                node = dst
                while prev[node] is not None:
                    path.append(prev[node])
                    node = prev[node].src
                return path[::-1]
            queue.append(nxt)
    return None


def embeds(src: SpaceSpec, dst: SpaceSpec, dom: DomainKind = DomainKind.BoundedOpen, *, closure: bool = True) -> Decision:
    """Decide ``src`` continuously embeds in ``dst`` on the given domain.

    With ``closure=False`` only single generator clauses are consulted.
    BoundedSmooth is treated exactly like BoundedOpen.
    """
    check_compatible(src, dst)
    cite = CITE[src.kind]
    info = {}
    a, b = src, dst
    if src.kind is Kind.SlobodeckijW:
        a, b = _as_fine_space(src), _as_fine_space(dst)
        info["identified_as"] = [str(a), str(b)]

    if a == b:
        return Decision(True, [Clause("reflexive", f"{cite}.reflexive", SATISFIED)], info)

    direct = direct_clauses(a, b, dom) if a.kind is b.kind else []
    if direct:
        clauses = [Clause(f"clause{c}", f"{cite}.{c}", SATISFIED) for c in direct]
        return Decision(True, clauses, info)
    if not closure:
        return Decision(False, [Clause("no-clause", f"{cite}.none", VIOLATED)], info)

    path = _closure_path(a, b, dom)
    if path is None:
        return Decision(False, [Clause("no-chain", f"{cite}.closure", VIOLATED)], info)
    clauses = [
        Clause(f"step{k + 1}", f"{cite}.{hop.clause}", SATISFIED, f"{hop.src} -> {hop.dst}")
        for k, hop in enumerate(path)
    ]
    info["chain"] = [str(hop.dst) for hop in path]
    return Decision(True, clauses, info)


@dataclass(frozen=True)
class HolderExponent:
    alpha: Fraction
    marginal: bool


def holder_embedding(sp: SpaceSpec) -> Optional[HolderExponent]:
    """Hölder exponent of the embedding into C^{0,alpha}, if any.

    alpha = s - n/p, clamped to 1 above; exactly 1 is flagged marginal.
    """
    alpha = sp.s - sp.n * sp.inv_p
    if alpha <= 0:
        return None
    if alpha < 1:
        return HolderExponent(alpha, False)
    return HolderExponent(Fraction(1), alpha == 1)


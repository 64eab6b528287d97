"""Planning and checking elliptic-regularity bootstrap paths.

A path starts at the seed (d-s-1, p*, q*) and climbs through compatible
indices to the target.  Each step A -> B must satisfy the step hypotheses

    H1  sigma_B <= sigma                       (hard derivative limit)
    H2  reg(target) <= reg(B)                  (hard Lebesgue limit)
    H3  sigma_B <= sigma_A + 1                 (one derivative per step)
    H4  reg(A) - 1/n <= reg(B)                 (Sobolev step limit)
    H5  sigma_B = sigma      => 1/b_B <= 1/b              (F, B)
    H6  sigma_B = sigma_A+1  => 1/b_B <= 1/b_A            (F, B)
    H7  reg(B) = reg(target) => 1/b_B <= 1/b              (B)
    H8  reg(B) = reg(A)-1/n  => 1/b_B <= 1/b_A            (B)

where reg(x) = 1/a - sigma/n, and the commutator estimate must be available
at the source A.  The validator re-derives all of this independently of the
planner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from .errors import FscError, SetEmpty, TargetNotInS
from .operators import (
    IndexTriple,
    OperatorClass,
    commutator_ok,
    in_index_set,
    index_set_nonempty,
    require_holder,
)
from .operators import HALF
from .spaces import ClauseLog, Decision, Kind, is_integer

STAGES = (
    "initial",
    "lower_lebesgue",
    "raise_sigma_on_line",
    "raise_sigma_fixed_a",
    "d0_reduction",
    "fine_final",
)


class PlanningFailed(FscError):
    code = "planning_failed"


@dataclass(frozen=True)
class BootstrapStep:
    source: IndexTriple
    dest: IndexTriple
    stage: str
    justification: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "from": self.source.to_list(),
            "to": self.dest.to_list(),
            "stage": self.stage,
            "justification": self.justification,
        }


@dataclass
class BootstrapPath:
    op: OperatorClass
    target: IndexTriple
    steps: list

    @property
    def stage_labels(self) -> list[str]:
        return [st.stage for st in self.steps]

    @property
    def triples(self) -> list[IndexTriple]:
        if not self.steps:
            return []
        return [self.steps[0].source] + [st.dest for st in self.steps]

    def to_dict(self) -> dict:
        return {
            "op": self.op.render(),
            "coeff": str(self.op.coeff),
            "target": self.target.to_list(),
            "triples": [t.to_list() for t in self.triples],
            "stage_labels": self.stage_labels,
            "steps": [st.to_dict() for st in self.steps],
        }


def seed(op: OperatorClass) -> IndexTriple:
    c = op.coeff
    fine = 1 - c.inv_q if c.kind.has_fine else None
    return IndexTriple(op.sigma_low - 1, 1 - c.inv_p, fine)


def step_bound(op: OperatorClass, target: IndexTriple) -> int:
    """Planner-level bound on the number of steps."""
    c = op.coeff
    low = math.ceil(c.n * abs((1 - c.inv_p) - target.inv_a))
    climb = math.ceil(max(target.sigma - op.sigma_low, 0))
    return 4 + op.d0 + low + climb + 1


# ---------------------------------------------------------------- validation


def check_step(op: OperatorClass, a: IndexTriple, b: IndexTriple, target: IndexTriple) -> ClauseLog:
    """Evaluate H1..H8 for one step, plus the commutator estimate at the source."""
    n = op.n
    kind = op.kind
    log = ClauseLog()
    reg_a, reg_b, reg_t = a.reg(n), b.reg(n), target.reg(n)
    log.check("H1", "boot.H1", b.sigma, "<=", target.sigma)
    log.check("H2", "boot.H2", reg_t, "<=", reg_b)
    log.check("H3", "boot.H3", b.sigma, "<=", a.sigma + 1)
    log.check("H4", "boot.H4", reg_a - Fraction(1, n), "<=", reg_b)
    if kind.has_fine:
        log.check("H5", "boot.H5", b.inv_b, "<=", target.inv_b, when=b.sigma == target.sigma)
        log.check("H6", "boot.H6", b.inv_b, "<=", a.inv_b, when=b.sigma == a.sigma + 1)
    if kind is Kind.BesovB:
        log.check("H7", "boot.H7", b.inv_b, "<=", target.inv_b, when=reg_b == reg_t)
        log.check("H8", "boot.H8", b.inv_b, "<=", a.inv_b, when=reg_b == reg_a - Fraction(1, n))
    comm = commutator_ok(op, a)
    log.note("commutator", f"comm.{kind.value}.{comm.info.get('route') or 'none'}", comm.verdict)
    return log


def _justify(op, a, b, target) -> dict:
    return {c.tag: c.status for c in check_step(op, a, b, target).clauses}


def validate_path(op: OperatorClass, path: BootstrapPath) -> Decision:
    """Independent re-check of every step of a path."""
    log = ClauseLog()
    steps = path.steps
    if not steps:
        log.note("nonempty", "boot.path", False, "path has no steps")
        return log.decision()
    log.note("seed", "boot.seed", steps[0].source == seed(op), str(steps[0].source))
    for k, st in enumerate(steps):
        if k > 0 and steps[k - 1].dest != st.source:
            log.note(f"step{k + 1}:chain", "boot.chain", False, f"{steps[k - 1].dest} != {st.source}")
        for c in check_step(op, st.source, st.dest, path.target).clauses:
            if c.status == "violated":
                log.note(f"step{k + 1}:{c.tag}", c.citation, False, c.detail)
    if steps[-1].dest != path.target:
        log.note("terminal mismatch", "boot.terminal", False, f"{steps[-1].dest} != {path.target}")
    else:
        log.note("terminal", "boot.terminal", True)
    return log.decision()


# ---------------------------------------------------------------- planning


def _w_fractional(op: OperatorClass) -> bool:
    return op.kind is Kind.SlobodeckijW and not is_integer(op.coeff.s)


def _raise_fixed_a(pts, sigma_to, inv_a, fine):
    while pts[-1][0].sigma < sigma_to:
        nxt = min(pts[-1][0].sigma + 1, sigma_to)
        pts.append((IndexTriple(nxt, inv_a, fine), "raise_sigma_fixed_a"))


def _lower_a(pts, sigma, inv_a_to, n, fine):
    while pts[-1][0].inv_a > inv_a_to:
        nxt = max(pts[-1][0].inv_a - Fraction(1, n), inv_a_to)
        pts.append((IndexTriple(sigma, nxt, fine), "lower_lebesgue"))


def _plan_zero(op: OperatorClass, target: IndexTriple) -> list:
    """Points (seed first) of the d0 = 0 climb, fine index held at q*."""
    c = op.coeff
    n = c.n
    pstar = 1 - c.inv_p
    fm = 1 - c.inv_q if c.kind.has_fine else None
    lo = op.sigma_low
    pts = [(seed(op), None), (IndexTriple(lo, pstar, fm), "initial")]
    sigma, inv_a = target.sigma, target.inv_a
    if inv_a <= pstar:
        if _w_fractional(op) and inv_a < pstar:
            # Fixed-s W spaces pin 1/a on the line sigma = d-s; step off it first.
            s1 = lo + min(Fraction(1), (sigma - lo) / 2)
            pts.append((IndexTriple(s1, pstar, fm), "raise_sigma_fixed_a"))
            _lower_a(pts, s1, inv_a, n, fm)
        else:
            _lower_a(pts, lo, inv_a, n, fm)
        _raise_fixed_a(pts, sigma, inv_a, fm)
    else:
        top = pstar - lo / n
        sigma_line = lo + n * (inv_a - pstar)
        while pts[-1][0].sigma < sigma_line:
            nxt = min(pts[-1][0].sigma + 1, sigma_line)
            pts.append((IndexTriple(nxt, top + nxt / n, fm), "raise_sigma_on_line"))
        _raise_fixed_a(pts, sigma, inv_a, fm)
    return pts


def _reduction_spots(prev: OperatorClass, goal: IndexTriple):
    """Candidate (sigma', 1/a') positions, the direct rule first."""
    n = prev.n
    t = prev.sigma_high
    low = prev.reg_low
    reg = goal.reg(n)
    sigma = goal.sigma
    if sigma < t:
        yield sigma, low + sigma / n
    elif low <= reg:
        yield t, reg + t / n
    else:
        yield t, prev.coeff.inv_p
    # Fallback: search the feasible box one step below the goal.
    lo2, hi2 = max(sigma - 1, prev.sigma_low), min(sigma, t)
    if lo2 > hi2:
        return
    for k in (4, 0, 8, 2, 6, 1, 3, 5, 7):
        sig = lo2 + (hi2 - lo2) * k / 8
        rlo = max(low, -sig / n)
        rhi = min(prev.reg_high, reg + Fraction(1, n), 1 - sig / n)
        if rlo > rhi:
            continue
        for r in (reg, (rlo + rhi) / 2, rlo, rhi):
            if rlo <= r <= rhi:
                yield sig, r + sig / n


def _enterable(kind: Kind, n: int, x: IndexTriple, final: IndexTriple) -> bool:
    """H5/H7 constrain any step landing on x, whatever its source."""
    if not kind.has_fine or x.inv_b <= final.inv_b:
        return True
    if x.sigma == final.sigma:
        return False
    return not (kind is Kind.BesovB and x.reg(n) == final.reg(n))


def _reduce(op: OperatorClass, prev: OperatorClass, goal: IndexTriple, final: IndexTriple) -> IndexTriple:
    """Point of S^d_{k-1} from which a single step reaches ``goal`` in S^d_k."""
    c = prev.coeff
    if c.kind.has_fine:
        fines = [min(c.inv_q, goal.inv_b), goal.inv_b, c.inv_q, 1 - c.inv_q, HALF]
    else:
        fines = [None]
    for sig, inv_a in _reduction_spots(prev, goal):
        if not 0 < inv_a < 1:
            continue
        for fine in fines:
            cand = IndexTriple(sig, inv_a, fine)
            if not _enterable(c.kind, c.n, cand, final):
                continue
            if in_index_set(prev, cand).verdict and check_step(op, cand, goal, final).decision().verdict:
                return cand
    raise PlanningFailed(f"no reduction point for {goal} in S^{prev.d}_{prev.d0}")


def _plan_points(op: OperatorClass, level: OperatorClass, goal: IndexTriple, final: IndexTriple) -> list:
    """Points from the seed to ``goal`` (inclusive, exact fine index)."""
    if level.d0 == 0:
        pts = _dedupe(_plan_zero(level, goal))
        return _finish(op, pts, goal, final)
    prev = level.with_d(d0=level.d0 - 1)
    if in_index_set(prev, goal).verdict:
        return _plan_points(op, prev, goal, final)
    mid = _reduce(op, prev, goal, final)
    return _plan_points(op, prev, mid, final) + [(goal, "d0_reduction")]


def _steps_ok(op, chain, final) -> bool:
    for (a, _), (b, _) in zip(chain, chain[1:]):
        if not in_index_set(op, b).verdict or not check_step(op, a, b, final).decision().verdict:
            return False
    return True


def _finish(op: OperatorClass, pts: list, goal: IndexTriple, final: IndexTriple) -> list:
    """Attach the goal's fine index to the last step, repairing it if needed.

    Tries, in order: set b on the last step; split the last step into two
    halves (the first keeping the old fine index); add a separate fine-only
    step.
    """
    last, stage = pts[-1]
    if last == goal:
        return pts
    if (last.sigma, last.inv_a) != (goal.sigma, goal.inv_a):
        raise PlanningFailed(f"planner ended at {last}, expected {goal}")
    head = pts[:-1]
    prev = head[-1][0]
    mid = IndexTriple((prev.sigma + goal.sigma) / 2, (prev.inv_a + goal.inv_a) / 2, last.inv_b)
    held = IndexTriple(goal.sigma, goal.inv_a, last.inv_b)
    options = [
        head + [(goal, stage)],
        head + [(mid, stage), (goal, stage)],
        pts + [(goal, "fine_final")],
        head + [(mid, stage), (held, stage), (goal, "fine_final")],
    ]
    for chain in options:
        if _steps_ok(op, chain[len(head) - 1 :], final):
            return chain
    return options[0]


def plan_bootstrap(op: OperatorClass, target: IndexTriple) -> BootstrapPath:
    """Construct a bootstrap path from the seed to ``target``.

    Raises SetEmpty when S^d_{d0} (or, for d0 > 0, the S^d_0 the climb
    passes through) is empty, and TargetNotInS when target is not a
    compatible index.
    """
    require_holder(op)
    if not index_set_nonempty(op).verdict:
        raise SetEmpty(f"S^{op.d}_{op.d0}({op.coeff}) is empty")
    if not in_index_set(op, target).verdict:
        raise TargetNotInS(f"{target} is not in S^{op.d}_{op.d0}({op.coeff})")
    if op.d0 > 0 and not index_set_nonempty(op.with_d(d0=0)).verdict:
        raise SetEmpty(f"S^{op.d}_0({op.coeff}) is empty; the reduction has nowhere to climb")

    pts = _plan_points(op, op, target, target)
    steps = []
    for (a, _), (b, stage) in zip(pts, pts[1:]):
        steps.append(BootstrapStep(a, b, stage, _justify(op, a, b, target)))
    return BootstrapPath(op, target, steps)


def _dedupe(pts: list) -> list:
    out = []
    for tri, stage in pts:
        if out and (out[-1][0].sigma, out[-1][0].inv_a, out[-1][0].inv_b) == (tri.sigma, tri.inv_a, tri.inv_b):
            continue
        out.append((tri, stage))
    return out


# ---------------------------------------------------------------- sampling


def _rand_frac(rng, lo: Fraction, hi: Fraction, den: int) -> Fraction:
    a, b = math.ceil(lo * den), math.floor(hi * den)
    return Fraction(rng.randint(a, b), den)


def random_admissible(kind: Kind, rng, *, max_tries: int = 10_000):
    """Draw (op, target) with Hölder coefficients, S^d_0 nonempty and target in S.

    ``rng`` is a :class:`random.Random`; draws are on small-denominator grids
    so marginal boundaries are hit with positive probability.
    """
    from .spaces import SpaceSpec

    for _ in range(max_tries):
        n = rng.randint(1, 3)
        d = rng.randint(1, 4)
        d0 = rng.randint(0, d)
        inv_p = Fraction(rng.randint(1, 5), 6)
        s = Fraction(rng.randint(0, 24), 4)
        if kind is Kind.SlobodeckijW and rng.random() < 0.5:
            s = Fraction(math.floor(s))
        inv_q = Fraction(rng.randint(1, 5), 6) if kind.has_fine else None
        try:
            coeff = SpaceSpec(kind, s, inv_p, inv_q, n)
        except FscError:
            continue
        op = OperatorClass(d, d0, coeff)
        if coeff.s <= n * inv_p:
            continue
        if not index_set_nonempty(op.with_d(d0=0)).verdict:
            continue
        sigma = _rand_frac(rng, op.sigma_low, op.sigma_high, 4)
        reg_lo = max(op.reg_low, -sigma / n + Fraction(1, 120))
        reg_hi = min(op.reg_high, 1 - sigma / n - Fraction(1, 120))
        if reg_lo > reg_hi:
            continue
        reg = _rand_frac(rng, reg_lo, reg_hi, 12)
        inv_a = reg + sigma / n
        if not 0 < inv_a < 1:
            continue
        inv_b = Fraction(rng.randint(1, 5), 6) if kind.has_fine else None
        target = IndexTriple(sigma, inv_a, inv_b)
        if in_index_set(op, target).verdict:
            return op, target
    raise FscError("could not draw an admissible operator/target pair")

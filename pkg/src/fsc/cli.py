"""The ``fsc`` command line.

Every command prints one JSON object ``{"status", "payload", "citations"}``
on a single stdout line (``--pretty`` indents it).  Exit codes: 0 when a
verdict was computed (true or false), 2 for usage errors, 3 for errors raised
by an engine.  Files are only written to an explicit ``--out`` or
``--emit-svg`` path.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bootstrap import plan_bootstrap, step_bound, validate_path
from .embedding import embeds, holder_embedding
from .errors import FscError, ParseError
from .multiplication import SWEEP_INVP, SWEEP_S, may_multiply, mult_grid_sweep, sweep_to_csv
from .operators import (
    in_index_set,
    index_set_nonempty,
    parse_operator,
    parse_triple,
    region_polygon,
)
from .spaces import DomainKind, Kind, fmt_rat, parse_space, render_space

SPACE_GRAMMAR = "KIND[s=RAT,p=RAT(,q=RAT)?;n=INT]  e.g. H[s=1,p=2;n=3], F[s=1/2,p=3,q=2;n=2]"
OP_GRAMMAR = "L[d=INT,d0=INT]"
TRIPLE_GRAMMAR = "(sigma,1/a[,1/b]) with rational entries, e.g. (1,1/2) or (1,1/2,1/2)"


class UsageError(Exception):
    def __init__(self, message: str, grammar: str = "", code: str = "usage", offset=None):
        super().__init__(message)
        self.grammar = grammar
        self.code = code
        self.offset = offset


def _bad_parse(exc: ParseError, grammar: str) -> UsageError:
    return UsageError(str(exc), grammar, exc.code, getattr(exc, "offset", None))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage().strip())


def _space(text: str):
    try:
        return parse_space(text)
    except ParseError as exc:
        raise _bad_parse(exc, SPACE_GRAMMAR) from None


def _op(text: str, coeff):
    try:
        return parse_operator(text, coeff)
    except ParseError as exc:
        raise _bad_parse(exc, OP_GRAMMAR) from None


def _triple(text: str):
    try:
        return parse_triple(text)
    except ParseError as exc:
        raise _bad_parse(exc, TRIPLE_GRAMMAR) from None


def _rats(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational list {text!r}", "comma-separated rationals, e.g. 1/4,1/2") from None


def _write(path: str, data, binary: bool = False) -> None:
    with open(path, "wb" if binary else "w", encoding=None if binary else "utf-8") as fh:
        fh.write(data)


def _decision_payload(dec, argv: list[str], **extra) -> tuple[dict, list]:
    payload = {"argv": argv, **dec.to_dict(), **extra}
    return payload, dec.citations


# ---------------------------------------------------------------- commands


def cmd_check_embed(a):
    src, dst = _space(a.src), _space(a.dst)
    dom = DomainKind(a.domain)
    dec = embeds(src, dst, dom, closure=not a.no_closure)
    argv = ["check-embed", "--src", render_space(src), "--dst", render_space(dst), "--domain", dom.value]
    if a.no_closure:
        argv.append("--no-closure")
    holder = holder_embedding(src)
    extra = {"holder": None if holder is None else {"alpha": fmt_rat(holder.alpha), "marginal": holder.marginal}}
    return _decision_payload(dec, argv, **extra)


def cmd_check_mult(a):
    f1, f2, t = _space(a.f1), _space(a.f2), _space(a.target)
    dec = may_multiply(f1, f2, t)
    argv = ["check-mult", "--f1", render_space(f1), "--f2", render_space(f2), "--target", render_space(t)]
    return _decision_payload(dec, argv)


def cmd_sweep_mult(a):
    kind = Kind(a.kind)
    s_range = _rats(a.s) if a.s else SWEEP_S
    invp = [1 / p for p in _rats(a.p)] if a.p else SWEEP_INVP
    invq = ([1 / q for q in _rats(a.q)] if a.q else SWEEP_INVP) if kind.has_fine else []
    rows = mult_grid_sweep(kind, a.n, s_range, invp, invq)
    argv = ["sweep-mult", "--kind", kind.value, "--n", str(a.n)]
    argv += ["--s", ",".join(fmt_rat(x) for x in s_range), "--p", ",".join(fmt_rat(1 / x) for x in invp)]
    if kind.has_fine:
        argv += ["--q", ",".join(fmt_rat(1 / x) for x in invq)]
    payload = {"argv": argv, "tuples": len(rows), "true": sum(r.verdict for r in rows)}
    if a.out:
        _write(a.out, sweep_to_csv(rows))
        payload["out"] = a.out
    return payload, [f"mult.{kind.value}"]


def cmd_index_set(a):
    coeff = _space(a.coeff)
    op = _op(a.op, coeff)
    base = ["index-set", "--op", op.render(), "--coeff", render_space(coeff)]
    if a.contains:
        x = _triple(a.contains)
        dec = in_index_set(op, x)
        return _decision_payload(dec, base + ["--contains", x.render()])
    if a.nonempty:
        return _decision_payload(index_set_nonempty(op), base + ["--nonempty"])
    poly = region_polygon(op, clip=not a.unclipped)
    argv = base + ["--polygon"] + (["--unclipped"] if a.unclipped else [])
    payload = {"argv": argv, **poly.to_dict()}
    if a.out:
        from .render import region_csv, region_svg

        text = region_csv(poly) if a.format == "csv" else region_svg(op, poly)
        _write(a.out, text)
        payload["out"] = a.out
    return payload, [f"S.{op.kind.value}"]


def cmd_plan_bootstrap(a):
    coeff = _space(a.coeff)
    op = _op(a.op, coeff)
    target = _triple(a.target)
    path = plan_bootstrap(op, target)
    check = validate_path(op, path)
    argv = ["plan-bootstrap", "--op", op.render(), "--coeff", render_space(coeff), "--target", target.render()]
    payload = {
        "argv": argv,
        **path.to_dict(),
        "valid": check.verdict,
        "step_bound": step_bound(op, target),
    }
    if a.emit_svg:
        from .render import bootstrap_svg

        _write(a.emit_svg, bootstrap_svg(path))
        payload["svg"] = a.emit_svg
    return payload, check.citations


def cmd_render(a):
    from .render import bootstrap_csv, bootstrap_svg, region_csv, region_svg

    coeff = _space(a.coeff)
    op = _op(a.op, coeff)
    if a.figure == "s-region":
        poly = region_polygon(op)
        text = region_csv(poly) if a.format == "csv" else region_svg(op, poly)
    else:
        if not a.target:
            raise UsageError("render-figure bootstrap needs --target", TRIPLE_GRAMMAR)
        path = plan_bootstrap(op, _triple(a.target))
        text = bootstrap_csv(path) if a.format == "csv" else bootstrap_svg(path)
    if a.out:
        _write(a.out, text)
        return {"figure": a.figure, "format": a.format, "out": a.out}, []
    return text, None


# ---------------------------------------------------------------- numeric


def _field(path: str):
    from .fields import load_field

    try:
        return load_field(path)
    except OSError as exc:
        raise UsageError(f"cannot read field file: {exc}", "fld1 file") from None


def cmd_lp_norm(a):
    from .lp import space_norm

    u = _field(a.field)
    sp = _space(a.space)
    return {"argv": ["numeric", "lp-norm", "--field", a.field, "--space", render_space(sp)], "norm": space_norm(u, sp)}, []


def cmd_rescale_fit(a):
    from .lp import fit_rescaling_exponent

    u = _field(a.field)
    sp = _space(a.space)
    r_list = [float(x) for x in _rats(a.r)] if a.r else [2.0**-k for k in range(1, 7)]
    fit = fit_rescaling_exponent(u, sp, a.vanishing, r_list, chi_radius=a.chi_radius)
    argv = ["numeric", "rescale-fit", "--field", a.field, "--space", render_space(sp)]
    argv += ["--r", ",".join(fmt_rat(Fraction(r).limit_denominator(1 << 30)) for r in r_list)]
    if a.vanishing:
        argv.append("--vanishing")
    if a.chi_radius is not None:
        argv += ["--chi-radius", repr(a.chi_radius)]
    return {"argv": argv, **fit.to_dict()}, []


def cmd_trichotomy(a):
    from .lp import trichotomy_residual

    u = _field(a.field)
    v = _field(a.field2) if a.field2 else u
    try:
        k, k1, k2 = (int(x) for x in a.bands.split(","))
    except ValueError:
        raise UsageError("--bands needs three integers", "k,k',k''") from None
    res = trichotomy_residual(u, v, k, k1, k2)
    argv = ["numeric", "trichotomy", "--field", a.field] + (["--field2", a.field2] if a.field2 else [])
    return {"argv": argv + ["--bands", f"{k},{k1},{k2}"], "bands": [k, k1, k2], "residual": res.residual, "pattern": res.pattern, "allowed": res.allowed}, []


def cmd_parametrix(a):
    from .parametrix import ConstCoeffOperator, is_elliptic, parametrix_identity_residual

    try:
        with open(a.op_file, encoding="utf-8") as fh:
            opr = ConstCoeffOperator.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"bad operator file: {exc}", '{"n":..,"k":..,"d":..,"coeffs":[{"alpha":[..],"matrix":[[..]]}]}') from None
    ell = is_elliptic(opr)
    argv = ["numeric", "parametrix-check", "--op-file", a.op_file]
    for f in a.field:
        argv += ["--field", f]
    payload = {"argv": argv + ["--cutoff", repr(a.cutoff)], "elliptic": ell.verdict, "min_det": ell.info["min_det"], "residual": None}
    if ell.verdict:
        comps = [_field(f) for f in a.field]
        u = comps[0] if opr.k == 1 and len(comps) == 1 else comps
        payload["residual"] = parametrix_identity_residual(opr, u, a.cutoff)
    return payload, ell.citations


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fsc", description="Function-space index calculus and numeric checks.")
    p.add_argument("--pretty", action="store_true", help="indent JSON output")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    e = sub.add_parser("check-embed", help="decide a continuous embedding")
    e.add_argument("--src", required=True)
    e.add_argument("--dst", required=True)
    e.add_argument("--domain", choices=[d.value for d in DomainKind], default="bounded")
    e.add_argument("--no-closure", action="store_true", help="single generator clauses only")
    e.set_defaults(func=cmd_check_embed)

    m = sub.add_parser("check-mult", help="decide a multiplication rule")
    m.add_argument("--f1", required=True)
    m.add_argument("--f2", required=True)
    m.add_argument("--target", required=True)
    m.set_defaults(func=cmd_check_mult)

    s = sub.add_parser("sweep-mult", help="exhaustive multiplication verdict table")
    s.add_argument("--kind", choices=[k.value for k in Kind], required=True)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--s", help="smoothness values, comma-separated rationals")
    s.add_argument("--p", help="Lebesgue exponents p")
    s.add_argument("--q", help="fine exponents q (F, B)")
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_sweep_mult)

    i = sub.add_parser("index-set", help="compatible index set queries")
    i.add_argument("--op", required=True)
    i.add_argument("--coeff", required=True)
    mode = i.add_mutually_exclusive_group(required=True)
    mode.add_argument("--contains", metavar="TRIPLE")
    mode.add_argument("--nonempty", action="store_true")
    mode.add_argument("--polygon", action="store_true")
    i.add_argument("--unclipped", action="store_true", help="do not clip to 0 <= 1/a <= 1")
    i.add_argument("--format", choices=["svg", "csv"], default="svg")
    i.add_argument("--out")
    i.set_defaults(func=cmd_index_set)

    b = sub.add_parser("plan-bootstrap", help="plan and validate a bootstrap path")
    b.add_argument("--op", required=True)
    b.add_argument("--coeff", required=True)
    b.add_argument("--target", required=True)
    b.add_argument("--emit-svg", metavar="PATH")
    b.set_defaults(func=cmd_plan_bootstrap)

    n = sub.add_parser("numeric", help="FFT-based numeric checks")
    nsub = n.add_subparsers(dest="numeric", parser_class=_Parser, required=True)
    ln = nsub.add_parser("lp-norm")
    ln.add_argument("--field", required=True)
    ln.add_argument("--space", required=True)
    ln.set_defaults(func=cmd_lp_norm)
    rf = nsub.add_parser("rescale-fit")
    rf.add_argument("--field", required=True)
    rf.add_argument("--space", required=True)
    rf.add_argument("--vanishing", action="store_true")
    rf.add_argument("--r", help="comma-separated r values in (0,1]")
    rf.add_argument("--chi-radius", type=float)
    rf.set_defaults(func=cmd_rescale_fit)
    tr = nsub.add_parser("trichotomy")
    tr.add_argument("--field", required=True)
    tr.add_argument("--field2")
    tr.add_argument("--bands", required=True, help="k,k',k''")
    tr.set_defaults(func=cmd_trichotomy)
    pc = nsub.add_parser("parametrix-check")
    pc.add_argument("--op-file", required=True)
    pc.add_argument("--field", required=True, action="append", help="one file per component")
    pc.add_argument("--cutoff", type=float, default=1.0)
    pc.set_defaults(func=cmd_parametrix)

    r = sub.add_parser("render-figure", help="SVG/CSV figures")
    r.add_argument("figure", choices=["s-region", "bootstrap"])
    r.add_argument("--op", required=True)
    r.add_argument("--coeff", required=True)
    r.add_argument("--target")
    r.add_argument("--format", choices=["svg", "csv"], default="svg")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)
    return p


def _emit(obj, pretty: bool, stream) -> None:
    stream.write(json.dumps(obj, indent=2 if pretty else None, sort_keys=False) + "\n")


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    pretty = "--pretty" in argv
    try:
        args = build_parser().parse_args(argv)
        payload, citations = args.func(args)
    except UsageError as exc:
        err = {"code": exc.code, "message": str(exc), "grammar": exc.grammar}
        if exc.offset is not None:
            err["offset"] = exc.offset
        _emit({"status": "error", "payload": err, "citations": []}, pretty, stdout)
        return 2
    except FscError as exc:
        _emit({"status": "error", "payload": {"code": exc.code, "message": str(exc)}, "citations": []}, pretty, stdout)
        return 3
    if citations is None:
        stdout.write(payload)
        return 0
    _emit({"status": "ok", "payload": payload, "citations": citations}, pretty, stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

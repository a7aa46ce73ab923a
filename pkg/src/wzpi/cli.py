"""Command-line interface.

    wzpi list
    wzpi certify eq5
    wzpi numeric rama-32over81-1 --digits 50
    wzpi complement --term intro.term --radicand 5
    wzpi clausen --which 3 --order 30
    wzpi verify-all --digits 50 --mode full
    wzpi eval-const "3*sqrt(3)/pi" --digits 40

Exit status: 0 when every requested check passes, 1 on a failed check, 2 on
usage, parse or lookup errors.  ``--structured`` switches the output to one
JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .catalog import DanglingReference, DuplicateId, ParseError as CatalogParseError, load_catalog
from .exact import format_scalar
from .expr import ParseError as ExprParseError
from .harness import (FAIL, MODES, PASS, Report, assembly_record, clausen_records, constant_record,
                      euler_record, series_record, verify_all)
from .hyperterm import parse_term
from .identity import Identity, certify_identity
from .numerics.bigfloat import working_context
from .numerics.constexpr import DomainError, eval_const
from .numerics.constexpr import PrecisionUnreachable as ConstPrecision
from .wz import (BoundaryNonvanishing, CertificateFails, ConstantMismatch, NoSolutionInSupportedFields,
                 NoTelescoperUpToOrder, NotGosperSummable, SystemInconsistent, find_complement)

USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _out(args, text: str = "", record: dict | None = None):
    if args.structured:
        if record is not None:
            print(json.dumps(record, sort_keys=True))
    elif text:
        print(text)


def _catalog(args):
    try:
        return load_catalog(args.catalog)
    except (CatalogParseError, DanglingReference, DuplicateId, OSError) as e:
        raise UsageError(f"cannot load catalog: {e}") from None


def _entry(cat, ident):
    if ident not in cat:
        raise UsageError(f"unknown identity {ident!r} (try 'list')")
    return cat[ident]


def cmd_list(args) -> int:
    cat = _catalog(args)
    for i in cat.ids():
        e = cat[i]
        flags = f" [{', '.join(sorted(e.flags))}]" if e.flags else ""
        _out(args, f"{i:<22}{e.kind:<9}{e.section or '-'}{flags}",
             {"id": i, "kind": e.kind, "section": e.section, "flags": sorted(e.flags)})
    return 0


def cmd_certify(args) -> int:
    cat = _catalog(args)
    e = _entry(cat, args.id)
    if e.kind != "pair":
        raise UsageError(f"{e.id} is a {e.kind} entry; certify takes pair identities")
    try:
        proof = certify_identity(e, args.digits)
    except (CertificateFails, BoundaryNonvanishing, ConstantMismatch, NotGosperSummable,
            NoTelescoperUpToOrder) as err:
        _out(args, f"identity {e.id}: FAIL\n{type(err).__name__}: {err}",
             {"id": e.id, "check": "certify", "status": FAIL, "reason": f"{type(err).__name__}: {err}"})
        return 1
    c = proof.constant
    _out(args, proof.render(), {
        "id": e.id, "check": "certify", "status": PASS,
        "telescoper": proof.telescoper.render(), "certificate": str(proof.telescoper.R),
        "boundary": "symbolic" if proof.boundary.symbolic else "sampled",
        "tail_checked": proof.boundary.tail_checked,
        "constant": c.status, "residual_exp": c.residual_exp, "ms": round(proof.ms, 1),
    })
    return 0


def cmd_numeric(args) -> int:
    cat = _catalog(args)
    e = _entry(cat, args.id)
    if e.kind == "series":
        rec = series_record(e, args.digits)
    elif e.kind == "pair":
        rec = constant_record(e, args.digits)
    elif e.kind == "product":
        rec = assembly_record(e, cat, args.digits)
    elif e.kind == "euler":
        rec = euler_record(e, args.digits)
    else:
        raise UsageError(f"{e.id} is a {e.kind} entry; use the clausen verb")
    target = e.rhs.const if e.rhs is not None else (cat[e.target].rhs.const if e.target else "")
    text = Report("numeric", args.digits, [rec]).render_text().splitlines()[0]
    if target:
        text += f"\ntarget {target}"
    d = rec.as_dict()
    d["target"] = target
    _out(args, text, d)
    return 1 if rec.status == FAIL else 0


def _read_term(spec: str):
    p = Path(spec)
    text = p.read_text(encoding="utf-8").strip() if p.is_file() else spec
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return parse_term(" ".join(lines))


def cmd_complement(args) -> int:
    try:
        term = _read_term(args.term)
    except (ExprParseError, ValueError) as e:
        raise UsageError(f"cannot parse term: {e}") from None
    try:
        sols = find_complement(term, args.radicand)
    except (NoSolutionInSupportedFields, SystemInconsistent, NoTelescoperUpToOrder) as err:
        _out(args, f"FAIL {type(err).__name__}: {err}",
             {"check": "complement", "status": FAIL, "reason": f"{type(err).__name__}: {err}"})
        return 1
    for b, c in sols:
        _out(args, f"(b, c) = ({format_scalar(b)}, {format_scalar(c)})",
             {"check": "complement", "status": PASS, "b": format_scalar(b), "c": format_scalar(c)})
    return 0


def cmd_clausen(args) -> int:
    if args.which not in (1, 2, 3):
        raise UsageError("--which must be 1, 2 or 3")
    if args.order < 0:
        raise UsageError("--order must be non-negative")
    e = Identity(f"clausen-{args.which}", "clausen", params={"which": args.which, "order": args.order})
    records = clausen_records(e)
    for r in records:
        _out(args, f"{r.status:<8}{r.id} {r.check} ({r.reason})", r.as_dict())
    return 1 if any(r.status == FAIL for r in records) else 0


def cmd_verify_all(args) -> int:
    report = verify_all(_catalog(args), args.digits, args.mode)
    if args.structured:
        print(report.render_structured())
    else:
        print(report.render_text())
    return report.exit_code


def cmd_eval_const(args) -> int:
    try:
        value = eval_const(args.expr, args.digits)
    except ExprParseError as e:
        raise UsageError(f"cannot parse constant: {e}") from None
    except (DomainError, ConstPrecision) as err:
        _out(args, f"FAIL {type(err).__name__}: {err}",
             {"expr": args.expr, "status": FAIL, "reason": f"{type(err).__name__}: {err}"})
        return 1
    ctx = working_context(args.digits)
    text = ctx.nstr(value, args.digits)
    _out(args, text, {"expr": args.expr, "digits": args.digits, "value": text, "status": PASS})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--structured", action="store_true", help="one JSON record per line")
    common.add_argument("--catalog", default=None, help="catalog file or directory (default: shipped data)")

    p = argparse.ArgumentParser(prog="wzpi", description="WZ certification of Ramanujan-type series.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", metavar="VERB", required=True)

    s = sub.add_parser("list", parents=[common], help="list catalog entries")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("certify", parents=[common], help="certify one pair identity")
    s.add_argument("id")
    s.add_argument("--digits", type=int, default=50)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("numeric", parents=[common], help="numeric check of one entry")
    s.add_argument("id")
    s.add_argument("--digits", type=int, default=50)
    s.set_defaults(func=cmd_numeric)

    s = sub.add_parser("complement", parents=[common], help="find (b, c) with weight n + b k + c")
    s.add_argument("--term", required=True, help="term text or a file containing it")
    s.add_argument("--radicand", type=int, default=None)
    s.set_defaults(func=cmd_complement)

    s = sub.add_parser("clausen", parents=[common], help="formal-series check of a Clausen identity")
    s.add_argument("--which", type=int, required=True)
    s.add_argument("--order", type=int, default=30)
    s.set_defaults(func=cmd_clausen)

    s = sub.add_parser("verify-all", parents=[common], help="run every catalog check")
    s.add_argument("--digits", type=int, default=50)
    s.add_argument("--mode", choices=MODES, default="full")
    s.set_defaults(func=cmd_verify_all)

    s = sub.add_parser("eval-const", parents=[common], help="evaluate a closed-form constant")
    s.add_argument("expr")
    s.add_argument("--digits", type=int, default=50)
    s.set_defaults(func=cmd_eval_const)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_ERROR
    if getattr(args, "digits", 50) < 1:
        print("wzpi: error: --digits must be positive", file=sys.stderr)
        return USAGE_ERROR
    try:
        return args.func(args)
    except UsageError as e:
        print(f"wzpi {args.verb}: error: {e}", file=sys.stderr)
        return USAGE_ERROR


__all__ = ["main", "build_parser"]

if __name__ == "__main__":
    sys.exit(main())

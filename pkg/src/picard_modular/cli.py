"""Command-line front end: ``picard-modular <command> ...``.

Exit status is 0 when every check passes, 1 when any check fails and 2 for
usage errors or unparsable input.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .exactfield import set_sign_precision
from .group import (
    EigenvalueOutsideFieldError,
    IsometryType,
    NoNegativeEigenvectorError,
    UnknownGeneratorError,
    WordSyntaxError,
    classify,
    eval_word,
    fixed_point_elliptic,
    parse_word,
    projective_order,
)
from .handles import build_theorem1, validate as validate_handles
from .isotropy import (
    ISOTROPY_GENERATORS,
    CapExceededError,
    abelian_invariants,
    center,
    isotropy_table,
)
from .polytope import build_dstar, export_json
from .report import Report
from .verify import CATEGORIES, run


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--max-closure", type=int, default=1000, metavar="N")
    p.add_argument("--max-cosets", type=int, default=100_000, metavar="N")
    p.add_argument("--precision-bits", type=int, default=64, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="picard-modular", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run verification checks")
    v.add_argument("category", choices=("all",) + CATEGORIES)
    v.add_argument("--cases", type=int, default=1000, help="random cases per property suite")

    for name, text in (("eval", "print the exact matrix of a word"),
                       ("classify", "classify the isometry a word represents"),
                       ("order", "projective order of a word")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("word")

    iso = sub.add_parser("isotropy", parents=[common], help="isotropy group of a named point")
    iso.add_argument("point")

    d = sub.add_parser("dstar", parents=[common], help="the polytope D*")
    d.add_argument("action", choices=("export",))

    h = sub.add_parser("handles", parents=[common], help="the handle decomposition")
    h.add_argument("action", choices=("show", "validate"))
    h.add_argument("--json", action="store_true", help="shorthand for --format json")
    return parser


def _emit(obj, fmt: str, md: str) -> None:
    print(json.dumps(obj, indent=2) if fmt == "json" else md)


def _word(text: str):
    try:
        w = parse_word(text)
        return w, eval_word(w)
    except (WordSyntaxError, UnknownGeneratorError) as exc:
        raise UsageError(str(exc)) from None


def _report_exit(rep: Report, fmt: str) -> int:
    print(rep.dumps() if fmt == "json" else rep.to_markdown())
    return 1 if rep.failed else 0


def cmd_eval(args) -> int:
    w, g = _word(args.word)
    rows = [[str(x) for x in r] for r in g.rows]
    md = "\n".join(" | ".join(r) for r in rows)
    _emit({"word": str(w), "matrix": rows}, args.format, md)
    return 0


def cmd_classify(args) -> int:
    w, g = _word(args.word)
    kind = classify(g)
    out = {"word": str(w), "type": kind.value}
    if kind in (IsometryType.REGULAR_ELLIPTIC, IsometryType.SPECIAL_ELLIPTIC):
        try:
            out["fixed_point"] = fixed_point_elliptic(g).to_text()
        except (EigenvalueOutsideFieldError, NoNegativeEigenvectorError) as exc:
            out["fixed_point_error"] = str(exc)
    md = f"{out['word']}: {kind.value}"
    if "fixed_point" in out:
        md += f"; fixed point ({', '.join(out['fixed_point'])})"
    _emit(out, args.format, md)
    return 0


def cmd_order(args) -> int:
    w, g = _word(args.word)
    n = projective_order(g, cap=args.max_closure)
    out = {"word": str(w), "order": n, "cap": args.max_closure}
    _emit(out, args.format, str(n) if n is not None else f"no finite order up to {args.max_closure}")
    return 0


def cmd_isotropy(args) -> int:
    if args.point not in ISOTROPY_GENERATORS:
        raise UsageError(f"unknown point {args.point!r}; known: {', '.join(ISOTROPY_GENERATORS)}")
    gens = list(ISOTROPY_GENERATORS[args.point])
    try:
        t = isotropy_table(args.point, cap=args.max_closure)
    except CapExceededError:
        out = {"point": args.point, "generators": gens, "order": None, "cap_exceeded": args.max_closure}
        _emit(out, args.format, f"{args.point}: <{', '.join(gens)}> has more than {args.max_closure} elements")
        return 0
    z = center(t)
    ab = abelian_invariants(t)
    out = {"point": args.point, "generators": gens, "order": t.order, "abelian": t.is_abelian(),
           "center_order": z.order, "abelian_invariants": list(ab)}
    md = "\n".join([
        f"point: {args.point}",
        f"generators: {', '.join(gens)}",
        f"order: {t.order}",
        f"abelian: {t.is_abelian()}",
        f"center order: {z.order}",
        f"abelian invariants of the group: {' + '.join(f'Z_{n}' for n in ab) or 'trivial'}",
    ])
    _emit(out, args.format, md)
    return 0


def cmd_dstar(args) -> int:
    data = export_json(build_dstar())
    if args.format == "json":
        print(json.dumps(data, indent=2))
        return 0
    lines = ["| dim | face |", "|---|---|"]
    lines += [f"| {f['dim']} | {f['name']} |" for f in data["faces"]]
    print("\n".join(lines))
    return 0


def cmd_handles(args) -> int:
    c = build_theorem1()
    fmt = "json" if args.json else args.format
    if args.action == "validate":
        rep = Report(__version__, {})
        rep.extend(validate_handles(c))
        return _report_exit(rep, fmt)
    steps = []
    for a in c.attachments:
        h = a.handle
        steps.append({
            "step": a.step, "handle": h.name, "kind": h.kind.value, "index": h.index,
            "cone_order": h.cone_order, "link": h.link_label, "loci": list(h.loci),
            "gluings": [{"target": g.target, "region": g.region, "cone_order": g.cone_order} for g in a.gluings],
        })
    lines = []
    for s in steps:
        glue = "; ".join(f"{g['region']} -> {g['target']}" for g in s["gluings"]) or "-"
        extra = f" link {s['link']}, loci {tuple(s['loci'])}" if s["link"] else ""
        lines.append(f"step {s['step']}: {s['handle']} [{s['kind']}, index {s['index']}, "
                     f"cone order {s['cone_order']}]{extra}; glued along {glue}")
    _emit({"attachments": steps}, fmt, "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    rep = run(args.category, max_closure=args.max_closure, max_cosets=args.max_cosets,
              precision_bits=args.precision_bits, seed=args.seed, cases=args.cases)
    return _report_exit(rep, args.format)


COMMANDS = {
    "verify": cmd_verify,
    "eval": cmd_eval,
    "classify": cmd_classify,
    "order": cmd_order,
    "isotropy": cmd_isotropy,
    "dstar": cmd_dstar,
    "handles": cmd_handles,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        if args.precision_bits < 16 or args.max_closure < 1 or args.max_cosets < 1:
            raise UsageError("--precision-bits must be >= 16 and caps must be positive")
        old = set_sign_precision(args.precision_bits)
        try:
            return COMMANDS[args.command](args)
        finally:
            set_sign_precision(*old)
    except UsageError as exc:
        print(f"picard-modular: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

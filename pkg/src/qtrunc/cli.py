"""Command-line front end.

Exit status: 0 when every checked case passes, 1 on a verification failure,
2 on usage, I/O or parse errors.  Setting ``QTRUNC_VERBOSITY=timing`` adds
per-case wall times, which makes output non-deterministic.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .catalog import REGISTRY, UnknownIdentityError, get
from .exactpoly import LaurentPoly, RationalFunction, render_terms
from .multisum import RECURRENCES, gz_multisum, gz_rhs, multisum_closed_form, um, verify_recurrence, wm
from .qdsl import (
    DSLEvalError,
    DSLSyntaxError,
    QidSource,
    evaluate,
    free_parameters,
    parse,
    parse_qid,
)
from .qseries import euler_product, pentagonal_sum, series_inv, series_mul

SCHEMA_VERSION = "1"
ELIDE_AFTER = 12

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- reports ------------------------------------------------------------------------


@dataclass
class Case:
    case: str
    parameter: dict
    passed: Optional[bool]
    lhs: object
    rhs: object = None
    error: str = ""
    wall_time: float = 0.0

    def as_dict(self, timing: bool) -> dict:
        d = {
            "case": self.case,
            "parameter": dict(self.parameter),
            "pass": self.passed,
            "lhs": _full(self.lhs),
            "rhs": None if self.rhs is None else _full(self.rhs),
        }
        if self.error:
            d["error"] = self.error
        if timing:
            d["wall_time"] = round(self.wall_time, 6)
        return d


@dataclass
class Report:
    command: list
    cases: list = field(default_factory=list)

    def summary(self) -> dict:
        passed = sum(c.passed is True for c in self.cases)
        failed = sum(c.passed is False for c in self.cases)
        return {
            "total": len(self.cases),
            "passed": passed,
            "failed": failed,
            "unchecked": len(self.cases) - passed - failed,
        }

    def exit_code(self) -> int:
        return EXIT_FAIL if any(c.passed is False for c in self.cases) else EXIT_OK

    def as_dict(self, timing: bool) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": list(self.command),
            "cases": [c.as_dict(timing) for c in self.cases],
            "summary": self.summary(),
        }


def _timing() -> bool:
    return os.environ.get("QTRUNC_VERBOSITY", "").strip().lower() == "timing"


def _full(v) -> str:
    if isinstance(v, RationalFunction) and v.is_poly():
        v = v.to_poly()
    return str(v)


def _short_poly(p: LaurentPoly) -> str:
    items = sorted(p.items())
    if len(items) <= ELIDE_AFTER:
        return str(p)
    return f"{render_terms(items[:ELIDE_AFTER])} … (+{len(items) - ELIDE_AFTER} terms)"


def _short(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, RationalFunction):
        if v.is_poly():
            return _short_poly(v.to_poly())
        return f"({_short_poly(v.num)})/({_short_poly(v.den)})"
    if isinstance(v, LaurentPoly):
        return _short_poly(v)
    return str(v)


def _print_table(report: Report, out) -> None:
    timing = _timing()
    status = {True: "PASS", False: "FAIL", None: "----"}
    for c in report.cases:
        params = " ".join(f"{k}={v}" for k, v in c.parameter.items())
        line = f"{status[c.passed]}  {c.case:<14} {params:<8} lhs: {_short(c.lhs)}"
        if c.rhs is not None:
            line += f"  rhs: {_short(c.rhs)}"
        if c.error:
            line += f"  error: {c.error}"
        if timing:
            line += f"  [{c.wall_time:.3f}s]"
        print(line, file=out)
    s = report.summary()
    print(f"{s['passed']} passed, {s['failed']} failed, {s['unchecked']} unchecked", file=out)


def _emit(report: Report, args, out) -> int:
    if args.json:
        json.dump(report.as_dict(_timing()), out, indent=2, sort_keys=True)
        out.write("\n")
    else:
        _print_table(report, out)
    return report.exit_code()


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


# -- argument helpers ---------------------------------------------------------------

_RANGE_RE = re.compile(r"^(?:([A-Za-z_]\w*)=)?(-?\d+)\.\.(-?\d+)$")


def parse_range(text: str) -> tuple:
    """``lo..hi`` or ``name=lo..hi`` -> ``(name or None, lo, hi)``."""
    m = _RANGE_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected lo..hi or name=lo..hi")
    name, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return name, lo, hi


def parse_param(text: str) -> tuple:
    name, sep, value = text.partition("=")
    if not sep or not name.strip().isidentifier():
        raise argparse.ArgumentTypeError(f"bad parameter {text!r}; expected name=integer")
    try:
        return name.strip(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad parameter {text!r}; value must be an integer") from None


# -- commands -----------------------------------------------------------------------


def cmd_list(args, out) -> int:
    if args.json:
        rows = [
            {"id": k, "kind": v.kind, "param": v.param, "param_min": v.param_min, "reference": v.reference}
            for k, v in REGISTRY.items()
        ]
        doc = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "identities": rows}
        json.dump(doc, out, indent=2, sort_keys=True)
        out.write("\n")
        return EXIT_OK
    for k, v in REGISTRY.items():
        print(f"{k:<14} {v.kind:<16} {v.param}>={v.param_min:<3} {v.reference}", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.all:
        ids = list(REGISTRY)
    elif args.ids:
        ids = args.ids
    else:
        raise UsageError("give identity ids or --all")
    idents = []
    for id_ in ids:
        try:
            idents.append(get(id_))
        except UnknownIdentityError:
            raise UsageError(f"unknown identity {id_!r}; see the list command") from None
    report = Report(args.argv)
    for ident in idents:
        if args.range:
            _, lo, hi = args.range
            lo = max(lo, ident.param_min)
        else:
            lo, hi = ident.param_min, ident.param_min + 10
        for p in range(lo, hi + 1):
            (lhs, rhs), dt = _timed(lambda: (ident.lhs(p), ident.rhs(p)))
            report.cases.append(Case(ident.id, {ident.param: p}, lhs == rhs, lhs, rhs, wall_time=dt))
    return _emit(report, args, out)


def _closed_form(kind: str, m: int):
    """Closed form for the requested multisum, or None when none is registered."""
    if kind in ("GZ1", "GZ2"):
        which = "pent1" if kind == "GZ1" else "pent2"
        return lambda L: gz_rhs(which, m, L)
    if m == 1:
        return get("JOUHET-U" if kind == "U" else "LIU-W").rhs
    if m in (2, 3):
        return lambda n: multisum_closed_form(f"{kind}{m}", n)
    return None


def _multisum_value(kind: str, m: int):
    if kind == "U":
        return lambda n: um(m, n)
    if kind == "W":
        return lambda n: wm(m, n)
    which = "pent1" if kind == "GZ1" else "pent2"
    return lambda L: gz_multisum(which, m, L)


def cmd_multisum(args, out) -> int:
    kind, m = args.kind, args.m
    if m < 1:
        raise UsageError("m must be at least 1")
    pname = "L" if kind.startswith("GZ") else "n"
    if args.range:
        _, lo, hi = args.range
    else:
        lo, hi = (0, 3) if pname == "L" else (1, 4)
    if pname == "n" and lo < 1:
        raise UsageError("the U and W sums are defined for n >= 1")
    if pname == "L" and lo < 0:
        raise UsageError("the pentagonal multiple sums are defined for L >= 0")
    closed = _closed_form(kind, m) if args.check_closed_form else None
    if args.check_closed_form and closed is None:
        raise UsageError(f"no closed form registered for {kind}{m}; closed forms are known only for m <= 3")
    rec = None
    if args.check_recurrence:
        rec = RECURRENCES.get(f"REC-{kind}{m}")
        if rec is None:
            raise UsageError(f"no recurrence registered for {kind}{m}")
    value = _multisum_value(kind, m)
    report = Report(args.argv)
    cache = {}

    def seq(n):
        if n not in cache:
            cache[n] = value(n)
        return cache[n]

    label = f"{kind}-{m}" if kind.startswith("GZ") else f"{kind}{m}"
    for p in range(lo, hi + 1):
        v, dt = _timed(lambda: seq(p))
        if closed is None:
            report.cases.append(Case(label, {pname: p}, None, v, wall_time=dt))
        else:
            rhs = closed(p)
            report.cases.append(Case(label, {pname: p}, v == RationalFunction.coerce(rhs), v, rhs, wall_time=dt))
    if rec is not None:
        for r in verify_recurrence(rec, seq, lo, hi):
            report.cases.append(Case(rec.id, {pname: r.n}, r.passed, r.residual, LaurentPoly()))
    return _emit(report, args, out)


def expand_series(product: str, order: int):
    if product == "eta":
        return euler_product(1, order)
    if product == "eta_inv":
        return series_inv(euler_product(1, order))
    if product == "gauss":
        return series_mul(euler_product(1, order), series_inv(euler_product(-1, order)))
    if product == "pent":
        return pentagonal_sum(order)
    raise UsageError(f"unknown product {product!r}")


def cmd_expand(args, out) -> int:
    if args.order < 0:
        raise UsageError("order must be non-negative")
    s = expand_series(args.product, args.order)
    if args.json:
        report = Report(args.argv, [Case(args.product, {"order": args.order}, None, s)])
        return _emit(report, args, out)
    print(s, file=out)
    return EXIT_OK


def _load_source(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if ":" in text:
        return parse_qid(text, path)
    return parse(text)


def cmd_dsl(args, out) -> int:
    try:
        src = _load_source(args.file)
    except DSLSyntaxError as exc:
        raise UsageError(f"{args.file}:{exc}") from None
    if not isinstance(src, QidSource):
        lhs, rhs, case, param = src, None, args.file, None
        lo_hi = None
    else:
        lhs, rhs, case, param = src.lhs, src.rhs, src.id, src.param
        lo_hi = (src.param_min, src.param_max)
    bindings = dict(args.param or [])
    report = Report(args.argv)
    if args.range:
        name, lo, hi = args.range
        name = name or param
        if name is None:
            raise UsageError("give the range as name=lo..hi")
        points = [{**bindings, name: p} for p in range(lo, hi + 1)]
    elif bindings or lo_hi is None:
        points = [bindings]
    else:
        points = [{**bindings, param: p} for p in range(lo_hi[0], lo_hi[1] + 1)]
    needed = free_parameters(lhs) | (free_parameters(rhs) if rhs is not None else frozenset())
    for point in points:
        missing = needed - set(point)
        if missing:
            raise UsageError(f"unbound parameter(s): {', '.join(sorted(missing))}; use --param or --range")
        try:
            (lv, rv), dt = _timed(lambda: (evaluate(lhs, point), None if rhs is None else evaluate(rhs, point)))
        except DSLEvalError as exc:
            report.cases.append(Case(case, point, False, "", None, error=str(exc)))
            continue
        passed = None if rv is None else lv == rv
        report.cases.append(Case(case, point, passed, lv, rv, wall_time=dt))
    return _emit(report, args, out)


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    common.add_argument("--range", type=parse_range, help="parameter range lo..hi (or name=lo..hi)")
    common.add_argument("--param", type=parse_param, action="append", metavar="NAME=VALUE",
                        help="bind a parameter (repeatable)")

    parser = argparse.ArgumentParser(prog="qtrunc", description="Verify truncated q-series identities exactly.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", parents=[common], help="list registered identities")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", parents=[common], help="check catalog identities over a range")
    p.add_argument("ids", nargs="*", metavar="ID")
    p.add_argument("--all", action="store_true", help="every registered identity")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("multisum", parents=[common], help="tabulate U, W or pentagonal multiple sums")
    p.add_argument("kind", choices=["U", "W", "GZ1", "GZ2"])
    p.add_argument("m", type=int)
    p.add_argument("--check-closed-form", action="store_true")
    p.add_argument("--check-recurrence", action="store_true")
    p.set_defaults(func=cmd_multisum)

    p = sub.add_parser("expand", parents=[common], help="print a truncated product expansion")
    p.add_argument("product", choices=["eta", "eta_inv", "gauss", "pent"])
    p.add_argument("order", type=int)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("dsl", parents=[common], help="evaluate or verify a .qid file or expression file")
    p.add_argument("file")
    p.set_defaults(func=cmd_dsl)
    return parser


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args.argv = argv
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"qtrunc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

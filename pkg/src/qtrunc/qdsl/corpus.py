"""Loader for ``.qid`` identity files.

A ``.qid`` file is a list of ``key: value`` lines.  Lines starting with ``#``
are comments; an indented line continues the previous value.  Recognised keys:

``id``     identity name (required)
``param``  the free parameter (required)
``min``    smallest parameter value (default 0)
``max``    largest parameter value of the test range (default 10)
``lhs``    left-hand side expression (required)
``rhs``    right-hand side expression (required)
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .evaluate import RangeReport, free_parameters, verify_range
from .syntax import DSLSyntaxError, Expr, parse

__all__ = ["QidSource", "parse_qid", "load_qid", "bundled_corpus", "bundled_path"]

_KEYS = ("id", "param", "min", "max", "lhs", "rhs")
_REQUIRED = ("id", "param", "lhs", "rhs")


@dataclass(frozen=True)
class QidSource:
    id: str
    param: str
    param_min: int
    param_max: int
    lhs: Expr
    rhs: Expr
    path: str = ""

    def verify(self, lo: int = None, hi: int = None) -> RangeReport:
        lo = self.param_min if lo is None else lo
        hi = self.param_max if hi is None else hi
        return verify_range(self.lhs, self.rhs, self.param, lo, hi)


def _split(text: str) -> dict:
    """key -> (value text, line, column) with continuation lines appended."""
    fields = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if raw[0] in " \t":
            if last is None:
                raise DSLSyntaxError("continuation line before any key", lineno, 1)
            value, line, col = fields[last]
            # keep the raw line so columns in later errors stay exact
            fields[last] = (value + "\n" * (lineno - line - value.count("\n")) + raw, line, col)
            continue
        key, sep, value = raw.partition(":")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise DSLSyntaxError(f"expected 'key: value' with key in {', '.join(_KEYS)}", lineno, 1)
        if key in fields:
            raise DSLSyntaxError(f"duplicate key {key!r}", lineno, 1)
        col = len(key) + 2 + (len(value) - len(value.lstrip()))
        fields[key] = (value.lstrip(), lineno, col)
        last = key
    return fields


def _parse_at(value: str, line: int, col: int) -> Expr:
    try:
        return parse(value)
    except DSLSyntaxError as exc:
        err_col = exc.column + col - 1 if exc.line == 1 else exc.column
        raise DSLSyntaxError(exc.message, exc.line + line - 1, err_col, exc.expected) from None


def _int_field(fields: dict, key: str, default: int) -> int:
    if key not in fields:
        return default
    value, line, col = fields[key]
    try:
        return int(value.strip())
    except ValueError:
        raise DSLSyntaxError(f"{key} must be an integer", line, col) from None


def parse_qid(text: str, path: str = "") -> QidSource:
    fields = _split(text)
    for key in _REQUIRED:
        if key not in fields:
            raise DSLSyntaxError(f"missing required key {key!r}", 1, 1)
    param = fields["param"][0].strip()
    if not param.isidentifier() or param == "q":
        raise DSLSyntaxError("param must be an identifier other than q", fields["param"][1], fields["param"][2])
    lhs = _parse_at(*fields["lhs"])
    rhs = _parse_at(*fields["rhs"])
    for side, e in (("lhs", lhs), ("rhs", rhs)):
        extra = free_parameters(e) - {param}
        if extra:
            _, line, col = fields[side]
            raise DSLSyntaxError(f"undeclared parameter(s) {', '.join(sorted(extra))} in {side}", line, col)
    return QidSource(
        id=fields["id"][0].strip(),
        param=param,
        param_min=_int_field(fields, "min", 0),
        param_max=_int_field(fields, "max", 10),
        lhs=lhs,
        rhs=rhs,
        path=path,
    )


def load_qid(path) -> QidSource:
    path = Path(path)
    return parse_qid(path.read_text(encoding="utf-8"), str(path))


def bundled_path(name: str):
    """Path of a bundled corpus file such as ``liu_t1.qid``."""
    return resources.files(__package__).joinpath("corpus", name)


def bundled_corpus() -> dict:
    """Bundled sources keyed by identity id."""
    out = {}
    root = resources.files(__package__).joinpath("corpus")
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".qid"):
            src = parse_qid(entry.read_text(encoding="utf-8"), entry.name)
            out[src.id] = src
    return out

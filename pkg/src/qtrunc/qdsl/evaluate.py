"""Exact evaluation of parsed expressions and range verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..exactpoly import LaurentPoly, RationalFunction, monomial
from ..qcomb import MonomialBase, PoleError, binom2, qbinom, qpoch
from .syntax import BinOp, Call, DSLError, Expr, Name, Neg, Num, Pow, Sign, parse

__all__ = [
    "DSLEvalError",
    "UnboundParameterError",
    "DSLPoleError",
    "free_parameters",
    "evaluate",
    "CaseResult",
    "RangeReport",
    "verify_range",
]


class DSLEvalError(DSLError):
    """Evaluation failed; ``indices`` holds the enclosing summation indices."""

    def __init__(self, message: str, indices: tuple = ()):
        self.indices = tuple(indices)
        where = ""
        if self.indices:
            where = " at " + ", ".join(f"{k}={v}" for k, v in self.indices)
        super().__init__(message + where)


class UnboundParameterError(DSLEvalError):
    pass


class DSLPoleError(DSLEvalError):
    pass


def free_parameters(e: Expr) -> frozenset:
    """Identifiers other than ``q`` that no enclosing ``sum`` binds."""
    return frozenset(_free(e, frozenset()))


def _free(e: Expr, bound: frozenset) -> set:
    if isinstance(e, Name):
        return set() if e.id == "q" or e.id in bound else {e.id}
    if isinstance(e, Call) and e.name == "sum":
        var = e.args[0].id
        out = _free(e.args[1], bound) | _free(e.args[2], bound)
        return out | _free(e.args[3], bound | {var})
    out = set()
    for child in _children(e):
        out |= _free(child, bound)
    return out


def _children(e: Expr):
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Sign):
        return (e.exponent,)
    if isinstance(e, Call):
        return e.args
    return ()


# -- value helpers ------------------------------------------------------------------
# Values are int, Fraction, LaurentPoly or RationalFunction; each operation
# returns the simplest of these that holds the result.


def _simplify(v):
    if isinstance(v, RationalFunction):
        if not v.is_poly():
            return v
        v = v.to_poly()
    if isinstance(v, LaurentPoly) and v.is_constant():
        v = v.constant_value()
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _is_zero(v) -> bool:
    return v == 0 if isinstance(v, (int, Fraction)) else v.is_zero()


def _rf_pair(a, b) -> bool:
    return isinstance(a, RationalFunction) or isinstance(b, RationalFunction)


def _add(a, b):
    if _rf_pair(a, b):
        return _simplify(RationalFunction.coerce(a) + RationalFunction.coerce(b))
    return _simplify(a + b)


def _mul(a, b):
    if _rf_pair(a, b):
        return _simplify(RationalFunction.coerce(a) * RationalFunction.coerce(b))
    return _simplify(a * b)


def _div(a, b):
    if isinstance(b, (int, Fraction)):
        if isinstance(a, (int, Fraction)):
            return _simplify(Fraction(a) / b)
        return _simplify(a / b)
    return _simplify(RationalFunction.coerce(a) / RationalFunction.coerce(b))


class _Evaluator:
    def __init__(self, bindings: dict):
        self.env = dict(bindings)
        self.indices = []

    def error(self, cls, message: str):
        raise cls(message, tuple(self.indices))

    def integer(self, e: Expr, what: str) -> int:
        v = self.value(e)
        if isinstance(v, int):
            return v
        self.error(DSLEvalError, f"{what} must evaluate to an integer, got {v}")

    def value(self, e: Expr):
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Name):
            if e.id == "q":
                return monomial(1)
            if e.id not in self.env:
                self.error(UnboundParameterError, f"unbound parameter {e.id!r}")
            return self.env[e.id]
        if isinstance(e, Neg):
            return _mul(-1, self.value(e.operand))
        if isinstance(e, BinOp):
            return self.binop(e)
        if isinstance(e, Pow):
            return self.power(self.value(e.base), e.exponent)
        if isinstance(e, Sign):
            return -1 if self.integer(e.exponent, "sign exponent") % 2 else 1
        if isinstance(e, Call):
            return getattr(self, "call_" + e.name)(*e.args)
        raise TypeError(f"not an expression node: {e!r}")

    def binop(self, e: BinOp):
        left = self.value(e.left)
        if e.op in "*/" and _is_zero(left):
            # zero before pole: a vanishing left factor skips the right one
            return 0
        right = self.value(e.right)
        if e.op == "+":
            return _add(left, right)
        if e.op == "-":
            return _add(left, _mul(-1, right))
        if e.op == "*":
            return _mul(left, right)
        if _is_zero(right):
            self.error(DSLPoleError, "division by zero")
        return _div(left, right)

    def power(self, base, k: int):
        if k < 0:
            if _is_zero(base):
                self.error(DSLPoleError, "zero raised to a negative power")
            return _div(1, self.power(base, -k))
        if isinstance(base, (int, Fraction)):
            return _simplify(Fraction(base) ** k)
        return _simplify(base**k)

    def call_qpow(self, e):
        return monomial(self.integer(e, "qpow exponent"))

    def call_binom2(self, e):
        return binom2(self.integer(e, "binom2 argument"))

    def call_qbin(self, a, b):
        return _simplify(qbinom(self.integer(a, "qbin top"), self.integer(b, "qbin bottom")))

    def call_floor(self, a, b):
        num, den = self.integer(a, "floor numerator"), self.integer(b, "floor denominator")
        if den == 0:
            self.error(DSLPoleError, "floor division by zero")
        return num // den

    def call_mod(self, a, b):
        num, den = self.integer(a, "mod argument"), self.integer(b, "mod modulus")
        if den == 0:
            self.error(DSLPoleError, "mod by zero")
        return num % den

    def call_eq(self, a, b):
        return 1 if _is_zero(_add(self.value(a), _mul(-1, self.value(b)))) else 0

    def call_poch(self, base, count):
        b = self.value(base)
        if isinstance(b, (int, Fraction)):
            b = LaurentPoly.const(b)
        if not isinstance(b, LaurentPoly) or not b.is_monomial():
            self.error(DSLEvalError, f"poch base must be a nonzero monomial c*q^e, got {b}")
        ((exp, coeff),) = b.items()
        n = self.integer(count, "poch count")
        try:
            return _simplify(qpoch(MonomialBase(coeff, exp), n))
        except PoleError as exc:
            self.error(DSLPoleError, str(exc))

    def call_sum(self, var, lo, hi, body):
        lo = self.integer(lo, "sum lower bound")
        hi = self.integer(hi, "sum upper bound")
        name = var.id
        saved = self.env.get(name, _MISSING)
        poly_acc = LaurentPoly()
        other = []
        try:
            for i in range(lo, hi + 1):
                self.env[name] = i
                self.indices.append((name, i))
                try:
                    v = self.value(body)
                finally:
                    self.indices.pop()
                if isinstance(v, RationalFunction):
                    other.append(v)
                else:
                    poly_acc = poly_acc + v
        finally:
            if saved is _MISSING:
                self.env.pop(name, None)
            else:
                self.env[name] = saved
        total = _simplify(poly_acc)
        for v in other:
            total = _add(total, v)
        return total


_MISSING = object()


def evaluate(e, bindings=None) -> RationalFunction:
    """Exact value of ``e`` (an Expr or source text) under integer ``bindings``."""
    if isinstance(e, str):
        e = parse(e)
    bindings = dict(bindings or {})
    for k, v in bindings.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise DSLEvalError(f"parameter {k!r} must be bound to an integer")
    try:
        v = _Evaluator(bindings).value(e)
    except ZeroDivisionError as exc:
        raise DSLPoleError(str(exc)) from exc
    return RationalFunction.coerce(v)


@dataclass(frozen=True)
class CaseResult:
    param: str
    value: int
    passed: bool
    lhs: RationalFunction
    rhs: RationalFunction
    difference: str = ""

    def as_dict(self) -> dict:
        return {
            "parameter": {self.param: self.value},
            "pass": self.passed,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "difference": self.difference,
        }


@dataclass
class RangeReport:
    param: str
    cases: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]


def verify_range(e_lhs, e_rhs, param: str, lo: int, hi: int) -> RangeReport:
    """Compare both sides exactly for each ``param`` in ``lo..hi``."""
    if isinstance(e_lhs, str):
        e_lhs = parse(e_lhs)
    if isinstance(e_rhs, str):
        e_rhs = parse(e_rhs)
    extra = (free_parameters(e_lhs) | free_parameters(e_rhs)) - {param}
    if extra:
        raise UnboundParameterError(f"unbound parameter(s) {', '.join(sorted(extra))}")
    report = RangeReport(param)
    for p in range(lo, hi + 1):
        lhs = evaluate(e_lhs, {param: p})
        rhs = evaluate(e_rhs, {param: p})
        diff = lhs - rhs
        report.cases.append(CaseResult(param, p, diff.is_zero(), lhs, rhs, "" if diff.is_zero() else str(diff)))
    return report


"""Single-site exponent and sign mutations of expression trees."""

from __future__ import annotations

from .evaluate import DSLEvalError, evaluate
from .syntax import BinOp, Call, Expr, Name, Neg, Num, Pow, Sign

__all__ = ["mutation_sites", "mutants", "first_failure"]


def _bump(e: Expr) -> Expr:
    return BinOp("+", e, Num(1))


def _mutate_node(e: Expr):
    """Mutations of ``e`` itself (not its children)."""
    if isinstance(e, Sign):
        yield "sign", Sign(_bump(e.exponent))
    elif isinstance(e, Call) and e.name == "qpow":
        yield "qpow", Call("qpow", (_bump(e.args[0]),))
    elif isinstance(e, Pow) and e.base == Name("q"):
        yield "q^", Pow(e.base, e.exponent + 1)


def _rebuild(e: Expr, child_mutants):
    """Yield ``(path, label, tree)`` for each mutation inside ``e``."""
    for label, m in _mutate_node(e):
        yield (), label, m
    if isinstance(e, Neg):
        for path, label, m in child_mutants(e.operand):
            yield (0,) + path, label, Neg(m)
    elif isinstance(e, BinOp):
        for path, label, m in child_mutants(e.left):
            yield (0,) + path, label, BinOp(e.op, m, e.right)
        for path, label, m in child_mutants(e.right):
            yield (1,) + path, label, BinOp(e.op, e.left, m)
    elif isinstance(e, Pow):
        for path, label, m in child_mutants(e.base):
            yield (0,) + path, label, Pow(m, e.exponent)
    elif isinstance(e, Sign):
        for path, label, m in child_mutants(e.exponent):
            yield (0,) + path, label, Sign(m)
    elif isinstance(e, Call):
        for k, arg in enumerate(e.args):
            for path, label, m in child_mutants(arg):
                args = e.args[:k] + (m,) + e.args[k + 1:]
                yield (k,) + path, label, Call(e.name, args)


def mutants(e: Expr) -> list:
    """``(path, label, mutated tree)`` for every sign or q-exponent site."""

    def rec(x):
        return _rebuild(x, rec)

    return list(rec(e))


def mutation_sites(e: Expr) -> int:
    return len(mutants(e))


def first_failure(lhs: Expr, rhs: Expr, param: str, lo: int, hi: int):
    """Smallest ``param`` in ``lo..hi`` where the sides differ; errors count as failures."""
    for p in range(lo, hi + 1):
        try:
            if evaluate(lhs, {param: p}) != evaluate(rhs, {param: p}):
                return p
        except DSLEvalError:
            return p
    return None

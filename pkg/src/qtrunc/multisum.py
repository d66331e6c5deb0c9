"""Cyclic multiple sums, their closed forms at small arity, and linear recurrences.

A :class:`MultiSumSpec` describes sums of the shape

    sum over r_1..r_m in [lo(n), hi(n)] of  prod_k  weight(n, r_k) * link(n, r_k, r_{k+1})

with the cyclic convention ``r_{m+1} = r_1``.  The weight may carry a
denominator made of binomials ``1 - s q^d``; the link is a Laurent polynomial
and a zero link prunes the whole branch before anything else is evaluated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .exactpoly import (
    ONE,
    ZERO,
    CyclotomicSum,
    LaurentPoly,
    RationalFunction,
    monomial,
)
from .qcomb import NEG_Q, binom2, qbinom, qpoch_poly, sign

__all__ = [
    "MultiSumSpec",
    "Weight",
    "eval_multisum",
    "um",
    "wm",
    "u_spec",
    "w_spec",
    "gz_spec",
    "multisum_closed_form",
    "gz_multisum",
    "gz_rhs",
    "Recurrence",
    "RecurrenceResult",
    "RECURRENCES",
    "verify_recurrence",
    "report_json",
]

# (numerator, [(s, d), ...]) meaning numerator / prod (1 - s q^d)
Weight = tuple[LaurentPoly, tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class MultiSumSpec:
    name: str
    arity: int
    lo: Callable[[int], int]
    hi: Callable[[int], int]
    weight: Callable[[int, int], Weight]
    link: Callable[[int, int, int], LaurentPoly]

    def term(self, n: int, rs: Sequence[int]) -> RationalFunction:
        """The summand at one index tuple, as a reduced rational function."""
        if len(rs) != self.arity:
            raise ValueError(f"expected {self.arity} indices, got {len(rs)}")
        value = RationalFunction.coerce(ONE)
        for k, r in enumerate(rs):
            link = self.link(n, r, rs[(k + 1) % self.arity])
            if not link:
                return RationalFunction.coerce(ZERO)
            value = value * link
        for r in rs:
            num, dens = self.weight(n, r)
            den = ONE
            for s, d in dens:
                den = den * (ONE - monomial(d, s))
            value = value * RationalFunction(num, den)
        return value


def eval_multisum(spec: MultiSumSpec, n: int) -> RationalFunction:
    if spec.arity < 1:
        raise ValueError("arity must be at least 1")
    indices = range(spec.lo(n), spec.hi(n) + 1)
    weights: dict[int, Weight] = {}
    links: dict[tuple[int, int], LaurentPoly] = {}

    def weight(r: int) -> Weight:
        w = weights.get(r)
        if w is None:
            w = weights[r] = spec.weight(n, r)
        return w

    def link(r: int, s: int) -> LaurentPoly:
        key = (r, s)
        v = links.get(key)
        if v is None:
            v = links[key] = spec.link(n, r, s)
        return v

    acc = CyclotomicSum()
    m = spec.arity

    def walk(first: int, last: int, depth: int, num: LaurentPoly, dens: tuple) -> None:
        if depth == m:
            closing = link(last, first)
            if closing:
                acc.add(num * closing, dens)
            return
        for r in indices:
            step = link(last, r)
            if not step:
                continue
            wn, wd = weight(r)
            walk(first, r, depth + 1, num * step * wn, dens + wd)

    for r1 in indices:
        wn, wd = weight(r1)
        walk(r1, r1, 1, wn, wd)
    return acc.value()


# -- the U_m, W_m family ---------------------------------------------------------


def _u_weight(n: int, r: int) -> Weight:
    # (-1)^r q^C(r,2) (-q;q)_{n-r}; for r > n the symbol is 1 / prod_{i=1}^{r-n} (1 + q^{n-r+i})
    head = monomial(binom2(r), sign(r))
    if r <= n:
        return head * qpoch_poly(NEG_Q, n - r), ()
    return head, tuple((-1, n - r + i) for i in range(1, r - n + 1))


def u_spec(m: int) -> MultiSumSpec:
    return MultiSumSpec(
        f"U{m}", m, lambda n: 0, lambda n: 2 * n + 1, _u_weight,
        lambda n, r, s: qbinom(2 * n - r + 1, s),
    )


def w_spec(m: int) -> MultiSumSpec:
    return MultiSumSpec(
        f"W{m}", m, lambda n: 0, lambda n: 2 * n, _u_weight,
        lambda n, r, s: qbinom(2 * n - r, s),
    )


def um(m: int, n: int) -> RationalFunction:
    return eval_multisum(u_spec(m), n)


def wm(m: int, n: int) -> RationalFunction:
    return eval_multisum(w_spec(m), n)


def multisum_closed_form(which: str, n: int) -> RationalFunction:
    """Closed forms of ``U_2, U_3, W_2, W_3`` at ``n >= 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    half = RationalFunction.coerce(LaurentPoly.const(1) / 2)
    k, odd = (n + 1) // 2, n % 2 == 1
    if which == "U2":
        return RationalFunction.coerce(ZERO)
    if which == "U3":
        value = ZERO if odd else monomial(9 * k * k + 3 * k, sign(k - 1))
    elif which == "W2":
        return RationalFunction.coerce(monomial(n * (3 * n - 1) // 2, sign(n)))
    elif which == "W3":
        if odd:
            value = (monomial(9 * k * k - 9 * k + 3) - monomial(9 * k * k - 11 * k + 3, 3)).scale(sign(k))
        else:
            value = (monomial(9 * k * k - 3 * k) - monomial(9 * k * k - k, 3)).scale(sign(k - 1))
    else:
        raise ValueError(f"unknown closed form {which!r}")
    return RationalFunction.coerce(value) * half


# -- the pentagonal multiple sums -----------------------------------------------


def gz_spec(which: str, m: int) -> MultiSumSpec:
    if which == "pent1":
        extra, exp = 0, lambda j: binom2(j + 1)
    elif which == "pent2":
        extra, exp = 1, binom2
    else:
        raise ValueError(f"unknown pentagonal sum {which!r}")
    return MultiSumSpec(
        f"GZ-{which}-{m}", m, lambda L: -L, lambda L: 2 * L + extra,
        lambda L, j: (monomial(exp(j), sign(j)), ()),
        lambda L, j, i: qbinom(2 * L - j + extra, L + i).shift(j * i),
    )


def gz_multisum(which: str, m: int, L: int) -> RationalFunction:
    if m < 1 or L < 0:
        raise ValueError("need m >= 1 and L >= 0")
    return eval_multisum(gz_spec(which, m), L)


def gz_rhs(which: str, m: int, L: int) -> LaurentPoly:
    if which == "pent1":
        return LaurentPoly.const(3 * L + 1 if m % 3 == 0 else 1)
    if which == "pent2":
        if m % 3 == 0:
            return LaurentPoly.const(sign(m // 3) * (3 * L + 2))
        return LaurentPoly.const(sign(m * m // 3))
    raise ValueError(f"unknown pentagonal sum {which!r}")


# -- recurrences ------------------------------------------------------------------
# A coefficient is a product of factors; a factor is a sum of terms (c, a, b)
# standing for c * q^(a n + b).

Factor = tuple[tuple[int, int, int], ...]


_ZERO = ((),)  # one empty factor: the zero coefficient


def _one_plus(a: int, b: int) -> Factor:
    return ((1, 0, 0), (1, a, b))


def _minus_one_plus(a: int, b: int) -> Factor:
    return ((-1, 0, 0), (1, a, b))


def _mono(c: int, a: int, b: int) -> Factor:
    return ((c, a, b),)


@dataclass(frozen=True)
class Recurrence:
    """``sum_i coeffs[i](n) * S(n + i) = 0``."""

    id: str
    sequence: str
    coeffs: tuple[tuple[Factor, ...], ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int, n: int) -> LaurentPoly:
        return _coefficient(self.coeffs[i], n)


@lru_cache(maxsize=None)
def _coefficient(factors: tuple[Factor, ...], n: int) -> LaurentPoly:
    value = ONE
    for factor in factors:
        value = value * LaurentPoly((a * n + b, c) for c, a, b in factor)
    return value


RECURRENCES = {
    r.id: r
    for r in [
        Recurrence("REC-U2", "U2", (
            (_mono(-1, 6, 8),),
            _ZERO,
            (_mono(1, 0, 0),),
        )),
        Recurrence("REC-U3", "U3", (
            (_mono(1, 9, 12),),
            _ZERO,
            (_mono(1, 0, 0),),
        )),
        Recurrence("REC-W2", "W2", (
            (_mono(-1, 9, 11), _one_plus(1, 3)),
            (_mono(-1, 6, 10), _one_plus(1, 3)),
            (_mono(1, 3, 7), _one_plus(1, 1)),
            (_one_plus(1, 1),),
        )),
        Recurrence("REC-W3", "W3", (
            (
                _mono(-1, 15, 24), _one_plus(1, 2), _minus_one_plus(1, 3), _one_plus(1, 3), _one_plus(1, 4),
                ((-1, 0, 0), (-2, 1, 2), (1, 1, 3)),
            ),
            (
                _mono(-1, 11, 23), _one_plus(1, 3), _one_plus(1, 4),
                (
                    (-1, 0, 0), (1, 0, 1), (-2, 1, 2), (-2, 1, 3), (2, 1, 4), (-6, 2, 4),
                    (6, 2, 5), (-1, 2, 6), (-1, 2, 7), (2, 3, 7), (3, 3, 8), (-2, 3, 9),
                    (-1, 3, 10), (5, 4, 9), (-2, 4, 10), (-3, 4, 11), (2, 4, 12),
                    (-2, 5, 12), (2, 5, 13),
                ),
            ),
            (
                _mono(1, 6, 18), _one_plus(1, 1), _one_plus(1, 4), _minus_one_plus(2, 5),
                (
                    (1, 0, 0), (2, 1, 1), (-1, 1, 3), (7, 2, 3), (-6, 2, 4), (-2, 2, 5),
                    (1, 2, 6), (2, 3, 6), (-1, 3, 8), (1, 4, 10),
                ),
            ),
            (
                _mono(1, 2, 8), _one_plus(1, 1), _one_plus(1, 2),
                (
                    (-2, 0, 0), (2, 0, 1), (5, 1, 2), (-2, 1, 3), (-3, 1, 4), (2, 1, 5),
                    (2, 2, 5), (3, 2, 6), (-2, 2, 7), (-1, 2, 8), (-6, 3, 7), (6, 3, 8),
                    (-1, 3, 9), (-1, 3, 10), (-2, 4, 10), (-2, 4, 11), (2, 4, 12),
                    (-1, 5, 13), (1, 5, 14),
                ),
            ),
            (
                _one_plus(1, 1), _minus_one_plus(1, 2), _one_plus(1, 2), _one_plus(1, 3),
                ((2, 0, 0), (-1, 0, 1), (1, 1, 3)),
            ),
        )),
    ]
}


@dataclass(frozen=True)
class RecurrenceResult:
    recurrence_id: str
    n: int
    residual: RationalFunction

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def as_dict(self) -> dict:
        return {
            "recurrence_id": self.recurrence_id,
            "n": self.n,
            "residual_rendered": str(self.residual.to_poly() if self.residual.is_poly() else self.residual),
            "pass": self.passed,
        }


def verify_recurrence(
    rec: Recurrence,
    seq: Callable[[int], RationalFunction],
    n_lo: int,
    n_hi: int,
) -> list[RecurrenceResult]:
    values: dict[int, RationalFunction] = {}

    def value(k: int) -> RationalFunction:
        v = values.get(k)
        if v is None:
            v = values[k] = RationalFunction.coerce(seq(k))
        return v

    out = []
    for n in range(n_lo, n_hi + 1):
        residual = RationalFunction.coerce(ZERO)
        for i in range(rec.order + 1):
            c = rec.coefficient(i, n)
            if c:
                residual = residual + value(n + i) * c
        out.append(RecurrenceResult(rec.id, n, residual))
    return out


def report_json(results: Iterable[RecurrenceResult]) -> str:
    return json.dumps([r.as_dict() for r in results], indent=2)

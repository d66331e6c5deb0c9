"""Gaussian binomials, q-Pochhammer symbols and the q -> 1/q laws."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional

from .exactpoly import (
    ONE,
    ZERO,
    LaurentPoly,
    NotPolynomialError,
    Number,
    RationalFunction,
    _big,
    _bigdivmod,
    _bigmul,
    _divisors,
    _totient,
    monomial,
)

__all__ = [
    "MonomialBase",
    "PoleError",
    "qbinom",
    "qpoch",
    "qpoch_poly",
    "qbinom_neg_poch",
    "ProductTerm",
    "sum_product_terms",
    "qbinom_qinv_law",
    "qpoch_qinv_law",
    "pascal_variant",
    "binom2",
    "sign",
    "NEG_Q",
    "Q_BASE",
    "NEG_ONE",
]


class PoleError(ZeroDivisionError):
    """A negative-index Pochhammer symbol hit a vanishing factor."""


@dataclass(frozen=True)
class MonomialBase:
    """The base ``a = coeff * q**exp`` of ``(a; q)_n``."""

    coeff: Number
    exp: int = 0

    def __post_init__(self):
        if not self.coeff:
            raise ValueError("Pochhammer base must be nonzero")
        c = Fraction(self.coeff)
        object.__setattr__(self, "coeff", c.numerator if c.denominator == 1 else c)

    def shifted(self, k: int) -> "MonomialBase":
        """``a * q**k``."""
        return MonomialBase(self.coeff, self.exp + k)

    def __str__(self) -> str:
        return str(monomial(self.exp, self.coeff))


NEG_Q = MonomialBase(-1, 1)
Q_BASE = MonomialBase(1, 1)
NEG_ONE = MonomialBase(-1, 0)


def binom2(x: int) -> int:
    """``x(x-1)/2``, the polynomial extension of ``C(x, 2)`` to all integers."""
    return x * (x - 1) // 2


def sign(k: int) -> int:
    return -1 if k & 1 else 1


def _unpack_nonneg(packed: int, count: int, nbytes: int) -> LaurentPoly:
    raw = memoryview(packed.to_bytes(count * nbytes, "little"))
    terms = {}
    for e in range(count):
        c = int.from_bytes(raw[e * nbytes:(e + 1) * nbytes], "little")
        if c:
            terms[e] = c
    return LaurentPoly._raw(terms)


def _packed_qbinom(n: int, m: int, width: int) -> int:
    # [n, m](X) is the exact integer quotient of the two Pochhammer values
    top = bottom = _big(1)
    for i in range(1, m + 1):
        top -= top << ((n - m + i) * width)
        bottom -= bottom << (i * width)
    packed, rem = _bigdivmod(top, bottom)
    assert not rem
    return packed


@lru_cache(maxsize=4096)
def qbinom(n: int, m: int) -> LaurentPoly:
    """Gaussian binomial ``[n, m]_q``; zero unless ``0 <= m <= n``."""
    if m < 0 or n < 0 or m > n:
        return ZERO
    m = min(m, n - m)
    if m == 0:
        return ONE
    # Coefficients of [n, m] are non-negative and below C(n, m) < 2^n, so an
    # (n+1)-bit slot per coefficient holds the value at X = 2^width exactly.
    nbytes = (n + 1) // 8 + 1
    return _unpack_nonneg(_packed_qbinom(n, m, 8 * nbytes), m * (n - m) + 1, nbytes)


def qbinom_neg_poch(n: int, m: int, j: int) -> LaurentPoly:
    """``[n, m]_q * (-q; q)_j`` for ``j >= 0``."""
    if m < 0 or n < 0 or m > n:
        return ZERO
    if j < 0:
        raise ValueError("j must be non-negative")
    m = min(m, n - m)
    # both factors have non-negative coefficients; the product's are below
    # C(n, m) * 2^j < 2^(n + j)
    nbytes = (n + j + 1) // 8 + 1
    width = 8 * nbytes
    packed = _packed_qbinom(n, m, width) if m else 1
    poch = _big(1)
    for i in range(1, j + 1):
        poch += poch << (i * width)
    return _unpack_nonneg(_bigmul(packed, poch), m * (n - m) + j * (j + 1) // 2 + 1, nbytes)


_poch_cache: dict[MonomialBase, list[LaurentPoly]] = {}
_poch_lock = threading.Lock()


def qpoch_poly(a: MonomialBase, n: int) -> LaurentPoly:
    """``(a; q)_n`` for ``n >= 0`` as a Laurent polynomial."""
    if n < 0:
        raise ValueError("qpoch_poly needs n >= 0; use qpoch for negative n")
    seq = _poch_cache.get(a)
    if seq is not None and n < len(seq):
        return seq[n]
    with _poch_lock:
        seq = _poch_cache.setdefault(a, [ONE])
        while len(seq) <= n:
            k = len(seq) - 1
            seq.append(seq[-1] * (ONE - monomial(a.exp + k, a.coeff)))
        return seq[n]


@lru_cache(maxsize=None)
def qpoch(a: MonomialBase, n: int) -> RationalFunction:
    """``(a; q)_n`` for any integer ``n``.

    Negative indices use ``(a; q)_{-n} = 1 / (a q^{-n}; q)_n``.
    """
    if n >= 0:
        return RationalFunction.coerce(qpoch_poly(a, n))
    base = a.shifted(n)
    for k in range(-n):
        if base.exp + k == 0 and base.coeff == 1:
            raise PoleError(f"({a}; q)_{n} has a vanishing factor 1 - q^0")
    return RationalFunction(ONE, qpoch_poly(base, -n))


def qbinom_qinv_law(n: int, m: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Both sides of ``[n, m]_{1/q} = q^{m(m-n)} [n, m]_q``."""
    b = qbinom(n, m)
    return b.subst_qinv(), b.shift(m * (m - n))


def qpoch_qinv_law(n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """Both sides of ``(-1/q; 1/q)_n = q^{-C(n+1, 2)} (-q; q)_n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    lhs = ONE
    for k in range(n):
        lhs = lhs * (ONE + monomial(-(k + 1)))
    return lhs, qpoch_poly(NEG_Q, n).shift(-(n * (n + 1) // 2))


def pascal_variant(n: int, r: int) -> tuple[RationalFunction, LaurentPoly]:
    """Both sides of the Pascal-type relation

    ``[2n-r+1, r] (1-q^{2n+1}) / (1-q^{2n-r+1}) = [2n-r, r-1] + q^r [2n-r+1, r]``.
    """
    if not 1 <= r <= n:
        raise ValueError("pascal_variant needs 1 <= r <= n")
    lhs = RationalFunction(
        qbinom(2 * n - r + 1, r) * (ONE - monomial(2 * n + 1)),
        ONE - monomial(2 * n - r + 1),
    )
    rhs = qbinom(2 * n - r, r - 1) + qbinom(2 * n - r + 1, r).shift(r)
    return lhs, rhs


@dataclass(frozen=True)
class ProductTerm:
    """``sign q^shift [n, m] (-q;q)_j (1 - q^top) / (1 - q^den)``.

    ``top`` or ``den`` set to ``None`` drops that factor.  A zero numerator
    wins over a vanishing denominator.
    """

    sign: int
    shift: int
    n: int
    m: int
    j: int = 0
    top: Optional[int] = None
    den: Optional[int] = None

    def is_zero(self) -> bool:
        return self.m < 0 or self.n < 0 or self.m > self.n or self.top == 0


def _phi_in_qbinom(n: int, m: int, e: int) -> int:
    return n // e - m // e - (n - m) // e


def _phi_in_neg_poch(j: int, e: int) -> bool:
    # Phi_e divides 1 + q^i iff i is an odd multiple of e/2
    return e % 2 == 0 and j >= e // 2


def sum_product_terms(terms) -> LaurentPoly:
    """Exact sum of ``ProductTerm`` values, evaluated in packed-integer form.

    Raises ``NotPolynomialError`` when the sum is not a Laurent polynomial.
    """
    live = [t for t in terms if not t.is_zero()]
    if not live:
        return ZERO
    for t in live:
        if t.j < 0 or (t.top or 0) < 0 or (t.den or 0) < 0:
            raise ValueError("ProductTerm needs non-negative j, top and den")
        if t.den == 0:
            raise PoleError("surviving pole 1/(1 - q^0)")
    reduced = set()
    v = min(t.shift for t in live)
    b0 = 0
    bound_sum = 0
    for t in live:
        if t.den is not None:
            for e in _divisors(t.den):
                hit = (
                    _phi_in_qbinom(t.n, t.m, e)
                    or _phi_in_neg_poch(t.j, e)
                    or (t.top is not None and t.top % e == 0)
                )
                if not hit:
                    reduced.add(e)
        deg = t.shift - v + t.m * (t.n - t.m) + t.j * (t.j + 1) // 2 + (t.top or 0) - (t.den or 0)
        b0 = max(b0, deg)
        bound_sum += comb(t.n, t.m) << (t.j + (t.top is not None))
    deg_den = sum(_totient(e) for e in reduced)
    b0 += deg_den
    bound = b0 + deg_den
    count = bound + 1
    nbytes = (bound_sum.bit_length() + 2) // 8 + 1
    width = 8 * nbytes
    mask = _big((1 << (count * width)) - 1)
    acc = _big(0)
    for t in live:
        m = min(t.m, t.n - t.m)
        packed = _packed_qbinom(t.n, m, width) if m else _big(1)
        if t.j:
            poch = _big(1)
            for i in range(1, t.j + 1):
                poch += poch << (i * width)
            packed = _bigmul(packed, poch)
        if t.top is not None:
            packed -= packed << (t.top * width)
        packed = (packed << ((t.shift - v) * width)) & mask
        if t.den is not None:
            step = t.den
            while step <= bound:
                packed = (packed + (packed << (step * width))) & mask
                step *= 2
        acc = acc + packed if t.sign > 0 else acc - packed
    acc &= mask
    half = 1 << (width - 1)
    offset = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * count, "little")
    raw = memoryview(((acc + offset) & mask).to_bytes(count * nbytes, "little"))
    out = {}
    for i in range(count):
        c = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
        if c:
            if i > b0 - deg_den:
                raise NotPolynomialError("sum does not reduce to a Laurent polynomial")
            out[v + i] = c
    return LaurentPoly._raw(out)

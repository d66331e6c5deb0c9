"""Exact Laurent polynomials and rational functions in one variable ``q``.

Coefficients are Python ints where possible and :class:`fractions.Fraction`
otherwise, so integer-heavy work (q-binomials, Pochhammer products) stays on
the fast ``int`` path while halves and other rationals remain exact.

Values are immutable.  Zero coefficients are never stored, so equality is a
plain comparison of the term maps.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping, Union

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = None

__all__ = [
    "LaurentPoly",
    "RationalFunction",
    "NotDivisibleError",
    "NotPolynomialError",
    "ZERO",
    "ONE",
    "Q",
    "monomial",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_divexact",
    "poly_subst_qinv",
    "poly_gcd",
    "rf",
    "rf_add",
    "rf_mul",
    "rf_neg",
    "rf_to_poly",
    "cyclotomic",
    "CyclotomicSum",
]

Number = Union[int, Fraction]

# below this many coefficient products, schoolbook convolution beats packing
_KRONECKER_MIN_WORK = 400
# operands past this many bits go through GMP
_GMP_MIN_BITS = 20000


def _big(x: int) -> int:
    """``x`` as the fastest available big-integer type (shifts, masks, products)."""
    return mpz(x) if mpz is not None else x


def _bigmul(x: int, y: int) -> int:
    if mpz is not None and x.bit_length() > _GMP_MIN_BITS and y.bit_length() > _GMP_MIN_BITS:
        return int(mpz(x) * mpz(y))
    return x * y


def _bigdivmod(x: int, y: int) -> tuple[int, int]:
    if mpz is not None and x.bit_length() > _GMP_MIN_BITS:
        qv, rv = divmod(mpz(x), mpz(y))
        return int(qv), int(rv)
    return divmod(x, y)


class NotDivisibleError(ArithmeticError):
    """Exact division left a nonzero remainder."""


class NotPolynomialError(NotDivisibleError):
    """A rational function does not reduce to a Laurent polynomial."""


def _norm(c) -> Number:
    if type(c) is int:
        return c
    if type(c) is Fraction:
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        c = Fraction(c.numerator, c.denominator)
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class LaurentPoly:
    """Finite sum of ``c * q**e`` with rational ``c`` and integer ``e``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | Iterable | None = None):
        clean: dict[int, Number] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for e, c in items:
                if not isinstance(e, int):
                    raise TypeError("exponents must be integers")
                c = _norm(c)
                if c:
                    c = clean.get(e, 0) + c
                    if c:
                        clean[e] = _norm(c)
                    else:
                        clean.pop(e, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        # caller guarantees canonical form
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Number) -> "LaurentPoly":
        c = _norm(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def coerce(cls, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        return NotImplemented

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[int, Number]:
        return dict(self._terms)

    def items(self):
        """(exponent, coefficient) pairs in ascending exponent order."""
        return sorted(self._terms.items())

    def coeff(self, e: int) -> Number:
        return self._terms.get(e, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(self._terms)

    def valuation(self) -> int:
        if not self._terms:
            raise ValueError("valuation of the zero polynomial is undefined")
        return min(self._terms)

    def leading_coeff(self) -> Number:
        return self._terms[self.degree()]

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(0, 0)

    def coeff_denominator(self) -> int:
        """Least common multiple of the coefficient denominators."""
        d = 1
        for c in self._terms.values():
            if type(c) is not int:
                d = lcm(d, c.denominator)
        return d

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == LaurentPoly.const(other)._terms
        if isinstance(other, RationalFunction):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()})

    def __pos__(self) -> "LaurentPoly":
        return self

    def __add__(self, other) -> "LaurentPoly":
        other = LaurentPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(self._terms) < len(other._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s if type(s) is int else _norm(s)
            else:
                out.pop(e, None)
        return LaurentPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        other = LaurentPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = LaurentPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, RationalFunction):
            return NotImplemented
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) == 1:
            (e, c), = a.items()
            return other._mono_mul(e, c)
        if len(b) == 1:
            (e, c), = b.items()
            return self._mono_mul(e, c)
        if len(a) * len(b) >= _KRONECKER_MIN_WORK:
            return _kronecker_mul(self, other)
        out: dict[int, Number] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = out.get(e, 0) + ca * cb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def _mono_mul(self, e: int, c: Number) -> "LaurentPoly":
        if c == 1:
            return LaurentPoly._raw({ea + e: ca for ea, ca in self._terms.items()})
        if type(c) is int and all(type(x) is int for x in self._terms.values()):
            return LaurentPoly._raw({ea + e: ca * c for ea, ca in self._terms.items()})
        return LaurentPoly._raw({ea + e: _norm(ca * c) for ea, ca in self._terms.items()})

    def scale(self, c: Number) -> "LaurentPoly":
        c = _norm(c)
        if not c:
            return ZERO
        return self._mono_mul(0, c)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``q**k``."""
        return self._mono_mul(k, 1)

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_monomial():
                (e, c), = self._terms.items()
                return LaurentPoly._raw({e * k: _norm(Fraction(c) ** k)})
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / other)
        if isinstance(other, LaurentPoly):
            return RationalFunction(self, other)
        if isinstance(other, RationalFunction):
            return RationalFunction(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction(LaurentPoly.const(other), self)
        return NotImplemented

    def subst_qinv(self) -> "LaurentPoly":
        """Substitute ``q -> 1/q``."""
        return LaurentPoly._raw({-e: c for e, c in self._terms.items()})

    def at(self, x):
        """Evaluate at a concrete value of ``q`` (ints/Fractions stay exact)."""
        total = 0
        for e, c in self._terms.items():
            total += c * (Fraction(x) ** e if e < 0 else x**e)
        return total

    # -- rendering --------------------------------------------------------

    def __str__(self) -> str:
        return render_terms(self.items())

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"


def render_terms(items) -> str:
    """Render ascending ``(exponent, coeff)`` pairs, e.g. ``1 - 2q + (1/2)q^-3``."""
    parts: list[str] = []
    for e, c in items:
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = str(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            if a == 1:
                body = mono
            elif isinstance(a, Fraction):
                body = f"({a}){mono}"
            else:
                body = f"{a}{mono}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts) if parts else "0"


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: 1})
Q = LaurentPoly._raw({1: 1})


def monomial(e: int, c: Number = 1) -> LaurentPoly:
    """``c * q**e``."""
    return LaurentPoly({e: c})


# -- Kronecker substitution ------------------------------------------------


def _kronecker_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    da = a.coeff_denominator()
    db = b.coeff_denominator()
    ta = a._terms if da == 1 else {e: int(c * da) for e, c in a._terms.items()}
    tb = b._terms if db == 1 else {e: int(c * db) for e, c in b._terms.items()}
    va, vb = min(ta), min(tb)
    na, nb = max(ta) - va + 1, max(tb) - vb + 1
    bound = max(map(abs, ta.values())) * max(map(abs, tb.values())) * min(na, nb)
    nbytes = (bound.bit_length() + 1) // 8 + 1
    width = 8 * nbytes
    pa = _pack(ta, va, na, nbytes)
    pb = _pack(tb, vb, nb, nbytes)
    prod = _bigmul(pa, pb)
    n = na + nb - 1
    half = 1 << (width - 1)
    offset = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * n, "little")
    raw = (prod + offset).to_bytes(n * nbytes + 1, "little")
    out: dict[int, Number] = {}
    base = va + vb
    scale = da * db
    for i in range(n):
        c = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
        if c:
            out[base + i] = c if scale == 1 else _norm(Fraction(c, scale))
    return LaurentPoly._raw(out)


def _pack(terms: dict, v: int, n: int, nbytes: int) -> int:
    pos = bytearray(n * nbytes)
    neg = bytearray(n * nbytes)
    has_neg = False
    for e, c in terms.items():
        i = (e - v) * nbytes
        if c > 0:
            pos[i:i + nbytes] = c.to_bytes(nbytes, "little")
        else:
            neg[i:i + nbytes] = (-c).to_bytes(nbytes, "little")
            has_neg = True
    value = int.from_bytes(pos, "little")
    if has_neg:
        value -= int.from_bytes(neg, "little")
    return value


# -- division and gcd ------------------------------------------------------


def _to_dense(p: LaurentPoly) -> list:
    """Ascending coefficient list of ``p / q**valuation``."""
    v = p.valuation()
    out = [0] * (p.degree() - v + 1)
    for e, c in p._terms.items():
        out[e - v] = c
    return out


def _from_dense(coeffs, shift: int = 0) -> LaurentPoly:
    return LaurentPoly((i + shift, c) for i, c in enumerate(coeffs) if c)


def _divmod_dense(num: list, den: list) -> tuple[list, list]:
    """Polynomial long division on ascending lists (den[-1] != 0)."""
    rem = [Fraction(c) for c in num]
    dn = len(den) - 1
    lead = Fraction(den[-1])
    if len(rem) <= dn:
        return [], rem
    support = [(j, c) for j, c in enumerate(den) if c]
    quot = [Fraction(0)] * (len(rem) - dn)
    for i in range(len(rem) - 1, dn - 1, -1):
        c = rem[i]
        if c:
            f = c / lead
            quot[i - dn] = f
            base = i - dn
            for j, d in support:
                rem[base + j] -= f * d
    del rem[dn:]
    while rem and not rem[-1]:
        rem.pop()
    return quot, rem


def _content(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def _integral(p: LaurentPoly) -> tuple[dict, int]:
    d = p.coeff_denominator()
    if d == 1:
        return p._terms, 1
    return {e: int(c * d) for e, c in p._terms.items()}, d


def _kronecker_divexact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly | None:
    """Exact quotient via integer evaluation at a power of two.

    Returns ``None`` when ``b`` does not divide ``a``.  Raises ``ValueError``
    when the packing width could not be made to work (caller falls back).
    """
    ta, da = _integral(a)
    tb, db = _integral(b)
    cb = _content(tb.values())
    if cb != 1:
        tb = {e: c // cb for e, c in tb.items()}
    # a/b = (ta/da) / (tb * cb / db) = (ta / tb) * db / (da * cb); ta/tb is integral
    # when it exists, by Gauss's lemma (tb is primitive).
    va, vb = min(ta), min(tb)
    na, nb = max(ta) - va + 1, max(tb) - vb + 1
    n = na - nb + 1
    if n <= 0:
        return None
    amax = max(map(abs, ta.values()))
    width = 8 * ((amax.bit_length() + 16) // 8 + 1)
    for _ in range(3):
        nbytes = width // 8
        X_a = _pack(ta, va, na, nbytes)
        X_b = _pack(tb, vb, nb, nbytes)
        qv, rv = _bigdivmod(X_a, X_b)
        if rv:
            return None
        half = 1 << (width - 1)
        offset = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * n, "little")
        shifted = qv + offset
        if shifted < 0 or shifted.bit_length() > n * width:
            width *= 2
            continue
        raw = shifted.to_bytes(n * nbytes, "little")
        quot = {}
        for i in range(n):
            c = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
            if c:
                quot[va - vb + i] = c
        cand = LaurentPoly._raw(quot)
        if cand * LaurentPoly._raw(tb) == LaurentPoly._raw(dict(ta)):
            scale = Fraction(db, da * cb)
            return cand if scale == 1 else cand.scale(scale)
        width *= 2
    raise ValueError("packing width exhausted")


def poly_divexact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Return ``c`` with ``b * c == a``; raise :class:`NotDivisibleError` otherwise."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return ZERO
    if b.is_monomial():
        (e, c), = b._terms.items()
        return a._mono_mul(-e, Fraction(1) / c if not (c == 1 or c == -1) else c)
    try:
        quot = _kronecker_divexact(a, b)
    except ValueError:
        pass
    else:
        if quot is None:
            raise NotDivisibleError(f"({b}) does not divide ({a})")
        return quot
    va, vb = a.valuation(), b.valuation()
    quot, rem = _divmod_dense(_to_dense(a), _to_dense(b))
    if rem:
        raise NotDivisibleError(f"({b}) does not divide ({a})")
    return _from_dense(quot, va - vb)


def _monic_normal(p: LaurentPoly) -> LaurentPoly:
    """Associate of ``p`` with valuation 0 and leading coefficient 1."""
    if p.is_zero():
        return p
    p = p.shift(-p.valuation())
    lead = p.leading_coeff()
    return p if lead == 1 else p.scale(Fraction(1) / lead)


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd over the rationals, normalized to valuation 0."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return _monic_normal(b)
    if b.is_zero():
        return _monic_normal(a)
    x, y = _to_dense(a), _to_dense(b)
    if len(x) < len(y):
        x, y = y, x
    while y and len(y) > 1:
        _, r = _divmod_dense(x, y)
        x, y = y, r
        if y:
            lead = y[-1]
            y = [c / lead for c in y]
    if y:
        # a nonzero constant remainder means the inputs are coprime
        return ONE
    return _monic_normal(_from_dense(x))


def poly_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def poly_sub(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a - b


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def poly_subst_qinv(a: LaurentPoly) -> LaurentPoly:
    return a.subst_qinv()


# -- rational functions ----------------------------------------------------


class RationalFunction:
    """Reduced quotient ``num / den`` of Laurent polynomials.

    The denominator is kept monic with valuation 0 and coprime to the
    numerator, so two equal rational functions have identical fields.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced: bool = False):
        num = LaurentPoly.coerce(num)
        den = ONE if den is None else LaurentPoly.coerce(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("RationalFunction expects Laurent polynomials or rationals")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, (LaurentPoly, int, Fraction)):
            return cls(LaurentPoly.coerce(x), ONE, _reduced=True)
        return NotImplemented

    def is_poly(self) -> bool:
        return self.den == ONE

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self.den == ONE:
            return hash(self.num)
        return hash((self.num, self.den))

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __add__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            if self.den == ONE:
                return RationalFunction(self.num + other.num, ONE, _reduced=True)
            return RationalFunction(self.num + other.num, self.den)
        if other.den == ONE:
            return RationalFunction(self.num + other.num * self.den, self.den, _reduced=True)
        if self.den == ONE:
            return RationalFunction(self.num * other.den + other.num, other.den, _reduced=True)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == ONE and other.den == ONE:
            return RationalFunction(self.num * other.num, ONE, _reduced=True)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, self.den**k, _reduced=True)

    def subst_qinv(self) -> "RationalFunction":
        return RationalFunction(self.num.subst_qinv(), self.den.subst_qinv())

    def to_poly(self) -> LaurentPoly:
        if self.den != ONE:
            raise NotPolynomialError(f"({self}) is not a Laurent polynomial")
        return self.num

    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({str(self)!r})"


def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return ZERO, ONE
    v = den.valuation()
    if v:
        num, den = num.shift(-v), den.shift(-v)
    if len(den) > 1:
        g = poly_gcd(num, den)
        if g != ONE:
            num, den = poly_divexact(num, g), poly_divexact(den, g)
    lead = den.leading_coeff()
    if lead != 1:
        inv = Fraction(1) / lead
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def rf(num, den=None) -> RationalFunction:
    return RationalFunction(num, den)


def rf_add(a, b) -> RationalFunction:
    return RationalFunction.coerce(a) + b


def rf_mul(a, b) -> RationalFunction:
    return RationalFunction.coerce(a) * b


def rf_neg(a) -> RationalFunction:
    return -RationalFunction.coerce(a)


def rf_to_poly(a) -> LaurentPoly:
    """Exact Laurent value of ``a``; raises :class:`NotPolynomialError`."""
    if isinstance(a, LaurentPoly):
        return a
    return RationalFunction.coerce(a).to_poly()


# -- sums over cyclotomic denominators -------------------------------------


@lru_cache(maxsize=None)
def cyclotomic(e: int) -> LaurentPoly:
    """The monic cyclotomic polynomial ``Phi_e(q)``."""
    if e < 1:
        raise ValueError("cyclotomic index must be positive")
    p = monomial(e) - ONE
    for d in range(1, e):
        if e % d == 0:
            p = poly_divexact(p, cyclotomic(d))
    return p


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _fold(p: LaurentPoly, s: int, d: int) -> list:
    """Coefficients of ``p mod (1 - s q^d)`` as a dense list of length ``d``."""
    out = [0] * d
    for e, c in p._terms.items():
        t, i = divmod(e, d)
        out[i] += -c if (s == -1 and t & 1) else c
    return out


def _fold_times_binomial(res: list, s: int, d: int, t: int, c: int) -> list:
    """``res * (1 - t q^c) mod (1 - s q^d)``."""
    out = list(res)
    for i, x in enumerate(res):
        if x:
            w, j = divmod(i + c, d)
            out[j] -= -t * x if (s == -1 and w & 1) else t * x
    return out


def _phi_divides_dense(coeffs: list, e: int) -> bool:
    if not any(coeffs):
        return True
    while coeffs and not coeffs[-1]:
        coeffs = coeffs[:-1]
    _, rem = _divmod_dense(coeffs, _to_dense(cyclotomic(e)))
    return not rem


def _normal_binomial(s: int, d: int) -> tuple:
    """Rewrite ``1 - s q^d`` as ``unit * (1 - s q^|d|)``; return the unit."""
    if s not in (1, -1):
        raise ValueError("binomial sign must be +1 or -1")
    if d < 0:
        # 1 - s q^d = -s q^d (1 - s q^-d)
        return (d, -s), (s, -d)
    return (0, 1), (s, d)


class CyclotomicSum:
    """Exact accumulator for sums of
    ``num * prod (1 - t_j q^{c_j}) / prod (1 - s_i q^{d_i})`` with signs ``+-1``.

    ``value()`` first tries a bounded power-series evaluation: after cancelling
    cyclotomic factors that divide each numerator, the sum times the reduced
    common denominator ``D`` is a polynomial of degree at most ``B0``.  Its
    expansion through ``q^(B0 + deg D)`` therefore pins the sum down exactly
    whenever the sum is itself a Laurent polynomial.  Otherwise the field
    computation over the factored common denominator takes over.
    """

    def __init__(self):
        self._groups: dict[tuple, LaurentPoly] = {}

    def add(
        self,
        num: LaurentPoly,
        den_factors: Iterable[tuple[int, int]] = (),
        num_factors: Iterable[tuple[int, int]] = (),
    ) -> None:
        if num.is_zero():
            return
        dens, nums = [], []
        for s, d in den_factors:
            if d == 0:
                if s == 1:
                    raise ZeroDivisionError("factor 1 - q^0 vanishes")
                num = num.scale(Fraction(1, 2))
                continue
            (e, u), f = _normal_binomial(s, d)
            num = num._mono_mul(-e, u)
            dens.append(f)
        for s, d in num_factors:
            if d == 0:
                if s == 1:
                    return
                num = num.scale(2)
                continue
            (e, u), f = _normal_binomial(s, d)
            num = num._mono_mul(e, u)
            nums.append(f)
        key = (tuple(sorted(dens)), tuple(sorted(nums)))
        prev = self._groups.get(key)
        self._groups[key] = num if prev is None else prev + num

    def value(self) -> RationalFunction:
        groups = {k: v for k, v in self._groups.items() if v}
        if not groups:
            return RationalFunction.coerce(ZERO)
        if all(not dens for dens, _ in groups):
            return RationalFunction.coerce(_expand_groups(groups))
        try:
            return RationalFunction.coerce(_series_sum(groups))
        except NotPolynomialError:
            return _field_sum(groups)


def _binomial_poly(s: int, d: int) -> LaurentPoly:
    return LaurentPoly._raw({0: 1, d: -s})


def _expand_groups(groups: dict) -> LaurentPoly:
    total = ZERO
    for (_, nums), num in groups.items():
        for s, d in nums:
            num = num * _binomial_poly(s, d)
        total = total + num
    return total


def _binomial_phis(s: int, d: int) -> tuple[int, list[int]]:
    """``1 - s q^d = unit * prod Phi_e`` for ``d > 0``."""
    if s == 1:
        return -1, _divisors(d)
    return 1, [e for e in _divisors(2 * d) if d % e]


def _series_sum(groups: dict) -> LaurentPoly:
    dall = 1
    v = None
    for num in groups.values():
        dall = lcm(dall, num.coeff_denominator())
        nv = num.valuation()
        v = nv if v is None else min(v, nv)
    top: Counter = Counter()
    b0 = 0
    for (dens, nums), num in groups.items():
        phis: Counter = Counter()
        for s, d in dens:
            phis.update(_binomial_phis(s, d)[1])
        cancelled = set()
        for s, d in dens:
            folded = _fold(num, s, d)
            for t, c in nums:
                folded = _fold_times_binomial(folded, s, d, t, c)
            for e in _binomial_phis(s, d)[1]:
                if e not in cancelled and _phi_divides_dense(folded, e):
                    cancelled.add(e)
                    phis[e] -= 1
        for e, k in phis.items():
            if k > top[e]:
                top[e] = k
        b0 = max(b0, num.degree() - v + sum(c for _, c in nums) - sum(d for _, d in dens))
    deg_den = sum(_totient(e) * k for e, k in top.items())
    b0 += deg_den
    bound = b0 + deg_den
    n = bound + 1
    total = 0
    for (dens, nums), num in groups.items():
        l1 = int(sum(abs(c) for c in num._terms.values()) * dall) << len(nums)
        r = len(dens)
        total += l1 * (comb(bound + r - 1, r - 1) if r else 1)
    nbytes = (total.bit_length() + 2) // 8 + 1
    width = 8 * nbytes
    mask = _big((1 << (n * width)) - 1)
    acc = _big(0)
    for (dens, nums), num in groups.items():
        terms = {e: (c if dall == 1 else int(c * dall)) for e, c in num._terms.items() if e - v <= bound}
        if not terms:
            continue
        packed = _big(_pack(terms, v, n, nbytes)) & mask
        for t, c in nums:
            packed = (packed - (packed << (c * width)) if t == 1 else packed + (packed << (c * width))) & mask
        for s, d in dens:
            step = d * width
            packed = (packed + (packed << step) if s == 1 else packed - (packed << step)) & mask
            t = 2 * d
            while t <= bound:
                packed = (packed + (packed << (t * width))) & mask
                t *= 2
        acc = (acc + packed) & mask
    half = 1 << (width - 1)
    offset = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * n, "little")
    raw = memoryview(((acc + offset) & mask).to_bytes(n * nbytes, "little"))
    out = {}
    for i in range(n):
        c = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
        if c:
            if i > b0 - deg_den:
                raise NotPolynomialError("sum does not reduce to a Laurent polynomial")
            out[v + i] = c if dall == 1 else _norm(Fraction(c, dall))
    return LaurentPoly._raw(out)


def _field_sum(groups: dict) -> RationalFunction:
    """Exact sum over the factored least common denominator."""
    reduced: dict[tuple, LaurentPoly] = {}
    for (key, nums), num in groups.items():
        for s, d in nums:
            num = num * _binomial_poly(s, d)
        exps: Counter = Counter()
        unit = 1
        for s, d in key:
            u, phis = _binomial_phis(s, d)
            unit *= u
            exps.update(phis)
        if unit != 1:
            num = -num
        k = tuple(sorted(exps.items()))
        prev = reduced.get(k)
        reduced[k] = num if prev is None else prev + num
    top: Counter = Counter()
    for key in reduced:
        for e, k in key:
            top[e] = max(top[e], k)
    common = _phi_product(top)
    total = ZERO
    for key, num in reduced.items():
        total = total + num * poly_divexact(common, _phi_product(Counter(dict(key))))
    if total.is_zero():
        return RationalFunction.coerce(ZERO)
    left: Counter = Counter()
    for e, k in sorted(top.items()):
        phi = cyclotomic(e)
        while k:
            try:
                total = poly_divexact(total, phi)
            except NotDivisibleError:
                break
            k -= 1
        if k:
            left[e] = k
    return RationalFunction(total, _phi_product(left), _reduced=True)


def _phi_product(exps: Counter) -> LaurentPoly:
    out = ONE
    for e, k in sorted(exps.items()):
        if k:
            out = out * cyclotomic(e) ** k
    return out

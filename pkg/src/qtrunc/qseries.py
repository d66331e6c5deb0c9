"""Power series in q known exactly through a fixed order."""

from __future__ import annotations

from fractions import Fraction

from .exactpoly import LaurentPoly, Number, _norm, render_terms
from .qcomb import NEG_ONE, NEG_Q, Q_BASE, qbinom, qpoch_poly, sign

__all__ = [
    "TruncatedSeries",
    "series_from_poly",
    "series_add",
    "series_mul",
    "series_inv",
    "infinite_qpoch",
    "euler_product",
    "theta_gauss",
    "pentagonal_sum",
    "gz_identity_check",
    "euler_exponential_check",
    "euler_exponential_middle",
]


class TruncatedSeries:
    """``c_0 + c_1 q + ... + c_N q^N + O(q^{N+1})``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int):
        if order < 0:
            raise ValueError("order must be non-negative")
        cs = [_norm(c) for c in list(coeffs)[: order + 1]]
        cs.extend([0] * (order + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls([1], order)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs, order)

    def __getitem__(self, e: int) -> Number:
        return self.coeffs[e]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def __add__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)], n)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries([c * other for c in self.coeffs], self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [0] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai:
                for j in range(n + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return TruncatedSeries(out, n)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        inv0 = Fraction(1) / c0
        out = [_norm(inv0)]
        for k in range(1, self.order + 1):
            s = sum(self.coeffs[j] * out[k - j] for j in range(1, k + 1))
            out.append(_norm(-s * inv0))
        return TruncatedSeries(out, self.order)

    def to_poly(self) -> LaurentPoly:
        """The known part as a polynomial (the O-term is dropped)."""
        return LaurentPoly((e, c) for e, c in enumerate(self.coeffs) if c)

    def __str__(self) -> str:
        items = [(e, c) for e, c in enumerate(self.coeffs) if c]
        body = render_terms(items)
        return f"{body} + O(q^{self.order + 1})"

    def __repr__(self) -> str:
        return f"TruncatedSeries({str(self)!r})"


def series_from_poly(p: LaurentPoly, order: int) -> TruncatedSeries:
    if p and p.valuation() < 0:
        raise ValueError("negative exponents cannot be carried by a power series")
    return TruncatedSeries([p.coeff(e) for e in range(order + 1)], order)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    return a.inverse()


def _times_binomial(s: list, c: Number, e: int, order: int) -> None:
    # s *= (1 - c q^e), in place, e >= 1
    for i in range(order, e - 1, -1):
        if s[i - e]:
            s[i] -= c * s[i - e]


def infinite_qpoch(coeff: Number, exp: int, step: int, order: int) -> TruncatedSeries:
    """``(coeff q^exp; q^step)_inf`` through ``q^order`` (``exp, step >= 1``)."""
    if exp < 1 or step < 1:
        raise ValueError("need exp >= 1 and step >= 1 for a convergent product")
    s = [0] * (order + 1)
    s[0] = 1
    e = exp
    while e <= order:
        _times_binomial(s, coeff, e, order)
        e += step
    return TruncatedSeries(s, order)


def euler_product(sign_: int, order: int) -> TruncatedSeries:
    """``(q; q)_inf`` for ``sign_ = 1`` and ``(-q; q)_inf`` for ``sign_ = -1``."""
    if sign_ not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return infinite_qpoch(sign_, 1, 1, order)


def theta_gauss(order: int) -> TruncatedSeries:
    """``sum_k (-1)^k q^{k^2}`` over all integers k."""
    s = [0] * (order + 1)
    s[0] = 1
    k = 1
    while k * k <= order:
        s[k * k] += 2 * sign(k)
        k += 1
    return TruncatedSeries(s, order)


def pentagonal_sum(order: int) -> TruncatedSeries:
    """``sum_k (-1)^k q^{k(3k+1)/2}`` over all integers k."""
    s = [0] * (order + 1)
    s[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= order:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e <= order:
                s[e] += sign(k)
        k += 1
    return TruncatedSeries(s, order)


def gz_identity_check(L: int, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Both sides of the Guo-Zeng truncated Gauss identity at ``L``.

    LHS: ``(-q;q)_inf / (q;q)_inf * sum_{|k|<=L} (-1)^k q^{k^2}``.
    RHS: ``1 + (-1)^L sum_{n>L} q^{(L+1)n} (-q;q)_L (-1;q)_{n-L} [n-1, L] / (q;q)_n``.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    partial = [0] * (order + 1)
    for k in range(-L, L + 1):
        if k * k <= order:
            partial[k * k] += sign(k)
    lhs = (
        euler_product(-1, order)
        * euler_product(1, order).inverse()
        * TruncatedSeries(partial, order)
    )
    tail = TruncatedSeries([0], order)
    head = qpoch_poly(NEG_Q, L)
    n = L + 1
    while (L + 1) * n <= order:
        numer = (head * qpoch_poly(NEG_ONE, n - L) * qbinom(n - 1, L)).shift((L + 1) * n)
        denom = series_from_poly(qpoch_poly(Q_BASE, n), order)
        tail = tail + series_from_poly(numer, order) * denom.inverse()
        n += 1
    rhs = TruncatedSeries.one(order) + tail * sign(L)
    return lhs, rhs


def euler_exponential_middle(order: int) -> TruncatedSeries:
    """``(q^2; q^2)_inf / (-q; q)_inf``."""
    return infinite_qpoch(1, 2, 2, order) * euler_product(-1, order).inverse()


def euler_exponential_check(order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """``sum_r (-1)^r q^{C(r+1,2)} / (q;q)_r`` against ``(q;q)_inf``."""
    total = TruncatedSeries([0], order)
    r = 0
    while r * (r + 1) // 2 <= order:
        numer = series_from_poly(LaurentPoly({r * (r + 1) // 2: sign(r)}), order)
        denom = series_from_poly(qpoch_poly(Q_BASE, r), order)
        total = total + numer * denom.inverse()
        r += 1
    return total, euler_product(1, order)

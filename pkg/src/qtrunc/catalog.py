"""Registry of the single-sum truncated identities.

Every polynomial entry is a finite sum ``sum_{i in index_range(p)} term(p, i)``
on the left and a closed form on the right.  Each term is a
:class:`ProductTerm`, ``sign q^shift [n, m] (-q;q)_j (1 - q^top) / (1 - q^den)``.
``lhs`` sums them in packed-integer form; ``lhs_reference`` expands every
summand (quotients as :class:`Quotient`) and sums in the field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Union

from .exactpoly import (
    ONE,
    ZERO,
    CyclotomicSum,
    LaurentPoly,
    NotPolynomialError,
    RationalFunction,
    monomial,
    rf_to_poly,
)
from .qcomb import PoleError, ProductTerm, binom2, qbinom_neg_poch, sign, sum_product_terms
from .qseries import (
    euler_exponential_check,
    euler_product,
    gz_identity_check,
    pentagonal_sum,
    theta_gauss,
)


class Quotient(NamedTuple):
    """``num * (1 - q^top) / (1 - q^d)`` kept unevaluated; ``top=None`` drops that factor."""

    num: LaurentPoly
    top: Optional[int]
    d: int

    def to_rf(self) -> RationalFunction:
        num = self.num if self.top is None else self.num * (ONE - monomial(self.top))
        return RationalFunction(num, ONE - monomial(self.d))


Value = Union[LaurentPoly, Quotient]

__all__ = [
    "Identity",
    "UnknownIdentityError",
    "REGISTRY",
    "POLYNOMIAL_IDS",
    "ProductTerm",
    "Quotient",
    "term_value",
    "get",
    "eval_identity",
    "registry_json",
    "jouhet_u",
    "tilde_u",
    "derive_U_relation",
    "derive_B_relation",
    "derive_tildeU_relation",
    "SUBSTITUTIONS",
    "substitution_closure",
    "MUTATIONS",
    "INDEX_MUTATIONS",
    "mutants",
    "first_failure",
]


class UnknownIdentityError(KeyError):
    pass


@dataclass(frozen=True)
class Identity:
    id: str
    kind: str
    param: str
    param_min: int
    lhs: Callable[[int], LaurentPoly]
    rhs: Callable[[int], LaurentPoly]
    reference: str
    term: Optional[Callable[[int, int], ProductTerm]] = field(default=None, repr=False)
    index_range: Optional[Callable[[int], range]] = field(default=None, repr=False)

    def holds(self, p: int) -> bool:
        return self.lhs(p) == self.rhs(p)

    def summand(self, p: int, i: int) -> Value:
        return term_value(self.term(p, i))

    def lhs_reference(self, p: int) -> LaurentPoly:
        """The left side summed term by term in the field (slow, independent path)."""
        return _sum_terms(self.summand(p, i) for i in self.index_range(p))


def as_rf(t: Value) -> RationalFunction:
    if isinstance(t, Quotient):
        return t.to_rf()
    return RationalFunction.coerce(t)


def _sum_terms(terms) -> LaurentPoly:
    poly = ZERO
    acc = None
    for t in terms:
        if isinstance(t, Quotient):
            if acc is None:
                acc = CyclotomicSum()
            acc.add(t.num, [(1, t.d)], [] if t.top is None else [(1, t.top)])
        else:
            poly = poly + t
    if acc is None:
        return poly
    acc.add(poly)
    return rf_to_poly(acc.value())


def term_value(t: ProductTerm) -> Value:
    """The summand as a polynomial, or as a :class:`Quotient` when it has a denominator."""
    if t.is_zero():
        return ZERO
    factor = qbinom_neg_poch(t.n, t.m, t.j)._mono_mul(t.shift, t.sign)
    if t.den is None:
        return factor if t.top is None else factor * (ONE - monomial(t.top))
    if t.den == 0:
        raise PoleError("surviving pole 1/(1 - q^0)")
    return Quotient(factor, t.top, t.den)


# -- summands ----------------------------------------------------------------
# single-index sums over r (parameter n) or k (parameter L), each given as
# sign q^shift [n, m] (-q;q)_j (1 - q^top) / (1 - q^den)


def ez_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r), n - r, r)


def bg_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * (3 * k + 1) // 2, 2 * L - k, L + k)


def warnaar_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * (3 * k - 1) // 2, 2 * L - k + 1, L + k)


def liu_t1_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * k, 3 * L - k + 1, L + k, L - k)


def liu_t2_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * k, 3 * L - k, L + k, L - k, 2 * L, 3 * L - k)


def liu_t3_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * k, 3 * L - k - 1, L + k - 1, L - k)


def jouhet_u_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r), 2 * n - r + 1, r, n - r)


def liu_v_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r), 2 * n - r, r, n - r, n, 2 * n - r)


def liu_w_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r), 2 * n - r, r, n - r)


def new_a_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r), 2 * n - r + 1, r, n - r, 2 * n + 1, 2 * n - r + 1)


def new_a_trunc_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * k, 3 * L - k - 1, L + k, L - k - 1, 4 * L - 1, 3 * L - k - 1)


def new_b_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r - 1), 2 * n - r + 1, r, n - r, 2 * n + 1, 2 * n - r + 1)


def new_b_trunc_term(L: int, k: int) -> ProductTerm:
    return ProductTerm(sign(k), k * k, 3 * L - k + 1, L + k, L - k, 4 * L + 1, 3 * L - k + 1)


def tilde_u_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r + 1), 2 * n - r + 1, r, n - r)


def liu2017a_term(n: int, r: int) -> ProductTerm:
    return ProductTerm(sign(r), binom2(r + 1), n - r, r)


# -- closed forms --------------------------------------------------------------


def _mono(s: int, e: int) -> LaurentPoly:
    return monomial(e, sign(s))


def ez_rhs(n: int) -> LaurentPoly:
    if n % 3 == 2:
        return ZERO
    return _mono(n // 3, n * (n - 1) // 6)


def one_rhs(_: int) -> LaurentPoly:
    return ONE


def jouhet_u_rhs(n: int) -> LaurentPoly:
    if n % 2:
        return ZERO
    m = n // 2
    return _mono(m, m * (3 * m + 1))


def liu_v_rhs(n: int) -> LaurentPoly:
    if n % 2:
        return ZERO
    m = n // 2
    return _mono(m, m * (3 * m - 1))


def liu_w_rhs(n: int) -> LaurentPoly:
    if n % 2:
        m = (n + 1) // 2
        return _mono(m - 1, 3 * m * m - 3 * m + 1)
    m = n // 2
    return _mono(m, m * (3 * m - 1))


def new_a_rhs(n: int) -> LaurentPoly:
    if n % 2:
        m = (n + 1) // 2
        return _mono(m, m * (3 * m - 1))
    m = n // 2
    return _mono(m, m * (3 * m + 1))


def new_b_rhs(n: int) -> LaurentPoly:
    if n % 2:
        m = (n + 1) // 2
        return _mono(m, (m - 1) * (3 * m - 2))
    m = n // 2
    return _mono(m, m * (3 * m + 1) + 1)


def tilde_u_rhs(n: int) -> LaurentPoly:
    return LaurentPoly((m * (3 * m - 1), sign(m)) for m in range(-(n // 2), (n + 1) // 2 + 1))


def liu2017a_rhs(n: int) -> LaurentPoly:
    return LaurentPoly((m * (3 * m + 1) // 2, sign(m)) for m in range(-((n + 1) // 3), n // 3 + 1))


# -- series entries (parameter = truncation order) ----------------------------

GZ_SERIES_ORDER = 40


def _series_pair(fn):
    return (lambda p: fn(p)[0].to_poly()), (lambda p: fn(p)[1].to_poly())


_pent = _series_pair(lambda N: (euler_product(1, N), pentagonal_sum(N)))
_gauss = _series_pair(lambda N: (euler_product(1, N) * euler_product(-1, N).inverse(), theta_gauss(N)))
_expo = _series_pair(euler_exponential_check)
_gz = _series_pair(lambda L: gz_identity_check(L, GZ_SERIES_ORDER))


def _r(n: int) -> range:
    return range(0, n + 1)


def _half(n: int) -> range:
    return range(0, n // 2 + 1)


def _sym(L: int) -> range:
    return range(-L, L + 1)


def _sym_short(L: int) -> range:
    return range(-L, L)


def _poly_entry(id_, kind, param, pmin, term, index_range, rhs, reference):
    return Identity(
        id=id_,
        kind=kind,
        param=param,
        param_min=pmin,
        lhs=lambda p: sum_product_terms(term(p, i) for i in index_range(p)),
        rhs=rhs,
        reference=reference,
        term=term,
        index_range=index_range,
    )


_N, _L = "polynomial-in-n", "polynomial-in-L"

REGISTRY: dict[str, Identity] = {
    e.id: e
    for e in [
        _poly_entry("EZ", _N, "n", 0, ez_term, _half, ez_rhs,
                    "Ekhad-Zeilberger finite form of the pentagonal theorem"),
        _poly_entry("BG", _L, "L", 0, bg_term, _sym, one_rhs,
                    "Berkovich-Garvan truncated pentagonal theorem"),
        _poly_entry("WARNAAR", _L, "L", 0, warnaar_term, _sym, one_rhs,
                    "Warnaar truncated pentagonal theorem"),
        _poly_entry("LIU-T1", _L, "L", 1, liu_t1_term, _sym, one_rhs,
                    "J.-C. Liu truncated Gauss identity, [3L-k+1, L+k] form"),
        _poly_entry("LIU-T2", _L, "L", 1, liu_t2_term, _sym, one_rhs,
                    "J.-C. Liu truncated Gauss identity, (1-q^{2L})/(1-q^{3L-k}) form"),
        _poly_entry("LIU-T3", _L, "L", 1, liu_t3_term, _sym, one_rhs,
                    "J.-C. Liu truncated Gauss identity, [3L-k-1, L+k-1] form"),
        _poly_entry("JOUHET-U", _N, "n", 0, jouhet_u_term, _r, jouhet_u_rhs,
                    "U_n closed form (Jouhet; J.-C. Liu)"),
        _poly_entry("LIU-V", _N, "n", 1, liu_v_term, _r, liu_v_rhs,
                    "J.-C. Liu closed form with (1-q^n)/(1-q^{2n-r})"),
        _poly_entry("LIU-W", _N, "n", 1, liu_w_term, _r, liu_w_rhs,
                    "W_n closed form (J.-C. Liu)"),
        _poly_entry("NEW-A", _N, "n", 1, new_a_term, _r, new_a_rhs,
                    "U_n - q^{2n} U_{n-1} closed form"),
        _poly_entry("NEW-A-TRUNC", _L, "L", 1, new_a_trunc_term, _sym_short, one_rhs,
                    "truncated Gauss identity with (1-q^{4L-1})/(1-q^{3L-k-1})"),
        _poly_entry("NEW-B", _N, "n", 1, new_b_term, _r, new_b_rhs,
                    "q U_n - U_{n-1} closed form"),
        _poly_entry("NEW-B-TRUNC", _L, "L", 1, new_b_trunc_term, _sym, one_rhs,
                    "truncated Gauss identity with (1-q^{4L+1})/(1-q^{3L-k+1})"),
        _poly_entry("TILDE-U", _N, "n", 0, tilde_u_term, _r, tilde_u_rhs,
                    "tilde-U_n as a partial theta sum in q^{m(3m-1)}"),
        _poly_entry("LIU2017A", _N, "n", 0, liu2017a_term, _half, liu2017a_rhs,
                    "J.-C. Liu truncation of Euler's exponential identity"),
        Identity("EULER-PENT", "series", "order", 0, *_pent,
                 reference="Euler pentagonal number theorem"),
        Identity("GAUSS-SQ", "series", "order", 0, *_gauss,
                 reference="Gauss square exponent theorem"),
        Identity("EULER-EXP", "series", "order", 0, *_expo,
                 reference="Euler exponential identity sum (-1)^r q^{C(r+1,2)}/(q;q)_r = (q;q)_inf"),
        Identity("GZ-SERIES", "series", "L", 1, *_gz,
                 reference=f"Guo-Zeng truncated Gauss series identity, through q^{GZ_SERIES_ORDER}"),
    ]
}

POLYNOMIAL_IDS = tuple(k for k, v in REGISTRY.items() if v.kind != "series")


def get(id_: str) -> Identity:
    try:
        return REGISTRY[id_]
    except KeyError:
        raise UnknownIdentityError(f"unknown identity {id_!r}") from None


def eval_identity(id_: str, p: int) -> tuple[LaurentPoly, LaurentPoly]:
    ident = get(id_)
    if p < ident.param_min:
        raise ValueError(f"{id_} needs {ident.param} >= {ident.param_min}, got {p}")
    return ident.lhs(p), ident.rhs(p)


def registry_json() -> str:
    rows = [
        {"id": e.id, "kind": e.kind, "param": e.param, "param_min": e.param_min, "reference": e.reference}
        for e in REGISTRY.values()
    ]
    return json.dumps({"identities": rows}, indent=2)


# -- telescoping steps ---------------------------------------------------------


def jouhet_u(n: int) -> LaurentPoly:
    return REGISTRY["JOUHET-U"].lhs(n)


def tilde_u(n: int) -> LaurentPoly:
    return REGISTRY["TILDE-U"].lhs(n)


def derive_U_relation(n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """(NEW-A sum at n, U_n - q^{2n} U_{n-1})."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return REGISTRY["NEW-A"].lhs(n), jouhet_u(n) - jouhet_u(n - 1).shift(2 * n)


def derive_B_relation(n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """(NEW-B sum at n, q U_n - U_{n-1})."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return REGISTRY["NEW-B"].lhs(n), jouhet_u(n).shift(1) - jouhet_u(n - 1)


def derive_tildeU_relation(n: int) -> tuple[LaurentPoly, LaurentPoly]:
    """(NEW-A sum at n, tilde-U_n - tilde-U_{n-1})."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return REGISTRY["NEW-A"].lhs(n), tilde_u(n) - tilde_u(n - 1)


# -- q -> 1/q substitution recipes ---------------------------------------------


@dataclass(frozen=True)
class Substitution:
    """Map a finite identity in ``n, r`` onto a truncation in ``L, k``.

    ``n -> n_of(L)``, ``r -> L + k``, ``q -> 1/q``, then divide by the
    transformed right-hand side so the truncation's right-hand side is 1.
    """

    source: str
    target: str
    n_of: Callable[[int], int]


SUBSTITUTIONS = (
    Substitution("JOUHET-U", "LIU-T1", lambda L: 2 * L),
    Substitution("NEW-A", "NEW-A-TRUNC", lambda L: 2 * L - 1),
    Substitution("NEW-B", "NEW-B-TRUNC", lambda L: 2 * L),
    Substitution("EZ", "BG", lambda L: 3 * L),
    Substitution("EZ", "WARNAAR", lambda L: 3 * L + 1),
)


def substitution_closure(sub: Substitution, L: int) -> list[tuple[int, Value, Value]]:
    """Termwise ``(k, target_term, transformed_source_term)`` over the target's range."""
    src, tgt = REGISTRY[sub.source], REGISTRY[sub.target]
    n = sub.n_of(L)
    norm = src.rhs(n).subst_qinv()
    if not norm.is_monomial():
        raise ValueError(f"{sub.source} right-hand side at n={n} is not a unit")
    out = []
    for k in tgt.index_range(L):
        mapped = src.summand(n, L + k)
        mapped = as_rf(mapped).subst_qinv() / norm
        out.append((k, as_rf(tgt.summand(L, k)), mapped))
    return out


# -- falsifiability: single exponent or sign perturbations ----------------------

MUTATIONS = {
    "negate-sign": lambda t, i: replace(t, sign=-t.sign),
    "shift+1": lambda t, i: replace(t, shift=t.shift + 1),
    "top+1": lambda t, i: t if t.top is None else replace(t, top=t.top + 1),
    "den+1": lambda t, i: t if t.den is None else replace(t, den=t.den + 1),
}

# Index-dependent exponent shifts; these can land on a sibling identity.
INDEX_MUTATIONS = {
    "shift+index": lambda t, i: replace(t, shift=t.shift + i),
    "shift-index": lambda t, i: replace(t, shift=t.shift - i),
}


def mutants(ident: Identity, kinds: dict = MUTATIONS) -> list[tuple[str, Identity]]:
    """Copies of ``ident`` with one perturbation applied to every summand.

    ``top+1`` and ``den+1`` are only produced for entries carrying that factor.
    """
    probe = ident.term(max(ident.param_min, 1), 0)
    out = []
    for name, fn in kinds.items():
        if (name == "top+1" and probe.top is None) or (name == "den+1" and probe.den is None):
            continue

        def term(p, i, fn=fn, base=ident.term):
            return fn(base(p, i), i)

        def lhs(p, term=term, rng=ident.index_range):
            return sum_product_terms(term(p, i) for i in rng(p))

        out.append((name, replace(ident, id=f"{ident.id}~{name}", term=term, lhs=lhs)))
    return out


def first_failure(ident: Identity, hi: int) -> Optional[int]:
    """Smallest parameter in ``param_min..hi`` where ``ident`` does not hold.

    A left side that is not a polynomial, or hits a pole, counts as a failure.
    """
    for p in range(ident.param_min, hi + 1):
        try:
            if not ident.holds(p):
                return p
        except (NotPolynomialError, PoleError):
            return p
    return None

from fractions import Fraction

import pytest
from conftest import coefficients, laurent_polys, nonzero, sympy_equal, to_sympy
from hypothesis import given
from hypothesis import strategies as st
from oracles import dict_mul

from qtrunc.exactpoly import (
    ONE,
    ZERO,
    CyclotomicSum,
    LaurentPoly,
    NotDivisibleError,
    NotPolynomialError,
    RationalFunction,
    cyclotomic,
    monomial,
    poly_add,
    poly_divexact,
    poly_gcd,
    poly_mul,
    poly_sub,
    poly_subst_qinv,
    rf,
    rf_add,
    rf_mul,
    rf_neg,
    rf_to_poly,
)
from qtrunc.qcomb import qbinom

q = monomial(1)


def P(*pairs):
    return LaurentPoly(dict(pairs))


# -- examples -------------------------------------------------------------------


def test_mul_expands_product():
    assert poly_mul(1 + q, 1 + q**2) == P((0, 1), (1, 1), (2, 1), (3, 1))


def test_mul_by_zero():
    assert poly_mul(P((3, 2), (-1, 5)), ZERO) == ZERO


def test_add_cancels_to_canonical_form():
    s = poly_add(ONE - monomial(-1), monomial(-1))
    assert s == ONE
    assert s.terms == {0: 1}


def test_sub_of_equal_is_zero():
    p = P((2, Fraction(1, 3)), (-2, 7))
    assert poly_sub(p, p).is_zero()


def test_divexact_geometric():
    assert poly_divexact(ONE - q**2, ONE - q) == 1 + q


def test_divexact_gives_gaussian_binomial():
    num = (ONE - q**3) * (ONE - q**4)
    den = (ONE - q) * (ONE - q**2)
    assert poly_divexact(num, den) == P((0, 1), (1, 1), (2, 2), (3, 1), (4, 1))
    assert poly_divexact(num, den) == qbinom(4, 2)


def test_divexact_rejects_non_divisible():
    with pytest.raises(NotDivisibleError):
        poly_divexact(1 + q, ONE - q)


def test_subst_qinv_negates_exponents():
    assert poly_subst_qinv(ONE - 2 * q + q**3) == ONE - 2 * monomial(-1) + monomial(-3)
    assert poly_subst_qinv(LaurentPoly.const(Fraction(5, 2))) == LaurentPoly.const(Fraction(5, 2))


def test_rf_common_denominator():
    assert rf_add(rf(ONE, 1 + q), rf(q, 1 + q)) == RationalFunction.coerce(ONE)


def test_rf_add_negation_is_zero():
    a = rf(1 + q**2, ONE - q**3)
    assert rf_add(a, rf_neg(a)).is_zero()


def test_rf_to_poly_cancels():
    assert rf_to_poly(rf(ONE - q**2, ONE - q)) == 1 + q


def test_rf_to_poly_rational_constant():
    v = rf_to_poly(rf(LaurentPoly.const(1), LaurentPoly.const(2)))
    assert v == LaurentPoly.const(Fraction(1, 2))


def test_rf_to_poly_rejects_genuine_quotient():
    with pytest.raises(NotPolynomialError):
        rf_to_poly(rf(ONE, 1 + q))


def test_gcd_is_monic():
    # the gcd is normalized monic: 1 - q up to the unit -1
    g = poly_gcd(ONE - q**2, ONE - q**3)
    assert g == q - 1
    assert poly_divexact(ONE - q, g) == LaurentPoly.const(-1)


def test_gcd_with_zero_is_normalized_input():
    # valuation shifted to 0, leading coefficient 1
    assert poly_gcd(2 * q**3 + 4 * q**4, ZERO) == Fraction(1, 2) + q


def test_gcd_coprime():
    assert poly_gcd(1 + q, ONE - q) == ONE


def test_rendering_format():
    p = LaurentPoly({-3: 1, 0: 1, 1: -2, 3: Fraction(1, 2)})
    assert str(p) == "q^-3 + 1 - 2q + (1/2)q^3"
    assert str(ZERO) == "0"


def test_cyclotomic_small():
    assert cyclotomic(1) == q - 1
    assert cyclotomic(6) == ONE - q + q**2
    assert cyclotomic(12) == ONE - q**2 + q**4


def test_rf_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        rf(ONE, ZERO)


def test_negative_power_of_binomial_raises():
    with pytest.raises(ValueError):
        (1 + q) ** -1


# -- properties -----------------------------------------------------------------


@given(laurent_polys(), laurent_polys(), laurent_polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a


@given(laurent_polys(max_terms=8, min_exp=-30, max_exp=60), laurent_polys(max_terms=8, min_exp=-30, max_exp=60))
def test_mul_matches_sympy(a, b):
    assert sympy_equal(to_sympy(a * b), to_sympy(a) * to_sympy(b))


@given(laurent_polys())
def test_subst_qinv_involution(p):
    assert poly_subst_qinv(poly_subst_qinv(p)) == p


@given(nonzero(laurent_polys()), nonzero(laurent_polys()))
def test_rf_inverse(a, b):
    assert rf_mul(rf(a, b), rf(b, a)) == RationalFunction.coerce(ONE)


@given(laurent_polys(), nonzero(laurent_polys()))
def test_rf_reduced(a, b):
    r = rf(a, b)
    assert r.den.valuation() == 0
    assert r.den.leading_coeff() == 1
    assert poly_gcd(r.num, r.den) == ONE or r.num.is_zero()
    assert sympy_equal(to_sympy(r), to_sympy(a) / to_sympy(b))


@given(laurent_polys(), nonzero(laurent_polys()))
def test_divexact_inverts_mul(a, b):
    assert poly_divexact(poly_mul(a, b), b) == a


dense_coeffs = st.lists(st.one_of(st.integers(-10**30, 10**30), coefficients), min_size=30, max_size=80)


@given(dense_coeffs, dense_coeffs, st.integers(-20, 20), st.integers(-20, 20))
def test_large_products_match_schoolbook(ca, cb, sa, sb):
    # operands this size take the packed multiplication path
    a = {e + sa: c for e, c in enumerate(ca) if c}
    b = {e + sb: c for e, c in enumerate(cb) if c}
    assert LaurentPoly(a) * LaurentPoly(b) == LaurentPoly(dict_mul(a, b))


@given(dense_coeffs, st.lists(st.integers(-50, 50), min_size=2, max_size=40))
def test_large_divexact(ca, cb):
    a = LaurentPoly(dict(enumerate(ca)))
    b = LaurentPoly(dict(enumerate(cb)))
    if not b.is_zero():
        assert poly_divexact(a * b, b) == a


@given(
    st.lists(
        st.tuples(
            laurent_polys(min_exp=0, max_exp=6, max_terms=3),
            st.lists(st.tuples(st.sampled_from([1, -1]), st.integers(1, 6)), max_size=3),
            st.lists(st.tuples(st.sampled_from([1, -1]), st.integers(0, 6)), max_size=2),
        ),
        max_size=4,
    )
)
def test_cyclotomic_sum_matches_field(terms):
    acc = CyclotomicSum()
    expected = RationalFunction.coerce(ZERO)
    for num, dens, nums in terms:
        acc.add(num, dens, nums)
        value = RationalFunction.coerce(num)
        for s, d in dens:
            value = value / (ONE - monomial(d, s))
        for s, d in nums:
            value = value * (ONE - monomial(d, s))
        expected = expected + value
    assert acc.value() == expected

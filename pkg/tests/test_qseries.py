import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import dense_series_product, partitions_count

from qtrunc.exactpoly import ONE, LaurentPoly, monomial
from qtrunc.qcomb import qbinom
from qtrunc.qseries import (
    TruncatedSeries,
    euler_exponential_check,
    euler_exponential_middle,
    euler_product,
    gz_identity_check,
    pentagonal_sum,
    series_add,
    series_from_poly,
    series_inv,
    series_mul,
    theta_gauss,
)

q = monomial(1)


def S(coeffs, order):
    return TruncatedSeries(coeffs, order)


def test_series_from_poly_examples():
    assert series_from_poly(ONE - q, 5) == S([1, -1], 5)
    with pytest.raises(ValueError):
        series_from_poly(monomial(-1), 5)
    assert series_from_poly(qbinom(4, 2), 3) == S([1, 1, 2, 1], 3)


def test_inverse_examples():
    assert series_inv(S([1, -1], 6)) == S([1] * 7, 6)
    assert series_inv(S([1], 4)) == S([1], 4)


def test_mixed_order_truncates_to_minimum():
    a, b = S([1, 1, 1, 1], 3), S([1, 2], 1)
    assert series_add(a, b).order == 1
    assert series_mul(a, b) == S([1, 3], 1)


def test_euler_product_examples():
    assert euler_product(1, 8) == S([1, -1, -1, 0, 0, 1, 0, 1, 0], 8)
    assert euler_product(-1, 0) == S([1], 0)
    e = euler_product(1, 30)
    assert series_mul(e, series_inv(e)) == TruncatedSeries.one(30)


def test_theta_and_pentagonal_examples():
    assert theta_gauss(10) == S([1, -2, 0, 0, 2, 0, 0, 0, 0, -2, 0], 10)
    assert theta_gauss(0) == S([1], 0)
    assert pentagonal_sum(13).to_poly() == ONE - q - q**2 + q**5 + q**7 - q**12
    assert pentagonal_sum(1) == S([1, -1], 1)


def test_rendering():
    assert str(series_mul(euler_product(1, 10), series_inv(euler_product(-1, 10)))) == "1 - 2q + 2q^4 - 2q^9 + O(q^11)"
    assert str(pentagonal_sum(0)) == "1 + O(q^1)"


def test_euler_product_against_dense_oracle():
    for sign in (1, -1):
        expected = dense_series_product([(-sign, k) for k in range(1, 61)], 60)
        assert list(euler_product(sign, 60).coeffs) == expected


def test_eta_inverse_counts_partitions():
    assert list(series_inv(euler_product(1, 80)).coeffs) == partitions_count(80)


def test_pentagonal_equals_product_up_to_120():
    for order in (0, 1, 7, 50, 120):
        assert pentagonal_sum(order) == euler_product(1, order)


def test_gauss_square_product():
    for order in (0, 5, 60):
        gauss = series_mul(euler_product(1, order), series_inv(euler_product(-1, order)))
        assert gauss == theta_gauss(order)
        assert set(theta_gauss(order).coeffs) <= {0, 1, -1, 2, -2}


def test_gz_examples():
    for L in (1, 2):
        lhs, rhs = gz_identity_check(L, 30)
        assert lhs == rhs
    for L in (1, 4):
        lhs, rhs = gz_identity_check(L, 0)
        assert lhs[0] == rhs[0] == 1


def test_gz_identity_through_60():
    for L in range(1, 7):
        lhs, rhs = gz_identity_check(L, 60)
        assert lhs == rhs


def test_euler_exponential_examples():
    lhs, rhs = euler_exponential_check(20)
    assert lhs == rhs == pentagonal_sum(20)
    assert euler_exponential_check(0) == (S([1], 0), S([1], 0))


def test_euler_exponential_middle_is_product():
    # (q^2;q^2)_inf / (-q;q)_inf = (q;q)_inf since (q^2;q^2) = (q;q)(-q;q)
    assert euler_exponential_middle(60) == euler_product(1, 60)


series = st.integers(0, 12).flatmap(
    lambda n: st.builds(
        lambda c: TruncatedSeries(c, n),
        st.lists(st.integers(-5, 5), min_size=n + 1, max_size=n + 1).map(lambda c: [1 + abs(c[0])] + c[1:]),
    )
)


@given(series)
def test_inverse_two_sided_and_involutive(a):
    inv = series_inv(a)
    assert series_mul(a, inv) == TruncatedSeries.one(a.order)
    assert series_mul(inv, a) == TruncatedSeries.one(a.order)
    assert series_inv(inv) == a


@given(series, series)
def test_series_mul_matches_polys(a, b):
    order = min(a.order, b.order)
    prod = a.to_poly() * b.to_poly()
    assert series_mul(a, b) == series_from_poly(
        LaurentPoly({e: c for e, c in prod.items() if e <= order}), order
    )

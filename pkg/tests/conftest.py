import sys
from fractions import Fraction

import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qtrunc.exactpoly import LaurentPoly

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Q = sympy.Symbol("q")

coefficients = st.one_of(
    st.integers(-6, 6),
    st.fractions(min_value=-4, max_value=4, max_denominator=5),
)


@st.composite
def laurent_polys(draw, min_exp=-4, max_exp=6, max_terms=5):
    exps = draw(st.lists(st.integers(min_exp, max_exp), max_size=max_terms, unique=True))
    return LaurentPoly({e: draw(coefficients) for e in exps})


def nonzero(strategy):
    return strategy.filter(lambda p: not p.is_zero())


def to_sympy(p) -> sympy.Expr:
    """Independent representation of a LaurentPoly or RationalFunction."""
    if hasattr(p, "num"):
        return to_sympy(p.num) / to_sympy(p.den)
    return sum((sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * Q**e for e, c in p.items()),
               sympy.Integer(0))


def sympy_equal(a, b) -> bool:
    return sympy.simplify(sympy.cancel(a - b)) == 0


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number])

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtrunc.catalog import POLYNOMIAL_IDS, REGISTRY
from qtrunc.exactpoly import ONE, LaurentPoly, RationalFunction, monomial
from qtrunc.qdsl import (
    DSLEvalError,
    DSLPoleError,
    DSLSyntaxError,
    UnboundParameterError,
    bundled_corpus,
    evaluate,
    free_parameters,
    parse,
    parse_qid,
    render,
    tokenize,
    verify_range,
)
from qtrunc.qdsl.mutate import first_failure, mutants
from qtrunc.qdsl.syntax import BinOp, Call, Name, Neg, Num, Pow, Sign, walk

q = monomial(1)

T1 = "sum(k, -L, L, (-1)^k * qpow(k^2) * poch(-q, L-k) * qbin(3*L-k+1, L+k))"
EZ = "sum(r, 0, floor(n, 2), (-1)^r * qpow(binom2(r)) * qbin(n - r, r))"


def rf(p):
    return RationalFunction.coerce(p)


# -- parse -----------------------------------------------------------------------


def test_parse_one_bound_index():
    e = parse(T1)
    assert isinstance(e, Call) and e.name == "sum" and e.args[0] == Name("k")
    assert free_parameters(e) == {"L"}
    assert sum(1 for x in walk(e) if isinstance(x, Call) and x.name == "sum") == 1


def test_unbalanced_parenthesis():
    with pytest.raises(DSLSyntaxError) as info:
        parse("qbin(2*n-r+1, r")
    err = info.value
    assert (err.line, err.column) == (1, 16)
    assert err.expected == {"','", "')'"}


def test_poch_zero_is_one():
    assert evaluate(parse("poch(-q, 0)")) == rf(ONE)


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("foo(1)", "unknown builtin"),
        ("qbin(1)", "takes 2 arguments"),
        ("poch(1 + q, 2)", "monomial"),
        ("2 +", "end of input"),
        ("n $ 2", "unexpected character"),
    ],
)
def test_syntax_errors(src, fragment):
    with pytest.raises(DSLSyntaxError) as info:
        parse(src)
    assert fragment in str(info.value)


def test_error_position_on_later_line():
    with pytest.raises(DSLSyntaxError) as info:
        parse("1 +\n  2 * )")
    assert (info.value.line, info.value.column) == (2, 7)


def test_power_binds_tighter_than_minus():
    assert parse("-q^2") == Neg(Pow(Name("q"), 2))
    assert evaluate("-q^2") == rf(-(q**2))
    assert parse("(-1)^n") == Sign(Name("n"))


def test_implicit_multiplication_and_negative_exponent():
    assert evaluate("(1/2)q^3 - 2q + q^-3") == rf(LaurentPoly({3: Fraction(1, 2), 1: -2, -3: 1}))


def test_deep_nesting_is_a_syntax_error():
    with pytest.raises(DSLSyntaxError):
        parse("(" * 500 + "1" + ")" * 500)


# -- eval ------------------------------------------------------------------------


def test_eval_examples():
    assert evaluate(T1, {"L": 2}) == rf(ONE)
    assert evaluate("qpow(0)") == rf(ONE)
    assert evaluate(EZ, {"n": 4}) == rf(-(q**2))


def test_eval_builtins():
    assert evaluate("binom2(5) + floor(-7, 2) + mod(-7, 3) + eq(2, 2)") == rf(LaurentPoly.const(10 - 4 + 2 + 1))
    assert evaluate("qbin(4, 2)") == rf(LaurentPoly({0: 1, 1: 1, 2: 2, 3: 1, 4: 1}))
    assert evaluate("poch(-q, -1)") == rf(LaurentPoly.const(Fraction(1, 2)))
    assert evaluate("sum(k, 3, 1, k)") == rf(LaurentPoly({}))
    assert evaluate("(1 - q^2) / (1 - q)") == rf(ONE + q)


def test_unbound_parameter():
    with pytest.raises(UnboundParameterError):
        evaluate(T1, {})


def test_pole_carries_indices():
    with pytest.raises(DSLPoleError) as info:
        evaluate("sum(k, 0, 2, 1 / (1 - qpow(k)))")
    assert info.value.indices == (("k", 0),)
    with pytest.raises(DSLPoleError):
        evaluate("poch(q, -1)")


def test_zero_factor_hides_pole():
    assert evaluate("qbin(1, 2) * (1 / (1 - qpow(0)))").is_zero()


def test_non_integer_index_bound():
    with pytest.raises(DSLEvalError):
        evaluate("sum(k, 0, q, k)")


# -- verify_range ------------------------------------------------------------------


def test_verify_range_examples():
    assert verify_range(T1, "1", "L", 1, 10).passed
    perturbed = T1.replace("qpow(k^2)", "qpow(k^2 + 1)")
    report = verify_range(perturbed, "1", "L", 1, 3)
    first = report.failures[0]
    assert first.value == 1 and first.difference and first.difference != "0"
    src = bundled_corpus()["TILDE-U"]
    assert verify_range(src.lhs, src.rhs, "n", 0, 10).passed


def test_verify_range_rejects_extra_parameters():
    with pytest.raises(UnboundParameterError):
        verify_range("n + m", "0", "n", 0, 1)


# -- corpus ------------------------------------------------------------------------


def test_corpus_covers_catalog():
    assert set(bundled_corpus()) == set(POLYNOMIAL_IDS)


@pytest.mark.parametrize("id_", POLYNOMIAL_IDS)
def test_corpus_matches_native(id_):
    src = bundled_corpus()[id_]
    ident = REGISTRY[id_]
    assert src.param == ident.param
    for p in range(src.param_min, min(src.param_max, 10) + 1):
        assert evaluate(src.lhs, {src.param: p}) == rf(ident.lhs(p)), (id_, p)
        assert evaluate(src.rhs, {src.param: p}) == rf(ident.rhs(p)), (id_, p)


def test_qid_errors_map_to_file_position():
    text = "id: X\nparam: n\nlhs: sum(r, 0, n, qbin(n r)\nrhs: 1\n"
    with pytest.raises(DSLSyntaxError) as info:
        parse_qid(text)
    assert info.value.line == 3
    text = "id: X\nparam: n\nlhs: 1 +\n  (2 *)\nrhs: 1\n"
    with pytest.raises(DSLSyntaxError) as info:
        parse_qid(text)
    assert (info.value.line, info.value.column) == (4, 7)


def test_qid_fields():
    src = parse_qid("# comment\nid: Y\nparam: n\nmin: 1\nmax: 3\nlhs: n - n\nrhs: 0\n")
    assert (src.id, src.param, src.param_min, src.param_max) == ("Y", "n", 1, 3)
    assert src.verify(1, 3).passed


# -- mutation ------------------------------------------------------------------------


@pytest.mark.parametrize("id_", POLYNOMIAL_IDS)
def test_corpus_mutants_fail(id_):
    src = bundled_corpus()[id_]
    found = mutants(src.lhs) + mutants(src.rhs)
    assert found
    for path, label, m in mutants(src.lhs):
        assert first_failure(m, src.rhs, src.param, src.param_min, 5) is not None, (id_, path, label)
    for path, label, m in mutants(src.rhs):
        assert first_failure(src.lhs, m, src.param, src.param_min, 5) is not None, (id_, path, label)


# -- properties ------------------------------------------------------------------------

idents = st.sampled_from(["n", "L", "k", "r", "q"])
leaves = st.one_of(st.integers(0, 30).map(Num), idents.map(Name))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(Pow, children, st.integers(-4, 6)),
        children.map(Sign),
        st.builds(lambda a: Call("qpow", (a,)), children),
        st.builds(lambda a: Call("binom2", (a,)), children),
        st.builds(lambda a, b: Call("qbin", (a, b)), children, children),
        st.builds(lambda a, b: Call("floor", (a, b)), children, children),
        st.builds(lambda a, b: Call("mod", (a, b)), children, children),
        st.builds(lambda a, b: Call("eq", (a, b)), children, children),
        st.builds(lambda c, n: Call("poch", (c, n)), st.sampled_from([Name("q"), Neg(Name("q")), Num(1)]), children),
        st.builds(lambda v, a, b, c: Call("sum", (Name(v), a, b, c)), st.sampled_from(["i", "j"]), children, children,
                  children),
    )


trees = st.recursive(leaves, _extend, max_leaves=25)


@given(trees)
def test_render_round_trip(e):
    assert parse(render(e)) == e


@given(st.dictionaries(st.integers(-8, 8), st.fractions(max_denominator=6).filter(bool), max_size=6))
def test_rendered_polynomials_parse_back(terms):
    p = LaurentPoly(terms)
    assert evaluate(str(p)) == rf(p)


TOKENS = ["sum", "qpow", "qbin", "poch", "binom2", "floor", "n", "k", "q", "(", ")", ",", "+", "-", "*", "/", "^",
          "(-1)", "0", "1", "7", " ", "\n", "$"]


def test_fuzzed_token_strings_only_raise_syntax_errors():
    rng = random.Random(20240601)
    for _ in range(10_000):
        src = "".join(rng.choice(TOKENS) for _ in range(rng.randint(0, 14)))
        try:
            parse(src)
        except DSLSyntaxError:
            pass


def test_tokenize_positions():
    toks = tokenize("a\n  qpow(1)")
    assert [(t.kind, t.line, t.column) for t in toks[:3]] == [("IDENT", 1, 1), ("IDENT", 2, 3), ("OP", 2, 7)]
    assert toks[-1].kind == "EOF"

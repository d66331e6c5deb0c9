"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every comparison is exact equality (tolerance 0).  The lines are also
collected and repeated in pytest's terminal summary; run this file directly
(``python3 tests/test_acceptance.py``) to print only the nine lines.
"""

import functools
import random
import sys
import time

from qtrunc.catalog import (
    MUTATIONS,
    POLYNOMIAL_IDS,
    REGISTRY,
    SUBSTITUTIONS,
    first_failure,
    mutants,
    substitution_closure,
)
from qtrunc.exactpoly import RationalFunction
from qtrunc.multisum import RECURRENCES, gz_multisum, gz_rhs, multisum_closed_form, um, verify_recurrence, wm
from qtrunc.qcomb import pascal_variant, qbinom_qinv_law, qpoch_qinv_law
from qtrunc.qdsl import DSLSyntaxError, bundled_corpus, evaluate, parse
from qtrunc.qdsl.mutate import first_failure as dsl_first_failure
from qtrunc.qdsl.mutate import mutants as dsl_mutants
from qtrunc.qseries import (
    euler_exponential_check,
    euler_product,
    gz_identity_check,
    pentagonal_sum,
    series_inv,
    series_mul,
    theta_gauss,
)

RESULTS = {}


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            try:
                fn()
            except BaseException as exc:
                _record(number, title, False, time.perf_counter() - start, f"{type(exc).__name__}: {exc}")
                raise
            _record(number, title, True, time.perf_counter() - start, "")

        return run

    return wrap


def _record(number, title, ok, seconds, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({seconds:.1f}s)"
    if detail:
        line += f" -- {detail.splitlines()[0][:200]}"
    RESULTS[number] = line
    print(line)


@criterion(1, "catalog identities hold from param_min through 40")
def test_catalog_suite():
    start = time.perf_counter()
    for id_ in POLYNOMIAL_IDS:
        ident = REGISTRY[id_]
        for p in range(ident.param_min, 41):
            assert ident.lhs(p) == ident.rhs(p), (id_, p)
    assert time.perf_counter() - start < 30


@criterion(2, "substitution closures map termwise for L <= 12")
def test_substitution_closure():
    pairs = {(s.source, s.target) for s in SUBSTITUTIONS}
    assert pairs == {("JOUHET-U", "LIU-T1"), ("NEW-A", "NEW-A-TRUNC"), ("NEW-B", "NEW-B-TRUNC"),
                     ("EZ", "BG"), ("EZ", "WARNAAR")}
    for sub in SUBSTITUTIONS:
        for L in range(1, 13):
            for k, target, mapped in substitution_closure(sub, L):
                assert target == mapped, (sub.source, sub.target, L, k)


@criterion(3, "q -> 1/q laws for n <= 30 and the Pascal variant for r <= n <= 30")
def test_transformation_laws():
    for n in range(0, 31):
        lhs, rhs = qpoch_qinv_law(n)
        assert lhs == rhs, n
        for m in range(0, n + 1):
            lhs, rhs = qbinom_qinv_law(n, m)
            assert lhs == rhs, (n, m)
    for n in range(1, 31):
        for r in range(1, n + 1):
            lhs, rhs = pascal_variant(n, r)
            assert lhs == RationalFunction.coerce(rhs), (n, r)


@criterion(4, "closed forms of U2, U3, W2, W3 for 1 <= n <= 8")
def test_closed_forms():
    start = time.perf_counter()
    for n in range(1, 9):
        assert um(2, n).is_zero(), n
        assert um(2, n) == multisum_closed_form("U2", n), n
        assert um(3, n) == multisum_closed_form("U3", n), n
        assert wm(2, n) == multisum_closed_form("W2", n), n
        assert wm(3, n) == multisum_closed_form("W3", n), n
    assert str(wm(3, 1)) == "(3/2)q - (1/2)q^3"
    assert time.perf_counter() - start < 120


@criterion(5, "the four recurrences have zero residual for n = 1..4")
def test_recurrences():
    sequences = {"U2": lambda n: um(2, n), "U3": lambda n: um(3, n), "W2": lambda n: wm(2, n), "W3": lambda n: wm(3, n)}
    assert sorted(RECURRENCES) == ["REC-U2", "REC-U3", "REC-W2", "REC-W3"]
    for rec in RECURRENCES.values():
        for result in verify_recurrence(rec, sequences[rec.sequence], 1, 4):
            assert result.passed, (rec.id, result.n, str(result.residual))


@criterion(6, "pentagonal multiple sums for m = 1..4, L = 0..5")
def test_gz_multisums():
    for m in range(1, 5):
        for L in range(0, 6):
            for which in ("pent1", "pent2"):
                assert gz_multisum(which, m, L) == RationalFunction.coerce(gz_rhs(which, m, L)), (which, m, L)
    assert gz_rhs("pent1", 3, 5).terms == {0: 16}
    assert gz_rhs("pent2", 3, 5).terms == {0: -17}


@criterion(7, "series identities coefficientwise through order 60")
def test_series():
    start = time.perf_counter()
    assert pentagonal_sum(60) == euler_product(1, 60)
    assert series_mul(euler_product(1, 60), series_inv(euler_product(-1, 60))) == theta_gauss(60)
    for L in range(1, 7):
        lhs, rhs = gz_identity_check(L, 60)
        assert lhs == rhs, L
    lhs, rhs = euler_exponential_check(60)
    assert lhs == rhs == euler_product(1, 60)
    assert time.perf_counter() - start < 10


@criterion(8, "every single sign or exponent mutant fails within parameter <= 5")
def test_falsifiability():
    count = 0
    for id_ in POLYNOMIAL_IDS:
        found = mutants(REGISTRY[id_], MUTATIONS)
        assert {"negate-sign", "shift+1"} <= {name for name, _ in found}, id_
        for name, m in found:
            assert first_failure(m, 5) is not None, (id_, name)
            count += 1
    assert count >= 2 * len(POLYNOMIAL_IDS)
    # the same harness over the DSL transliterations, one site at a time
    for id_, src in bundled_corpus().items():
        for path, label, m in dsl_mutants(src.lhs):
            assert dsl_first_failure(m, src.rhs, src.param, src.param_min, 5) is not None, (id_, path, label)
        for path, label, m in dsl_mutants(src.rhs):
            assert dsl_first_failure(src.lhs, m, src.param, src.param_min, 5) is not None, (id_, path, label)


@criterion(9, "DSL corpus equals native evaluators; 10^4 fuzzed inputs never crash the parser")
def test_dsl_dual_path():
    corpus = bundled_corpus()
    assert set(corpus) == set(POLYNOMIAL_IDS)
    for id_, src in corpus.items():
        ident = REGISTRY[id_]
        for p in range(src.param_min, src.param_max + 1):
            binding = {src.param: p}
            assert evaluate(src.lhs, binding) == RationalFunction.coerce(ident.lhs(p)), (id_, p)
            assert evaluate(src.rhs, binding) == RationalFunction.coerce(ident.rhs(p)), (id_, p)
    tokens = ["sum", "qpow", "qbin", "poch", "binom2", "mod", "n", "k", "q", "(", ")", ",", "+", "-", "*", "/", "^",
              "(-1)", "0", "2", "13", " ", "\n", "#", "."]
    rng = random.Random(9)
    for _ in range(10_000):
        src = "".join(rng.choice(tokens) for _ in range(rng.randint(0, 20)))
        try:
            parse(src)
        except DSLSyntaxError:
            pass


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)

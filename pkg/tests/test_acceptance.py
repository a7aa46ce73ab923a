"""Acceptance suite.  Each test carries ``criterion(n)``; the run ends with one
PASS/FAIL line per criterion (see conftest)."""

import random
import time
from math import comb, factorial

import mpmath
import pytest
from gmpy2 import mpq

from faults import load_with
from wzpi.harness import FAIL, verify_all
from wzpi.hyperterm import parse_term
from wzpi.identity import (certify_identity, check_constant, check_series, product_assembly_check)
from wzpi.numerics.bigfloat import agree, working_context
from wzpi.numerics.constexpr import eval_const
from wzpi.numerics.formal import clausen_check, clausen_derivative_check, clausen_samples, euler_check
from wzpi.numerics.gamma import gamma
from wzpi.wz import find_complement, gosper, zeilberger

criterion = pytest.mark.criterion

PAIRS = ["intro-1", "intro-2"] + [f"eq{i}" for i in range(1, 21)] + ["eq-n1-1", "eq-n1-2", "eq-n4-1", "eq-n4-2"]

CONVERGENT = {
    "1over2": "3*sqrt(3)/pi", "1over9": "2*sqrt(3)/pi", "32over81": "9/(2*pi)", "-1over8": "4*sqrt(3)/(3*pi)",
}
SINGLE = {
    "rama-1over4-1": "4/pi", "rama-n1over8-1": "2*sqrt(2)/pi", "rama-n1over4-1": "8/pi",
    "rama-2-27-1": "27/(4*pi)", "rama-9-64000-1": "160*sqrt(30)/pi", "rama-1-48-1": "16*sqrt(3)/(3*pi)",
}


# 1. certificates -----------------------------------------------------------------------

@criterion(1)
def test_all_certificates_exact_within_budget(catalog):
    start = time.perf_counter()
    for ident in PAIRS:
        proof = certify_identity(catalog[ident], 50, constant=False)
        assert proof.telescoper.order == 1, ident
    assert time.perf_counter() - start < 120


# 2. convergent series at 50 digits ------------------------------------------------------

@pytest.fixture(scope="module")
def series_clock():
    return {"elapsed": 0.0}


def _series(catalog, ident, const, clock):
    start = time.perf_counter()
    e = catalog[ident]
    if const is not None:
        assert e.rhs.const.replace(" ", "") == const
    r = check_series(e, 50)
    clock["elapsed"] += time.perf_counter() - start
    assert r.status == "PASS" and (r.residual_exp is None or r.residual_exp < -50)
    assert r.digits == 50


@criterion(2)
@pytest.mark.parametrize("section", sorted(CONVERGENT))
@pytest.mark.parametrize("member", [0, 1])
def test_convergent_series_pairs(catalog, series_clock, section, member):
    # member 0 is the weightless series with a Gamma-value constant
    _series(catalog, f"rama-{section}-{member}", CONVERGENT[section] if member else None, series_clock)


@criterion(2)
@pytest.mark.parametrize("ident", sorted(SINGLE))
def test_convergent_single_series(catalog, series_clock, ident):
    _series(catalog, ident, SINGLE[ident], series_clock)


@criterion(2)
@pytest.mark.parametrize("ident", sorted(i[:-1] + "0" for i in SINGLE))
def test_weightless_companions(catalog, series_clock, ident):
    _series(catalog, ident, None, series_clock)


@criterion(2)
def test_surd_series_product(catalog, series_clock):
    start = time.perf_counter()
    target = catalog["rama-intro"]
    assert target.rhs.const == "2*sqrt(10+5*sqrt(5))/pi"
    r = product_assembly_check(catalog["intro-1"], catalog["intro-2"], target, 50)
    assert r.residual_exp < -50
    series_clock["elapsed"] += time.perf_counter() - start
    _series(catalog, "rama-intro", target.rhs.const, series_clock)
    assert series_clock["elapsed"] < 180


# 3. alternating series on |z| = 1 -------------------------------------------------------

@criterion(3)
@pytest.mark.parametrize("ident", ["rama-n1-0", "rama-n1-1"])
def test_alternating_series(catalog, ident):
    e = catalog[ident]
    r = check_series(e, 30)
    assert r.status == "PASS" and r.method == "crvz" and r.digits == 30
    assert r.residual_exp < -30
    if ident == "rama-n1-1":
        assert str(e.weight).replace(" ", "") in ("4n+1", "4*n+1")
        assert e.rhs.const == "2/pi"


# 4. the divergent section ---------------------------------------------------------------

@criterion(4)
def test_divergent_entries_skipped_numerically(catalog):
    report = verify_all(catalog, 50, "numeric")
    for ident in ("rama-n4-0", "rama-n4-1"):
        rec = next(r for r in report.records if r.id == ident)
        assert rec.status == "SKIPPED" and rec.reason.startswith("DivergentSeries")
    assert report.exit_code == 0


@criterion(4)
@pytest.mark.parametrize("ident", ["eq-n4-1", "eq-n4-2"], ids=["plain", "weighted"])
def test_divergent_section_certified(catalog, ident):
    proof = certify_identity(catalog[ident], 50, constant=False)
    assert proof.telescoper.order == 1
    assert not proof.boundary.tail_checked


# 5. complement solver -------------------------------------------------------------------

def _contains(sols, b, c):
    return any(format_pair(s) == (b, c) for s in sols)


def format_pair(sol):
    from wzpi.exact import format_scalar
    return tuple(format_scalar(x) for x in sol)


@criterion(5)
@pytest.mark.parametrize("ident,radicand,pair", [
    ("intro-1", 5, ("-1/2+1/2*sqrt(5)", "1/8-1/40*sqrt(5)")),
    ("eq2", None, ("2", "1/12")),
    ("eq4", None, ("1/2", "1/16")),
], ids=["surd", "rational-12", "rational-16"])
def test_complement_solutions(catalog, ident, radicand, pair):
    sols = find_complement(catalog[ident].term, radicand)
    assert _contains(sols, *pair), [format_pair(s) for s in sols]


@criterion(5)
def test_complement_pair_matches_closed_form():
    # (sqrt5 - 1)/2 and (5 - sqrt5)/40 written the other way round
    ctx = working_context(40)
    s5 = ctx.sqrt(5)
    assert agree(ctx, -ctx.mpf(1) / 2 + s5 / 2, (s5 - 1) / 2, 38)
    assert agree(ctx, ctx.mpf(1) / 8 - s5 / 40, (5 - s5) / 40, 38)


# 6. constants at the special points -----------------------------------------------------

SPECIAL = {
    "eq1": mpq(-1, 6), "eq2": mpq(-1, 6), "eq3": mpq(1, 8), "eq4": mpq(1, 8), "eq5": mpq(1, 4),
    "eq6": mpq(1, 4), "intro-1": mpq(1, 4), "intro-2": mpq(1, 4), "eq7": mpq(1, 3), "eq8": mpq(1, 3),
    "eq-n4-1": mpq(-2, 15),
}


@criterion(6)
@pytest.mark.parametrize("ident", sorted(SPECIAL), ids=lambda i: f"k={SPECIAL[i]}-{sorted(SPECIAL).index(i)}")
def test_constant_at_special_point(catalog, ident):
    e = catalog[ident]
    assert e.special_k == SPECIAL[ident]
    c = check_constant(e, 40)
    assert c.status == "PASS" and (c.residual_exp is None or c.residual_exp < -40)


@criterion(6)
def test_second_divergent_member_constant(catalog):
    # both sides vanish at k = -2/15, so the constant is confirmed at k = 0 through
    # the continued hypergeometric function instead
    e = catalog["eq-n4-2"]
    assert check_constant(e, 40).status == "INDETERMINATE"
    mpmath.mp.dps = 60
    try:
        z = mpmath.mpf(-4)
        third = mpmath.mpf(1) / 3
        f = mpmath.hyp3f2(0.5, third, 2 * third, 1, 1, z)
        df = mpmath.hyp3f2(1.5, 1 + third, 1 + 2 * third, 2, 2, z) / 9
        value = 4 * f + 15 * z * df
        expected = 3 * mpmath.sqrt(3) / mpmath.pi
        assert abs(value - expected) < mpmath.mpf(10) ** -40
    finally:
        mpmath.mp.dps = 15
    assert e.rhs.const == "3*sqrt(3)/pi"


# 7. transformations ---------------------------------------------------------------------

@criterion(7)
@pytest.mark.parametrize("which", [1, 2, 3])
def test_clausen_identities(which):
    samples = clausen_samples(which, 20, 30, seed=7)
    assert len(set(samples)) == 20
    for a, b in samples:
        assert clausen_check(which, a, b, 30), (a, b)
        assert clausen_derivative_check(which, a, b, 30), (a, b)


def _euler_cases():
    rng = random.Random(11)
    cases = [(mpq(2, 3), mpq(5, 6), mpq(1), mpq(2, 27))]
    while len(cases) < 10:
        a, b = (mpq(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(2))
        c = mpq(rng.randint(-9, 9), rng.randint(1, 9))
        z = mpq(rng.randint(-9, 9), rng.randint(2, 20))
        if not (a and b and z) or abs(z) >= mpq(1, 2) or (c.denominator == 1 and c <= 0):
            continue
        cases.append((a, b, c, z))
    return cases


@criterion(7)
@pytest.mark.parametrize("a,b,c,z", _euler_cases(), ids=lambda v: str(v))
def test_euler_transformation(a, b, c, z):
    assert euler_check(a, b, c, z, 40)


@criterion(7)
def test_euler_instance_value():
    ctx = working_context(45)
    w = mpq(2, 27) / (mpq(2, 27) - 1)
    mpmath.mp.dps = 60
    try:
        ref = mpmath.hyp2f1(mpmath.mpf(2) / 3, mpmath.mpf(1) / 6, 1, mpmath.mpf(w.numerator) / w.denominator)
        ref *= (mpmath.mpf(25) / 27) ** (-mpmath.mpf(2) / 3)
    finally:
        mpmath.mp.dps = 15
    assert agree(ctx, ctx.mpf(ref), ctx.mpf("1.04363574026753552919299284641301879375064873709580456973679"), 40)


# 8. oracle and property suites ----------------------------------------------------------

def _ratio(num, den="1"):
    from wzpi.poly import RatFunc, poly
    return RatFunc(poly(num), poly(den))


SUMMABLE = [
    (lambda n: mpq(2) ** n, ("2",), 0),
    (lambda n: mpq(n * factorial(n)), ("(n+1)^2", "n"), 1),
    (lambda n: mpq(2 * n + 1), ("2n+3", "2n+1"), 0),
    (lambda n: mpq(n * 2 ** n), ("2n+2", "n"), 1),
    (lambda n: mpq(1, n * (n + 1)), ("n", "n+2"), 1),
    (lambda n: mpq(comb(2 * n, n), 4 ** n), ("n+1/2", "n+1"), 0),
    (lambda n: mpq(n ** 3), ("(n+1)^3", "n^3"), 1),
    (lambda n: mpq((n + 1) * 3 ** n), ("3n+6", "n+1"), 0),
    (lambda n: mpq(int(factorial(n)) * (n * n + n + 1)), ("(n+1)*(n^2+3n+3)", "n^2+n+1"), 0),
    (lambda n: mpq(1, (2 * n + 1) * (2 * n + 3)), ("2n+1", "2n+5"), 0),
]


def _at(f, n):
    return f.num.evaluate("n", n).constant_value() / f.den.evaluate("n", n).constant_value()


@criterion(8)
@pytest.mark.parametrize("case", range(len(SUMMABLE)))
def test_gosper_against_partial_sums(case):
    t, ratio, start = SUMMABLE[case]
    R = gosper(_ratio(*ratio)).R
    for top in range(start, start + 12):
        assert sum(t(j) for j in range(start, top + 1)) == _at(R, top + 1) * t(top + 1) - _at(R, start) * t(start)


@criterion(8)
@pytest.mark.parametrize("ratio", [("n", "n+1"), ("n+1",), ("(n+1/2)^2", "(n+1)^2")])
def test_gosper_rejects_non_summable(ratio):
    from wzpi.wz import NotGosperSummable
    with pytest.raises(NotGosperSummable):
        gosper(_ratio(*ratio))


@criterion(8)
def test_binomial_recurrence():
    tel = zeilberger(parse_term("(-1)^n*poch(-k,n)/poch(1,n)"), 2)
    s0, s1 = (s.constant_value() for s in tel.sigma)
    assert tel.order == 1 and -s0 / s1 == 2
    for k in range(16):
        assert sum(comb(k + 1, n) for n in range(k + 2)) == -s0 / s1 * sum(comb(k, n) for n in range(k + 1))


@criterion(8)
def test_gamma_identities():
    ctx = working_context(40)
    rng = random.Random(2)
    for _ in range(20):
        x = mpq(rng.randint(1, 400), rng.randint(2, 37))
        if x.denominator == 1:
            continue
        xv = ctx.mpf(x.numerator) / x.denominator
        assert agree(ctx, gamma(x + 1, ctx=ctx), xv * gamma(x, ctx=ctx), 38)
        y = x - int(x)
        yv = ctx.mpf(y.numerator) / y.denominator
        assert agree(ctx, gamma(y, ctx=ctx) * gamma(1 - y, ctx=ctx), ctx.pi / ctx.sin(ctx.pi * yv), 38)


@criterion(8)
def test_precision_doubling(catalog):
    from wzpi.identity import lhs_sum
    hi = working_context(110)
    for ident in ("rama-1over2-1", "rama-2-27-1", "rama-intro", "rama-1-48-0"):
        a = lhs_sum(catalog[ident], mpq(0), 50, working_context(60)).value
        b = lhs_sum(catalog[ident], mpq(0), 100, hi).value
        assert agree(hi, hi.mpf(a), b, 50), ident
    for expr in ("160*sqrt(30)/pi", "2*sqrt(10+5*sqrt(5))/pi", catalog["eq1"].rhs.const):
        assert agree(hi, hi.mpf(eval_const(expr, 50)), eval_const(expr, 100), 50), expr


# 9. fault injection ---------------------------------------------------------------------

FAULTS = [
    ("s6-zn9over64000.cat", "160*sqrt(30)/pi", "161*sqrt(30)/pi", "rama-9-64000-1"),
    ("s3-z1over2.cat", "pi*4^(1/3)", "pi*5^(1/3)", "eq1"),
    ("s2-zn1.cat", 'rhs_const = "2/pi";\n    digits', 'rhs_const = "3/pi";\n    digits', "rama-n1-1"),
    ("s3-z1over2.cat", "poch(13/24,k)*poch(19/24,k)", "poch(14/24,k)*poch(19/24,k)", None),
    ("s2-z1over4.cat", "poch(1/2-k,n)*poch(1/2+3k,n)", "poch(1/2-k,n)*poch(1/3+3k,n)", None),
    ("s3-zn4.cat", "poch(11/15,k)^2*poch(14/15,k)^2", "poch(11/15,k)^2*poch(13/15,k)^2", "eq-n4-1"),
    ("s3-z1over2.cat", "geo_base = 27/4", "geo_base = 27/5", None),
    ("s2-z1over4.cat", "geo_base = 16/27", "geo_base = 16/25", None),
]


@criterion(9)
@pytest.mark.parametrize("filename,old,new,culprit", FAULTS, ids=[f"{f[0]}:{f[2][:24]}" for f in FAULTS])
def test_single_fault_single_failure(filename, old, new, culprit):
    report = verify_all(load_with(filename, old, new), 50, "full")
    failures = report.failures
    assert len(failures) == 1, [(r.id, r.check, r.reason) for r in failures]
    assert failures[0].status == FAIL and report.exit_code != 0
    if culprit is not None:
        assert failures[0].id == culprit

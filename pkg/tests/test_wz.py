from math import comb, factorial

import pytest
from gmpy2 import mpq

from wzpi.hyperterm import RhsShape, parse_term
from wzpi.identity import check_constant_in_k
from wzpi.poly import Poly, RatFunc, poly
from wzpi.wz import (CertificateFails, KDependenceDetected, NotGosperSummable, NoTelescoperUpToOrder,
                     find_complement, gosper, verify_telescoper, wz_certificate, wz_function,
                     zeilberger)

N = ("n",)
EQ1 = "poch(1/3+2k,n)*poch(1/6+4k,n)/(poch(1+3k,n)*poch(1,n))*(1/2)^n"


def rf(num, den="1"):
    return RatFunc(poly(num, N), poly(den, N))


def at(f: RatFunc, n):
    return f.num.evaluate("n", n).constant_value() / f.den.evaluate("n", n).constant_value()


def test_gosper_n_factorial():
    # t = n*n!, r = (n+1)^2/n, G = n!
    cert = gosper(rf("(n+1)^2", "n"))
    assert cert.R == rf("1", "n")


def test_gosper_geometric():
    assert gosper(rf("2")).R == rf("1")


def test_gosper_harmonic_not_summable():
    with pytest.raises(NotGosperSummable):
        gosper(rf("n", "n+1"))


def test_zeilberger_binomial():
    tel = zeilberger(parse_term("(-1)^n*poch(-k,n)/poch(1,n)"), 2)
    assert tel.order == 1
    s0, s1 = (s.constant_value() for s in tel.sigma)
    assert s0 / s1 == -2


def test_zeilberger_binomial_brute_force():
    # S(k) = sum_n C(k, n) obeys S(k+1) = 2 S(k)
    for k in range(16):
        assert sum(comb(k + 1, n) for n in range(k + 2)) == 2 * sum(comb(k, n) for n in range(k + 1))


def test_pair_certificate_exists():
    t = parse_term(EQ1)
    rhs = RhsShape("", (mpq(1, 3), 1), (mpq(13, 24), mpq(19, 24)), mpq(27, 4))
    R, Fb, pf, gens = wz_certificate(t, None, rhs)
    one = Poly.const(gens, 1)
    assert verify_telescoper(Fb, pf, [-one, one], R, gens)


def test_perturbed_shape_fails():
    t = parse_term(EQ1)
    rhs = RhsShape("", (mpq(1, 3), 1), (mpq(14, 24), mpq(19, 24)), mpq(27, 4))
    with pytest.raises(CertificateFails):
        wz_certificate(t, None, rhs)


def test_wrong_weight_fails():
    t = parse_term(EQ1)
    rhs = RhsShape("", (mpq(1, 3), 1), (mpq(1, 24), mpq(7, 24)), mpq(27, 4))
    with pytest.raises(CertificateFails):
        wz_certificate(t, poly("12n+24k+2"), rhs)


def test_generic_term_has_no_first_order_recurrence():
    t = parse_term("poch(1/2,n)^2*poch(1/3+k,n)*poch(1/5+2k,n)/(poch(1,n)^2*poch(1+k,n)*poch(2/7-k,n))*(3/7)^n")
    with pytest.raises(NoTelescoperUpToOrder):
        zeilberger(t, 1)


def test_complement_for_rational_term():
    t = parse_term("poch(1/8-k,n)*poch(3/8-k,n)/(poch(1+2k,n)*poch(1,n))*(1/9)^n")
    sols = find_complement(t)
    assert (mpq(1, 2), mpq(1, 16)) in sols
    for b, c in sols:
        w = poly("n") + poly("k") * b + c
        assert zeilberger(t, 1, weight=w).order == 1


def test_all_catalog_certificates_verify(catalog):
    for e in catalog.of_kind("pair"):
        R, Fb, pf, gens = wz_certificate(e.term, e.weight, e.rhs)
        one = Poly.const(gens, 1)
        assert verify_telescoper(Fb, pf, [-one, one], R, gens), e.id


def test_wz_function_is_term_over_shape(catalog):
    from wzpi.exact import to_mpf
    from wzpi.hyperterm import eval_term
    from wzpi.numerics.bigfloat import working_context
    from wzpi.numerics.series import rhs_shape_value

    ctx = working_context(30)
    e = catalog["eq6"]
    Fb, pf, gens = wz_function(e.term, e.weight, e.rhs)
    for n, k in ((0, 0), (3, 2), (5, mpq(1, 3))):
        w = at(e.weight.substitute("k", k), n)
        lhs = to_mpf(eval_term(Fb.with_prefactor(pf), n, k, ctx=ctx), ctx)
        rhs = to_mpf(eval_term(e.term, n, k, ctx=ctx), ctx) * to_mpf(w, ctx) / rhs_shape_value(e.rhs, k, ctx=ctx)
        assert abs(lhs - rhs) <= abs(rhs) * ctx.mpf(10) ** -28


def test_constant_independent_of_k(catalog):
    values = check_constant_in_k(catalog["eq5"], [0, mpq(1, 10), mpq(1, 4)], 40)
    assert len(values) == 3


def test_constant_collapses_at_special_point(catalog):
    check_constant_in_k(catalog["eq1"], [0, mpq(-1, 6)], 40)


def test_corrupted_geometric_base_detected(catalog):
    from dataclasses import replace

    e = catalog["eq1"]
    bad = replace(e, rhs=RhsShape(e.rhs.const, e.rhs.k_poch_numer, e.rhs.k_poch_denom, mpq(27, 5)))
    with pytest.raises(KDependenceDetected):
        check_constant_in_k(bad, [0, mpq(1, 10), mpq(-1, 6)], 30)


def test_analytic_entries_not_sampled(catalog):
    assert check_constant_in_k(catalog["eq-n4-1"], [0, mpq(1, 10)]) == []


# Gosper against brute-force partial sums ---------------------------------------------

SUMMABLE = [
    ("2^n", lambda n: mpq(2) ** n, rf("2"), 0),
    ("n*n!", lambda n: mpq(n * factorial(n)), rf("(n+1)^2", "n"), 1),
    ("2n+1", lambda n: mpq(2 * n + 1), rf("2n+3", "2n+1"), 0),
    ("n*2^n", lambda n: mpq(n * 2 ** n), rf("2n+2", "n"), 1),
    ("1/(n(n+1))", lambda n: mpq(1, n * (n + 1)), rf("n", "n+2"), 1),
    ("(1/2)_n/n!", lambda n: mpq(comb(2 * n, n), 4 ** n), rf("n+1/2", "n+1"), 0),
    ("n^3", lambda n: mpq(n ** 3), rf("(n+1)^3", "n^3"), 1),
    ("(n+1)3^n", lambda n: mpq((n + 1) * 3 ** n), rf("3n+6", "n+1"), 0),
    ("n!(n^2+n+1)", lambda n: mpq(factorial(n) * (n * n + n + 1)), rf("(n+1)*(n^2+3n+3)", "n^2+n+1"), 0),
    ("1/((2n+1)(2n+3))", lambda n: mpq(1, (2 * n + 1) * (2 * n + 3)), rf("2n+1", "2n+5"), 0),
]

NOT_SUMMABLE = [
    ("1/n", rf("n", "n+1")),
    ("n!", rf("n+1")),
    ("((1/2)_n/n!)^2", rf("(n+1/2)^2", "(n+1)^2")),
]


@pytest.mark.parametrize("name,t,ratio,start", SUMMABLE, ids=[s[0] for s in SUMMABLE])
def test_gosper_partial_sums(name, t, ratio, start):
    for n in range(start, start + 15):
        assert t(n + 1) == t(n) * at(ratio, n)
    R = gosper(ratio).R

    def G(n):
        return at(R, n) * t(n)

    for top in range(start, start + 20):
        assert sum(t(j) for j in range(start, top + 1)) == G(top + 1) - G(start)


@pytest.mark.parametrize("name,ratio", NOT_SUMMABLE, ids=[s[0] for s in NOT_SUMMABLE])
def test_gosper_rejects(name, ratio):
    with pytest.raises(NotGosperSummable):
        gosper(ratio)

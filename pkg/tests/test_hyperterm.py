import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from wzpi.exact import to_mpf
from wzpi.expr import ParseError, UnknownVariable
from wzpi.hyperterm import (NonAffineArgument, PoleEncountered, eval_term, parse_term, poch_value,
                            render_term, shift_quotient)
from wzpi.numerics.bigfloat import working_context
from wzpi.poly import RatFunc, poly

EQ1 = "poch(1/3+2k,n)*poch(1/6+4k,n)/(poch(1+3k,n)*poch(1,n))*(1/2)^n"


def test_parse_alternating_summand():
    t = parse_term("poch(1/2,n)^3 / poch(1,n)^3 * (-1)^n")
    assert t.z_base == -1
    assert len(t.numer_poch) == 3 and len(t.denom_poch) == 3


def test_parse_pair_summand():
    t = parse_term(EQ1)
    args = sorted((p.arg.const, p.arg.k_coeff) for p in t.numer_poch)
    assert args == [(mpq(1, 6), 4), (mpq(1, 3), 2)]
    assert t.z_base == mpq(1, 2)


def test_running_index_inside_argument_rejected():
    with pytest.raises(NonAffineArgument):
        parse_term("poch(n,k)")


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        parse_term("poch(1/2+m,n)")


def test_syntax_error_position():
    with pytest.raises(ParseError) as info:
        parse_term("poch(1/2,n")
    assert info.value.col >= 1


def test_shift_quotient_in_n():
    t = parse_term("poch(1/2,n)^3/poch(1,n)^3*(-1)^n")
    expected = RatFunc(-poly("(n+1/2)^3"), poly("(n+1)^3"))
    assert shift_quotient(t, "n") == expected


def test_shift_quotient_in_k():
    assert shift_quotient(parse_term("poch(1+k,n)"), "k") == RatFunc(poly("1+k+n"), poly("1+k"))


def test_shift_quotient_k_independent():
    assert shift_quotient(parse_term("(1/3)^n"), "k") == RatFunc(poly("1"))


def test_eval_empty_products():
    t = parse_term("poch(1/2,n)*poch(1/3,n)*poch(2/3,n)/poch(1,n)^3*(1/2)^n")
    assert eval_term(t, 0, 0) == 1


def test_poch_value():
    assert poch_value(mpq(1, 2), 3) == mpq(15, 8)
    assert eval_term(parse_term("poch(1/2,n)"), 3, 0) == mpq(15, 8)


def test_eval_vanishes_at_special_point():
    assert eval_term(parse_term(EQ1), 1, mpq(-1, 6)) == 0


def test_eval_pole():
    with pytest.raises(PoleEncountered):
        eval_term(parse_term("1/poch(-2,n)"), 4, 0)


def test_catalog_terms_round_trip(catalog):
    for e in catalog:
        if e.term is not None:
            assert parse_term(render_term(e.term)) == e.term, e.id


def test_ratio_matches_shift_quotient():
    rng = random.Random(7)
    ctx = working_context(40)
    t = parse_term(EQ1)
    q = shift_quotient(t, "n")
    for _ in range(20):
        n = rng.randint(0, 30)
        k = mpq(rng.randint(-20, 20), rng.randint(1, 13))
        try:
            a, b = eval_term(t, n, k, ctx=ctx), eval_term(t, n + 1, k, ctx=ctx)
        except PoleEncountered:
            continue
        num = q.num.evaluate("n", n).evaluate("k", k).constant_value()
        den = q.den.evaluate("n", n).evaluate("k", k).constant_value()
        if not a or not den:
            continue
        ratio = to_mpf(b, ctx) / to_mpf(a, ctx)
        assert abs(ratio - to_mpf(num / den, ctx)) <= abs(ratio) * ctx.mpf(10) ** -35 + ctx.mpf(10) ** -35


@given(st.fractions(min_value=-10, max_value=10, max_denominator=12).map(mpq),
       st.integers(0, 20), st.integers(0, 20))
def test_pochhammer_splitting(a, m, p):
    assert poch_value(a, m + p) == poch_value(a, m) * poch_value(a + m, p)

"""Summation of hypergeometric series in n at a fixed exact k.

Terms are produced by the recurrence a(n+1) = a(n) r(n) with r(n) an exact
rational number, so only the running product is a big float.  For |z| < 1 the
sum stops once a rigorous bound on the tail falls below the target: with
r(x) = p(x)/q(x) and p, q written as lc*x^d*(1 + lower terms), for x >= 1

    |r(x)| <= |lc_p/lc_q| x^(dp-dq) (1 + S_p/x) / (1 - S_q/x),

where S is the sum of the absolute values of the non-leading coefficients of
the monic polynomial.  The right side decreases in x, so once it is below 1
the remaining terms are dominated by a geometric series.

Alternating series with |z| = 1 use the Cohen-Rodriguez Villegas-Zagier
acceleration, whose error after m steps is about 2|S|/(3+sqrt 8)^m.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from gmpy2 import mpq

from ..exact import as_rational, to_mpf
from ..hyperterm import HyperTerm, PoleEncountered, RhsShape
from ..poly import Poly, RatFunc
from .bigfloat import working_context
from .gamma import rgamma

MAX_TERMS = 200_000


class DivergentSeries(ArithmeticError):
    pass


class PrecisionUnreachable(ArithmeticError):
    pass


@dataclass
class SeriesSum:
    value: object
    terms: int
    tail_bound: object
    method: str  # 'terminating', 'tail-bound', 'crvz'
    ms: float = 0.0


def _num(x, ctx):
    return to_mpf(x, ctx)


def _is_nonpos_int(x) -> bool:
    q = as_rational(x)
    return q is not None and q.denominator == 1 and q <= 0


def _fixed_weight(weight, k) -> RatFunc | None:
    if weight is None:
        return None
    if isinstance(weight, Poly):
        weight = RatFunc(weight, normalize=False)
    return weight.substitute("k", k)


def _value_at(f: RatFunc | None, n: int):
    if f is None:
        return mpq(1)
    num = f.num.evaluate("n", n).constant_value()
    den = f.den.evaluate("n", n).constant_value()
    if not den:
        raise PoleEncountered(f"weight has a pole at n={n}")
    return num / den


def _poly_coeffs(p: Poly) -> list:
    cs = p.coeffs_in("n")
    return [cs[i].constant_value() if i in cs else mpq(0) for i in range(max(cs) + 1)]


def _tail_profile(z, numer, denom, f: RatFunc | None):
    """(lc ratio, degree excess, S_p, S_q) for r(x) = z prod(x+a)/prod(x+b) * f(x+1)/f(x)."""
    gens = ("n",)
    x = Poly.var(gens, "n")
    p = Poly.const(gens, 1)
    q = Poly.const(gens, 1)
    for a in numer:
        p = p * (x + a)
    for b in denom:
        q = q * (x + b)
    if f is not None:
        fn, fd = f.num.set_gens(gens), f.den.set_gens(gens)
        p = p * fn.shift("n", 1) * fd
        q = q * fd.shift("n", 1) * fn
    pc, qc = _poly_coeffs(p), _poly_coeffs(q)
    lp, lq = pc[-1], qc[-1]
    sp = sum(abs(float(c / lp)) for c in pc[:-1])
    sq = sum(abs(float(c / lq)) for c in qc[:-1])
    return abs(float(z)) * abs(float(lp / lq)), len(pc) - len(qc), sp, sq


def _ratio_bound(profile, x: float) -> float:
    lc, excess, sp, sq = profile
    if x < 1 or x <= sq:
        return math.inf
    return lc * x ** excess * (1 + sp / x) / (1 - sq / x)


def _pochs_at_k(term: HyperTerm, k):
    """Constant Pochhammer parameters of the n-part of ``term`` at k, plus z and the prefactor."""
    if term.w_base != 1 or any(p.index == "k" for p in term.numer_poch + term.denom_poch):
        raise ValueError("series terms may only contain Pochhammers running in n")
    numer = [p.arg.value(0, k) for p in term.numer_poch]
    denom = [p.arg.value(0, k) for p in term.denom_poch]
    pf = term.prefactor.substitute("k", k)
    return numer, denom, term.z_base, pf


def sum_series(term: HyperTerm, k=0, digits: int = 50, weight=None, ctx=None,
               max_terms: int = MAX_TERMS) -> SeriesSum:
    """Sum over n >= 0 of term(n, k) * weight(n, k) at exact k."""
    start = time.perf_counter()
    k = mpq(k) if isinstance(k, int) else k
    numer, denom, z, pf = _pochs_at_k(term, k)
    f = _fixed_weight(weight, k)
    f = pf if f is None else pf * f
    if f.is_zero():
        ctx = ctx or working_context(digits)
        return SeriesSum(ctx.mpf(0), 0, ctx.mpf(0), "terminating", 0.0)
    ctx = ctx or working_context(digits)

    stop = None
    for a in numer:
        if _is_nonpos_int(a):
            m = -int(as_rational(a))
            stop = m if stop is None else min(stop, m)
    for b in denom:
        if _is_nonpos_int(b) and (stop is None or -int(as_rational(b)) < stop):
            raise PoleEncountered(f"denominator Pochhammer ({b})_n vanishes")

    if stop is not None:
        total, u = ctx.mpf(0), mpq(1)
        for n in range(stop + 1):
            total += _num(u * _value_at(f, n), ctx)
            u = u * _ratio_at(n, numer, denom) * z
        return SeriesSum(total, stop + 1, ctx.mpf(0), "terminating",
                         (time.perf_counter() - start) * 1000)

    absz = abs(float(z))
    if absz > 1 + 1e-12:
        raise DivergentSeries(f"|z| = {absz} > 1")
    profile = _tail_profile(z, numer, denom, f)
    if profile[1] > 0:
        raise DivergentSeries("terms grow factorially")
    if profile[1] == 0 and abs(profile[0] - 1) < 1e-12:
        if float(z) < 0:
            return _crvz(numer, denom, z, f, digits, ctx, start)
        raise DivergentSeries("ratio tends to 1; only alternating series are handled at |z| = 1")

    eps = ctx.mpf(10) ** (-(digits + 5))
    total = ctx.mpf(0)
    u = ctx.mpf(1)
    zc = _num(z, ctx)
    for n in range(max_terms):
        total += u * _num(_value_at(f, n), ctx)
        u = u * _num(_ratio_at(n, numer, denom), ctx) * zc
        rho = _ratio_bound(profile, float(n + 1))
        if rho < 1:
            bound = abs(u * _num(_value_at(f, n + 1), ctx)) / (1 - ctx.mpf(rho))
            if bound <= eps * max(abs(total), ctx.mpf(10) ** -30):
                return SeriesSum(total, n + 1, bound, "tail-bound", (time.perf_counter() - start) * 1000)
    raise PrecisionUnreachable(f"tail bound not reached after {max_terms} terms")


def _ratio_at(n, numer, denom):
    """prod (a+n) / prod (b+n), exact."""
    num = mpq(1)
    den = mpq(1)
    for a in numer:
        num = num * (a + n)
    for b in denom:
        den = den * (b + n)
    return num / den


def _crvz(numer, denom, z, f, digits, ctx, start) -> SeriesSum:
    """Alternating sum by the Cohen-Rodriguez Villegas-Zagier weights, checked at two lengths."""
    m = int(math.ceil(1.31 * digits)) + 10

    def run(m):
        b = []
        u = ctx.mpf(1)
        for n in range(m):
            b.append((-1) ** n * u * _num(_value_at(f, n), ctx))
            u = u * _num(_ratio_at(n, numer, denom) * z, ctx)
        d = (3 + ctx.sqrt(8)) ** m
        d = (d + 1 / d) / 2
        bb, c, s = ctx.mpf(-1), -d, ctx.mpf(0)
        for j in range(m):
            c = bb - c
            s += c * b[j]
            bb = bb * (j + m) * (j - m) / ((j + ctx.mpf(1) / 2) * (j + 1))
        return s / d

    v1 = run(m)
    v2 = run(m + 10)
    if abs(v1 - v2) > abs(v2) * ctx.mpf(10) ** (-(digits + 2)):
        raise PrecisionUnreachable("alternating acceleration did not stabilize")
    bound = 2 * abs(v2) / (3 + ctx.sqrt(8)) ** (m + 10)
    return SeriesSum(v2, m + 10, bound, "crvz", (time.perf_counter() - start) * 1000)


# right-hand sides ------------------------------------------------------------------

def rhs_shape_value(shape: RhsShape, k, digits: int = 50, ctx=None):
    """prod (a)_k / prod (b)_k * geo^k at exact k, via Gamma(a+k)/Gamma(a)."""
    ctx = ctx or working_context(digits)
    k = mpq(k) if isinstance(k, int) else k
    q = as_rational(k)
    if q is not None and q.denominator == 1 and q >= 0:
        out = mpq(1)
        for a in shape.k_poch_numer:
            for i in range(int(q)):
                out = out * (a + i)
        for b in shape.k_poch_denom:
            for i in range(int(q)):
                out = out / (b + i) if (b + i) else _raise_pole(b)
        return _num(out * shape.geo_base ** int(q), ctx)
    kv = _num(k, ctx)
    val = ctx.mpf(1)
    for a in shape.k_poch_numer:
        top, bottom = rgamma(_num(a, ctx), ctx=ctx), rgamma(_num(a + k, ctx), ctx=ctx)
        if not bottom:
            raise PoleEncountered(f"({a})_k has a pole at k={k}")
        if not top:
            raise PoleEncountered(f"({a})_k is indeterminate at k={k}")
        val *= top / bottom
    for b in shape.k_poch_denom:
        top, bottom = rgamma(_num(b, ctx), ctx=ctx), rgamma(_num(b + k, ctx), ctx=ctx)
        if not top:
            raise PoleEncountered(f"1/({b})_k has a pole at k={k}")
        val *= bottom / top
    if shape.geo_base != 1:
        g = _num(shape.geo_base, ctx)
        if g <= 0:
            raise ValueError("non-integer power of a non-positive base")
        val *= ctx.power(g, kv)
    return val


def _raise_pole(b):
    raise PoleEncountered(f"1/({b})_k vanishes")


__all__ = ["sum_series", "SeriesSum", "rhs_shape_value", "DivergentSeries", "PrecisionUnreachable"]

"""Gamma function from the Stirling series.

For x >= 1/2 the argument is shifted up to y = x + m, large enough that the
asymptotic series for log Gamma(y) reaches the working precision before its
terms start growing; Gamma(x) = exp(log Gamma(y)) / (x)_m.  Smaller arguments
go through the reflection formula.
"""

from __future__ import annotations

import math
from functools import lru_cache

from gmpy2 import mpq

from ..exact import QuadSurd, is_rational, to_mpf
from .bigfloat import working_context


class PoleAtNonPositiveInteger(ValueError):
    pass


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> tuple:
    """B_0 .. B_m as exact rationals (B_1 = -1/2)."""
    b = [mpq(1)]
    for j in range(1, m + 1):
        s = mpq(0)
        binom = 1
        for i in range(j):
            s += binom * b[i]
            binom = binom * (j + 1 - i) // (i + 1)
        b.append(-s / (j + 1))
    return tuple(b)


def bernoulli(m: int):
    return _bernoulli_table(max(m, 1))[m]


def _as_ctx_value(x, ctx):
    if isinstance(x, (int, QuadSurd)) or is_rational(x):
        return to_mpf(x, ctx)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return ctx.mpf(int(x.numerator)) / int(x.denominator)
    return ctx.mpf(x)


def _nonpositive_integer(x) -> bool:
    if is_rational(x) or isinstance(x, int):
        q = mpq(x)
        return q.denominator == 1 and q <= 0
    if isinstance(x, QuadSurd):
        return x.b == 0 and x.a.denominator == 1 and x.a <= 0
    return False


def _log_gamma_shifted(y, ctx):
    """log Gamma(y) for y large enough that the Stirling series converges to ctx precision."""
    eps = ctx.mpf(2) ** (-ctx.prec - 8)
    s = (y - ctx.mpf(1) / 2) * ctx.log(y) - y + ctx.log(2 * ctx.pi) / 2
    y2 = y * y
    ypow = y
    j = 1
    prev = None
    while True:
        b = bernoulli(2 * j)
        term = ctx.mpf(b.numerator) / (b.denominator * (2 * j) * (2 * j - 1)) / ypow
        s += term
        if abs(term) < eps * abs(s):
            break
        if prev is not None and abs(term) > prev:
            raise ArithmeticError("Stirling series diverged before reaching precision")
        prev = abs(term)
        ypow *= y2
        j += 1
    return s


def _gamma_core(x, ctx):
    """Gamma(x) for real x >= 1/2 in ctx."""
    digits = int(ctx.prec / 3.33) + 1
    threshold = digits // 2 + 10
    m = max(0, int(math.ceil(threshold - float(x))))
    inner = working_context(0, extra_bits=ctx.prec + 32 + max(8, int(math.log2(threshold + m + 2)) * 2))
    xi = inner.mpf(x)
    y = xi + m
    lg = _log_gamma_shifted(y, inner)
    val = inner.exp(lg)
    if m:
        p = inner.mpf(1)
        for i in range(m):
            p *= xi + i
        val /= p
    return ctx.mpf(val)


def gamma(x, digits: int = 50, ctx=None):
    """Gamma(x) with relative error below 10**-digits (or at ctx precision)."""
    if _nonpositive_integer(x):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {x}")
    if ctx is None:
        ctx = working_context(digits)
    xv = _as_ctx_value(x, ctx)
    if xv <= 0 and xv == int(xv):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {x}")
    if xv >= ctx.mpf(1) / 2:
        return _gamma_core(xv, ctx)
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    hi = working_context(0, extra_bits=ctx.prec + 32)
    xh = hi.mpf(xv) if not (is_rational(x) or isinstance(x, int)) else _as_ctx_value(x, hi)
    s = hi.sinpi(xh)
    return ctx.mpf(hi.pi / (s * _gamma_core(1 - xh, hi)))


def rgamma(x, digits: int = 50, ctx=None):
    """1/Gamma(x), which is zero at the non-positive integers."""
    if ctx is None:
        ctx = working_context(digits)
    if _nonpositive_integer(x):
        return ctx.mpf(0)
    xv = _as_ctx_value(x, ctx)
    if xv <= 0 and xv == int(xv):
        return ctx.mpf(0)
    return 1 / gamma(xv if not (is_rational(x) or isinstance(x, int)) else x, ctx=ctx)


def log_gamma(x, digits: int = 50, ctx=None):
    """log Gamma(x) for real x > 0."""
    if ctx is None:
        ctx = working_context(digits)
    xv = _as_ctx_value(x, ctx)
    if xv <= 0:
        raise ValueError("log_gamma needs a positive argument")
    digits_eff = int(ctx.prec / 3.33) + 1
    threshold = digits_eff // 2 + 10
    m = max(0, int(math.ceil(threshold - float(xv))))
    inner = working_context(0, extra_bits=ctx.prec + 32)
    xi = inner.mpf(xv)
    lg = _log_gamma_shifted(xi + m, inner)
    for i in range(m):
        lg -= inner.log(xi + i)
    return ctx.mpf(lg)

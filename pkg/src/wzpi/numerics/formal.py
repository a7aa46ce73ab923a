"""Truncated power series with exact coefficients, and the Clausen/Euler checks.

The three Clausen-type identities are checked coefficient by coefficient at
sampled rational parameters (a, b).  The third one carries the factor
(1 - z)^(-a); it is cleared by multiplying the left side with the binomial
series of (1 - z)^a, and the argument z^2/(4(z-1)) is expanded as a formal
composition.  Euler's transformation is checked numerically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from ..exact import as_rational
from ..hyperterm import AffineArg, HyperTerm, Poch
from .bigfloat import agree, residual_exponent, working_context
from .series import sum_series


class ParameterPole(ZeroDivisionError):
    pass


class ConvergenceViolation(ValueError):
    pass


class FormalSeries:
    """sum_{i<=N} c_i z^i with exact coefficients; products truncate at N."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(mpq(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("a formal series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> FormalSeries:
        return cls([c] + [0] * order)

    @classmethod
    def variable(cls, order: int) -> FormalSeries:
        return cls([0, 1] + [0] * (order - 1)) if order >= 1 else cls([0])

    def __eq__(self, other):
        return isinstance(other, FormalSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _check(self, other):
        if other.order != self.order:
            raise ValueError("truncation orders differ")

    def __add__(self, other):
        self._check(other)
        return FormalSeries(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return FormalSeries(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return FormalSeries(-a for a in self.coeffs)

    def scale(self, c) -> FormalSeries:
        return FormalSeries(a * c for a in self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        self._check(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = [mpq(0)] * (n + 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j in range(n + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return FormalSeries(out)

    __rmul__ = __mul__

    def derivative(self) -> FormalSeries:
        """Term-by-term d/dz; the result has order N-1 (a single 0 when N = 0)."""
        if self.order == 0:
            return FormalSeries([0])
        return FormalSeries(i * c for i, c in enumerate(self.coeffs) if i)

    def compose(self, inner: FormalSeries) -> FormalSeries:
        """self(inner(z)) for inner with zero constant term (Horner)."""
        self._check(inner)
        if inner.coeffs[0]:
            raise ValueError("inner series must have zero constant term")
        out = FormalSeries.constant(self.coeffs[-1], self.order)
        for c in reversed(self.coeffs[:-1]):
            out = out * inner + FormalSeries.constant(c, self.order)
        return out

    def first_difference(self, other) -> int | None:
        self._check(other)
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return i
        return None

    def __repr__(self):
        return f"FormalSeries({[str(c) for c in self.coeffs]})"


def binomial_series(alpha, order: int, sign: int = -1) -> FormalSeries:
    """(1 + sign*z)^alpha for rational alpha."""
    alpha = mpq(alpha)
    coeffs = [mpq(1)]
    for i in range(1, order + 1):
        coeffs.append(coeffs[-1] * (alpha - i + 1) / i * sign)
    return FormalSeries(coeffs)


def hypergeometric_series(numer, denom, order: int) -> FormalSeries:
    """sum prod (a)_n / prod (b)_n z^n; the caller lists (1)_n explicitly."""
    numer = [mpq(a) for a in numer]
    denom = [mpq(b) for b in denom]
    for b in denom:
        if b.denominator == 1 and b <= 0 and -b < order:
            raise ParameterPole(f"denominator Pochhammer ({b})_n vanishes below order {order}")
    coeffs = [mpq(1)]
    for n in range(order):
        c = coeffs[-1]
        for a in numer:
            c *= a + n
        for b in denom:
            c /= b + n
        coeffs.append(c)
    return FormalSeries(coeffs)


# Clausen-type identities -------------------------------------------------------------

def _clausen_argument(which: int, order: int) -> FormalSeries:
    z = FormalSeries.variable(order)
    if which == 1:
        return z
    if which == 2:
        return (z * (FormalSeries.constant(1, order) - z)).scale(4)
    # z^2 / (4(z - 1)) = -(z^2/4) / (1 - z)
    return (z * z * binomial_series(-1, order)).scale(mpq(-1, 4))


def clausen_sides(which: int, a, b, order: int, argument: FormalSeries | None = None):
    """(left, right) coefficient lists of identity ``which`` at (a, b).

    For identity 3 the left side is multiplied by (1 - z)^a so both sides are
    power series without the prefactor.
    """
    a, b = mpq(a), mpq(b)
    one = mpq(1)
    if which == 1:
        base = hypergeometric_series([a, b], [a + b + one / 2, one], order)
        top = hypergeometric_series([2 * a, 2 * b, a + b], [a + b + one / 2, 2 * a + 2 * b, one], order)
    elif which == 2:
        base = hypergeometric_series([a, b], [(a + b + 1) / 2, one], order)
        top = hypergeometric_series([a, b, (a + b) / 2], [(a + b + 1) / 2, a + b, one], order)
    elif which == 3:
        base = hypergeometric_series([a, b], [2 * b, one], order)
        top = hypergeometric_series([a, b, 2 * b - a], [b + one / 2, 2 * b, one], order)
    else:
        raise ValueError("which must be 1, 2 or 3")
    left = base * base
    if which == 3:
        left = left * binomial_series(a, order)
    inner = argument if argument is not None else _clausen_argument(which, order)
    right = top.compose(inner)
    return left, right


def clausen_samples(which: int, count: int = 20, order: int = 30, seed: int = 0, bound: int = 12) -> list:
    """Deterministic random (a, b) with numerators and denominators up to ``bound``
    that keep every Pochhammer of identity ``which`` away from its poles."""
    rng = random.Random(seed * 31 + which)
    out = []
    while len(out) < count:
        a = mpq(rng.randint(-bound, bound), rng.randint(1, bound))
        b = mpq(rng.randint(-bound, bound), rng.randint(1, bound))
        try:
            clausen_sides(which, a, b, 1)
            clausen_sides(which, a, b, order)
        except (ParameterPole, ZeroDivisionError):
            continue
        out.append((a, b))
    return out


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    first_failure: int | None = None
    detail: str = ""

    def __bool__(self):
        return self.passed


def clausen_check(which: int, a, b, order: int, argument: FormalSeries | None = None) -> CheckResult:
    left, right = clausen_sides(which, a, b, order, argument)
    idx = left.first_difference(right)
    return CheckResult(idx is None, idx)


def clausen_derivative_check(which: int, a, b, order: int) -> CheckResult:
    if order == 0:
        return CheckResult(True, None, "vacuous")
    left, right = clausen_sides(which, a, b, order)
    idx = left.derivative().first_difference(right.derivative())
    return CheckResult(idx is None, idx)


# Euler's transformation --------------------------------------------------------------

def _two_f_one(a, b, c, z, digits, ctx):
    if not z or not a or not b:
        return ctx.mpf(1)
    term = HyperTerm((Poch(AffineArg(a), "n"), Poch(AffineArg(b), "n")),
                     (Poch(AffineArg(c), "n"), Poch(AffineArg(1), "n")), z)
    return sum_series(term, 0, digits, ctx=ctx).value


def euler_check(a, b, c, z, digits: int = 40) -> CheckResult:
    """2F1(a,b;c;z) = (1-z)^(-a) 2F1(a,c-b;c;z/(z-1)), numerically."""
    a, b, c, z = (mpq(x) for x in (a, b, c, z))
    if abs(z) >= mpq(1, 2):
        raise ConvergenceViolation("need |z| < 1/2 so that z/(z-1) stays in the unit disk")
    if as_rational(c).denominator == 1 and c <= 0:
        raise ParameterPole(f"c = {c} is a non-positive integer")
    ctx = working_context(digits + 10)
    left = _two_f_one(a, b, c, z, digits + 10, ctx)
    w = z / (z - 1) if z else mpq(0)
    right = _two_f_one(a, c - b, c, w, digits + 10, ctx)
    one_minus = ctx.mpf(int((1 - z).numerator)) / int((1 - z).denominator)
    right *= ctx.power(one_minus, -ctx.mpf(int(a.numerator)) / int(a.denominator))
    ok = agree(ctx, left, right, digits)
    exp = residual_exponent(ctx, left, right)
    return CheckResult(ok, None if ok else 0, f"residual exponent {exp}")


__all__ = [
    "FormalSeries", "binomial_series", "hypergeometric_series", "clausen_sides", "clausen_check",
    "clausen_derivative_check", "clausen_samples", "euler_check", "CheckResult", "ParameterPole", "ConvergenceViolation",
]

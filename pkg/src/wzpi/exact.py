"""Exact scalars: rationals (gmpy2.mpq) and elements a + b*sqrt(d) of a quadratic field."""

from __future__ import annotations

import re

import gmpy2
from gmpy2 import mpq, mpz

Rational = type(mpq(0))
_RATIONAL_TYPES = (int, type(mpz(0)), Rational)


class MixedRadicand(ValueError):
    """Two quadratic surds with different radicands were combined."""


def rational(x, den=None) -> Rational:
    """Coerce ints, strings like '3/4', Fractions or mpq values to mpq."""
    if den is not None:
        return mpq(x, den)
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        return mpq(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpq(int(x.numerator), int(x.denominator))
    return mpq(x)


def is_rational(x) -> bool:
    return isinstance(x, _RATIONAL_TYPES)


def squarefree_part(d: int) -> tuple[int, int]:
    """Return (s, m) with d = s * m**2 and s square-free."""
    d = int(d)
    if d <= 0:
        raise ValueError(f"radicand must be positive, got {d}")
    s, m = 1, 1
    p = 2
    rest = d
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e:
            m *= p ** (e // 2)
            if e % 2:
                s *= p
        p += 1
    return s * rest, m


class QuadSurd:
    """An element a + b*sqrt(d) of Q(sqrt(d)), d square-free and at least 2.

    Values are immutable.  Operands with b == 0 interoperate freely with
    plain rationals; combining two different radicands raises MixedRadicand.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 5):
        d = int(d)
        s, m = squarefree_part(d)
        if s < 2:
            raise ValueError(f"sqrt({d}) is rational")
        self.a = rational(a)
        self.b = rational(b) * m
        self.d = s

    @classmethod
    def _make(cls, a, b, d):
        obj = object.__new__(cls)
        obj.a = a
        obj.b = b
        obj.d = d
        return obj

    # coercion -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                if other.b == 0:
                    return other.a, mpq(0)
                if self.b == 0:
                    return None  # handled by caller via swap
                raise MixedRadicand(f"sqrt({self.d}) combined with sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, _RATIONAL_TYPES):
            return mpq(other), mpq(0)
        return NotImplemented

    def _binary(self, other, op):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            # self is rational in disguise, other carries the radicand
            return op(QuadSurd._make(self.a, self.b, other.d), other)
        return op(self, c)

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            return QuadSurd._make(self.a + other.a, other.b, other.d)
        return QuadSurd._make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd._make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            return QuadSurd._make(self.a - other.a, -other.b, other.d)
        return QuadSurd._make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if c is None:
            return QuadSurd._make(self.a * other.a, self.a * other.b, other.d)
        x, y = c
        if y == 0:
            return QuadSurd._make(self.a * x, self.b * x, self.d)
        return QuadSurd._make(self.a * x + self.d * self.b * y, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> QuadSurd:
        return QuadSurd._make(self.a, -self.b, self.d)

    def norm(self) -> Rational:
        return self.a * self.a - self.d * self.b * self.b

    def invert(self) -> QuadSurd:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadSurd._make(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadSurd):
            if other.b == 0:
                other = other.a
            else:
                return self * other.invert()
        if isinstance(other, _RATIONAL_TYPES):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return QuadSurd._make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self.invert() * other
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.invert() ** (-e)
        result = QuadSurd._make(mpq(1), mpq(0), self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadSurd):
            if self.b == 0 and other.b == 0:
                return self.a == other.a
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, _RATIONAL_TYPES):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        """Sign of the real number a + b*sqrt(d), decided exactly."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d b^2
        return sa if self.a * self.a > self.d * self.b * self.b else sb

    def __float__(self):
        return float(self.a) + float(self.b) * self.d ** 0.5

    def __repr__(self):
        return f"QuadSurd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


Scalar = Rational | QuadSurd


def surd_conjugate(x):
    if isinstance(x, QuadSurd):
        return x.conjugate()
    return rational(x)


def surd_norm(x):
    if isinstance(x, QuadSurd):
        return x.norm()
    x = rational(x)
    return x * x


def radicand_of(*xs) -> int | None:
    """Common radicand of the given scalars, or None when all are rational."""
    d = None
    for x in xs:
        if isinstance(x, QuadSurd) and x.b != 0:
            if d is None:
                d = x.d
            elif d != x.d:
                raise MixedRadicand(f"sqrt({d}) combined with sqrt({x.d})")
    return d


def scalar_sign(x) -> int:
    if isinstance(x, QuadSurd):
        return x.sign()
    return (x > 0) - (x < 0)


def scalar_is_integer(x) -> bool:
    if isinstance(x, QuadSurd):
        if x.b != 0:
            return False
        x = x.a
    return mpq(x).denominator == 1


def as_rational(x) -> Rational | None:
    """The rational value of x, or None if x is irrational."""
    if isinstance(x, QuadSurd):
        return x.a if x.b == 0 else None
    return mpq(x)


def scalar_sqrt(x, d: int | None = None):
    """Exact square root in Q or Q(sqrt(d)) if it exists, else None."""
    if isinstance(x, QuadSurd) and x.b != 0:
        # (p + q s)^2 = p^2 + d q^2 + 2 p q s
        nrm = x.norm()
        r = _rational_sqrt(nrm)
        if r is None:
            return None
        for cand in (r, -r):
            p2 = (x.a + cand) / 2
            p = _rational_sqrt(p2)
            if p is not None and p != 0:
                root = QuadSurd._make(p, x.b / (2 * p), x.d)
                return -root if root.sign() < 0 else root
            if p2 == 0:
                q = _rational_sqrt(x.a / x.d)
                if q is not None:
                    return QuadSurd._make(mpq(0), q, x.d)
        return None
    q = as_rational(x)
    r = _rational_sqrt(q)
    if r is not None:
        return r
    if d is not None and q > 0:
        s = _rational_sqrt(q / d)
        if s is not None:
            return QuadSurd(0, s, d)
    return None


def _rational_sqrt(q) -> Rational | None:
    q = mpq(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, en = gmpy2.iroot(num, 2)
    rd, ed = gmpy2.iroot(den, 2)
    if en and ed:
        return mpq(rn, rd)
    return None


# rendering / parsing ---------------------------------------------------

def format_rational(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Render as 'p/q' or 'p/q+r/s*sqrt(d)'."""
    if isinstance(x, QuadSurd):
        if x.b == 0:
            return format_rational(x.a)
        if x.b == 1:
            surd = f"sqrt({x.d})"
        elif x.b == -1:
            surd = f"-sqrt({x.d})"
        else:
            surd = f"{format_rational(x.b)}*sqrt({x.d})"
        if x.a == 0:
            return surd
        sep = "" if surd.startswith("-") else "+"
        return f"{format_rational(x.a)}{sep}{surd}"
    return format_rational(x)


_SCALAR_RE = re.compile(
    r"""^\s*(?P<a>[+-]?\d+(?:/\d+)?)?\s*
        (?:(?P<bs>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\))?\s*$""",
    re.VERBOSE,
)


def parse_scalar(text: str):
    """Parse '3', '-5/6', '1/2+3/4*sqrt(5)' or 'sqrt(5)'."""
    m = _SCALAR_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ValueError(f"not a scalar: {text!r}")
    a = mpq(m.group("a").replace(" ", "")) if m.group("a") else mpq(0)
    if m.group("d") is None:
        return a
    if m.group("a") is not None and m.group("bs") is None:
        raise ValueError(f"not a scalar: {text!r}")
    b = mpq(m.group("b")) if m.group("b") else mpq(1)
    if m.group("bs") == "-":
        b = -b
    return QuadSurd(a, b, int(m.group("d")))


def to_mpf(x, ctx):
    """Evaluate an exact scalar in an mpmath context."""
    if isinstance(x, QuadSurd):
        a = ctx.mpf(x.a.numerator) / x.a.denominator
        if not x.b:
            return a
        b = ctx.mpf(x.b.numerator) / x.b.denominator * ctx.sqrt(x.d)
        if (x.a > 0) == (x.b > 0) or not x.a:
            return a + b
        # opposite signs cancel; divide the exact norm by the conjugate instead
        norm = x.a * x.a - x.b * x.b * x.d
        return (ctx.mpf(norm.numerator) / norm.denominator) / (a - b)
    if hasattr(x, "_mpf_"):
        return ctx.mpf(x)
    x = mpq(x)
    return ctx.mpf(x.numerator) / x.denominator

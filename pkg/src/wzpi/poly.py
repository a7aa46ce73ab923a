"""Sparse multivariate polynomials and rational functions over Q or Q(sqrt(d)).

Exponent vectors are packed into a single integer (``_W`` bits per variable,
first generator in the most significant field), so monomial multiplication is
integer addition and lexicographic order is integer order.
"""

from __future__ import annotations

from functools import reduce

from gmpy2 import mpq

from .exact import QuadSurd, format_scalar, is_rational

_W = 24
_FIELD = (1 << _W) - 1


class NotDivisible(ArithmeticError):
    """Exact polynomial division left a remainder."""


class IdenticallyZeroDenominator(ZeroDivisionError):
    pass


def _guard(nv: int) -> int:
    g = 0
    for i in range(nv):
        g |= (1 << (_W - 1)) << (i * _W)
    return g


_GUARDS = {i: _guard(i) for i in range(12)}


def _is_zero(c) -> bool:
    return not c


class Poly:
    """Polynomial with coefficients in Q or Q(sqrt d) over the generators ``gens``."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens, terms=None):
        self.gens = tuple(gens)
        if terms:
            self.terms = {e: c for e, c in terms.items() if c}
        else:
            self.terms = {}

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, gens, terms):
        p = object.__new__(cls)
        p.gens = gens
        p.terms = terms
        return p

    @classmethod
    def const(cls, gens, c) -> Poly:
        gens = tuple(gens)
        if isinstance(c, int):
            c = mpq(c)
        return cls._raw(gens, {0: c} if c else {})

    @classmethod
    def var(cls, gens, name: str) -> Poly:
        gens = tuple(gens)
        return cls._raw(gens, {1 << _shift(gens, name): mpq(1)})

    @classmethod
    def from_dict(cls, gens, d) -> Poly:
        gens = tuple(gens)
        nv = len(gens)
        terms = {}
        for exps, c in d.items():
            if isinstance(exps, int):
                exps = (exps,)
            key = _pack(exps, nv)
            if isinstance(c, int):
                c = mpq(c)
            v = terms.get(key, 0) + c
            if v:
                terms[key] = v
            else:
                terms.pop(key, None)
        return cls._raw(gens, terms)

    def to_dict(self) -> dict:
        nv = len(self.gens)
        return {_unpack(e, nv): c for e, c in self.terms.items()}

    # basic predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(0, mpq(0))

    def free_symbols(self) -> set:
        nv = len(self.gens)
        used = 0
        for e in self.terms:
            used |= e
        out = set()
        for i, g in enumerate(self.gens):
            if (used >> ((nv - 1 - i) * _W)) & _FIELD:
                out.add(g)
        return out

    def has(self, var: str) -> bool:
        if var not in self.gens:
            return False
        s = _shift(self.gens, var)
        return any((e >> s) & _FIELD for e in self.terms)

    # conversion -----------------------------------------------------------
    def set_gens(self, gens) -> Poly:
        gens = tuple(gens)
        if gens == self.gens:
            return self
        nv_old, nv_new = len(self.gens), len(gens)
        idx = []
        for g in self.gens:
            if g in gens:
                idx.append(gens.index(g))
            else:
                idx.append(None)
        terms = {}
        for e, c in self.terms.items():
            exps = _unpack(e, nv_old)
            new = [0] * nv_new
            for i, x in enumerate(exps):
                if x:
                    if idx[i] is None:
                        raise ValueError(f"generator {self.gens[i]} not in {gens}")
                    new[idx[i]] = x
            terms[_pack(new, nv_new)] = c
        return Poly._raw(gens, terms)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.gens == self.gens:
                return self, other
            gens = _merge_gens(self.gens, other.gens)
            return self.set_gens(gens), other.set_gens(gens)
        if isinstance(other, (int, QuadSurd)) or is_rational(other):
            return self, Poly.const(self.gens, other)
        return None

    # arithmetic -------------------------------------------------------------
    def __neg__(self):
        return Poly._raw(self.gens, {e: -c for e, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        terms = dict(a.terms)
        for e, c in b.terms.items():
            v = terms.get(e)
            if v is None:
                terms[e] = c
            else:
                v = v + c
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return Poly._raw(a.gens, terms)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        terms = dict(a.terms)
        for e, c in b.terms.items():
            v = terms.get(e)
            if v is None:
                terms[e] = -c
            else:
                v = v - c
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return Poly._raw(a.gens, terms)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            a, b = self._coerce(other)
            if len(a.terms) < len(b.terms):
                a, b = b, a
            terms: dict = {}
            get = terms.get
            for e2, c2 in b.terms.items():
                for e1, c1 in a.terms.items():
                    e = e1 + e2
                    v = get(e)
                    terms[e] = c1 * c2 if v is None else v + c1 * c2
            return Poly._raw(a.gens, {e: c for e, c in terms.items() if c})
        if isinstance(other, (int, QuadSurd)) or is_rational(other):
            if not other:
                return Poly._raw(self.gens, {})
            return Poly._raw(self.gens, {e: c * other for e, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = Poly.const(self.gens, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> Poly:
        return self * c

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self.exact_div(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        inv = 1 / (mpq(other) if isinstance(other, int) else other)
        return Poly._raw(self.gens, {e: c * inv for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.gens != self.gens:
                pair = self._coerce(other)
                return pair[0].terms == pair[1].terms
            return self.terms == other.terms
        if isinstance(other, (int, QuadSurd)) or is_rational(other):
            if not other:
                return not self.terms
            return self.is_constant() and self.terms.get(0) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    # structure ---------------------------------------------------------------
    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        nv = len(self.gens)
        if var is None:
            return max(sum(_unpack(e, nv)) for e in self.terms)
        if var not in self.gens:
            return 0
        s = _shift(self.gens, var)
        return max((e >> s) & _FIELD for e in self.terms)

    def leading_term(self):
        """(packed exponent, coefficient) of the lex-largest monomial."""
        e = max(self.terms)
        return e, self.terms[e]

    def leading_coeff_lex(self):
        return self.terms[max(self.terms)] if self.terms else mpq(0)

    def coeffs_in(self, var: str) -> dict[int, Poly]:
        """View as univariate in ``var``: {degree: coefficient polynomial}."""
        if var not in self.gens:
            return {0: self} if self.terms else {}
        s = _shift(self.gens, var)
        mask = ~(_FIELD << s)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            d = (e >> s) & _FIELD
            out.setdefault(d, {})[e & mask] = c
        return {d: Poly._raw(self.gens, t) for d, t in out.items()}

    def coeff_in(self, var: str, degree: int) -> Poly:
        return self.coeffs_in(var).get(degree, Poly._raw(self.gens, {}))

    def lc_in(self, var: str) -> Poly:
        cs = self.coeffs_in(var)
        return cs[max(cs)] if cs else Poly._raw(self.gens, {})

    @classmethod
    def from_coeffs_in(cls, gens, var: str, coeffs: dict[int, Poly]) -> Poly:
        s = _shift(gens, var)
        terms = {}
        for d, p in coeffs.items():
            off = d << s
            for e, c in p.terms.items():
                terms[e + off] = c
        return cls._raw(tuple(gens), terms)

    def coefficient_polys(self, var: str) -> list[Poly]:
        """Dense list of coefficients in ``var``, lowest degree first."""
        cs = self.coeffs_in(var)
        if not cs:
            return []
        zero = Poly._raw(self.gens, {})
        return [cs.get(i, zero) for i in range(max(cs) + 1)]

    def monomials(self):
        nv = len(self.gens)
        for e, c in self.terms.items():
            yield _unpack(e, nv), c

    # evaluation and substitution ----------------------------------------------
    def evaluate(self, var: str, value) -> Poly:
        """Substitute a scalar for ``var``."""
        if var not in self.gens:
            return self
        if isinstance(value, int):
            value = mpq(value)
        s = _shift(self.gens, var)
        mask = ~(_FIELD << s)
        powers: dict[int, object] = {}
        terms: dict = {}
        for e, c in self.terms.items():
            d = (e >> s) & _FIELD
            if d not in powers:
                powers[d] = value ** d if d else mpq(1)
            v = c * powers[d]
            key = e & mask
            terms[key] = terms.get(key, 0) + v
        return Poly._raw(self.gens, {e: c for e, c in terms.items() if c})

    def evaluate_all(self, values: dict):
        p = self
        for var, v in values.items():
            p = p.evaluate(var, v)
        return p

    def subs(self, var: str, value) -> Poly:
        """Substitute a polynomial (or scalar) for ``var``."""
        if not isinstance(value, Poly):
            return self.evaluate(var, value)
        a, value = self._coerce(value)
        cs = a.coeffs_in(var)
        if not cs:
            return a
        result = Poly._raw(a.gens, {})
        for d in range(max(cs), -1, -1):
            result = result * value
            if d in cs:
                result = result + cs[d]
        return result

    def shift(self, var: str, h) -> Poly:
        """p(var + h) for a scalar or polynomial h."""
        if not h:
            return self
        return self.subs(var, Poly.var(self.gens, var) + h)

    def diff(self, var: str) -> Poly:
        if var not in self.gens:
            return Poly._raw(self.gens, {})
        s = _shift(self.gens, var)
        one = 1 << s
        terms = {}
        for e, c in self.terms.items():
            d = (e >> s) & _FIELD
            if d:
                terms[e - one] = c * d
        return Poly._raw(self.gens, terms)

    def eval_numeric(self, values: dict, convert):
        """Evaluate at numeric values; ``convert`` maps exact scalars to numbers."""
        nv = len(self.gens)
        vals = [values.get(g, 0) for g in self.gens]
        total = 0
        for e, c in self.terms.items():
            t = convert(c)
            for v, x in zip(vals, _unpack(e, nv)):
                if x:
                    t = t * v ** x
            total = total + t
        return total

    def map_coeffs(self, f) -> Poly:
        return Poly(self.gens, {e: f(c) for e, c in self.terms.items()})

    # division -------------------------------------------------------------------
    def exact_div(self, other: Poly) -> Poly:
        """Quotient of an exact division; raises NotDivisible otherwise."""
        a, b = self._coerce(other)
        if not b.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not a.terms:
            return a
        if len(b.terms) == 1:
            (eb, cb), = b.terms.items()
            g = _GUARDS[len(a.gens)]
            inv = 1 / cb
            terms = {}
            for e, c in a.terms.items():
                if ((e | g) - eb) & g != g:
                    raise NotDivisible("monomial does not divide")
                terms[e - eb] = c * inv
            return Poly._raw(a.gens, terms)
        g = _GUARDS[len(a.gens)]
        eb, cb = b.leading_term()
        inv = 1 / cb
        rest = [(e, c) for e, c in b.terms.items() if e != eb]
        rem = dict(a.terms)
        quot = {}
        while rem:
            e = max(rem)
            c = rem.pop(e)
            if ((e | g) - eb) & g != g:
                raise NotDivisible("leading monomial does not divide")
            qe = e - eb
            qc = c * inv
            quot[qe] = qc
            for e2, c2 in rest:
                key = qe + e2
                v = rem.get(key)
                if v is None:
                    rem[key] = -qc * c2
                else:
                    v = v - qc * c2
                    if v:
                        rem[key] = v
                    else:
                        del rem[key]
        return Poly._raw(a.gens, quot)

    def divides(self, other: Poly) -> bool:
        try:
            other.exact_div(self)
        except NotDivisible:
            return False
        return True

    # rendering ---------------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, gens={self.gens})"


# packing helpers -------------------------------------------------------------------

def _shift(gens, var) -> int:
    return (len(gens) - 1 - gens.index(var)) * _W


def _pack(exps, nv) -> int:
    if len(exps) != nv:
        raise ValueError("exponent vector length mismatch")
    e = 0
    for x in exps:
        if x < 0 or x >= (1 << (_W - 1)):
            raise ValueError(f"exponent {x} out of range")
        e = (e << _W) | int(x)
    return e


def _unpack(e, nv) -> tuple:
    out = [0] * nv
    for i in range(nv - 1, -1, -1):
        out[i] = e & _FIELD
        e >>= _W
    return tuple(out)


def _merge_gens(g1, g2):
    out = list(g1)
    for g in g2:
        if g not in out:
            out.append(g)
    return tuple(out)


def unify(*polys):
    gens = reduce(_merge_gens, (p.gens for p in polys), ())
    return [p.set_gens(gens) for p in polys]


# formatting ----------------------------------------------------------------------

def _fmt_coeff(c) -> tuple[str, bool]:
    """Text for a coefficient and whether it needs parentheses in a product."""
    s = format_scalar(c)
    compound = isinstance(c, QuadSurd) and c.b != 0 and c.a != 0
    return s, compound


def format_poly(p: Poly) -> str:
    """Expanded sparse form with ``^`` powers and ``*`` products, e.g. ``3*n^2 + 2*n*k + 1/12``."""
    if not p.terms:
        return "0"
    nv = len(p.gens)
    parts = []
    for e in sorted(p.terms, reverse=True):
        c = p.terms[e]
        exps = _unpack(e, nv)
        mono = "*".join(g if x == 1 else f"{g}^{x}" for g, x in zip(p.gens, exps) if x)
        cs, compound = _fmt_coeff(c)
        if compound:
            cs = f"({cs})"
        if not mono:
            text = cs
        elif c == 1:
            text = mono
        elif c == -1:
            text = "-" + mono
        else:
            text = f"{cs}*{mono}"
        parts.append(text)
    out = parts[0]
    for t in parts[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


# gcd machinery ----------------------------------------------------------------------

def _main_var(p: Poly, q: Poly):
    used = 0
    for e in p.terms:
        used |= e
    for e in q.terms:
        used |= e
    nv = len(p.gens)
    for i, g in enumerate(p.gens):
        if (used >> ((nv - 1 - i) * _W)) & _FIELD:
            return g
    return None


def _normalize_unit(p: Poly) -> Poly:
    """Scale so the lex-leading coefficient is 1."""
    if not p.terms:
        return p
    lc = p.terms[max(p.terms)]
    return p if lc == 1 else p / lc


def content(p: Poly, var: str) -> Poly:
    """gcd of the coefficients of p viewed as univariate in ``var``."""
    cs = list(p.coeffs_in(var).values())
    if not cs:
        return p
    # cheapest first: a constant coefficient makes the content a unit
    cs.sort(key=lambda c: len(c.terms))
    g = cs[0]
    for c in cs[1:]:
        if g.is_constant():
            break
        g = gcd(g, c)
    return _normalize_unit(g) if not g.is_constant() else Poly.const(p.gens, 1)


def primitive_part(p: Poly, var: str) -> Poly:
    c = content(p, var)
    return p if c.is_constant() else p.exact_div(c)


def _uni(p: Poly, var: str) -> dict[int, Poly]:
    return p.coeffs_in(var)


def _from_uni(gens, var, u) -> Poly:
    return Poly.from_coeffs_in(gens, var, u)


def prem(a: Poly, b: Poly, var: str) -> Poly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b in ``var``."""
    da, db = a.degree(var), b.degree(var)
    if db < 0:
        raise ZeroDivisionError("pseudo-remainder by zero")
    if da < db:
        return a
    gens = a.gens
    ub = _uni(b, var)
    lcb = ub[db]
    r = _uni(a, var)
    dr = da
    steps = 0
    while r and dr >= db:
        lcr = r[dr]
        shift = dr - db
        new = {d: c * lcb for d, c in r.items() if d != dr}
        for d, c in ub.items():
            if d == db:
                continue
            key = d + shift
            v = new.get(key)
            t = lcr * c
            new[key] = -t if v is None else v - t
        r = {d: c for d, c in new.items() if c.terms}
        dr = max(r) if r else -1
        steps += 1
    extra = da - db + 1 - steps
    out = _from_uni(gens, var, r)
    if extra:
        out = out * lcb ** extra
    return out


def _subresultant_gcd(a: Poly, b: Poly, var: str) -> Poly:
    """gcd of two polynomials primitive in ``var`` (subresultant PRS)."""
    if a.degree(var) < b.degree(var):
        a, b = b, a
    g = Poly.const(a.gens, 1)
    h = Poly.const(a.gens, 1)
    while True:
        delta = a.degree(var) - b.degree(var)
        r = prem(a, b, var)
        if r.is_zero():
            return primitive_part(b, var)
        if r.degree(var) == 0:
            return Poly.const(a.gens, 1)
        a, b = b, r.exact_div(g * h ** delta)
        g = a.lc_in(var)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g ** delta).exact_div(h ** (delta - 1))


def gcd(p: Poly, q: Poly, var: str | None = None) -> Poly:
    """Greatest common divisor, normalized so the lex-leading coefficient is 1.

    ``var`` selects the main variable for the subresultant sequence; the
    coefficients in the remaining variables are handled recursively through
    contents.  gcd(0, 0) = 0.
    """
    p, q = unify(p, q)
    if p.is_zero():
        return _normalize_unit(q)
    if q.is_zero():
        return _normalize_unit(p)
    if p.is_constant() or q.is_constant():
        return Poly.const(p.gens, 1)
    if p == q:
        return _normalize_unit(p)
    x = var if var is not None and (p.has(var) or q.has(var)) else _main_var(p, q)
    if not p.has(x):
        return gcd(p, content(q, x))
    if not q.has(x):
        return gcd(content(p, x), q)
    cp, cq = content(p, x), content(q, x)
    pp = p if cp.is_constant() else p.exact_div(cp)
    pq = q if cq.is_constant() else q.exact_div(cq)
    c = gcd(cp, cq) if not (cp.is_constant() or cq.is_constant()) else Poly.const(p.gens, 1)
    # quick exact-division shortcuts
    if len(pq.terms) <= len(pp.terms) and pq.degree(x) <= pp.degree(x) and pq.divides(pp):
        g = pq
    elif pp.degree(x) <= pq.degree(x) and pp.divides(pq):
        g = pp
    else:
        g = _subresultant_gcd(pp, pq, x)
    return _normalize_unit(c * g)


def lcm(p: Poly, q: Poly) -> Poly:
    g = gcd(p, q)
    return _normalize_unit((p * q).exact_div(g))


def poly_gcd(p: Poly, q: Poly, var: str) -> Poly:
    return gcd(p, q, var)


# resultants and dispersion ---------------------------------------------------------

def _bareiss_det(mat: list[list[Poly]], zero: Poly, one: Poly) -> Poly:
    n = len(mat)
    if n == 0:
        return one
    m = [row[:] for row in mat]
    sign = 1
    prev = one
    for i in range(n - 1):
        if m[i][i].is_zero():
            for r in range(i + 1, n):
                if not m[r][i].is_zero():
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return zero
        piv = m[i][i]
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] = (piv * m[r][c] - m[r][i] * m[i][c]).exact_div(prev)
            m[r][i] = zero
        prev = piv
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_matrix(p: Poly, q: Poly, var: str) -> list[list[Poly]]:
    p, q = unify(p, q)
    dp, dq = p.degree(var), q.degree(var)
    zero = Poly.const(p.gens, 0)
    cp = p.coefficient_polys(var)[::-1]  # highest first
    cq = q.coefficient_polys(var)[::-1]
    size = dp + dq
    rows = []
    for i in range(dq):
        rows.append([zero] * i + cp + [zero] * (size - i - len(cp)))
    for i in range(dp):
        rows.append([zero] * i + cq + [zero] * (size - i - len(cq)))
    return rows


def resultant(p: Poly, q: Poly, var: str) -> Poly:
    """Res_var(p, q) as the determinant of the Sylvester matrix."""
    p, q = unify(p, q)
    if p.is_zero() or q.is_zero():
        return Poly.const(p.gens, 0)
    dp, dq = p.degree(var), q.degree(var)
    if dp == 0 and dq == 0:
        return Poly.const(p.gens, 1)
    if dp == 0:
        return p ** dq
    if dq == 0:
        return q ** dp
    mat = sylvester_matrix(p, q, var)
    return _bareiss_det(mat, Poly.const(p.gens, 0), Poly.const(p.gens, 1))


def _integer_coeffs(coeffs: list) -> list[int]:
    """Scale rational coefficients (lowest degree first) to coprime integers."""
    den = 1
    for c in coeffs:
        den = den * mpq(c).denominator // _gcd_int(den, mpq(c).denominator)
    ints = [int(mpq(c) * den) for c in coeffs]
    g = 0
    for v in ints:
        g = _gcd_int(g, v)
    return [v // g for v in ints] if g > 1 else ints


def _gcd_int(a, b):
    import math
    return math.gcd(int(a), int(b))


def _divisors(m: int, limit: int) -> list[int]:
    m = abs(m)
    out = set()
    i = 1
    while i * i <= m and i <= limit:
        if m % i == 0:
            out.add(i)
            if m // i <= limit:
                out.add(m // i)
        i += 1
    return sorted(out)


def nonneg_integer_roots(coeffs: list) -> set[int]:
    """Non-negative integer roots of a univariate rational polynomial.

    ``coeffs`` lists coefficients lowest degree first.  Candidates come from
    the rational-root test (divisors of the trailing coefficient), capped by
    the Cauchy bound.
    """
    while coeffs and not coeffs[-1]:
        coeffs = coeffs[:-1]
    if not coeffs:
        raise ValueError("zero polynomial has every root")
    ints = _integer_coeffs(coeffs)
    roots = set()
    if ints[0] == 0:
        roots.add(0)
        while ints and ints[0] == 0:
            ints = ints[1:]
    if len(ints) <= 1:
        return roots
    lead = abs(ints[-1])
    bound = 1 + max(abs(v) for v in ints[:-1]) // lead + 1
    tc = ints[0]
    if bound < 10_000:
        cands = [j for j in range(1, bound + 1) if tc % j == 0]
    else:
        cands = _divisors(tc, bound)
    for j in cands:
        v = 0
        for c in reversed(ints):
            v = v * j + c
        if v == 0:
            roots.add(j)
    return roots


def _split_field(c):
    if isinstance(c, QuadSurd):
        return [c.a, c.b]
    return [mpq(c)]


def dispersion_set(q: Poly, r: Poly, var: str = "n") -> set[int]:
    """All j >= 0 with gcd(q(var), r(var + j)) non-constant.

    Computed from the non-negative integer roots of Res_var(q(var), r(var+j))
    as a polynomial in j; other generators are treated as independent
    transcendentals, so a root must annihilate every coefficient.
    """
    q, r = unify(q, r)
    if q.degree(var) <= 0 or r.degree(var) <= 0:
        return set()
    h = "_j"
    while h in q.gens:
        h += "_"
    gens = q.gens + (h,)
    qq, rr = q.set_gens(gens), r.set_gens(gens)
    shifted = rr.shift(var, Poly.var(gens, h))
    res = resultant(qq, shifted, var)
    if res.is_zero():
        raise ValueError("polynomials share a factor for every shift")
    # group coefficients: for every monomial in the other variables, a polynomial in j
    hs = _shift(gens, h)
    groups: dict[int, dict[int, list]] = {}
    mask = ~(_FIELD << hs)
    for e, c in res.terms.items():
        dj = (e >> hs) & _FIELD
        for part_idx, part in enumerate(_split_field(c)):
            if part:
                groups.setdefault((e & mask, part_idx), {})[dj] = part
    candidates: set[int] | None = None
    for g in groups.values():
        coeffs = [g.get(i, mpq(0)) for i in range(max(g) + 1)]
        roots = nonneg_integer_roots(coeffs) if max(g) > 0 else set()
        candidates = roots if candidates is None else candidates & roots
        if not candidates:
            return set()
    result = set()
    for j in sorted(candidates or ()):
        if not gcd(q, r.shift(var, j), var).is_constant():
            result.add(j)
    return result


# rational functions ---------------------------------------------------------------------

class RatFunc:
    """Quotient of polynomials, kept reduced with a denominator whose lex-leading coefficient is 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize: bool = True):
        if not isinstance(num, Poly):
            raise TypeError("numerator must be a Poly")
        if den is None:
            den = Poly.const(num.gens, 1)
        elif not isinstance(den, Poly):
            den = Poly.const(num.gens, den)
        num, den = unify(num, den)
        if den.is_zero():
            raise IdenticallyZeroDenominator("denominator is identically zero")
        self.num, self.den = num, den
        if normalize:
            self._normalize()

    def _normalize(self):
        num, den = self.num, self.den
        if num.is_zero():
            self.num, self.den = num, Poly.const(num.gens, 1)
            return
        if not den.is_constant():
            g = gcd(num, den)
            if not g.is_constant():
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.leading_coeff_lex()
        if lc != 1:
            num, den = num / lc, den / lc
        self.num, self.den = num, den

    @property
    def gens(self):
        return self.num.gens

    @classmethod
    def from_poly(cls, p: Poly) -> RatFunc:
        return cls(p, Poly.const(p.gens, 1), normalize=False)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other, normalize=False)
        if isinstance(other, (int, QuadSurd)) or is_rational(other):
            return RatFunc(Poly.const(self.gens, other), normalize=False)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("rational function division by zero")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if e < 0:
            return RatFunc(self.den ** (-e), self.num ** (-e))
        return RatFunc(self.num ** e, self.den ** e, normalize=False)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def substitute(self, var: str, value) -> RatFunc:
        """f(var := value) for a scalar, Poly or RatFunc value."""
        if isinstance(value, RatFunc):
            vn, vd = unify(value.num, value.den)
            num = _homogenize(self.num, var, vn, vd)
            den = _homogenize(self.den, var, vn, vd)
            dn, dd = self.num.degree(var), self.den.degree(var)
            if dn > dd:
                den = den * vd ** (dn - dd)
            elif dd > dn:
                num = num * vd ** (dd - dn)
            if den.is_zero():
                raise IdenticallyZeroDenominator(f"denominator vanishes for {var} := {value}")
            return RatFunc(num, den)
        num = self.num.subs(var, value)
        den = self.den.subs(var, value)
        if den.is_zero():
            raise IdenticallyZeroDenominator(f"denominator vanishes for {var} := {value}")
        return RatFunc(num, den)

    def shift(self, var: str, h) -> RatFunc:
        return RatFunc(self.num.shift(var, h), self.den.shift(var, h))

    def coeff_in(self, var: str, degree: int) -> RatFunc:
        if self.den.has(var):
            raise ValueError(f"denominator depends on {var}")
        return RatFunc(self.num.coeff_in(var, degree), self.den)

    def eval_numeric(self, values: dict, convert):
        d = self.den.eval_numeric(values, convert)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.eval_numeric(values, convert) / d

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    __repr__ = __str__


def _homogenize(p: Poly, var: str, vn: Poly, vd: Poly) -> Poly:
    p, vn, vd = unify(p, vn, vd)
    cs = p.coeffs_in(var)
    if not cs:
        return p
    deg = max(cs)
    total = Poly.const(p.gens, 0)
    for d, c in cs.items():
        total = total + c * vn ** d * vd ** (deg - d)
    return total


def ratfunc_normalize(f: RatFunc) -> RatFunc:
    return RatFunc(f.num, f.den)


def parse_ratfunc(text: str, gens=("n", "k")) -> RatFunc:
    from .expr import parse_rational_function
    return parse_rational_function(text, gens)


def poly(text: str, gens=("n", "k")) -> Poly:
    """Parse a polynomial written in the sparse ``^``/``*`` grammar."""
    f = parse_ratfunc(text, gens)
    if not f.is_polynomial():
        raise ValueError(f"not a polynomial: {text!r}")
    return f.num / f.den.constant_value()


__all__ = [
    "Poly", "RatFunc", "NotDivisible", "IdenticallyZeroDenominator", "gcd", "lcm",
    "poly_gcd", "resultant", "dispersion_set", "prem", "content", "primitive_part",
    "ratfunc_normalize", "format_poly", "nonneg_integer_roots", "unify", "poly",
    "parse_ratfunc", "sylvester_matrix",
]

"""Proper hypergeometric terms in (n, k).

A term is a product of rising factorials ``poch(a + beta*k, n)`` or
``poch(a + beta*k, k)``, geometric factors ``z^n`` and ``w^k``, and a rational
prefactor.  Internally every rising factorial is a quotient of two Gamma
factors, which makes shift quotients a matter of pairing Gamma arguments that
differ by integers.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from gmpy2 import mpq

from .exact import QuadSurd, as_rational, format_rational, format_scalar, is_rational
from .expr import ParseError, UnknownVariable, eval_scalar_ast, node_pos, parse
from .poly import Poly, RatFunc, format_poly

GENS = ("n", "k")


class NonAffineArgument(ParseError):
    pass


class ImproperTerm(ValueError):
    """A shift quotient is not a rational function."""


class PoleEncountered(ZeroDivisionError):
    pass


def _scalar(x):
    if isinstance(x, QuadSurd) and x.b == 0:
        return x.a
    return mpq(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class AffineArg:
    """const + n_coeff*n + k_coeff*k."""

    const: object
    n_coeff: object = mpq(0)
    k_coeff: object = mpq(0)

    def __post_init__(self):
        object.__setattr__(self, "const", _scalar(self.const))
        object.__setattr__(self, "n_coeff", mpq(self.n_coeff))
        object.__setattr__(self, "k_coeff", mpq(self.k_coeff))

    def shifted(self, dn=0, dk=0, dc=0) -> AffineArg:
        return AffineArg(self.const + dc + self.n_coeff * dn + self.k_coeff * dk, self.n_coeff, self.k_coeff)

    def plus_index(self, var: str, amount=1) -> AffineArg:
        """Add ``amount * var`` to the argument (used for a + n, a + k)."""
        if var == "n":
            return AffineArg(self.const, self.n_coeff + amount, self.k_coeff)
        return AffineArg(self.const, self.n_coeff, self.k_coeff + amount)

    def poly(self, gens=GENS) -> Poly:
        p = Poly.const(gens, self.const)
        if self.n_coeff:
            p = p + Poly.var(gens, "n") * self.n_coeff
        if self.k_coeff:
            p = p + Poly.var(gens, "k") * self.k_coeff
        return p

    def value(self, n=0, k=0):
        return self.const + self.n_coeff * n + self.k_coeff * k

    def render(self) -> str:
        parts = []
        if self.const or (not self.n_coeff and not self.k_coeff):
            parts.append(format_scalar(self.const))
        for coeff, name in ((self.n_coeff, "n"), (self.k_coeff, "k")):
            if not coeff:
                continue
            if coeff == 1:
                t = name
            elif coeff == -1:
                t = "-" + name
            else:
                t = f"{format_rational(coeff)}*{name}"
            if parts and not t.startswith("-"):
                t = "+" + t
            parts.append(t)
        return "".join(parts)

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Poch:
    arg: AffineArg
    index: str  # 'n' or 'k'

    def render(self) -> str:
        return f"poch({self.arg.render()},{self.index})"

    def gamma_factors(self):
        """Gamma(arg + index) / Gamma(arg)."""
        return [(self.arg.plus_index(self.index), 1), (self.arg, -1)]


def _poch_key(p: Poch):
    return (p.index, p.render())


def _canonical_pochs(numer, denom):
    cn, cd = Counter(numer), Counter(denom)
    common = cn & cd
    cn -= common
    cd -= common
    return (tuple(sorted(cn.elements(), key=_poch_key)), tuple(sorted(cd.elements(), key=_poch_key)))


@dataclass(frozen=True)
class HyperTerm:
    numer_poch: tuple = ()
    denom_poch: tuple = ()
    z_base: object = mpq(1)
    w_base: object = mpq(1)
    prefactor: RatFunc = field(default=None, compare=False)

    def __post_init__(self):
        numer, denom = _canonical_pochs(self.numer_poch, self.denom_poch)
        object.__setattr__(self, "numer_poch", numer)
        object.__setattr__(self, "denom_poch", denom)
        object.__setattr__(self, "z_base", _scalar(self.z_base))
        object.__setattr__(self, "w_base", _scalar(self.w_base))
        if self.prefactor is None:
            object.__setattr__(self, "prefactor", RatFunc(Poly.const(GENS, 1), normalize=False))
        if not self.z_base or not self.w_base:
            raise ValueError("geometric bases must be nonzero")

    def __eq__(self, other):
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return (self.numer_poch == other.numer_poch and self.denom_poch == other.denom_poch
                and self.z_base == other.z_base and self.w_base == other.w_base
                and self.prefactor == other.prefactor)

    def __hash__(self):
        return hash((self.numer_poch, self.denom_poch, self.z_base, self.w_base))

    # algebra ----------------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, HyperTerm):
            return HyperTerm(self.numer_poch + other.numer_poch, self.denom_poch + other.denom_poch,
                             self.z_base * other.z_base, self.w_base * other.w_base,
                             self.prefactor * other.prefactor)
        if isinstance(other, (RatFunc, Poly)) or isinstance(other, (int, QuadSurd)) or is_rational(other):
            return HyperTerm(self.numer_poch, self.denom_poch, self.z_base, self.w_base, self.prefactor * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> HyperTerm:
        return HyperTerm(self.denom_poch, self.numer_poch, 1 / self.z_base, 1 / self.w_base,
                         1 / self.prefactor)

    def __truediv__(self, other):
        if isinstance(other, HyperTerm):
            return self * other.inverse()
        return HyperTerm(self.numer_poch, self.denom_poch, self.z_base, self.w_base, self.prefactor / other)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return HyperTerm(self.numer_poch * e, self.denom_poch * e, self.z_base ** e, self.w_base ** e,
                         self.prefactor ** e)

    def with_prefactor(self, prefactor: RatFunc) -> HyperTerm:
        return HyperTerm(self.numer_poch, self.denom_poch, self.z_base, self.w_base, prefactor)

    def is_pure_prefactor(self) -> bool:
        return not self.numer_poch and not self.denom_poch and self.z_base == 1 and self.w_base == 1

    def gamma_factors(self) -> list[tuple[AffineArg, int]]:
        out = []
        for p in self.numer_poch:
            out.extend(p.gamma_factors())
        for p in self.denom_poch:
            out.extend((a, -e) for a, e in p.gamma_factors())
        return out

    def substitute_k(self, kval) -> HyperTerm:
        """Fix k to an exact scalar value inside the Pochhammer arguments running in n."""
        def fix(p: Poch):
            if p.index != "n":
                raise ValueError("cannot fix k inside a Pochhammer running in k")
            return Poch(AffineArg(p.arg.value(0, kval), 0, 0), "n")
        if self.w_base != 1:
            raise ValueError("cannot fix k with a k-geometric factor present")
        return HyperTerm(tuple(fix(p) for p in self.numer_poch), tuple(fix(p) for p in self.denom_poch),
                         self.z_base, 1, self.prefactor.substitute("k", kval))

    def render(self) -> str:
        return render_term(self)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"HyperTerm({self.render()!r})"


# rendering ---------------------------------------------------------------------

def _group(pochs):
    out = []
    for p in pochs:
        if out and out[-1][0] == p:
            out[-1][1] += 1
        else:
            out.append([p, 1])
    return [p.render() + (f"^{m}" if m > 1 else "") for p, m in out]


def _render_base(x) -> str:
    return f"({format_scalar(x)})"


def render_term(t: HyperTerm) -> str:
    """Canonical text in the term grammar; parse(render(t)) == t."""
    num = _group(t.numer_poch)
    den = _group(t.denom_poch)
    pieces = []
    if num:
        pieces.append("*".join(num))
    else:
        pieces.append("1")
    text = pieces[0]
    if den:
        text += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
    if t.z_base != 1:
        text += f"*{_render_base(t.z_base)}^n"
    if t.w_base != 1:
        text += f"*{_render_base(t.w_base)}^k"
    pf = t.prefactor
    if not (pf.num.is_constant() and pf.den.is_constant() and pf.num.constant_value() == 1
            and pf.den.constant_value() == 1):
        if pf.den.is_constant():
            text += f"*({format_poly(pf.num / pf.den.constant_value())})"
        else:
            text += f"*({format_poly(pf.num)})/({format_poly(pf.den)})"
    if text.startswith("1*") and len(text) > 2:
        text = text[2:]
    return text


# parsing -------------------------------------------------------------------------

_TERM_FUNCS = ("poch", "sqrt")


def _affine_from_ratfunc(f: RatFunc, text, pos) -> AffineArg:
    if not f.is_polynomial():
        raise NonAffineArgument("Pochhammer argument must be affine in k", text, pos)
    p = f.num / f.den.constant_value()
    if p.has("n"):
        raise NonAffineArgument("Pochhammer argument may not depend on n", text, pos)
    extra = p.free_symbols() - {"k"}
    if extra:
        raise NonAffineArgument(f"Pochhammer argument depends on {sorted(extra)}", text, pos)
    if p.degree("k") > 1:
        raise NonAffineArgument("Pochhammer argument must be affine in k", text, pos)
    kc = p.coeff_in("k", 1)
    kc = kc.constant_value() if not kc.is_zero() else mpq(0)
    if as_rational(kc) is None:
        raise NonAffineArgument("k-coefficient must be rational", text, pos)
    c0 = p.coeff_in("k", 0)
    c0 = c0.constant_value() if not c0.is_zero() else mpq(0)
    return AffineArg(c0, 0, as_rational(kc))


def _term_from_ast(node, text, gens):
    from .expr import eval_ratfunc_ast

    kind = node[0]
    if kind in ("num", "name"):
        if kind == "name" and node[1] not in gens:
            raise UnknownVariable(f"unknown variable {node[1]!r}", text, node_pos(node))
        return HyperTerm(prefactor=eval_ratfunc_ast(node, gens, text))
    if kind == "call":
        name, args = node[1], node[2]
        if name == "sqrt":
            return HyperTerm(prefactor=eval_ratfunc_ast(node, gens, text))
        if len(args) != 2:
            raise ParseError("poch() takes two arguments", text, node_pos(node))
        idx = args[1]
        if idx[0] != "name" or idx[1] not in ("n", "k"):
            raise ParseError("running index must be n or k", text, node_pos(idx))
        try:
            argf = eval_ratfunc_ast(args[0], gens, text)
        except UnknownVariable:
            raise
        aff = _affine_from_ratfunc(argf, text, node_pos(args[0]))
        return HyperTerm((Poch(aff, idx[1]),))
    if kind == "neg":
        return _term_from_ast(node[1], text, gens) * -1
    if kind in ("add", "sub"):
        a = _term_from_ast(node[1], text, gens)
        b = _term_from_ast(node[2], text, gens)
        if not (a.is_pure_prefactor() and b.is_pure_prefactor()):
            raise ParseError("sums are only allowed inside polynomial factors", text, node_pos(node))
        pf = a.prefactor + b.prefactor if kind == "add" else a.prefactor - b.prefactor
        return HyperTerm(prefactor=pf)
    if kind == "mul":
        return _term_from_ast(node[1], text, gens) * _term_from_ast(node[2], text, gens)
    if kind == "div":
        b = _term_from_ast(node[2], text, gens)
        if b.is_pure_prefactor() and b.prefactor.is_zero():
            raise ParseError("division by zero", text, node_pos(node))
        return _term_from_ast(node[1], text, gens) / b
    if kind == "pow":
        base, exp = node[1], node[2]
        try:
            ev = eval_scalar_ast(exp, text)
            er = as_rational(ev)
            if er is None or er.denominator != 1:
                raise ParseError("exponent must be an integer, n or k", text, node_pos(node))
            return _term_from_ast(base, text, gens) ** int(er)
        except UnknownVariable:
            pass
        expf = eval_ratfunc_ast(exp, gens, text)
        if not expf.is_polynomial():
            raise ParseError("exponent must be linear in n and k", text, node_pos(node))
        e = expf.num / expf.den.constant_value()
        if e.degree() > 1 or e.coeff_in("n", 0).coeff_in("k", 0):
            raise ParseError("geometric exponent must be a multiple of n or k", text, node_pos(node))
        try:
            bval = eval_scalar_ast(base, text)
        except (UnknownVariable, ParseError):
            raise ParseError("geometric base must be a constant", text, node_pos(base)) from None
        cn = e.coeff_in("n", 1).coeff_in("k", 0)
        ck = e.coeff_in("k", 1).coeff_in("n", 0)
        cn = as_rational(cn.constant_value()) if not cn.is_zero() else mpq(0)
        ck = as_rational(ck.constant_value()) if not ck.is_zero() else mpq(0)
        if cn.denominator != 1 or ck.denominator != 1:
            raise ParseError("geometric exponent needs integer multiples of n and k", text, node_pos(node))
        return HyperTerm(z_base=bval ** int(cn), w_base=bval ** int(ck))
    raise ParseError("unsupported construct", text, node_pos(node))


def parse_term(text: str, gens=GENS) -> HyperTerm:
    """Parse the term grammar, e.g. ``poch(1/2,n)^3/poch(1,n)^3*(-1)^n``."""
    node = parse(text, _TERM_FUNCS)
    return _term_from_ast(node, text, tuple(gens))


# shift quotients --------------------------------------------------------------------

def _class_key(arg: AffineArg):
    c = arg.const
    if isinstance(c, QuadSurd):
        a, b = c.a, c.b
    else:
        a, b = mpq(c), mpq(0)
    frac = a - (a.numerator // a.denominator)
    return (arg.n_coeff, arg.k_coeff, b, frac), a


def gamma_quotient(factors, gens=GENS):
    """Collapse prod Gamma(arg)^e into (numerator factors, denominator factors).

    Arguments that differ by integers are paired through rising factorials;
    a leftover Gamma factor means the product is not rational.  The factors
    are the linear polynomials (arg + i) with multiplicity.
    """
    net: dict[AffineArg, int] = defaultdict(int)
    for arg, e in factors:
        net[arg] += e
    groups: dict = defaultdict(list)
    for arg, e in net.items():
        if e:
            key, a = _class_key(arg)
            groups[key].append((a, arg, e))
    num: list[Poly] = []
    den: list[Poly] = []
    for key, members in groups.items():
        if sum(e for _, _, e in members) != 0:
            raise ImproperTerm("Gamma factors do not pair into rising factorials")
        members.sort(key=lambda m: m[0])
        base_a, base_arg, _ = members[0]
        base_poly = base_arg.poly(gens)
        for a, arg, e in members:
            m = int(a - base_a)
            # Gamma(base + m) = Gamma(base) * (base)_m
            for i in range(m):
                f = base_poly + i
                (num if e > 0 else den).extend([f] * abs(e))
    return num, den


def _product(polys, gens):
    out = Poly.const(gens, 1)
    for p in polys:
        out = out * p
    return out


def shift_quotient_factored(t: HyperTerm, var: str, j: int = 1, gens=GENS):
    """t(var + j)/t as (scalar, numerator factors, denominator factors, prefactor ratio)."""
    if var not in ("n", "k"):
        raise ValueError("shift variable must be n or k")
    factors = []
    for arg, e in t.gamma_factors():
        coeff = arg.n_coeff if var == "n" else arg.k_coeff
        if coeff:
            factors.append((arg.shifted(dn=j) if var == "n" else arg.shifted(dk=j), e))
            factors.append((arg, -e))
    num, den = gamma_quotient(factors, gens)
    scalar = (t.z_base if var == "n" else t.w_base) ** j
    pf = t.prefactor
    pf_ratio = (pf.shift(var, j), pf)
    return scalar, num, den, pf_ratio


def shift_quotient(t: HyperTerm, var: str, j: int = 1) -> RatFunc:
    """Exact rational function t(var + j)/t."""
    gens = t.prefactor.gens if set(GENS) <= set(t.prefactor.gens) else GENS
    scalar, num, den, (pf_shift, pf) = shift_quotient_factored(t, var, j, gens)
    n = _product(num, gens) * scalar * pf_shift.num * pf.den
    d = _product(den, gens) * pf_shift.den * pf.num
    return RatFunc(n, d)


# right-hand sides ------------------------------------------------------------------------

@dataclass(frozen=True)
class RhsShape:
    """C * prod (a_i)_k / prod (b_j)_k * geo^k; the constant C is kept as text."""

    const: str | None = None
    k_poch_numer: tuple = ()
    k_poch_denom: tuple = ()
    geo_base: object = mpq(1)

    def __post_init__(self):
        object.__setattr__(self, "k_poch_numer", tuple(_scalar(a) for a in self.k_poch_numer))
        object.__setattr__(self, "k_poch_denom", tuple(_scalar(a) for a in self.k_poch_denom))
        object.__setattr__(self, "geo_base", _scalar(self.geo_base))

    def as_term(self) -> HyperTerm:
        """The k-dependent part as a term (constant omitted)."""
        return HyperTerm(tuple(Poch(AffineArg(a), "k") for a in self.k_poch_numer),
                         tuple(Poch(AffineArg(a), "k") for a in self.k_poch_denom),
                         1, self.geo_base)

    def render(self) -> str:
        parts = [f"poch({format_scalar(a)},k)" for a in self.k_poch_numer]
        text = "*".join(parts) if parts else "1"
        if self.k_poch_denom:
            den = [f"poch({format_scalar(a)},k)" for a in self.k_poch_denom]
            text += "/" + (den[0] if len(den) == 1 else "(" + "*".join(den) + ")")
        if self.geo_base != 1:
            text += f"*{_render_base(self.geo_base)}^k"
        return text


# numeric evaluation -------------------------------------------------------------------

def _to_ctx(x, ctx):
    from .exact import to_mpf
    if isinstance(x, (QuadSurd, int)) or is_rational(x):
        return to_mpf(x, ctx)
    return ctx.mpf(x)


def poch_value(a, m: int):
    """Rising factorial (a)_m for integer m >= 0, exact when a is exact."""
    out = mpq(1) if not hasattr(a, "_mpf_") else 1
    for i in range(m):
        out = out * (a + i)
    return out


def eval_term(t: HyperTerm, n: int, k, digits: int = 50, ctx=None):
    """Numeric value of t at integer n >= 0 and exact or numeric k."""
    from .numerics.bigfloat import working_context
    from .numerics.gamma import rgamma

    if ctx is None:
        ctx = working_context(digits)
    if n < 0:
        raise ValueError("n must be non-negative")
    k_exact = isinstance(k, (int, QuadSurd)) or is_rational(k)
    if k_exact:
        k = mpq(k) if isinstance(k, int) else k
    kint = k_exact and as_rational(k) is not None and as_rational(k).denominator == 1 and k >= 0
    value = ctx.mpf(1)
    exact_part = mpq(1)

    def factor(p: Poch):
        a = p.arg.value(0, k) if k_exact else _to_ctx(p.arg.const, ctx) + p.arg.k_coeff * k
        if p.index == "n":
            return poch_value(a, n)
        if kint:
            return poch_value(a, int(k))
        av = _to_ctx(a, ctx) if k_exact else a
        kv = _to_ctx(k, ctx) if k_exact else k
        top, bottom = rgamma(av, ctx=ctx), rgamma(av + kv, ctx=ctx)
        return (top, bottom)

    for p in t.numer_poch:
        v = factor(p)
        if isinstance(v, tuple):
            top, bottom = v
            if not bottom:
                raise PoleEncountered(f"{p.render()} has a pole at k={k}")
            value *= top / bottom
        elif hasattr(v, "_mpf_"):
            value *= v
        else:
            exact_part *= v
    for p in t.denom_poch:
        v = factor(p)
        if isinstance(v, tuple):
            top, bottom = v
            if not top:
                raise PoleEncountered(f"1/{p.render()} has a pole at k={k}")
            value *= bottom / top
        elif hasattr(v, "_mpf_"):
            if not v:
                raise PoleEncountered(f"1/{p.render()} vanishes at n={n}")
            value /= v
        else:
            if not v:
                raise PoleEncountered(f"1/{p.render()} vanishes at n={n}, k={k}")
            exact_part /= v
    exact_part *= t.z_base ** n
    if t.w_base != 1:
        if kint:
            exact_part *= t.w_base ** int(k)
        else:
            w = _to_ctx(t.w_base, ctx)
            if w <= 0:
                raise ValueError("non-integer power of a non-positive base")
            value *= ctx.power(w, _to_ctx(k, ctx) if k_exact else k)
    pf = t.prefactor
    if k_exact:
        pnum = pf.num.evaluate("n", n).evaluate("k", k)
        pden = pf.den.evaluate("n", n).evaluate("k", k)
        if pnum.free_symbols() or pden.free_symbols():
            raise ValueError("prefactor depends on parameters")
        dv = pden.constant_value()
        if not dv:
            raise PoleEncountered(f"prefactor pole at n={n}, k={k}")
        exact_part *= pnum.constant_value() / dv
    else:
        conv = lambda c: _to_ctx(c, ctx)
        pv = pf.eval_numeric({"n": n, "k": k}, conv)
        value *= pv
    return value * _to_ctx(exact_part, ctx)


__all__ = [
    "AffineArg", "Poch", "HyperTerm", "RhsShape", "parse_term", "render_term", "shift_quotient",
    "shift_quotient_factored", "gamma_quotient", "eval_term", "NonAffineArgument",
    "ImproperTerm", "PoleEncountered", "poch_value", "GENS",
]


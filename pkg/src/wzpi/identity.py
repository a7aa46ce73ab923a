"""Catalog identities and their certification.

A pair identity states sum_n term(n,k) weight(n,k) = C * shape(k).  With
F = term * weight / shape the claim is that sum_n F(n,k) does not depend on
k.  Certification finds R with F(n,k+1) - F(n,k) = G(n+1,k) - G(n,k),
G = R F, checks it exactly, checks that G(0,k) = 0 and that G(N,k) -> 0, and
then pins the constant by evaluating the left side where it collapses.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from .exact import format_scalar, to_mpf
from .hyperterm import HyperTerm, PoleEncountered, RhsShape, eval_term
from .numerics.bigfloat import agree, residual_exponent, working_context
from .numerics.constexpr import eval_const
from .numerics.series import DivergentSeries, rhs_shape_value, sum_series
from .poly import Poly, RatFunc
from .wz import (BoundaryNonvanishing, ConstantMismatch, KDependenceDetected, Telescoper,
                 wz_certificate)

ANALYTIC = "analytic_continuation"
BOUNDARY_SAMPLES = (mpq(1, 7), mpq(1, 11), mpq(1, 13))


class AssemblyMismatch(ValueError):
    pass


class ConstantIndeterminate(ArithmeticError):
    """Both sides vanish at the evaluation point, so the constant is not determined there."""


@dataclass
class Identity:
    id: str
    kind: str  # 'pair', 'series', 'product', 'clausen', 'euler'
    section: str | None = None
    term: HyperTerm | None = None
    weight: RatFunc | None = None
    rhs: RhsShape | None = None
    special_k: object = None
    radicand: int | None = None
    flags: frozenset = frozenset()
    partner: str | None = None
    target: str | None = None
    members: tuple = ()
    factor: str | None = None
    digits: int | None = None
    params: dict = field(default_factory=dict)
    note: str = ""
    line: int = 0

    @property
    def analytic_continuation(self) -> bool:
        return ANALYTIC in self.flags

    def references(self) -> list[str]:
        refs = [r for r in (self.partner, self.target) if r]
        return refs + list(self.members)


@dataclass
class BoundaryReport:
    symbolic: bool
    g0_samples: list = field(default_factory=list)
    tail: list = field(default_factory=list)  # (k, N, |G(N,k)|)
    tail_checked: bool = True
    note: str = ""


@dataclass
class ConstantReport:
    status: str  # 'PASS', 'SKIPPED', 'INDETERMINATE'
    k: object = None
    computed: object = None
    expected: object = None
    residual_exp: int | None = None
    digits: int = 0
    terms: int = 0
    reason: str = ""


@dataclass
class CertifiedProof:
    id: str
    telescoper: Telescoper
    boundary: BoundaryReport
    constant: ConstantReport
    ms: float = 0.0

    def render(self) -> str:
        lines = [f"identity {self.id}: PASS",
                 f"telescoper: {self.telescoper.render()}",
                 f"certificate R(n,k) = {self.telescoper.R}"]
        b = self.boundary
        lines.append("boundary: G(0,k) = 0 " + ("symbolically" if b.symbolic else "at sampled k"))
        if b.tail_checked:
            worst = max((t[2] for t in b.tail), default=None)
            lines.append(f"tail: |G(N,k)| <= {_fmt(worst)} at N = {b.tail[0][1] if b.tail else '-'}")
        else:
            lines.append(f"tail: not checked ({b.note})")
        c = self.constant
        if c.status == "PASS":
            lines.append(f"constant at k={format_scalar(c.k)}: {_fmt(c.computed, 20)} "
                         f"(residual 10^{c.residual_exp}, {c.digits} digits)")
        else:
            lines.append(f"constant: {c.status} ({c.reason})")
        return "\n".join(lines)


def _fmt(x, n=6) -> str:
    if x is None:
        return "-"
    import mpmath
    return mpmath.nstr(x, n)


# numeric pieces -------------------------------------------------------------------------

def lhs_sum(ident: Identity, k, digits: int, ctx=None):
    """sum_n term * weight at exact k."""
    return sum_series(ident.term, k, digits, weight=ident.weight, ctx=ctx)


def constant_at(ident: Identity, k, digits: int, ctx=None):
    """(LHS(k) / shape(k), terms used) at exact k."""
    ctx = ctx or working_context(digits + 10)
    s = lhs_sum(ident, k, digits + 5, ctx)
    shape = rhs_shape_value(ident.rhs, k, ctx=ctx)
    if not shape:
        if not s.value:
            raise ConstantIndeterminate(f"both sides vanish at k={format_scalar(k)}")
        raise ConstantMismatch(f"right side vanishes at k={format_scalar(k)} but the sum does not")
    return s.value / shape, s.terms


def _g_value(Fb: HyperTerm, pf: RatFunc, R: RatFunc, n: int, k, ctx):
    rv = R.num.evaluate("n", n).evaluate("k", k)
    rd = R.den.evaluate("n", n).evaluate("k", k)
    if not rv.terms:
        return ctx.mpf(0)
    rval = rv.constant_value() / rd.constant_value()
    return to_mpf(rval, ctx) * eval_term(Fb.with_prefactor(pf), n, k, ctx=ctx)


def _tail_length(z, digits: int) -> int:
    az = abs(float(z))
    if az >= 1:
        return 200
    return max(200, int(math.ceil((digits + 10) / -math.log10(az))))


def check_boundary(ident: Identity, Fb, pf, R, gens, digits: int) -> BoundaryReport:
    gf = RatFunc(R.num * pf.num, R.den * pf.den)
    at0 = gf.num.evaluate("n", 0)
    if not at0.terms:
        report = BoundaryReport(symbolic=True)
    else:
        report = BoundaryReport(symbolic=False)
        for k in BOUNDARY_SAMPLES:
            num = at0.evaluate("k", k)
            if num.terms:
                raise BoundaryNonvanishing(f"G(0,{format_scalar(k)}) is not zero")
            report.g0_samples.append((k, 0))
    if ident.analytic_continuation:
        report.tail_checked = False
        report.note = "divergent left side, certificate only"
        return report
    ctx = working_context(digits + 10)
    z = ident.term.z_base
    N = _tail_length(z, digits)
    eps = ctx.mpf(10) ** (-digits)
    for k in BOUNDARY_SAMPLES:
        try:
            g1 = abs(_g_value(Fb, pf, R, N, k, ctx))
            if abs(float(z)) < 1:
                report.tail.append((k, N, g1))
                if g1 > eps:
                    raise BoundaryNonvanishing(f"|G({N},{format_scalar(k)})| = {_fmt(g1)} is not small")
            else:
                g2 = abs(_g_value(Fb, pf, R, 2 * N, k, ctx))
                g4 = abs(_g_value(Fb, pf, R, 4 * N, k, ctx))
                report.tail.append((k, 4 * N, g4))
                if not (g4 < g2 < g1):
                    raise BoundaryNonvanishing(f"G(N,{format_scalar(k)}) does not decay")
        except PoleEncountered:
            continue
    return report


def check_constant(ident: Identity, digits: int) -> ConstantReport:
    if ident.special_k is None:
        return ConstantReport("SKIPPED", reason="no special point")
    want = ident.digits or digits
    ctx = working_context(want + 10)
    expected = eval_const(ident.rhs.const, want + 5, ctx)
    k = ident.special_k
    try:
        value, terms = constant_at(ident, k, want, ctx)
    except DivergentSeries:
        return ConstantReport("SKIPPED", k, None, expected, digits=want,
                              reason="left side diverges at the special point; constant evaluated only")
    except ConstantIndeterminate as e:
        if ident.analytic_continuation:
            return ConstantReport("INDETERMINATE", k, None, expected, digits=want, reason=str(e))
        raise ConstantMismatch(f"{ident.id}: {e}") from None
    exp = residual_exponent(ctx, value, expected)
    if not agree(ctx, value, expected, want):
        raise ConstantMismatch(f"{ident.id}: constant at k={format_scalar(k)} is {_fmt(value, 30)}, "
                               f"declared {_fmt(expected, 30)}", -exp if exp is not None else None)
    return ConstantReport("PASS", k, value, expected, exp, want, terms)


def certify_identity(ident: Identity, digits: int = 50, constant: bool = True) -> CertifiedProof:
    """Exact WZ certificate, boundary and tail evidence, and the constant at the special point."""
    if ident.kind != "pair":
        raise ValueError(f"{ident.id} is not a pair identity")
    start = time.perf_counter()
    R, Fb, pf, gens = wz_certificate(ident.term, ident.weight, ident.rhs)
    one = Poly.const(gens, 1)
    tel = Telescoper(1, [-one, one], R, gens)
    boundary = check_boundary(ident, Fb, pf, R, gens, digits)
    if constant:
        report = check_constant(ident, digits)
    else:
        report = ConstantReport("SKIPPED", reason="symbolic mode")
    return CertifiedProof(ident.id, tel, boundary, report, (time.perf_counter() - start) * 1000)


@dataclass
class NumericReport:
    status: str  # 'PASS', 'SKIPPED'
    computed: object = None
    expected: object = None
    residual_exp: int | None = None
    digits: int = 0
    terms: int = 0
    method: str = ""
    reason: str = ""
    ms: float = 0.0


def check_series(ident: Identity, digits: int = 50, ctx=None) -> NumericReport:
    """Sum a single series entry at k = 0 and compare with its declared constant."""
    start = time.perf_counter()
    want = ident.digits or digits
    ctx = ctx or working_context(want + 10)
    expected = eval_const(ident.rhs.const, want + 5, ctx)
    try:
        s = lhs_sum(ident, mpq(0), want + 5, ctx)
    except DivergentSeries as e:
        return NumericReport("SKIPPED", None, expected, digits=want, reason=f"DivergentSeries: {e}",
                             ms=(time.perf_counter() - start) * 1000)
    exp = residual_exponent(ctx, s.value, expected)
    if not agree(ctx, s.value, expected, want):
        raise ConstantMismatch(f"{ident.id}: series sums to {_fmt(s.value, 30)}, "
                               f"declared {_fmt(expected, 30)}", -exp if exp is not None else None)
    return NumericReport("PASS", s.value, expected, exp, want, s.terms, s.method,
                         ms=(time.perf_counter() - start) * 1000)


def product_assembly_check(first: Identity, second: Identity, target: Identity,
                           digits: int = 50, factor: str = "1") -> NumericReport:
    """Multiply two pair members at k = 0 and compare with the target series.

    Three values must agree: factor * LHS_1(0) * LHS_2(0), factor * C_1 * C_2
    from the declared constants, and the target's own sum (or declared value
    when the target diverges).
    """
    start = time.perf_counter()
    ctx = working_context(digits + 10)
    f = eval_const(factor, digits + 5, ctx)
    zero = mpq(0)
    a = lhs_sum(first, zero, digits + 5, ctx)
    b = lhs_sum(second, zero, digits + 5, ctx)
    product = f * a.value * b.value
    declared = f * eval_const(first.rhs.const, digits + 5, ctx) * eval_const(second.rhs.const, digits + 5, ctx)
    expected = eval_const(target.rhs.const, digits + 5, ctx)
    values = [("member sums", product), ("member constants", declared)]
    terms = a.terms + b.terms
    if not target.analytic_continuation:
        t = lhs_sum(target, zero, digits + 5, ctx)
        values.append(("target sum", t.value))
        terms += t.terms
    worst = None
    for label, v in values:
        exp = residual_exponent(ctx, v, expected)
        if not agree(ctx, v, expected, digits):
            raise AssemblyMismatch(f"{target.id}: {label} give {_fmt(v, 30)}, target is {_fmt(expected, 30)}")
        if exp is not None:
            worst = exp if worst is None else max(worst, exp)
    return NumericReport("PASS", product, expected, worst, digits, terms, "product",
                         ms=(time.perf_counter() - start) * 1000)


def check_constant_in_k(ident: Identity, k_samples, digits: int = 40) -> list:
    """LHS/shape at each sample k; raises KDependenceDetected when they disagree."""
    if ident.analytic_continuation:
        return []
    ctx = working_context(digits + 10)
    values = []
    for k in k_samples:
        k = mpq(k) if isinstance(k, int) else k
        value, _ = constant_at(ident, k, digits, ctx)
        values.append((k, value))
    ref = values[0][1]
    for k, v in values[1:]:
        if not agree(ctx, v, ref, digits):
            raise KDependenceDetected(f"{ident.id}: value at k={format_scalar(k)} differs from "
                                      f"k={format_scalar(values[0][0])} ({_fmt(v, 20)} vs {_fmt(ref, 20)})")
    return values


__all__ = [
    "Identity", "CertifiedProof", "BoundaryReport", "ConstantReport", "ConstantIndeterminate",
    "certify_identity", "check_constant_in_k", "constant_at", "lhs_sum", "ANALYTIC",
    "NumericReport", "check_series", "product_assembly_check", "AssemblyMismatch",
]

"""Gosper's algorithm, creative telescoping and WZ certification.

Everything here is exact.  Terms reach the solver as factored shift
quotients, so the Gosper normal form only ever compares small factors; the
linear algebra runs over polynomial rings in k and any free parameters.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from gmpy2 import mpq

from .hyperterm import GENS, HyperTerm, RhsShape, shift_quotient_factored
from .linsolve import nullspace
from .poly import Poly, RatFunc, dispersion_set, format_poly, gcd, resultant


class NotGosperSummable(ValueError):
    """The Gosper equation has no polynomial solution within the degree bound."""


class NoTelescoperUpToOrder(ValueError):
    def __init__(self, max_order: int):
        self.max_order = max_order
        super().__init__(f"no telescoper of order <= {max_order}")


class CertificateFails(ValueError):
    pass


class BoundaryNonvanishing(ValueError):
    pass


class ConstantMismatch(ValueError):
    def __init__(self, message: str, digits: float | None = None):
        self.digits = digits
        super().__init__(message)


class NoSolutionInSupportedFields(ValueError):
    def __init__(self, message: str, polynomial: Poly | None = None):
        self.polynomial = polynomial
        super().__init__(message)


class SystemInconsistent(ValueError):
    pass


class KDependenceDetected(ValueError):
    pass


# results ---------------------------------------------------------------------------

@dataclass
class GosperCert:
    R: RatFunc

    def __str__(self):
        return str(self.R)


@dataclass
class Telescoper:
    order: int
    sigma: list  # sigma[j] multiplies F(n, k+j)
    R: RatFunc
    gens: tuple = GENS

    def render(self) -> str:
        parts = [f"({format_poly(s)})*K^{j}" for j, s in enumerate(self.sigma) if s.terms]
        return " + ".join(parts) if parts else "0"


# factor bookkeeping --------------------------------------------------------------------

def _monic(f: Poly):
    lc = f.leading_coeff_lex()
    return lc, (f if lc == 1 else f / lc)


class _Factored:
    """scalar * prod(num) / prod(den) with monic, non-constant factors."""

    __slots__ = ("scalar", "num", "den")

    def __init__(self, scalar=mpq(1), num=(), den=()):
        self.scalar = scalar
        self.num: list[Poly] = []
        self.den: list[Poly] = []
        for f in num:
            self._add(f, self.num, True)
        for f in den:
            self._add(f, self.den, False)

    def _add(self, f: Poly, into: list, numer: bool):
        if f.is_zero():
            if numer:
                self.scalar = mpq(0)
                return
            raise ZeroDivisionError("zero factor in a denominator")
        if f.is_constant():
            c = f.constant_value()
            self.scalar = self.scalar * c if numer else self.scalar / c
            return
        lc, m = _monic(f)
        self.scalar = self.scalar * lc if numer else self.scalar / lc
        into.append(m)


def _product(polys, gens) -> Poly:
    out = Poly.const(gens, 1)
    for p in polys:
        out = out * p
    return out


def _multiset_max(lists) -> Counter:
    total: Counter = Counter()
    for lst in lists:
        c = Counter(lst)
        for f, m in c.items():
            if m > total[f]:
                total[f] = m
    return total


def _minus(total: Counter, lst) -> list:
    rest = Counter(total)
    rest.subtract(Counter(lst))
    out = []
    for f, m in rest.items():
        if m < 0:
            raise ArithmeticError("factor multiset is not a common multiple")
        out.extend([f] * m)
    return out


def _term_gens(term: HyperTerm, extra: RatFunc | None = None) -> tuple:
    gens = list(GENS)
    for p in (term.prefactor.num, term.prefactor.den) + ((extra.num, extra.den) if extra else ()):
        for g in p.gens:
            if g not in gens:
                gens.append(g)
    return tuple(gens)


def _bare(term: HyperTerm, gens) -> HyperTerm:
    return term.with_prefactor(RatFunc(Poly.const(gens, 1), normalize=False))


def _k_pieces(term: HyperTerm, pf: RatFunc, order: int, gens) -> list[_Factored]:
    """F(n, k+j)/T(n, k) for j = 0..order, where F = pf * T."""
    bare = _bare(term, gens)
    num0, den0 = pf.num.set_gens(gens), pf.den.set_gens(gens)
    out = []
    for j in range(order + 1):
        if j == 0:
            out.append(_Factored(mpq(1), [num0], [den0]))
            continue
        scalar, num, den, _ = shift_quotient_factored(bare, "k", j, gens)
        out.append(_Factored(scalar, [num0.shift("k", j)] + num, [den0.shift("k", j)] + den))
    return out


# Gosper normal form ----------------------------------------------------------------------

def _linear_dispersion(f: Poly, g: Poly, var: str):
    """Fast path for f, g monic of degree 1 in var: the h >= 0 with g(var+h) = f."""
    if f.degree(var) != 1 or g.degree(var) != 1:
        return None
    cf, cg = f.coeff_in(var, 1), g.coeff_in(var, 1)
    if not (cf.is_constant() and cg.is_constant()):
        return None
    if cf != cg:
        return set()
    diff = (f - g)  # = cf * h  when g(var + h) = f
    if not diff.is_constant():
        return set()
    h = diff.constant_value() / cf.constant_value()
    try:
        h = mpq(h)
    except TypeError:
        return set()
    if h.denominator == 1 and h >= 0:
        return {int(h)}
    return set()


def _dispersion(f: Poly, g: Poly, var: str) -> set:
    fast = _linear_dispersion(f, g, var)
    if fast is not None:
        return fast
    return dispersion_set(f, g, var)


def gosper_form(a_fac: list, b_fac: list, var: str = "n"):
    """Split r = prod(a)/prod(b) as (a'/b') * c(n+1)/c(n) with gcd(a'(n), b'(n+h)) = 1 for h >= 0."""
    A = [f for f in a_fac if f.has(var)]
    B = [f for f in b_fac if f.has(var)]
    C: list[Poly] = []
    changed = True
    while changed:
        changed = False
        for i in range(len(A)):
            for j in range(len(B)):
                f, g = A[i], B[j]
                for h in sorted(_dispersion(f, g, var)):
                    common = gcd(f, g.shift(var, h), var)
                    if common.is_constant():
                        continue
                    A[i] = f.exact_div(common)
                    B[j] = g.exact_div(common.shift(var, -h))
                    C.extend(common.shift(var, -m) for m in range(1, h + 1))
                    changed = True
                    break
                if changed:
                    break
            if changed:
                A = [f for f in A if not f.is_constant()]
                B = [f for f in B if not f.is_constant()]
                break
    return A, B, C


def _normal_form(fac: _Factored, var: str, gens):
    """(a, b, c') polynomials for the ratio held in ``fac``; factors free of var stay in a and b."""
    A, B, C = gosper_form(fac.num, fac.den, var)
    a = _product(A + [f for f in fac.num if not f.has(var)], gens) * fac.scalar
    b = _product(B + [f for f in fac.den if not f.has(var)], gens)
    return a, b, _product(C, gens)


def _degree_bound(a: Poly, bprev: Poly, deg_c: int, var: str) -> int:
    da, db = a.degree(var), bprev.degree(var)
    if da != db or a.lc_in(var) != bprev.lc_in(var):
        return deg_c - max(da, db)
    s = da
    lc = a.lc_in(var)
    d = deg_c - s + 1
    diff = bprev.coeff_in(var, s - 1) - a.coeff_in(var, s - 1)
    if lc.is_constant() and (diff.is_constant()):
        d0 = diff.constant_value() / lc.constant_value() if diff.terms else mpq(0)
        try:
            d0 = mpq(d0)
        except TypeError:
            return d
        if d0.denominator == 1 and d0 >= 0:
            d = max(d, int(d0))
    else:
        q = RatFunc(diff, lc)
        if q.is_polynomial() and q.num.is_constant():
            d0 = q.num.constant_value() / q.den.constant_value() if q.num.terms else mpq(0)
            try:
                d0 = mpq(d0)
                if d0.denominator == 1 and d0 >= 0:
                    d = max(d, int(d0))
            except TypeError:
                pass
    return d


@dataclass
class _Solution:
    x: Poly
    sigma: list
    bprev: Poly
    cprime: Poly
    vector: list = field(default_factory=list)


def _solve_gosper_system(a: Poly, b: Poly, cprime: Poly, cols: list[Poly], var: str, gens):
    """Solve a(n) x(n+1) - b(n-1) x(n) = c'(n) * sum_j s_j cols_j(n) for polynomial x and s != 0."""
    bprev = b.shift(var, -1)
    rhs_cols = [p * cprime for p in cols]
    deg_c = max(p.degree(var) for p in rhs_cols)
    D = _degree_bound(a, bprev, deg_c, var)
    if D < 0:
        return None
    nvar = Poly.var(gens, var)
    x_cols = []
    pw = Poly.const(gens, 1)
    pw1 = Poly.const(gens, 1)
    for _ in range(D + 1):
        x_cols.append(a * pw1 - bprev * pw)
        pw = pw * nvar
        pw1 = pw1 * (nvar + 1)
    all_cols = x_cols + [-p for p in rhs_cols]
    per_col = [c.coeffs_in(var) for c in all_cols]
    max_deg = max((max(c) if c else -1) for c in per_col)
    zero = Poly.const(gens, 0)
    rows = [[c.get(m, zero) for c in per_col] for m in range(max_deg + 1)]
    ncols = len(all_cols)
    basis = nullspace(rows, ncols, gens)
    nx = D + 1
    for v in basis:
        sig = v[nx:]
        if any(s.terms for s in sig):
            x = Poly.const(gens, 0)
            pw = Poly.const(gens, 1)
            for i in range(nx):
                if v[i].terms:
                    x = x + v[i] * pw
                pw = pw * nvar
            return _Solution(x, sig, bprev, cprime, v)
    return None


# Gosper ------------------------------------------------------------------------------------

def gosper(ratio: RatFunc, var: str = "n") -> GosperCert:
    """Indefinite summation of a term t with t(n+1)/t(n) = ratio.

    Returns R with t(n) = G(n+1) - G(n), G = R t, after checking the identity
    1 = R(n+1) ratio(n) - R(n) exactly.
    """
    if ratio.is_zero():
        raise ValueError("ratio must be nonzero")
    gens = ratio.gens
    if var not in gens:
        gens = (var,) + tuple(gens)
    num, den = ratio.num.set_gens(gens), ratio.den.set_gens(gens)
    a, b, cprime = _normal_form(_Factored(mpq(1), [num], [den]), var, gens)
    sol = _solve_gosper_system(a, b, cprime, [Poly.const(gens, 1)], var, gens)
    if sol is None:
        raise NotGosperSummable("Gosper equation has no polynomial solution")
    s = sol.sigma[0]
    R = RatFunc(sol.bprev * sol.x, cprime * s)
    check = R.shift(var, 1) * ratio - R - 1
    if not check.is_zero():
        raise ArithmeticError("internal error: Gosper certificate failed to verify")
    return GosperCert(R)


# creative telescoping -------------------------------------------------------------------------

def _telescoping_setup(term: HyperTerm, pf: RatFunc, order: int, gens):
    pieces = _k_pieces(term, pf, order, gens)
    Qm = _multiset_max(p.den for p in pieces)
    cols = []
    for p in pieces:
        cols.append(_product(p.num, gens) * _product(_minus(Qm, p.den), gens) * p.scalar)
    Qn = [f for f in Qm.elements() if f.has("n")]
    bare = _bare(term, gens)
    z, tnum, tden, _ = shift_quotient_factored(bare, "n", 1, gens)
    hr = _Factored(z, list(tnum) + Qn, list(tden) + [f.shift("n", 1) for f in Qn])
    a, b, cprime = _normal_form(hr, "n", gens)
    Qprod = _product(Qm.elements(), gens)
    return pieces, cols, a, b, cprime, Qprod


def _certificate(sol: _Solution, s: Poly, pf: RatFunc, Qprod: Poly) -> RatFunc:
    num = sol.bprev * sol.x * pf.den.set_gens(sol.x.gens)
    den = sol.cprime * Qprod * pf.num.set_gens(sol.x.gens) * s
    return RatFunc(num, den)


def _combined_prefactor(term: HyperTerm, weight, gens) -> RatFunc:
    pf = term.prefactor
    if weight is not None:
        w = weight if isinstance(weight, RatFunc) else RatFunc(weight, normalize=False)
        pf = pf * w
    return RatFunc(pf.num.set_gens(gens), pf.den.set_gens(gens), normalize=False)


def _telescope(term: HyperTerm, pf: RatFunc, J: int, gens):
    """Order-J solution with sigma normalized (last nonzero sigma has lex-leading coefficient 1)."""
    pieces, cols, a, b, cprime, Qprod = _telescoping_setup(term, pf, J, gens)
    sol = _solve_gosper_system(a, b, cprime, cols, "n", gens)
    if sol is None:
        return None
    sigma = list(sol.sigma)
    x = sol.x
    lead = next(s for s in reversed(sigma) if s.terms)
    lc = lead.leading_coeff_lex()
    if lc != 1:
        sigma = [s / lc for s in sigma]
        x = x / lc
    return _Solution(x, sigma, sol.bprev, sol.cprime), Qprod


def zeilberger(term: HyperTerm, max_order: int = 2, weight=None, min_order: int = 1) -> Telescoper:
    """Minimal creative-telescoping relation sum_j sigma_j(k) F(n, k+j) = G(n+1) - G(n).

    F is ``term`` times the optional ``weight`` (a Poly or RatFunc, possibly in
    extra parameter generators).  Orders min_order..max_order are tried in turn.
    """
    if max_order < 1:
        raise NoTelescoperUpToOrder(max_order)
    gens = _term_gens(term, weight if isinstance(weight, RatFunc) else
                      (RatFunc(weight, normalize=False) if weight is not None else None))
    pf = _combined_prefactor(term, weight, gens)
    for J in range(max(1, min_order), max_order + 1):
        found = _telescope(term, pf, J, gens)
        if found is None:
            continue
        sol, Qprod = found
        sigma = sol.sigma
        R = _certificate(sol, Poly.const(gens, 1), pf, Qprod)
        tel = Telescoper(J, sigma, R, gens)
        if not verify_telescoper(term, pf, sigma, R, gens):
            raise ArithmeticError("internal error: telescoper failed to verify")
        return tel
    raise NoTelescoperUpToOrder(max_order)


def verify_telescoper(term: HyperTerm, pf: RatFunc, sigma: list, R: RatFunc, gens=None) -> bool:
    """Exact check of sum_j sigma_j F(n,k+j)/F(n,k) - R(n+1) F(n+1,k)/F(n,k) + R(n) == 0.

    All quotients are rebuilt from the term's own Pochhammer data, independently
    of the factor lists the solver used.
    """
    gens = gens or _term_gens(term, pf)
    bare = _bare(term, gens)
    pn, pd = pf.num.set_gens(gens), pf.den.set_gens(gens)
    Rn, Rd = R.num.set_gens(gens), R.den.set_gens(gens)
    summands: list[tuple[Poly, _Factored]] = []
    for j, s in enumerate(sigma):
        s = s.set_gens(gens)
        if not s.terms:
            continue
        if j == 0:
            f = _Factored(mpq(1), [pn], [pn])
        else:
            sc, num, den, _ = shift_quotient_factored(bare, "k", j, gens)
            f = _Factored(sc, [pn.shift("k", j), pd] + num, [pd.shift("k", j), pn] + den)
        summands.append((s, f))
    sc, num, den, _ = shift_quotient_factored(bare, "n", 1, gens)
    fn = _Factored(-sc, [pn.shift("n", 1), pd, Rn.shift("n", 1)] + num,
                   [pd.shift("n", 1), pn, Rd.shift("n", 1)] + den)
    summands.append((Poly.const(gens, 1), fn))
    summands.append((Poly.const(gens, 1), _Factored(mpq(1), [Rn], [Rd])))
    common = _multiset_max(f.den for _, f in summands)
    total = Poly.const(gens, 0)
    for s, f in summands:
        total = total + s * _product(f.num, gens) * _product(_minus(common, f.den), gens) * f.scalar
    return total.is_zero()


# WZ certification of catalog identities ------------------------------------------------------

def wz_function(term: HyperTerm, weight, rhs: RhsShape):
    """F = term * weight / rhs-shape(k) as (bare term, prefactor, gens)."""
    gens = _term_gens(term, weight if isinstance(weight, RatFunc) else
                      (RatFunc(weight, normalize=False) if weight is not None else None))
    F = term * rhs.as_term().inverse()
    pf = _combined_prefactor(term, weight, gens)
    return _bare(F, gens), pf, gens


def wz_certificate(term: HyperTerm, weight, rhs: RhsShape) -> tuple[RatFunc, HyperTerm, RatFunc, tuple]:
    """Certificate R with F(n,k+1) - F(n,k) = G(n+1,k) - G(n,k), G = R F."""
    Fb, pf, gens = wz_function(term, weight, rhs)
    pieces, cols, a, b, cprime, Qprod = _telescoping_setup(Fb, pf, 1, gens)
    col = cols[1] - cols[0]
    if col.is_zero():
        raise CertificateFails("F(n,k+1) - F(n,k) vanishes identically")
    sol = _solve_gosper_system(a, b, cprime, [col], "n", gens)
    if sol is None:
        raise CertificateFails("no rational certificate: F(n,k+1) - F(n,k) is not Gosper-summable in n")
    R = _certificate(sol, sol.sigma[0], pf, Qprod)
    one = Poly.const(gens, 1)
    if not verify_telescoper(Fb, pf, [-one, one], R, gens):
        raise CertificateFails("certificate residual is not zero")
    return R, Fb, pf, gens


# complement solver ------------------------------------------------------------------------------

def _poly_system_gcd(polys):
    g = None
    for p in polys:
        g = p if g is None else gcd(g, p)
        if g.is_constant():
            break
    return g


def solve_bc_system(polys: list[Poly], radicand: int | None = None):
    """Common zeros (b, c) of polynomials in b and c, with coordinates in Q or Q(sqrt d).

    c is isolated through resultants in b; each root c0 is substituted back and
    the b-roots of the gcd are kept when every equation vanishes exactly.
    """
    from .roots import roots_in_field

    gens = ("b", "c")
    eqs = []
    for p in polys:
        p = p.set_gens(gens)
        if p.terms and p not in eqs:
            eqs.append(p)
    if not eqs:
        raise NoSolutionInSupportedFields("the equations vanish identically; (b, c) is unconstrained")
    if any(p.is_constant() for p in eqs):
        raise SystemInconsistent("a nonzero constant equation")
    common = _poly_system_gcd(eqs)
    if not common.is_constant() and common.has("b") and common.has("c"):
        raise NoSolutionInSupportedFields("the solution set is a curve", common)
    with_b = [p for p in eqs if p.has("b")]
    elim = [p for p in eqs if not p.has("b")]
    for i in range(len(with_b)):
        for j in range(i + 1, len(with_b)):
            r = resultant(with_b[i], with_b[j], "b")
            if r.terms:
                elim.append(r)
    if not elim:
        raise NoSolutionInSupportedFields("c is not determined by the equations", with_b[0])
    gc = _poly_system_gcd(elim)
    if gc.is_constant():
        raise SystemInconsistent("the eliminant in c is a nonzero constant")
    c_roots, radicand = roots_in_field(gc, "c", radicand)
    if not c_roots:
        raise NoSolutionInSupportedFields("no root of the eliminant in a supported field", gc)
    out = []
    for c0 in c_roots:
        sub = [p.evaluate("c", c0) for p in eqs]
        sub = [p for p in sub if p.terms]
        if not sub:
            continue
        gb = _poly_system_gcd(sub)
        if gb.is_constant():
            continue
        b_roots, radicand = roots_in_field(gb, "b", radicand)
        for b0 in b_roots:
            if all(p.evaluate("b", b0).evaluate("c", c0).is_zero() for p in eqs):
                out.append((b0, c0))
    return out


def _solution_key(sol):
    from .exact import QuadSurd

    b, c = sol
    surd = any(isinstance(v, QuadSurd) and v.b for v in sol)
    return (surd, float(b), float(c))


def find_complement(term: HyperTerm, radicand: int | None = None) -> list[tuple]:
    """All (b, c) making the order-2 telescoper of term*(n + b k + c) collapse to order 1."""
    gens = tuple(dict.fromkeys(_term_gens(term) + ("b", "c")))
    weight = Poly.var(gens, "n") + Poly.var(gens, "b") * Poly.var(gens, "k") + Poly.var(gens, "c")
    pf = _combined_prefactor(term, weight, gens)
    found = _telescope(term, pf, 2, gens)
    if found is None:
        raise NoTelescoperUpToOrder(2)
    sol, _ = found
    sigma2 = sol.sigma[2]
    if not sigma2.terms:
        raise NoSolutionInSupportedFields("the order-2 coefficient vanishes for every (b, c)")
    coeffs = list(sigma2.coeffs_in("k").values())
    content = _poly_system_gcd(coeffs)
    if not content.is_constant():
        coeffs = [c.exact_div(content) for c in coeffs]
    pairs = solve_bc_system(coeffs, radicand)
    good = []
    for b0, c0 in pairs:
        w0 = weight.evaluate("b", b0).evaluate("c", c0)
        try:
            zeilberger(term, max_order=1, weight=w0.set_gens(GENS))
        except NoTelescoperUpToOrder:
            continue
        good.append((b0, c0))
    if not good:
        raise NoSolutionInSupportedFields("no candidate (b, c) admits an order-1 telescoper")
    return sorted(good, key=_solution_key)


__all__ = [
    "GosperCert", "Telescoper", "gosper", "gosper_form", "zeilberger", "verify_telescoper",
    "wz_function", "wz_certificate", "NotGosperSummable", "NoTelescoperUpToOrder",
    "CertificateFails", "BoundaryNonvanishing", "ConstantMismatch", "NoSolutionInSupportedFields",
    "SystemInconsistent", "KDependenceDetected", "find_complement", "solve_bc_system",
]

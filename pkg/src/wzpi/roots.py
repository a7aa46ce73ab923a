"""Roots of univariate polynomials in Q or a quadratic field Q(sqrt d).

Candidates come from numeric roots of the rational norm polynomial; every
returned root is confirmed by exact substitution, so the numerics only
propose and never decide.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from gmpy2 import mpq

from .exact import QuadSurd, radicand_of, squarefree_part
from .poly import Poly, gcd


def _coeff_list(p: Poly, var: str) -> list:
    cs = p.coeffs_in(var)
    out = []
    for i in range(max(cs) + 1 if cs else 0):
        c = cs.get(i)
        out.append(c.constant_value() if c is not None else mpq(0))
    return out


def _conjugate_poly(p: Poly) -> Poly:
    return p.map_coeffs(lambda c: c.conjugate() if isinstance(c, QuadSurd) else c)


def _rational_poly(p: Poly) -> Poly:
    """p * conj(p), which has rational coefficients."""
    if not any(isinstance(c, QuadSurd) and c.b for c in p.terms.values()):
        return p.map_coeffs(lambda c: c.a if isinstance(c, QuadSurd) else c)
    q = p * _conjugate_poly(p)
    return q.map_coeffs(lambda c: c.a if isinstance(c, QuadSurd) else c)


def _squarefree(p: Poly, var: str) -> Poly:
    g = gcd(p, p.diff(var), var)
    return p if g.is_constant() else p.exact_div(g)


def _recognize(x, max_den: int = 10**15) -> mpq:
    f = Fraction(mpmath.nstr(x, 60, strip_zeros=False)).limit_denominator(max_den)
    return mpq(f.numerator, f.denominator)


def _is_root(p: Poly, var: str, value) -> bool:
    v = p.evaluate(var, value)
    return v.is_zero()


def roots_in_field(p: Poly, var: str, radicand: int | None = None) -> tuple[list, int | None]:
    """Roots of p (univariate in var) lying in Q or Q(sqrt radicand).

    Returns (roots, radicand); when no radicand is given and a quadratic root
    appears, its radicand is adopted for the rest of the computation.
    """
    if p.degree(var) <= 0:
        return [], radicand
    coeff_d = radicand_of(*p.terms.values())
    if coeff_d is not None:
        if radicand is not None and radicand != coeff_d:
            return [], radicand
        radicand = coeff_d
    norm = _squarefree(_rational_poly(p), var)
    coeffs = _coeff_list(norm, var)
    deg = len(coeffs) - 1
    roots: list = []
    if deg == 1:
        cands = [[-coeffs[0] / coeffs[1]]]
    else:
        with mpmath.workdps(80):
            numeric = mpmath.polyroots([mpmath.mpf(int(c.numerator)) / int(c.denominator)
                                        for c in reversed(coeffs)], maxsteps=400, extraprec=400)
        real = [mpmath.re(r) for r in numeric if abs(mpmath.im(r)) < mpmath.mpf(10) ** -40]
        cands = []
        with mpmath.workdps(80):
            for r in real:
                cands.append([_recognize(r)])
            for i in range(len(real)):
                for j in range(i + 1, len(real)):
                    s, q = _recognize(real[i] + real[j]), _recognize(real[i] * real[j])
                    cands.append(("pair", s, q))
    seen = set()
    for cand in cands:
        if cand[0] == "pair":
            _, s, q = cand
            disc = s * s / 4 - q
            if disc <= 0:
                continue
            num, den = int(disc.numerator), int(disc.denominator)
            free, sq = squarefree_part(num * den)
            if free == 1:
                continue
            if radicand is not None and free != radicand:
                continue
            half = mpq(sq, den)
            vals = [QuadSurd(s / 2, half, free), QuadSurd(s / 2, -half, free)]
            ok = [v for v in vals if _is_root(p, var, v)]
            if ok and radicand is None:
                radicand = free
        else:
            ok = [v for v in cand if _is_root(p, var, v)]
        for v in ok:
            key = (v.a, v.b) if isinstance(v, QuadSurd) else (v, 0)
            if key not in seen:
                seen.add(key)
                roots.append(v)
    return roots, radicand

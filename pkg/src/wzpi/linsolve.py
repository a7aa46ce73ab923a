"""Fraction-free Gauss-Jordan elimination over polynomial rings.

Entries are :class:`~wzpi.poly.Poly` values in the parameters (k, b, c, ...).
Every update divides exactly by the previous pivot, so entries stay
polynomial and of controlled size, and at the end every pivot equals the
last pivot used.  Nullspace vectors are read off the reduced form without
leaving the ring.
"""

from __future__ import annotations

from .poly import Poly, gcd, _normalize_unit


def _pick_pivot(rows, start: int, col: int):
    best, best_size = None, None
    for i in range(start, len(rows)):
        e = rows[i][col]
        if e.terms:
            size = sum(1 for _ in e.terms) + 4 * e.degree()
            if best is None or size < best_size:
                best, best_size = i, size
    return best


def reduce_matrix(rows: list[list[Poly]], ncols: int):
    """In-place fraction-free Gauss-Jordan; returns (rows, pivot columns, last pivot)."""
    rows = [list(r) for r in rows if any(e.terms for e in r)]
    if not rows:
        return rows, [], None
    one = Poly.const(rows[0][0].gens, 1)
    prev = one
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r >= len(rows):
            break
        p = _pick_pivot(rows, r, col)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        piv = prow[col]
        for i, row in enumerate(rows):
            if i == r:
                continue
            m = row[col]
            new = []
            for j in range(ncols):
                v = piv * row[j]
                if m.terms and prow[j].terms:
                    v = v - m * prow[j]
                new.append(v if prev == one else v.exact_div(prev))
            rows[i] = new
        prev = piv
        pivots.append(col)
        r += 1
    rows = rows[:r]
    return rows, pivots, prev


def nullspace(rows: list[list[Poly]], ncols: int, gens) -> list[list[Poly]]:
    """Basis of the right nullspace, one primitive polynomial vector per free column."""
    reduced, pivots, d = reduce_matrix(rows, ncols)
    zero = Poly.const(gens, 0)
    if d is None:
        d = Poly.const(gens, 1)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = d
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[f]
        basis.append(primitive_vector(v))
    return basis


def primitive_vector(v: list[Poly]) -> list[Poly]:
    """Divide a polynomial vector by the gcd of its entries."""
    g = None
    for e in sorted((e for e in v if e.terms), key=lambda e: len(e.terms)):
        g = e if g is None else gcd(g, e)
        if g.is_constant():
            break
    if g is None:
        return v
    g = _normalize_unit(g) if not g.is_constant() else g
    if g.is_constant():
        c = g.constant_value()
        return [e / c for e in v] if c != 1 else v
    return [e.exact_div(g) for e in v]

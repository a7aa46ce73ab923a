"""Closed-form constants: pi, Gamma at rationals, radicals, rational powers.

A constant is written in the shared infix grammar, e.g.
``3*sqrt(3)/pi`` or ``pi*2^(2/3)*sqrt(4-2*sqrt(2))/(2*gamma(13/24)*gamma(19/24)*gamma(2/3))``.
Exponents must be exact rationals; Gamma arguments must be exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from ..exact import as_rational
from ..expr import ParseError, UnknownVariable, eval_scalar_ast, node_pos, parse
from .bigfloat import agree, working_context
from .gamma import PoleAtNonPositiveInteger, gamma

_FUNCS = ("gamma", "sqrt", "root")
MAX_ESCALATIONS = 3


class DomainError(ValueError):
    """Even root or fractional power of a negative value, or a Gamma pole."""


class PrecisionUnreachable(ArithmeticError):
    pass


def _exact(node, text):
    """Exact rational value of a sub-expression built from integers only, or None."""
    try:
        v = eval_scalar_ast(node, text)
    except (ParseError, ZeroDivisionError):
        return None
    return as_rational(v)


def _check(node, text):
    kind = node[0]
    if kind == "name":
        if node[1] != "pi":
            raise UnknownVariable(f"unknown name {node[1]!r}", text, node_pos(node))
        return
    if kind == "num":
        return
    if kind == "neg":
        _check(node[1], text)
        return
    if kind == "call":
        name, args = node[1], node[2]
        want = 2 if name == "root" else 1
        if len(args) != want:
            raise ParseError(f"{name}() takes {want} argument(s)", text, node_pos(node))
        if name == "gamma" and _exact(args[0], text) is None:
            raise ParseError("gamma() needs an exact rational argument", text, node_pos(node))
        if name == "root":
            m = _exact(args[1], text)
            if m is None or m.denominator != 1 or m < 1:
                raise ParseError("root(x, m) needs a positive integer m", text, node_pos(node))
        _check(args[0], text)
        return
    if kind == "pow":
        if _exact(node[2], text) is None:
            raise ParseError("exponent must be an exact rational", text, node_pos(node))
    _check(node[1], text)
    _check(node[2], text)


@dataclass(frozen=True)
class ConstExpr:
    text: str
    tree: tuple

    def evaluate(self, digits: int = 50, ctx=None):
        return eval_const(self, digits, ctx)

    def __str__(self):
        return self.text


def const_expr(text: str) -> ConstExpr:
    tree = parse(text, _FUNCS)
    _check(tree, text)
    return ConstExpr(text, tree)


def _rational_power(ctx, base, e: mpq):
    if e.denominator == 1:
        return base ** int(e)
    if base < 0:
        if e.denominator % 2 == 0:
            raise DomainError("fractional power with even denominator of a negative value")
        return -ctx.power(-base, ctx.mpf(int(e.numerator)) / int(e.denominator))
    if not base and e < 0:
        raise DomainError("negative power of zero")
    return ctx.power(base, ctx.mpf(int(e.numerator)) / int(e.denominator))


def _eval(node, text, ctx):
    kind = node[0]
    if kind == "num":
        return ctx.mpf(node[1])
    if kind == "name":
        return +ctx.pi
    if kind == "neg":
        return -_eval(node[1], text, ctx)
    if kind == "call":
        name, args = node[1], node[2]
        if name == "gamma":
            q = _exact(args[0], text)
            try:
                return gamma(q, ctx=ctx)
            except PoleAtNonPositiveInteger as e:
                raise DomainError(str(e)) from None
        x = _eval(args[0], text, ctx)
        m = 2 if name == "sqrt" else int(_exact(args[1], text))
        return _rational_power(ctx, x, mpq(1, m))
    if kind == "pow":
        return _rational_power(ctx, _eval(node[1], text, ctx), _exact(node[2], text))
    a, b = _eval(node[1], text, ctx), _eval(node[2], text, ctx)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if not b:
        raise DomainError("division by zero")
    return a / b


def eval_const(expr, digits: int = 50, ctx=None):
    """Value of a constant to ``digits`` correct digits.

    The expression is evaluated at two precisions; if they disagree the
    precision doubles, at most three times.  The result lives in ``ctx`` when
    given, otherwise in a fresh context for ``digits``.
    """
    if isinstance(expr, str):
        expr = const_expr(expr)
    out_ctx = ctx if ctx is not None else working_context(digits)
    extra = 32
    prev = _eval(expr.tree, expr.text, working_context(digits, extra))
    for _ in range(MAX_ESCALATIONS + 1):
        extra *= 2
        hi_ctx = working_context(digits, extra)
        cur = _eval(expr.tree, expr.text, hi_ctx)
        if agree(hi_ctx, prev, cur, digits + 2):
            return out_ctx.mpf(cur)
        prev = cur
    raise PrecisionUnreachable(f"{expr.text} did not stabilize at {digits} digits")


__all__ = ["ConstExpr", "const_expr", "eval_const", "DomainError", "PrecisionUnreachable"]

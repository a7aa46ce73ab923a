"""Tokenizer and recursive-descent parser shared by every textual format.

The grammar is ordinary infix arithmetic with ``^`` powers, implicit
multiplication by juxtaposition (``2k``, ``k(80n+12)``) and function calls.
Parsing produces a small tuple AST; the interpreters below turn it into a
scalar or a rational function.  Terms and closed-form constants have their own
interpreters in :mod:`wzpi.hyperterm` and :mod:`wzpi.numerics.constexpr`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .exact import QuadSurd, as_rational, is_rational


class ParseError(ValueError):
    """Malformed input; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col = line, col
        super().__init__(f"{message} (line {line}, col {col})")


class UnknownVariable(ParseError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(Token("num", m.group(1), start))
        elif m.group(2):
            tokens.append(Token("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(Token("op", op, start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class Parser:
    """Builds nested tuples: ('num', int), ('name', str), ('call', name, args),
    ('neg', x), and binary ('add'|'sub'|'mul'|'div'|'pow', a, b).  Every node
    carries its source offset as the last element."""

    def __init__(self, text: str, functions=frozenset()):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.functions = set(functions)

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> Token:
        tok = self.next()
        if tok.value != value:
            raise ParseError(f"expected {value!r}, found {tok.value or 'end of input'!r}", self.text, tok.pos)
        return tok

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok.pos)

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().value!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().value in ("+", "-") and self.peek().kind == "op":
            tok = self.next()
            rhs = self.term()
            node = ("add" if tok.value == "+" else "sub", node, rhs, tok.pos)
        return node

    def _starts_atom(self, tok: Token) -> bool:
        return tok.kind in ("num", "name") or tok.value == "("

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.value in ("*", "/"):
                self.next()
                rhs = self.unary()
                node = ("mul" if tok.value == "*" else "div", node, rhs, tok.pos)
            elif self._starts_atom(tok):
                rhs = self.power()
                node = ("mul", node, rhs, tok.pos)
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.value in ("-", "+"):
            self.next()
            inner = self.unary()
            return ("neg", inner, tok.pos) if tok.value == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.value == "^":
            self.next()
            exp = self.unary()
            return ("pow", base, exp, tok.pos)
        return base

    def atom(self):
        tok = self.next()
        if tok.kind == "num":
            return ("num", int(tok.value), tok.pos)
        if tok.kind == "name":
            if self.peek().value == "(" and tok.value in self.functions:
                self.next()
                args = [self.expr()]
                while self.peek().value == ",":
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                return ("call", tok.value, args, tok.pos)
            return ("name", tok.value, tok.pos)
        if tok.value == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {tok.value or 'end of input'!r}", tok)


def parse(text: str, functions=()) -> tuple:
    return Parser(text, functions).parse()


def node_pos(node) -> int:
    return node[-1]


# scalar and rational-function interpreters -----------------------------------------

def eval_scalar_ast(node, text: str = ""):
    """Exact value of a constant AST built from integers, + - * /, integer powers and sqrt(int)."""
    kind = node[0]
    if kind == "num":
        return mpq(node[1])
    if kind == "neg":
        return -eval_scalar_ast(node[1], text)
    if kind in ("add", "sub", "mul", "div"):
        a = eval_scalar_ast(node[1], text)
        b = eval_scalar_ast(node[2], text)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if not b:
            raise ParseError("division by zero", text, node_pos(node))
        return a / b
    if kind == "pow":
        e = eval_scalar_ast(node[2], text)
        er = as_rational(e)
        if er is None or er.denominator != 1:
            raise ParseError("exponent must be an integer", text, node_pos(node))
        return eval_scalar_ast(node[1], text) ** int(er)
    if kind == "call" and node[1] == "sqrt" and len(node[2]) == 1:
        arg = as_rational(eval_scalar_ast(node[2][0], text))
        if arg is None or arg.denominator != 1 or arg <= 0:
            raise ParseError("sqrt() takes a positive integer here", text, node_pos(node))
        from .exact import scalar_sqrt
        r = scalar_sqrt(arg)
        return r if r is not None else QuadSurd(0, 1, int(arg))
    if kind == "name":
        raise UnknownVariable(f"unknown name {node[1]!r}", text, node_pos(node))
    raise ParseError("not a scalar expression", text, node_pos(node))


def parse_scalar_expr(text: str):
    return eval_scalar_ast(parse(text, ("sqrt",)), text)


def eval_ratfunc_ast(node, gens, text: str = ""):
    from .poly import Poly, RatFunc

    def rec(nd):
        kind = nd[0]
        if kind == "num":
            return RatFunc(Poly.const(gens, nd[1]), normalize=False)
        if kind == "name":
            if nd[1] in gens:
                return RatFunc(Poly.var(gens, nd[1]), normalize=False)
            raise UnknownVariable(f"unknown variable {nd[1]!r}", text, node_pos(nd))
        if kind == "neg":
            return -rec(nd[1])
        if kind == "call":
            val = eval_scalar_ast(nd, text)
            return RatFunc(Poly.const(gens, val), normalize=False)
        if kind == "pow":
            try:
                e = eval_scalar_ast(nd[2], text)
            except UnknownVariable:
                raise ParseError("exponent must be an integer constant", text, node_pos(nd)) from None
            er = as_rational(e)
            if er is None or er.denominator != 1:
                raise ParseError("exponent must be an integer", text, node_pos(nd))
            return rec(nd[1]) ** int(er)
        a, b = rec(nd[1]), rec(nd[2])
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if b.is_zero():
            raise ParseError("division by zero", text, node_pos(nd))
        return a / b

    return rec(node)


def parse_rational_function(text: str, gens=("n", "k")):
    return eval_ratfunc_ast(parse(text, ("sqrt",)), tuple(gens), text)


def is_scalar_value(x) -> bool:
    return isinstance(x, QuadSurd) or is_rational(x)

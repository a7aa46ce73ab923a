"""The identity catalog: a small block-structured text format.

    # comment to end of line
    section s3-z1over2 { title = "s = 3, z = 1/2"; s = 3; z = 1/2; }

    identity eq1 {
        kind = pair;
        section = s3-z1over2;
        term = "poch(1/3+2k,n)*poch(1/6+4k,n)/(poch(1+3k,n)*poch(1,n))*(1/2)^n";
        rhs_const = "...";
        rhs_poch = "poch(1/3,k)*poch(1,k)/(poch(13/24,k)*poch(19/24,k))";
        geo_base = 27/4;
        special_k = -1/6;
        partner = eq2;
        target = rama-1over2-0;
    }

Values are double-quoted strings, bare words (ids, integers, rationals,
scalar expressions without spaces) or bracketed lists of bare words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from .exact import as_rational, radicand_of
from .expr import ParseError as ExprParseError, parse_rational_function, parse_scalar_expr
from .hyperterm import RhsShape, parse_term
from .identity import ANALYTIC, Identity
from .numerics.constexpr import const_expr

KINDS = ("pair", "series", "product", "clausen", "euler")
FLAGS = (ANALYTIC,)

_KEYS = {
    "kind", "section", "term", "weight", "rhs_const", "rhs_poch", "geo_base", "special_k",
    "radicand", "partner", "target", "flags", "digits", "members", "factor", "which", "order",
    "a", "b", "c", "z", "note",
}
_SECTION_KEYS = {"title", "s", "z"}
_REQUIRED = {
    "pair": ("term", "rhs_const", "rhs_poch", "special_k"),
    "series": ("term", "rhs_const"),
    "product": ("members", "target"),
    "clausen": ("which", "order"),
    "euler": ("a", "b", "c", "z"),
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = ""):
        self.line, self.col, self.source = line, col, source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


class DanglingReference(ValueError):
    pass


class DuplicateId(ValueError):
    pass


@dataclass
class Section:
    id: str
    title: str = ""
    s: int | None = None
    z: object = None


@dataclass
class Catalog:
    entries: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries.values())

    def __contains__(self, ident_id):
        return ident_id in self.entries

    def __getitem__(self, ident_id) -> Identity:
        return self.entries[ident_id]

    def ids(self) -> list[str]:
        return sorted(self.entries)

    def of_kind(self, kind: str) -> list[Identity]:
        return [e for e in self.entries.values() if e.kind == kind]


# lexer ------------------------------------------------------------------------------------

_TOKEN = re.compile(r'''
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[{};=\[\],])
  | (?P<word>[^\s{};=\[\],"#]+)
''', re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    value: str
    line: int
    col: int


def _lex(text: str, source: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "string":
            body = m.group()[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            toks.append(_Tok("string", body, line, col))
        elif kind in ("punct", "word"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Reader:
    def __init__(self, toks, source):
        self.toks, self.i, self.source = toks, 0, source

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col, self.source)

    def expect(self, value):
        t = self.next()
        if t.value != value or t.kind not in ("punct", "word"):
            self.fail(f"expected {value!r}, found {t.value or 'end of file'!r}", t)
        return t

    def word(self, what):
        t = self.next()
        if t.kind != "word":
            self.fail(f"expected {what}, found {t.value or 'end of file'!r}", t)
        return t

    def value(self):
        t = self.peek()
        if t.kind in ("string", "word"):
            return self.next()
        if t.value == "[":
            self.next()
            items = []
            while self.peek().value != "]":
                items.append(self.word("list item"))
                if self.peek().value == ",":
                    self.next()
                elif self.peek().value != "]":
                    self.fail("expected ',' or ']'")
            self.next()
            return _Tok("list", items, t.line, t.col)
        self.fail(f"expected a value, found {t.value or 'end of file'!r}")


def _block(r: _Reader, allowed) -> dict:
    r.expect("{")
    fields = {}
    while r.peek().value != "}":
        if r.peek().kind == "end":
            r.fail("unterminated block")
        key = r.word("a key")
        if key.value not in allowed:
            r.fail(f"unknown key {key.value!r}", key)
        if key.value in fields:
            r.fail(f"duplicate key {key.value!r}", key)
        r.expect("=")
        fields[key.value] = r.value()
        r.expect(";")
    r.next()
    return fields


# field interpretation -----------------------------------------------------------------

def _field_error(r: _Reader, tok: _Tok, err: Exception):
    col = tok.col
    if isinstance(err, ExprParseError) and tok.kind == "string":
        col += err.pos + 1
    raise ParseError(str(err), tok.line, col, r.source) from None


def _scalar(r, tok):
    try:
        return parse_scalar_expr(tok.value)
    except (ExprParseError, ValueError, ZeroDivisionError) as e:
        _field_error(r, tok, e)


def _rational(r, tok):
    v = _scalar(r, tok)
    q = as_rational(v)
    if q is None:
        r.fail("expected a rational number", tok)
    return q


def _integer(r, tok):
    q = _rational(r, tok)
    if q.denominator != 1:
        r.fail("expected an integer", tok)
    return int(q)


def _ident_ref(r, tok):
    if tok.kind != "word":
        r.fail("expected an id", tok)
    return tok.value


def _rhs_shape(r, fields, const):
    numer, denom, geo = [], [], mpq(1)
    tok = fields.get("rhs_poch")
    if tok is not None and tok.value.strip() != "1":
        try:
            t = parse_term(tok.value)
        except (ExprParseError, ValueError) as e:
            _field_error(r, tok, e)
        if (t.z_base != 1 or not t.prefactor.num.is_constant() or not t.prefactor.den.is_constant()
                or t.prefactor.num.constant_value() != t.prefactor.den.constant_value()):
            r.fail("rhs_poch may only contain Pochhammers in k and a k-geometric factor", tok)
        for group, out in ((t.numer_poch, numer), (t.denom_poch, denom)):
            for p in group:
                if p.index != "k" or p.arg.k_coeff or p.arg.n_coeff:
                    r.fail("rhs_poch needs Pochhammers (a)_k with constant a", tok)
                out.append(p.arg.const)
        geo = t.w_base
    if "geo_base" in fields:
        geo = geo * _scalar(r, fields["geo_base"])
    return RhsShape(const, tuple(numer), tuple(denom), geo)


def _identity(r: _Reader, ident_id: str, fields: dict, line: int, section_ids) -> Identity:
    if "kind" not in fields:
        r.fail(f"identity {ident_id} has no kind")
    kind = fields["kind"].value
    if kind not in KINDS:
        r.fail(f"unknown kind {kind!r}", fields["kind"])
    for key in _REQUIRED[kind]:
        if key not in fields:
            r.fail(f"identity {ident_id} ({kind}) needs {key}")
    ident = Identity(id=ident_id, kind=kind, line=line)
    if "section" in fields:
        ident.section = _ident_ref(r, fields["section"])
    if "term" in fields:
        tok = fields["term"]
        try:
            ident.term = parse_term(tok.value)
        except (ExprParseError, ValueError) as e:
            _field_error(r, tok, e)
    if "weight" in fields:
        tok = fields["weight"]
        try:
            ident.weight = parse_rational_function(tok.value, ("n", "k"))
        except (ExprParseError, ValueError) as e:
            _field_error(r, tok, e)
    if "rhs_const" in fields:
        tok = fields["rhs_const"]
        try:
            const_expr(tok.value)
        except (ExprParseError, ValueError) as e:
            _field_error(r, tok, e)
        ident.rhs = _rhs_shape(r, fields, tok.value)
    if "factor" in fields:
        tok = fields["factor"]
        try:
            const_expr(tok.value)
        except (ExprParseError, ValueError) as e:
            _field_error(r, tok, e)
        ident.factor = tok.value
    elif kind == "product":
        ident.factor = "1"
    if "special_k" in fields:
        ident.special_k = _rational(r, fields["special_k"])
    if "radicand" in fields:
        ident.radicand = _integer(r, fields["radicand"])
    if "digits" in fields:
        ident.digits = _integer(r, fields["digits"])
    if "flags" in fields:
        tok = fields["flags"]
        items = tok.value if tok.kind == "list" else [tok]
        for it in items:
            if it.value not in FLAGS:
                r.fail(f"unknown flag {it.value!r}", it)
        ident.flags = frozenset(it.value for it in items)
    for key in ("partner", "target"):
        if key in fields:
            setattr(ident, key, _ident_ref(r, fields[key]))
    if "members" in fields:
        tok = fields["members"]
        if tok.kind != "list" or len(tok.value) != 2:
            r.fail("members needs a list of two ids", tok)
        ident.members = tuple(t.value for t in tok.value)
    for key in ("which", "order"):
        if key in fields:
            ident.params[key] = _integer(r, fields[key])
    for key in ("a", "b", "c", "z"):
        if key in fields:
            ident.params[key] = _rational(r, fields[key])
    if "note" in fields:
        ident.note = fields["note"].value
    if ident.term is not None:
        d = radicand_of(ident.term.z_base, *(ident.term.prefactor.num.terms.values()))
        if ident.weight is not None:
            d = d or radicand_of(*ident.weight.num.terms.values())
        if d is not None and ident.radicand is None:
            ident.radicand = d
    return ident


def parse_catalog(text: str, source: str = "", into: Catalog | None = None) -> Catalog:
    """Parse catalog text; cross-references are checked by :func:`validate`."""
    cat = into if into is not None else Catalog()
    r = _Reader(_lex(text, source), source)
    while r.peek().kind != "end":
        head = r.word("'identity' or 'section'")
        if head.value not in ("identity", "section"):
            r.fail(f"expected 'identity' or 'section', found {head.value!r}", head)
        name = r.word("an id")
        fields = _block(r, _KEYS if head.value == "identity" else _SECTION_KEYS)
        if head.value == "section":
            if name.value in cat.sections:
                raise DuplicateId(f"section {name.value} is defined twice ({source}:{name.line})")
            sec = Section(name.value)
            if "title" in fields:
                sec.title = fields["title"].value
            if "s" in fields:
                sec.s = _integer(r, fields["s"])
            if "z" in fields:
                sec.z = _scalar(r, fields["z"])
            cat.sections[name.value] = sec
            continue
        if name.value in cat.entries:
            raise DuplicateId(f"identity {name.value} is defined twice ({source}:{name.line})")
        cat.entries[name.value] = _identity(r, name.value, fields, name.line, cat.sections)
    return cat


def validate(cat: Catalog) -> Catalog:
    for e in cat.entries.values():
        for ref in e.references():
            if ref not in cat.entries:
                raise DanglingReference(f"{e.id} refers to unknown identity {ref}")
        if e.section is not None and e.section not in cat.sections:
            raise DanglingReference(f"{e.id} refers to unknown section {e.section}")
    return cat


def default_catalog_path() -> Path:
    return Path(__file__).parent / "data"


def load_catalog(path=None) -> Catalog:
    """Load one catalog file or every ``*.cat`` file of a directory (default: the shipped data)."""
    path = Path(path) if path is not None else default_catalog_path()
    files = sorted(path.glob("*.cat")) if path.is_dir() else [path]
    cat = Catalog()
    for f in files:
        parse_catalog(f.read_text(encoding="utf-8"), f.name, cat)
    return validate(cat)


__all__ = [
    "Catalog", "Section", "ParseError", "DanglingReference", "DuplicateId", "parse_catalog",
    "load_catalog", "validate", "default_catalog_path", "KINDS",
]

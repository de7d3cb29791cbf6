"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace is insignificant, implicit multiplication is rejected)::

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' nat)?
    base     := rational | 'i' | name | '(' expr ')'
    rational := int ('/' nat)?

A ``name`` is a variable of the context or a previously declared polynomial.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .poly import Poly, VarContext, format_poly
from .scalar import Scalar

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    base_col = col
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            l, c = _locate(text, bad, line, base_col)
            raise ParseError(f"unexpected character {text[bad]!r}", l, c)
        kind = m.lastgroup
        start = m.start(kind)
        l, c = _locate(text, start, line, base_col)
        tokens.append(Token(kind, m.group(kind), l, c))
        pos = m.end()
    l, c = _locate(text, len(text), line, base_col)
    tokens.append(Token("end", "", l, c))
    return tokens


def _locate(text, pos, line, col):
    before = text[:pos]
    nl = before.count("\n")
    if nl:
        return line + nl, pos - before.rfind("\n")
    return line, col + pos


class _Parser:
    def __init__(self, tokens, ctx: VarContext, names: Mapping[str, Poly] | None):
        self.toks = tokens
        self.k = 0
        self.ctx = ctx
        self.names = names or {}

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, *ops):
        if self.tok.kind == "op" and self.tok.text in ops:
            self.k += 1
            return self.toks[self.k - 1]
        return None

    def expect(self, op):
        if not self.accept(op):
            found = self.tok.text or "end of input"
            self.error(f"expected {op!r}, found {found!r}")

    def nat(self) -> int:
        if self.tok.kind != "num":
            self.error("expected a natural number")
        self.k += 1
        return int(self.toks[self.k - 1].text)

    def expr(self) -> Poly:
        sign = self.accept("+", "-")
        acc = self.term()
        if sign is not None and sign.text == "-":
            acc = -acc
        while True:
            op = self.accept("+", "-")
            if op is None:
                return acc
            rhs = self.term()
            acc = acc + rhs if op.text == "+" else acc - rhs

    def term(self) -> Poly:
        acc = self.factor()
        while self.accept("*"):
            acc = acc * self.factor()
        if self.tok.kind in ("num", "name") or (self.tok.kind == "op" and self.tok.text == "("):
            self.error("implicit multiplication is not allowed; use '*'")
        return acc

    def factor(self) -> Poly:
        b = self.base()
        if self.accept("^"):
            b = b ** self.nat()
        return b

    def base(self) -> Poly:
        tok = self.tok
        if tok.kind == "num":
            num = self.nat()
            den = 1
            if self.accept("/"):
                den = self.nat()
                if den == 0:
                    self.error("zero denominator", tok)
            return Poly.const(self.ctx, Scalar(Fraction(num, den)))
        if tok.kind == "name":
            self.k += 1
            name = tok.text
            if name == "i":
                return Poly.const(self.ctx, Scalar(0, 1))
            if name in self.ctx:
                return Poly.var(self.ctx, name)
            if name in self.names:
                val = self.names[name]
                if not isinstance(val, Poly):
                    self.error(f"{name!r} is not a polynomial", tok)
                try:
                    return val.embed(self.ctx)
                except Exception:
                    self.error(f"{name!r} lives in a different variable context", tok)
            m = re.fullmatch(r"([xy])(\d+)", name)
            if m:
                self.error(f"unknown variable {name!r}: index exceeds the dimension", tok)
            self.error(f"unknown name {name!r}", tok)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        found = tok.text or "end of input"
        self.error(f"unexpected {found!r}")


def parse_poly(text: str, ctx: VarContext, names: Mapping[str, Poly] | None = None,
               line: int = 1, col: int = 1) -> Poly:
    """Parse ``text`` into a polynomial of ``ctx``."""
    p = _Parser(tokenize(text, line, col), ctx, names)
    result = p.expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return result


def parse_list(text: str, ctx: VarContext, names: Mapping[str, Poly] | None = None,
               line: int = 1, col: int = 1) -> list[Poly]:
    """Parse ``[e1, e2, ...]``."""
    p = _Parser(tokenize(text, line, col), ctx, names)
    p.expect("[")
    out = []
    if not p.accept("]"):
        out.append(p.expr())
        while p.accept(","):
            out.append(p.expr())
        p.expect("]")
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return out


def format_expr(p: Poly) -> str:
    return format_poly(p)

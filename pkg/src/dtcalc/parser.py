"""Recursive-descent parser for the polynomial expression grammar.

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | 'i' | NAME | '(' expr ')'
    NUMBER := INT ('/' INT)?
"""

from __future__ import annotations

import re

from .errors import ParseError
from .poly import Poly
from .scalar import Scalar

MAX_EXPONENT = 2**31 - 1

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^/()]))")


def _tokenize(text: str):
    raw = text.encode("utf-8")
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.k = 0
        self.declared = variables is not None
        self.variables = list(variables or [])

    @property
    def tok(self):
        return self.tokens[self.k]

    def advance(self):
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect_op(self, op):
        kind, val, off = self.tok
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", off)
        self.advance()

    def parse(self) -> Poly:
        p = self.expr()
        kind, val, off = self.tok
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off)
        return p.with_variables(self.variables)

    def expr(self):
        p = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.tok[0] == "op" and self.tok[1] == "*":
            self.advance()
            p = p * self.unary()
        return p

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            p = self.unary()
            return -p if op == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            kind, val, off = self.tok
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", off)
            self.advance()
            k = int(val)
            if k > MAX_EXPONENT:
                raise ParseError(f"exponent {k} exceeds 2^31-1", off)
            if base.is_constant():
                c = base.constant_term()
                if k > 4096 and c not in (0, 1, -1):
                    raise ParseError(f"exponent {k} too large to expand", off)
                return Poly.constant(c**k)
            if k > 4096:
                raise ParseError(f"exponent {k} too large to expand", off)
            return base**k
        return base

    def atom(self):
        kind, val, off = self.tok
        if kind == "int":
            self.advance()
            num = int(val)
            if self.tok[0] == "op" and self.tok[1] == "/":
                self.advance()
                dkind, dval, doff = self.tok
                if dkind != "int":
                    raise ParseError("'/' is only allowed inside a rational literal p/q", doff)
                self.advance()
                if int(dval) == 0:
                    raise ParseError("zero denominator", doff)
                return Poly.constant(Scalar(num) / int(dval))
            return Poly.constant(Scalar(num))
        if kind == "name":
            self.advance()
            if val == "i":
                return Poly.constant(Scalar(0, 1))
            if val not in self.variables:
                if self.declared:
                    raise ParseError(f"undeclared variable {val!r}", off)
                self.variables.append(val)
            return Poly.var(val)
        if kind == "op" and val == "(":
            self.advance()
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "op" and val == "/":
            raise ParseError("'/' is only allowed inside a rational literal p/q", off)
        raise ParseError(f"unexpected {val or 'end of input'!r}", off)


def parse_poly(text: str, variables=None) -> Poly:
    """Parse ``text`` into an expanded Poly.

    Variable order is ``variables`` when given (unknown names are then an error),
    otherwise first-occurrence order.
    """
    if variables is not None:
        variables = list(variables)
        if "i" in variables:
            raise ParseError("'i' is reserved for the imaginary unit")
    return _Parser(text, variables).parse()

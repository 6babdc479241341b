"""Recursive-descent parser for coefficient expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' ['-'] integer)?
    base   := integer | 'I' | symbol | '(' expr ')'

Division and negative powers are only allowed for unit monomials.
"""

from __future__ import annotations

import re

from .symring import ConfigurationError, Coefficient, GaussianRational, Ring

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(src.encode())))
    return tokens


class _Parser:
    def __init__(self, src: str, ring: Ring):
        self.src = src
        self.ring = ring
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", self._offset(tok))
        self.i += 1
        return tok

    def _offset(self, tok):
        # token positions are character offsets; report bytes
        return len(self.src[: tok[2]].encode()) if tok[0] != "end" else tok[2]

    def parse(self) -> Coefficient:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self._offset(tok))
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            tok = self.take()
            rhs = self.factor()
            if tok[0] == "*":
                value = value * rhs
            else:
                if not rhs.is_unit_monomial():
                    raise ParseError(f"division by non-unit {rhs}", self._offset(tok))
                value = value * rhs.inverse()
        return value

    def factor(self):
        tok = self.peek()
        if tok[0] in ("+", "-"):
            self.take()
            inner = self.factor()
            return inner if tok[0] == "+" else -inner
        value = self.base()
        if self.peek()[0] == "^":
            caret = self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            k = sign * int(self.take("int")[1])
            if k < 0 and not value.is_unit_monomial():
                raise ParseError(f"negative power of non-unit {value}", self._offset(caret))
            value = value ** k
        return value

    def base(self):
        tok = self.take()
        kind = tok[0]
        if kind == "int":
            return self.ring.const(int(tok[1]))
        if kind == "name":
            if tok[1] == "I":
                return self.ring.const(GaussianRational(0, 1))
            try:
                return self.ring.symbol(tok[1])
            except ConfigurationError:
                raise ParseError(f"undeclared symbol {tok[1]!r}", self._offset(tok)) from None
        if kind == "(":
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", self._offset(tok))


def parse_expression(src: str, ring: Ring) -> Coefficient:
    """Parse ``src`` into a reduced coefficient of ``ring``.

    >>> from qderham.symring import Ring
    >>> str(parse_expression("q - 1/q", Ring(["q"])))
    'q - q^-1'
    """
    return _Parser(src, ring).parse()

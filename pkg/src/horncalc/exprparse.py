"""Tokenizer and polynomial expression parser shared by the text formats."""
from __future__ import annotations

import re
from fractions import Fraction

from .symbolic import Poly

IDENT = r"[A-Za-z_][A-Za-z0-9_]*'*"
_TOKEN = re.compile(
    rf"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
    rf"|(?P<ident>{IDENT})|(?P<op><=|>=|[-+*/^(),;&|<>]))"
)


class ParseError(ValueError):
    """Raised for malformed text input; carries an optional line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


def tokenize(text: str) -> list:
    """Split into ``(kind, value)`` tokens; kinds are num, ident, op."""
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


class TokenStream:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.i = 0

    def peek(self, offset=0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of expression")
        self.i += 1
        return tok

    def accept(self, value):
        if self.peek()[1] == value and self.peek()[0] == "op":
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            raise ParseError(f"expected {value!r}, found {self.peek()[1]!r}")

    def at_end(self):
        return self.i >= len(self.tokens)


def parse_number(text: str) -> Fraction:
    """Exact rational from a decimal literal ("0.25" -> 1/4)."""
    return Fraction(text)


class _PolyParser:
    """Recursive descent for ``+ - * / ^`` with implicit multiplication.

    Division is only allowed by a nonzero constant.  Juxtaposition such as
    ``2m`` or ``x(1-x)`` means multiplication.
    """

    def __init__(self, stream: TokenStream, allowed: set | None):
        self.ts = stream
        self.allowed = allowed

    def expr(self) -> Poly:
        ts = self.ts
        if ts.accept("-"):
            out = -self.term()
        else:
            ts.accept("+")
            out = self.term()
        while True:
            if ts.accept("+"):
                out = out + self.term()
            elif ts.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> Poly:
        ts = self.ts
        out = self.power()
        while True:
            if ts.accept("*"):
                out = out * self.power()
            elif ts.accept("/"):
                d = self.power()
                if not d.is_constant() or not d:
                    raise ParseError("division only by a nonzero constant")
                out = out / d.constant_value()
            elif self._starts_factor():
                out = out * self.power()
            else:
                return out

    def _starts_factor(self) -> bool:
        kind, val = self.ts.peek()
        return kind in ("num", "ident") or (kind == "op" and val == "(")

    def power(self) -> Poly:
        base = self.atom()
        if self.ts.accept("^"):
            kind, val = self.ts.next()
            if kind != "num" or not val.isdigit():
                raise ParseError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        ts = self.ts
        kind, val = ts.next()
        if kind == "num":
            return Poly.const(parse_number(val))
        if kind == "ident":
            if self.allowed is not None and val not in self.allowed:
                raise ParseError(f"undeclared symbol {val!r}")
            return Poly.var(val)
        if val == "(":
            inner = self.expr()
            ts.expect(")")
            return inner
        if val == "-":
            return -self.power()
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(text: str, allowed: set | None = None) -> Poly:
    """Parse a polynomial expression, e.g. ``"c - (a+b+1)x"``."""
    ts = TokenStream(tokenize(text))
    if ts.at_end():
        raise ParseError("empty expression")
    out = _PolyParser(ts, allowed).expr()
    if not ts.at_end():
        raise ParseError(f"trailing input at {ts.peek()[1]!r} in {text!r}")
    return out


def parse_poly_stream(ts: TokenStream, allowed: set | None = None) -> Poly:
    return _PolyParser(ts, allowed).expr()


def parse_linear_form(text: str, index_names) -> tuple:
    """Parse ``"2p-m-n"`` into an integer coefficient tuple over ``index_names``."""
    names = list(index_names)
    p = parse_poly(text, set(names))
    if p.degree() > 1 or p.constant_term() != 0:
        raise ParseError(f"not a homogeneous linear form: {text!r}")
    coeffs = p.coefficients(names)
    out = []
    for i in range(len(names)):
        key = tuple(1 if j == i else 0 for j in range(len(names)))
        c = coeffs.get(key, Poly()).constant_term() if key in coeffs else Fraction(0)
        if c.denominator != 1:
            raise ParseError(f"non-integer coefficient in {text!r}")
        out.append(int(c))
    return tuple(out)

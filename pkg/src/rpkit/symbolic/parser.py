"""Infix parser for the expression grammar.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | SYMBOL | p'...'(t) | '(' expr ')'

``^`` binds tighter than unary minus, so ``-R^2`` is ``-(R^2)``, and
``R^-1`` is accepted.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .expr import (
    Const,
    Expr,
    Opaque,
    Param,
    Power,
    Product,
    Sum,
    Var,
    as_rational,
    constant_value,
    is_constant,
    normalize,
)

VAR_NAMES = frozenset({"t", "R", "Rdot", "Rddot", "s"})
PARAM_NAMES = frozenset({"Re_inv", "We", "Th", "p_n", "k", "a", "b", "c", "a0"})
_ANSATZ = re.compile(r"^[cd]_\d+_\d+$")

_TOKEN = re.compile(
    r"""
    (?P<opaque>p(?P<primes>'*)\s*\(\s*t\s*\))
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownSymbolError(ExprSyntaxError):
    pass


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup if m.lastgroup != "primes" else "opaque"
        if m.group("opaque") is not None:
            kind = "opaque"
        tokens.append((kind, m.group(0), pos, m))
        pos = m.end()
    tokens.append(("end", "", len(text), None))
    return tokens


class _Parser:
    def __init__(self, text, bindings, extra):
        self.tokens = _tokenize(text)
        self.i = 0
        self.bindings = bindings
        self.extra = extra

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos, _ = self.take()
        if text != value:
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self):
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", 0)
        e = self.expr()
        kind, text, pos, _ = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            terms.append(rhs if op == "+" else Product((Const(-1), rhs)))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.unary()]
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            factors.append(rhs if op == "*" else Power(rhs, Fraction(-1)))
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Product((Const(-1), self.unary()))
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[1] == "^":
            self.take()
            exp = normalize(self.unary())
            if is_constant(exp):
                return Power(base, constant_value(exp))
            return Power(base, exp)
        return base

    def primary(self):
        kind, text, pos, m = self.take()
        if kind == "number":
            return Const(Fraction(text))
        if kind == "opaque":
            return Opaque("p", len(m.group("primes")))
        if kind == "name":
            return self.symbol(text, pos)
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", pos)

    def symbol(self, name, pos):
        if name in self.bindings:
            return Const(as_rational(self.bindings[name]))
        if name in VAR_NAMES:
            return Var(name)
        if name in PARAM_NAMES or name in self.extra or _ANSATZ.match(name):
            return Param(name)
        raise UnknownSymbolError(f"unknown symbol {name!r}", pos)


def parse(text: str, bindings: Mapping | None = None, symbols: Iterable[str] = ()) -> Expr:
    """Parse ``text`` into a normalized expression.

    ``bindings`` replaces named symbols by rational constants while parsing
    (``parse("R^(3*k+1)", {"k": 1})`` gives ``R^4``); ``symbols`` admits extra
    parameter names.
    """
    return normalize(_Parser(text, dict(bindings or {}), frozenset(symbols)).parse())

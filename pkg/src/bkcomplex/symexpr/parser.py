"""Precedence-climbing parser for the expression grammar.

Precedence, loosest first: ``+ -``, ``* /``, unary ``-``, ``^``.  ``^`` is
right-associative and its exponent may itself carry a unary minus, so
``-x^2`` is ``-(x^2)`` and ``x^-1`` is accepted.  Extra identifiers (such as
an integer ``k`` or the complex variable ``w``) can be bound by the caller.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from fractions import Fraction

from .nodes import (
    NAMED_CONSTANTS,
    UNARY_FUNCTIONS,
    VARIABLES,
    Binary,
    Const,
    Expr,
    IfPos,
    NamedConst,
    Unary,
    Var,
    as_expr,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at position {pos}"
        if text:
            where += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(message + where)


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, lparen, rparen, comma, eof
    value: str
    pos: int


_NUMBER = _re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?")
_IDENT = _re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        m = _NUMBER.match(text, pos)
        if m:
            tokens.append(Token("num", m.group(), pos))
            pos = m.end()
            continue
        m = _IDENT.match(text, pos)
        if m:
            tokens.append(Token("ident", m.group(), pos))
            pos = m.end()
            continue
        if c in "+-*/^":
            tokens.append(Token("op", c, pos))
        elif c == "(":
            tokens.append(Token("lparen", c, pos))
        elif c == ")":
            tokens.append(Token("rparen", c, pos))
        elif c == ",":
            tokens.append(Token("comma", c, pos))
        else:
            raise ParseError(f"unexpected character {c!r}", pos, text)
        pos += 1
    tokens.append(Token("eof", "", len(text)))
    return tokens


_FUNCTION_ARITY = {name: 1 for name in UNARY_FUNCTIONS} | {"ifpos": 3}


class _Parser:
    def __init__(self, text: str, bindings: dict[str, Expr]):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.bindings = bindings

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.value or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", tok.pos, self.text)
        return self.advance()

    def error(self, message: str, tok: Token):
        raise ParseError(message, tok.pos, self.text)

    def parse(self) -> Expr:
        e = self.sum()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().value!r}", self.peek())
        return e

    def sum(self) -> Expr:
        e = self.product()
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = "add" if self.advance().value == "+" else "sub"
            e = Binary(op, e, self.product())
        return e

    def product(self) -> Expr:
        e = self.unary()
        while self.peek().kind == "op" and self.peek().value in "*/":
            op = "mul" if self.advance().value == "*" else "div"
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.value == "-":
            self.advance()
            return Unary("neg", self.unary())
        if tok.kind == "op" and tok.value == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().value == "^":
            self.advance()
            return Binary("pow", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Const(Fraction(tok.value))
        if tok.kind == "lparen":
            e = self.sum()
            self.expect("rparen", "')'")
            return e
        if tok.kind == "ident":
            name = tok.value
            if name in _FUNCTION_ARITY:
                return self.call(name, tok)
            if name in self.bindings:
                return self.bindings[name]
            if name in VARIABLES:
                return Var(name)
            if name in NAMED_CONSTANTS:
                return NamedConst(name)
            if name == "i":
                return Const(0, 1)
            self.error(f"unknown identifier {name!r}", tok)
        found = tok.value or "end of input"
        self.error(f"expected an operand, found {found!r}", tok)

    def call(self, name: str, tok: Token) -> Expr:
        self.expect("lparen", f"'(' after {name}")
        args = [self.sum()]
        while self.peek().kind == "comma":
            self.advance()
            args.append(self.sum())
        self.expect("rparen", "')'")
        arity = _FUNCTION_ARITY[name]
        if len(args) != arity:
            self.error(f"{name} takes {arity} argument(s), got {len(args)}", tok)
        if name == "ifpos":
            return IfPos(*args)
        return Unary(name, args[0])


def parse_expr(text: str, bindings: dict | None = None) -> Expr:
    """Parse ``text`` into an expression tree.

    ``bindings`` maps additional identifiers to expressions or numbers, e.g.
    ``{"k": 2}`` or ``{"w": x + i*y}``.  Bound names shadow variables but not
    function names.
    """
    bound = {name: as_expr(v) for name, v in (bindings or {}).items()}
    return _Parser(text, bound).parse()


def parse_pair(text: str, bindings: dict | None = None) -> tuple[Expr, Expr]:
    """Parse ``"(a, b)"`` into two expressions."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("expected a pair '(a, b)'", 0, text)
    inner = s[1:-1]
    depth = 0
    for idx, c in enumerate(inner):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "," and depth == 0:
            return parse_expr(inner[:idx], bindings), parse_expr(inner[idx + 1 :], bindings)
    raise ParseError("expected a top-level comma in pair", len(text) - 1, text)

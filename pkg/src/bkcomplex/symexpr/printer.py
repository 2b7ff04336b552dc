"""Text rendering in the same grammar the parser accepts."""

from __future__ import annotations

from fractions import Fraction

from .nodes import Binary, Const, Expr, IfPos, NamedConst, Unary, Var

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_ATOM = 5


def _frac(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_const(c: Const) -> str:
    if c.im == 0:
        s = _frac(c.re)
        return s if (c.re >= 0 and c.re.denominator == 1) else f"({s})"
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "(-i)"
        return f"({_frac(c.im)}*i)"
    sign = "+" if c.im > 0 else "-"
    mag = abs(c.im)
    imag = "i" if mag == 1 else f"{_frac(mag)}*i"
    return f"({_frac(c.re)}{sign}{imag})"


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return _PREC["neg"]
    return _ATOM


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return format_const(e)
    if isinstance(e, (Var, NamedConst)):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = to_text(e.arg)
            if _prec(e.arg) < _PREC["pow"] and _prec(e.arg) != _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, IfPos):
        return f"ifpos({to_text(e.guard)}, {to_text(e.then)}, {to_text(e.other)})"
    if isinstance(e, Binary):
        p = _PREC[e.op]
        left, right = to_text(e.left), to_text(e.right)
        if e.op == "pow":
            if _prec(e.left) <= p:
                left = f"({left})"
            if _prec(e.right) < p:
                right = f"({right})"
            return f"{left}^{right}"
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {_SYMBOL[e.op]} {right}" if p == 1 else f"{left}*{right}" if e.op == "mul" else f"{left}/{right}"
    raise TypeError(f"unknown node {type(e).__name__}")

"""Symbolic differentiation with respect to a real variable."""

from __future__ import annotations

from .nodes import (
    ONE,
    VARIABLES,
    ZERO,
    Binary,
    Const,
    Expr,
    IfPos,
    NamedConst,
    Unary,
    Var,
    cos,
    log,
    sin,
    sqrt,
)


def _add(a, b):
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return Binary("add", a, b)


def _sub(a, b):
    if b == ZERO:
        return a
    if a == ZERO:
        return Unary("neg", b)
    return Binary("sub", a, b)


def _mul(a, b):
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return Binary("mul", a, b)


def _div(a, b):
    if a == ZERO:
        return ZERO
    return Binary("div", a, b)


def differentiate(e: Expr, v: str) -> Expr:
    """Exact derivative of ``e`` with respect to the variable ``v``.

    Guards of ``ifpos`` nodes are treated as locally constant, which is valid
    away from the guard boundary.  The result is not simplified.
    """
    if v not in VARIABLES:
        raise ValueError(f"cannot differentiate with respect to {v!r}")
    cache: dict[Expr, Expr] = {}

    def d(node: Expr) -> Expr:
        hit = cache.get(node)
        if hit is not None:
            return hit
        out = _d(node)
        cache[node] = out
        return out

    def _d(node: Expr) -> Expr:
        if isinstance(node, (Const, NamedConst)):
            return ZERO
        if isinstance(node, Var):
            return ONE if node.name == v else ZERO
        if isinstance(node, IfPos):
            return IfPos(node.guard, d(node.then), d(node.other))
        if isinstance(node, Unary):
            a = node.arg
            da = d(a)
            if da == ZERO:
                return ZERO
            op = node.op
            if op == "neg":
                return Unary("neg", da)
            if op in ("conj", "re", "im"):
                # variables are real, so these commute with d/dv
                return Unary(op, da)
            if op == "exp":
                return _mul(node, da)
            if op == "log":
                return _div(da, a)
            if op == "sin":
                return _mul(cos(a), da)
            if op == "cos":
                return Unary("neg", _mul(sin(a), da))
            if op == "tan":
                return _div(da, Binary("pow", cos(a), Const(2)))
            if op == "sqrt":
                return _div(da, _mul(Const(2), sqrt(a)))
            raise ValueError(f"no derivative rule for {op}")
        if isinstance(node, Binary):
            a, b = node.left, node.right
            da, db = d(a), d(b)
            op = node.op
            if op == "add":
                return _add(da, db)
            if op == "sub":
                return _sub(da, db)
            if op == "mul":
                return _add(_mul(da, b), _mul(a, db))
            if op == "div":
                if db == ZERO:
                    return _div(da, b)
                return _div(_sub(_mul(da, b), _mul(a, db)), Binary("pow", b, Const(2)))
            if op == "pow":
                if db == ZERO:
                    if da == ZERO:
                        return ZERO
                    # b * a^(b-1) * a'
                    lowered = Binary("pow", a, Const(b.re - 1, b.im)) if isinstance(b, Const) else Binary("pow", a, Binary("sub", b, ONE))
                    return _mul(_mul(b, lowered), da)
                if isinstance(a, NamedConst) and a.name == "e":
                    return _mul(node, db)
                # a^b * (b' log a + b a'/a)
                return _mul(node, _add(_mul(db, log(a)), _div(_mul(b, da), a)))
        raise TypeError(f"unknown node {type(node).__name__}")

    return d(e)


def gradient(e: Expr) -> tuple[Expr, Expr]:
    return differentiate(e, "x"), differentiate(e, "y")


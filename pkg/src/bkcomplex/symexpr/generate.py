"""Random expression trees for property checks."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .evaluate import EvaluationError, eval_many
from .nodes import E, I, PI, Binary, Const, Expr, IfPos, Unary, Var

_LEAF_VARS = ("x", "y", "t")
_SAFE_UNARY = ("exp", "sin", "cos", "neg", "conj", "re", "im")
_RISKY_UNARY = ("log", "sqrt", "tan")
_BINARY = ("add", "sub", "mul", "div", "pow")


def _leaf(rng: np.random.Generator) -> Expr:
    r = rng.random()
    if r < 0.55:
        return Var(_LEAF_VARS[rng.integers(3)])
    if r < 0.85:
        return Const(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))))
    if r < 0.92:
        return Const(Fraction(int(rng.integers(-3, 4))), Fraction(int(rng.integers(-3, 4))))
    return (PI, E, I)[rng.integers(3)]


def random_expr(rng: np.random.Generator, depth: int = 4, guards: bool = True, risky: bool = True) -> Expr:
    """A random tree of at most ``depth`` levels.

    Powers only take small integer exponents, so every tree is total apart
    from division by zero and the ``risky`` functions.
    """
    if depth <= 0 or rng.random() < 0.25:
        return _leaf(rng)
    r = rng.random()
    if r < 0.3:
        ops = _SAFE_UNARY + (_RISKY_UNARY if risky else ())
        op = ops[rng.integers(len(ops))]
        arg = random_expr(rng, depth - 1, guards, risky)
        if op == "exp":
            # keep magnitudes moderate
            arg = Unary("sin", arg)
        return Unary(op, arg)
    if guards and r < 0.36:
        return IfPos(random_expr(rng, depth - 1, guards, risky), random_expr(rng, depth - 1, guards, risky),
                     random_expr(rng, depth - 1, guards, risky))
    op = _BINARY[rng.integers(len(_BINARY))]
    left = random_expr(rng, depth - 1, guards, risky)
    if op == "pow":
        return Binary("pow", left, Const(int(rng.integers(0, 4))))
    return Binary(op, left, random_expr(rng, depth - 1, guards, risky))


def evaluable_exprs(count: int, seed: int, xs, ys, ts, depth: int = 4, guards: bool = True,
                    risky: bool = True, bound: float = 1e6) -> list[Expr]:
    """``count`` random trees that evaluate finitely (and below ``bound``) at the points."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        e = random_expr(rng, depth, guards, risky)
        try:
            vals = eval_many(e, xs, ys, ts)
        except EvaluationError:
            continue
        if np.max(np.abs(vals)) <= bound:
            out.append(e)
    return out

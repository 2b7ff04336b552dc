"""Symbolic expressions in the real variables x, y and a parameter t."""

from .calculus import differentiate, gradient
from .evaluate import EvaluationError, compile_expr, eval_at, eval_many
from .nodes import (
    E,
    I,
    ONE,
    PI,
    ZERO,
    Binary,
    Const,
    Expr,
    IfPos,
    NamedConst,
    Unary,
    Var,
    as_expr,
    conj,
    cos,
    exp,
    ifpos,
    im,
    log,
    node_count,
    re,
    sin,
    sqrt,
    substitute,
    t,
    tan,
    x,
    y,
)
from .parser import ParseError, parse_expr, parse_pair
from .printer import to_text
from .sampling import (
    DEFAULT_SAMPLER,
    DEFAULT_TOL,
    Sampler,
    evaluate_on,
    relative_error,
    semantic_error,
    semantically_equal,
)
from .simplify import is_zero, simplify
from .generate import evaluable_exprs, random_expr

__all__ = [
    "Binary", "Const", "DEFAULT_SAMPLER", "DEFAULT_TOL", "E", "EvaluationError",
    "Expr", "I", "IfPos", "NamedConst", "ONE", "PI", "ParseError", "Sampler",
    "Unary", "Var", "ZERO", "as_expr", "compile_expr", "conj", "cos",
    "differentiate", "eval_at", "evaluable_exprs", "eval_many", "evaluate_on", "exp", "gradient",
    "ifpos", "im", "is_zero", "log", "node_count", "parse_expr", "parse_pair",
    "random_expr", "re", "relative_error", "semantic_error", "semantically_equal", "simplify",
    "sin", "sqrt", "substitute", "t", "tan", "to_text", "x", "y",
]

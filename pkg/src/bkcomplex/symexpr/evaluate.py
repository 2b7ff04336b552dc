"""Numerical evaluation.

Expressions are compiled once into a tree of closures that act on 1-D
complex numpy arrays, so the same code path serves single points and large
batches.  Domain violations raise :class:`EvaluationError` instead of
producing NaN.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .nodes import Binary, Const, Expr, IfPos, NamedConst, Unary, Var


class EvaluationError(ArithmeticError):
    """Domain error during evaluation; ``point`` is filled in when known."""

    def __init__(self, message: str, point=None):
        self.point = point
        self.reason = message
        if point is not None:
            message = f"{message} at {tuple(float(v) for v in point)}"
        super().__init__(message)


_NAMED = {"pi": math.pi, "e": math.e}


def _check_log_arg(z):
    bad = (z.imag == 0) & (z.real <= 0)
    if bad.any():
        raise EvaluationError("log of a nonpositive real")


def _log(z):
    _check_log_arg(z)
    return np.log(z)


def _sqrt(z):
    if ((z.imag == 0) & (z.real < 0)).any():
        raise EvaluationError("sqrt of a negative real")
    return np.sqrt(z)


def _div(a, b):
    if (b == 0).any():
        raise EvaluationError("division by zero")
    return a / b


def _tan(z):
    c = np.cos(z)
    if (c == 0).any():
        raise EvaluationError("tan at a pole")
    return np.sin(z) / c


def _pow_const(base, q):
    """``base**q`` for a constant exponent."""
    if q.imag == 0 and float(q.real).is_integer():
        n = int(q.real)
        if n < 0 and (base == 0).any():
            raise EvaluationError("division by zero in negative power")
        if n >= 0:
            return base**n
        return 1.0 / base ** (-n)
    if (base.real <= 0).any():
        raise EvaluationError("non-integer power of a base without positive real part")
    return np.exp(q * np.log(base))


def _pow(base, expo):
    out = np.empty_like(base)
    integral = (expo.imag == 0) & (np.round(expo.real) == expo.real)
    if integral.any():
        b, n = base[integral], expo.real[integral].astype(np.int64)
        if ((n < 0) & (b == 0)).any():
            raise EvaluationError("division by zero in negative power")
        pos = n >= 0
        r = np.empty_like(b)
        r[pos] = b[pos] ** n[pos]
        r[~pos] = 1.0 / b[~pos] ** (-n[~pos])
        out[integral] = r
    rest = ~integral
    if rest.any():
        b = base[rest]
        if (b.real <= 0).any():
            raise EvaluationError("non-integer power of a base without positive real part")
        out[rest] = np.exp(expo[rest] * np.log(b))
    return out


_UNARY = {
    "neg": np.negative,
    "exp": np.exp,
    "log": _log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": _tan,
    "sqrt": _sqrt,
    "conj": np.conj,
    "re": lambda z: z.real.astype(complex),
    "im": lambda z: z.imag.astype(complex),
}

_BINARY = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": _div,
}


@lru_cache(maxsize=4096)
def compile_expr(e: Expr):
    """Return ``f(env, n)`` evaluating ``e`` on ``n`` points.

    ``env`` maps variable names to complex arrays of shape ``(n,)``.
    """
    if isinstance(e, Const):
        value = complex(e)
        return lambda env, n: np.full(n, value, dtype=complex)
    if isinstance(e, NamedConst):
        value = complex(_NAMED[e.name])
        return lambda env, n: np.full(n, value, dtype=complex)
    if isinstance(e, Var):
        name = e.name

        def var(env, n):
            try:
                return env[name]
            except KeyError:
                raise EvaluationError(f"unbound variable {name!r}") from None

        return var
    if isinstance(e, Unary):
        f, arg = _UNARY[e.op], compile_expr(e.arg)
        return lambda env, n: f(arg(env, n))
    if isinstance(e, Binary):
        left, right = compile_expr(e.left), compile_expr(e.right)
        if e.op == "pow":
            if isinstance(e.right, Const):
                q = complex(e.right)
                return lambda env, n: _pow_const(left(env, n), q)
            return lambda env, n: _pow(left(env, n), right(env, n))
        f = _BINARY[e.op]
        return lambda env, n: f(left(env, n), right(env, n))
    if isinstance(e, IfPos):
        guard, then, other = compile_expr(e.guard), compile_expr(e.then), compile_expr(e.other)

        def branch(env, n):
            mask = guard(env, n).real > 0
            out = np.empty(n, dtype=complex)
            # each branch only sees the points it owns
            for sel, f in ((mask, then), (~mask, other)):
                m = int(sel.sum())
                if m:
                    out[sel] = f({k: v[sel] for k, v in env.items()}, m)
            return out

        return branch
    raise TypeError(f"unknown node {type(e).__name__}")


def _env(x, y, t):
    arrays = {}
    n = None
    for name, v in (("x", x), ("y", y), ("t", t)):
        if v is None:
            continue
        a = np.atleast_1d(np.asarray(v, dtype=complex)).ravel()
        arrays[name] = a
        n = a.size if n is None else max(n, a.size)
    n = 1 if n is None else n
    return {k: np.broadcast_to(v, (n,)).copy() for k, v in arrays.items()}, n


def eval_many(e: Expr, x=None, y=None, t=None) -> np.ndarray:
    """Evaluate on arrays of coordinates; returns a complex array."""
    env, n = _env(x, y, t)
    f = compile_expr(e)
    try:
        with np.errstate(over="raise", divide="raise", invalid="raise", under="ignore"):
            out = f(env, n)
    except FloatingPointError as exc:
        raise EvaluationError(f"floating point failure ({exc})") from None
    if not np.all(np.isfinite(out)):
        raise EvaluationError("non-finite value")
    return out


def locate_failure(e: Expr, x, y, t=None):
    """Re-evaluate pointwise and return ``(point, error)`` for the first failure."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    ts = None if t is None else np.broadcast_to(np.asarray(t, dtype=float), xs.shape)
    for j in range(xs.size):
        try:
            eval_many(e, xs[j], ys[j], None if ts is None else ts[j])
        except EvaluationError as exc:
            point = (xs[j], ys[j]) if ts is None else (xs[j], ys[j], ts[j])
            return point, exc
    return None, None


def eval_at(e: Expr, x0: float, y0: float, t0: float | None = None) -> complex:
    """Evaluate at a single point."""
    try:
        return complex(eval_many(e, x0, y0, t0)[0])
    except EvaluationError as exc:
        point = (x0, y0) if t0 is None else (x0, y0, t0)
        raise EvaluationError(exc.reason, point) from None

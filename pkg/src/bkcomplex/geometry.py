"""Complex vector fields and planar maps.

A :class:`ComplexVectorField` ``(a, b)`` stands for ``a d/dx + b d/dy`` with
complex coefficient expressions; a :class:`PlanarMap` ``(u, v)`` is a real
map of (part of) the plane.  Pushforwards are checked pointwise, as
``Dm(p) X(p) == Y(m(p))``, so no inverse map is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .symexpr import (
    ONE,
    ZERO,
    Expr,
    I,
    Sampler,
    as_expr,
    differentiate,
    eval_many,
    parse_pair,
    relative_error,
    simplify,
    substitute,
    x,
    y,
)
from .symexpr.evaluate import EvaluationError


# ----------------------------------------------------------------- domains
@dataclass(frozen=True)
class Domain:
    """Coarse named region of the plane.

    ``kind`` is one of ``plane``, ``right-half-plane``, ``left-half-plane``,
    ``strip`` (``y0 < y < y1``) or ``upper-half-plane``.
    """

    kind: str = "plane"
    y0: float = -math.inf
    y1: float = math.inf

    KINDS = ("plane", "right-half-plane", "left-half-plane", "strip", "upper-half-plane")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown domain {self.kind!r}")
        if self.kind == "strip" and not self.y0 < self.y1:
            raise ValueError("strip needs y0 < y1")

    def contains(self, xs, ys, margin: float = 0.0) -> np.ndarray:
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        if self.kind == "plane":
            return np.isfinite(xs) & np.isfinite(ys)
        if self.kind == "right-half-plane":
            return xs > margin
        if self.kind == "left-half-plane":
            return xs < -margin
        if self.kind == "upper-half-plane":
            return ys > margin
        return (ys > self.y0 + margin) & (ys < self.y1 - margin)

    def sampler(self, **overrides) -> Sampler:
        """A sampler whose points lie inside this domain."""
        base = {
            "plane": {},
            "right-half-plane": {"positive": True, "xmin": 0.0},
            "left-half-plane": {"xmin": -3.0, "xmax": -0.1},
            "upper-half-plane": {"ymin": 0.1},
            "strip": {"ymin": max(self.y0, -3.0) + 0.05, "ymax": min(self.y1, 3.0) - 0.05},
        }[self.kind]
        return Sampler(**{**base, **overrides})

    def __str__(self):
        if self.kind == "strip":
            return f"strip({self.y0:g},{self.y1:g})"
        return self.kind


PLANE = Domain("plane")
RIGHT = Domain("right-half-plane")
LEFT = Domain("left-half-plane")
UPPER = Domain("upper-half-plane")


def strip(y0: float, y1: float) -> Domain:
    return Domain("strip", y0, y1)


# ----------------------------------------------------------- vector fields
@dataclass(frozen=True)
class ComplexVectorField:
    a: Expr
    b: Expr

    def __post_init__(self):
        object.__setattr__(self, "a", as_expr(self.a))
        object.__setattr__(self, "b", as_expr(self.b))

    @classmethod
    def parse(cls, text: str, bindings=None) -> ComplexVectorField:
        return cls(*parse_pair(text, bindings))

    def __call__(self, x0, y0, t0=None) -> np.ndarray:
        """Coefficients at one point (scalars) or many (arrays); shape ``(2, n)``."""
        return np.vstack([eval_many(self.a, x0, y0, t0), eval_many(self.b, x0, y0, t0)])

    def apply(self, f: Expr) -> Expr:
        """The derivative ``X f = a f_x + b f_y`` (unsimplified)."""
        return self.a * differentiate(f, "x") + self.b * differentiate(f, "y")

    def scaled(self, factor) -> ComplexVectorField:
        factor = as_expr(factor)
        return ComplexVectorField(factor * self.a, factor * self.b)

    def conjugate(self) -> ComplexVectorField:
        from .symexpr import conj

        return ComplexVectorField(conj(self.a), conj(self.b)).simplified()

    def real_part(self) -> ComplexVectorField:
        from .symexpr import re

        return ComplexVectorField(re(self.a), re(self.b)).simplified()

    def simplified(self, positive=()) -> ComplexVectorField:
        return ComplexVectorField(simplify(self.a, positive), simplify(self.b, positive))

    def substitute(self, mapping) -> ComplexVectorField:
        return ComplexVectorField(substitute(self.a, mapping), substitute(self.b, mapping))

    def __add__(self, other: ComplexVectorField) -> ComplexVectorField:
        return ComplexVectorField(self.a + other.a, self.b + other.b)

    def __sub__(self, other: ComplexVectorField) -> ComplexVectorField:
        return ComplexVectorField(self.a - other.a, self.b - other.b)

    def is_zero(self, positive=()) -> bool:
        s = self.simplified(positive)
        return s.a == ZERO and s.b == ZERO

    def __str__(self):
        return f"({self.a}, {self.b})"


# --------------------------------------------------------------- planar maps
@dataclass(frozen=True)
class PlanarMap:
    u: Expr
    v: Expr
    domain: Domain = PLANE
    inverse: PlanarMap | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "u", as_expr(self.u))
        object.__setattr__(self, "v", as_expr(self.v))

    @classmethod
    def parse(cls, text: str, domain: Domain = PLANE, bindings=None) -> PlanarMap:
        return cls(*parse_pair(text, bindings), domain=domain)

    def __call__(self, x0, y0, t0=None) -> np.ndarray:
        """Image point(s) as a real array of shape ``(2, n)``."""
        u = eval_many(self.u, x0, y0, t0)
        v = eval_many(self.v, x0, y0, t0)
        return np.vstack([u.real, v.real])

    def at(self, t0: float) -> PlanarMap:
        """Fix the parameter ``t``."""
        from .symexpr import Const

        val = Const.of(float(t0))
        inv = self.inverse.at(t0) if self.inverse is not None else None
        return PlanarMap(substitute(self.u, {"t": val}), substitute(self.v, {"t": val}), self.domain, inv)

    def simplified(self, positive=()) -> PlanarMap:
        if positive == () and self.domain.kind == "right-half-plane":
            positive = ("x",)
        return PlanarMap(simplify(self.u, positive), simplify(self.v, positive), self.domain, self.inverse)

    def with_inverse(self, inverse: PlanarMap) -> PlanarMap:
        return PlanarMap(self.u, self.v, self.domain, inverse)

    def __str__(self):
        return f"({self.u}, {self.v})"


IDENTITY = PlanarMap(x, y)


def identity(domain: Domain = PLANE) -> PlanarMap:
    return PlanarMap(x, y, domain)


def jacobian(m: PlanarMap) -> tuple[tuple[Expr, Expr], tuple[Expr, Expr]]:
    """Symbolic Jacobian ``[[u_x, u_y], [v_x, v_y]]``, simplified."""
    return (
        (simplify(differentiate(m.u, "x")), simplify(differentiate(m.u, "y"))),
        (simplify(differentiate(m.v, "x")), simplify(differentiate(m.v, "y"))),
    )


def _jacobian_values(m: PlanarMap, xs, ys, ts=None) -> np.ndarray:
    J = jacobian(m)
    return np.array([[eval_many(J[i][j], xs, ys, ts) for j in range(2)] for i in range(2)])


def pushforward_at(m: PlanarMap, X: ComplexVectorField, p) -> np.ndarray:
    """``Dm(p) X(p)``: the value of ``m_* X`` at the image point ``m(p)``."""
    x0, y0 = p[0], p[1]
    t0 = p[2] if len(p) > 2 else None
    J = _jacobian_values(m, x0, y0, t0)[:, :, 0]
    return J @ X(x0, y0, t0)[:, 0]


def pushforward_many(m: PlanarMap, X: ComplexVectorField, xs, ys, ts=None) -> np.ndarray:
    """Vectorised :func:`pushforward_at`; returns shape ``(2, n)``."""
    J = _jacobian_values(m, xs, ys, ts)
    V = X(xs, ys, ts)
    return np.einsum("ijn,jn->in", J, V)


def relation_error(m: PlanarMap, X: ComplexVectorField, Y: ComplexVectorField, s: Sampler) -> float:
    """Largest relative mismatch between ``Dm(p) X(p)`` and ``Y(m(p))`` over ``s``."""
    xs, ys, ts = s.points()
    try:
        lhs = pushforward_many(m, X, xs, ys, ts)
        img = m(xs, ys, ts)
        rhs = Y(img[0], img[1], ts)
    except EvaluationError:
        # pin the failing sample for the caller
        for j in range(xs.size):
            try:
                pushforward_at(m, X, (xs[j], ys[j], ts[j]))
                img = m(xs[j], ys[j], ts[j])
                Y(img[0], img[1], ts[j])
            except EvaluationError as exc:
                raise EvaluationError(exc.reason, (xs[j], ys[j])) from None
        raise
    return float(relative_error(lhs, rhs).max())


def relates(m: PlanarMap, X: ComplexVectorField, Y: ComplexVectorField, s: Sampler | None = None, tol: float = 1e-10) -> bool:
    """True when ``m`` carries ``X`` to ``Y`` at every sampled point."""
    s = s if s is not None else m.domain.sampler()
    return relation_error(m, X, Y, s) <= tol


def pushforward_residual(m: PlanarMap, X: ComplexVectorField, Y: ComplexVectorField) -> ComplexVectorField:
    """Symbolic ``Dm X - Y o m``; simplifies to zero when ``m`` relates ``X`` to ``Y``."""
    J = jacobian(m)
    image = {"x": m.u, "y": m.v}
    Ym = Y.substitute(image)
    res = ComplexVectorField(J[0][0] * X.a + J[0][1] * X.b - Ym.a, J[1][0] * X.a + J[1][1] * X.b - Ym.b)
    positive = ("x",) if m.domain.kind == "right-half-plane" else ()
    return res.simplified(positive)


def pushforward(m: PlanarMap, X: ComplexVectorField) -> ComplexVectorField:
    """Symbolic ``m_* X = (Dm X) o m^{-1}``; needs an attached inverse."""
    if m.inverse is None:
        raise ValueError("symbolic pushforward needs a map with an attached inverse")
    J = jacobian(m)
    back = {"x": m.inverse.u, "y": m.inverse.v}
    a = substitute(J[0][0] * X.a + J[0][1] * X.b, back)
    b = substitute(J[1][0] * X.a + J[1][1] * X.b, back)
    return ComplexVectorField(a, b).simplified()


def lie_bracket(X: ComplexVectorField, Y: ComplexVectorField) -> ComplexVectorField:
    """``[X, Y] = (X a_Y - Y a_X, X b_Y - Y b_X)``, simplified."""
    return ComplexVectorField(X.apply(Y.a) - Y.apply(X.a), X.apply(Y.b) - Y.apply(X.b)).simplified()


def compose(m2: PlanarMap, m1: PlanarMap, check: Sampler | None = None) -> PlanarMap:
    """``m2 o m1`` by substitution.

    With ``check`` given, sampled images of ``m1`` are tested against the
    domain of ``m2`` and a warning is issued on violation.
    """
    if check is not None and m2.domain.kind != "plane":
        xs, ys, ts = check.points()
        img = m1(xs, ys, ts)
        if not m2.domain.contains(img[0], img[1]).all():
            warnings.warn(f"image of the inner map leaves {m2.domain}", RuntimeWarning, stacklevel=2)
    u = substitute(m2.u, {"x": m1.u, "y": m1.v})
    v = substitute(m2.v, {"x": m1.u, "y": m1.v})
    inv = None
    if m1.inverse is not None and m2.inverse is not None:
        inv = compose(m1.inverse, m2.inverse)
    return PlanarMap(u, v, m1.domain, inv)


class NonConvergence(RuntimeError):
    def __init__(self, message: str, last):
        self.last = last
        super().__init__(f"{message}; last iterate {tuple(float(c) for c in last)}")


def invert_numerically(m: PlanarMap, q, seed, tol: float = 1e-12, max_iter: int = 50) -> tuple[float, float]:
    """Solve ``m(p) = q`` by Newton's method from ``seed``."""
    J = jacobian(m)
    target = np.asarray(q, dtype=float)
    p = np.asarray(seed, dtype=float).copy()
    for _ in range(max_iter):
        r = m(p[0], p[1])[:, 0] - target
        if np.linalg.norm(r) < tol:
            return float(p[0]), float(p[1])
        Jp = np.array([[eval_many(J[i][j], p[0], p[1])[0].real for j in range(2)] for i in range(2)])
        try:
            step = np.linalg.solve(Jp, r)
        except np.linalg.LinAlgError:
            raise NonConvergence("singular Jacobian", p) from None
        p = p - step
        if not np.all(np.isfinite(p)):
            raise NonConvergence("iterate left the finite plane", p)
    r = m(p[0], p[1])[:, 0] - target
    if np.linalg.norm(r) < tol:
        return float(p[0]), float(p[1])
    raise NonConvergence(f"no convergence in {max_iter} iterations", p)


def parse_point(text: str) -> tuple[float, float]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected a point 'x0,y0', got {text!r}")
    return float(parts[0]), float(parts[1])


ZERO_FIELD = ComplexVectorField(ZERO, ZERO)
D_X = ComplexVectorField(ONE, ZERO)
D_Y = ComplexVectorField(ZERO, ONE)
L0 = ComplexVectorField(ONE, I)

"""Functions killed by ``L_k`` and their Segal-Bargmann norms.

On the right half-plane ``(x, y) -> (log x, y)`` turns ``L_1`` into the
Cauchy-Riemann field, so a function ``f`` with ``L_1 f = 0`` becomes an
entire function ``F(w) = f(e^X, Y)`` with ``w = X + iY``.  Entire functions
here are expressions in ``x, y`` read as ``X, Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .bkstructure import generator
from .geometry import RIGHT, Domain, strip
from .symexpr import (
    I,
    ONE,
    Const,
    Expr,
    Sampler,
    differentiate,
    eval_many,
    exp,
    ifpos,
    log,
    semantic_error,
    simplify,
    substitute,
    x,
    y,
)
from .symexpr.evaluate import EvaluationError, locate_failure
from .symexpr.simplify import is_zero

#: w = X + iY in the entire-function coordinates
W = x + I * y
U = x * exp(I * y)
FLAT_STRIP = strip(-math.pi / 4, math.pi / 4)
ROUND_TRIP_SAMPLER = Sampler(xmin=0.05, xmax=2.0, ymin=-1.5, ymax=1.5, positive=True, eps_z=0.05, n=48, seed=3)
MEMBER_TOL = 1e-8
NOT_MEMBER_TOL = 1e-2


@dataclass(frozen=True)
class Grid:
    """Regular grid ``xmin:xmax:step`` by ``ymin:ymax:step`` (end points included)."""

    xmin: float
    xmax: float
    xstep: float
    ymin: float
    ymax: float
    ystep: float

    @classmethod
    def parse(cls, text: str) -> Grid:
        try:
            xs, ys = text.split(",")
            vals = [float(v) for v in xs.split(":")] + [float(v) for v in ys.split(":")]
        except ValueError:
            raise ValueError(f"grid must look like xmin:xmax:step,ymin:ymax:step, got {text!r}") from None
        if len(vals) != 6:
            raise ValueError(f"grid must look like xmin:xmax:step,ymin:ymax:step, got {text!r}")
        g = cls(*vals)
        if g.xstep <= 0 or g.ystep <= 0 or g.xmax < g.xmin or g.ymax < g.ymin:
            raise ValueError(f"bad grid {text!r}")
        return g

    @staticmethod
    def _axis(lo, hi, step):
        n = int(math.floor((hi - lo) / step + 1e-9))
        return np.append(lo + step * np.arange(n + 1), hi) if lo + n * step < hi - 1e-12 else lo + step * np.arange(n + 1)

    def points(self):
        gx, gy = np.meshgrid(self._axis(self.xmin, self.xmax, self.xstep), self._axis(self.ymin, self.ymax, self.ystep))
        xs, ys = gx.ravel(), gy.ravel()
        return xs, ys, np.zeros_like(xs)


@dataclass(frozen=True)
class BHoloFunction:
    name: str
    expr: Expr
    domain: Domain = RIGHT
    entire: Expr | None = None
    # symbolic entire forms are checked exactly; numeric-only ones are flagged
    entire_symbolic: bool = True
    residual_grid: object = None

    def with_entire(self, F: Expr, symbolic: bool = True) -> BHoloFunction:
        return replace(self, entire=F, entire_symbolic=symbolic)


def flat_function() -> Expr:
    """``exp(-1/u)`` for ``x > 0`` glued to ``0``: smooth, flat along ``x = 0``."""
    return ifpos(x, exp(-ONE / U), Const(0))


def catalog_bholo() -> list[BHoloFunction]:
    near = Grid(-2.0, 2.0, 0.25, -3.0, 3.0, 0.25)
    small = Grid(-0.5, 0.5, 0.05, -3.0, 3.0, 0.25)
    flat_grid = Grid(1e-3, 1.0, 0.01, -math.pi / 4 + 0.01, math.pi / 4 - 0.01, 0.05)
    return [
        BHoloFunction("u", U, entire=exp(W), residual_grid=near),
        BHoloFunction("u^2", U ** Const(2), entire=exp(Const(2) * W), residual_grid=near),
        BHoloFunction("u^3", U ** Const(3), entire=exp(Const(3) * W), residual_grid=near),
        BHoloFunction("u/(1-u)", U / (ONE - U), entire=exp(W) / (ONE - exp(W)), residual_grid=small),
        BHoloFunction(
            "flat",
            flat_function(),
            FLAT_STRIP,
            entire=exp(-exp(-W)),
            entire_symbolic=False,
            residual_grid=flat_grid,
        ),
    ]


def bholo_by_name(name: str) -> BHoloFunction:
    for f in catalog_bholo():
        if f.name == name:
            return f
    raise KeyError(name)


def residual_expr(f: Expr, k: int) -> Expr:
    """``L_k f = x^k df/dx + i df/dy``, simplified."""
    L = generator(k)
    return simplify(L.a * differentiate(f, "x") + L.b * differentiate(f, "y"))


def residual_sup(f: Expr, k: int, grid) -> float:
    """Sup of ``|L_k f|`` over ``grid``; exactly ``0.0`` when it simplifies to zero.

    ``grid`` is anything with a ``points()`` method (a :class:`Grid` or a
    :class:`~bkcomplex.symexpr.Sampler`).
    """
    R = residual_expr(f, k)
    if is_zero(R):
        return 0.0
    xs, ys, ts = grid.points()
    try:
        vals = eval_many(R, xs, ys, ts)
    except EvaluationError as exc:
        p, _ = locate_failure(R, xs, ys, ts)
        raise EvaluationError(f"residual not evaluable ({exc.reason})", p) from None
    return float(np.max(np.abs(vals)))


def b_to_entire(f: BHoloFunction, s: Sampler = ROUND_TRIP_SAMPLER, tol: float = 1e-10) -> BHoloFunction:
    """Attach ``F(X, Y) = f(e^X, Y)`` after checking ``f = F(log x, y)`` on ``x > 0``.

    When the simplifier cannot reduce the substituted form it is kept as is
    and ``entire_symbolic`` is set to False.
    """
    raw = substitute(f.expr, {"x": exp(x)})
    F = simplify(raw)
    symbolic = F != raw
    back = substitute(F, {"x": log(x)})
    err = semantic_error(back, f.expr, s)
    if not err <= tol:
        raise ValueError(f"round trip f = F(log x, y) fails for {f.name}: error {err:.3g}")
    return f.with_entire(F, symbolic)


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 64
    check_convergence: bool = True
    rtol: float = MEMBER_TOL

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError("at least 16 nodes per axis")


class QuadratureDivergence(ArithmeticError):
    """Gauss-Hermite values at N and 2N nodes disagree, or overflow."""

    def __init__(self, message: str, values=(), rel_change: float = math.inf):
        super().__init__(message)
        self.values = tuple(values)
        self.rel_change = rel_change


@lru_cache(maxsize=16)
def _hermite(n: int):
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_hermite_2d(F: Expr, n: int) -> float:
    """Tensor Gauss-Hermite value of ``integral |F(X+iY)|^2 exp(-X^2-Y^2) dX dY``."""
    nodes, weights = _hermite(n)
    gx, gy = np.meshgrid(nodes, nodes, indexing="ij")
    try:
        vals = eval_many(F, gx.ravel(), gy.ravel())
    except EvaluationError as exc:
        raise QuadratureDivergence(f"integrand not evaluable at N={n}: {exc.reason}") from None
    with np.errstate(over="raise", invalid="raise"):
        try:
            sq = np.abs(vals.reshape(n, n)) ** 2
            total = float(weights @ sq @ weights)
        except FloatingPointError:
            raise QuadratureDivergence(f"integrand overflows at N={n}") from None
    if not math.isfinite(total):
        raise QuadratureDivergence(f"integrand overflows at N={n}")
    return total


def relative_change(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def bargmann_norm_sq(F: Expr, q: QuadratureSpec = QuadratureSpec()) -> float:
    """Squared Segal-Bargmann norm (weight ``e^{-|z|^2}``, no ``1/pi``)."""
    v1 = gauss_hermite_2d(F, q.nodes)
    if not q.check_convergence:
        return v1
    v2 = gauss_hermite_2d(F, 2 * q.nodes)
    rel = relative_change(v1, v2)
    if rel >= q.rtol:
        raise QuadratureDivergence(f"N={q.nodes} and N={2 * q.nodes} differ by {rel:.3g}", (v1, v2), rel)
    return v2


@dataclass(frozen=True)
class Membership:
    verdict: str  # "member", "not-member" or "undecided"
    norm_sq: float | None
    nodes: int
    rel_change: float
    evidence: str = ""

    @property
    def converged(self) -> bool:
        return self.verdict == "member"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "value": self.norm_sq,
            "nodes": self.nodes,
            "converged": self.converged,
            "rel_change": self.rel_change if math.isfinite(self.rel_change) else str(self.rel_change),
            "evidence": self.evidence,
        }


def entire_membership(F: Expr, q: QuadratureSpec = QuadratureSpec()) -> Membership:
    """Membership verdict for an entire function from N vs 2N quadrature."""
    try:
        v1 = gauss_hermite_2d(F, q.nodes)
        v2 = gauss_hermite_2d(F, 2 * q.nodes)
    except QuadratureDivergence as exc:
        return Membership("not-member", None, q.nodes, math.inf, str(exc))
    rel = relative_change(v1, v2)
    if rel < q.rtol:
        return Membership("member", v2, q.nodes, rel, "quadrature converged")
    if rel < NOT_MEMBER_TOL:
        return Membership("undecided", v2, q.nodes, rel, f"N vs 2N relative change {rel:.3g}")
    return Membership("not-member", None, q.nodes, rel, f"N vs 2N relative change {rel:.3g}")


def b_bargmann_member(f: BHoloFunction, q: QuadratureSpec = QuadratureSpec()) -> Membership:
    """Only the right half-plane enters: ``f`` is judged by its pushforward there."""
    if f.entire is None:
        f = b_to_entire(f)
    return entire_membership(f.entire, q)


def flat_derivatives(x0: float = 1e-3, ys=(-0.5, 0.0, 0.5), orders=(1, 2, 3)) -> dict[int, float]:
    """Largest ``|d^j f/dx^j|`` of the flat function at ``x = x0`` over ``ys``."""
    out = {}
    d = flat_function()
    for j in range(1, max(orders) + 1):
        d = differentiate(d, "x")
        if j in orders:
            vals = eval_many(d, np.full(len(ys), x0), np.asarray(ys, float))
            out[j] = float(np.max(np.abs(vals)))
    return out

"""Pseudo-random sample points and the randomized equality oracle."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .evaluate import EvaluationError, eval_many, locate_failure
from .nodes import Expr

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Sampler:
    """Reproducible points in a rectangle, kept away from the line ``x = 0``.

    A fraction ``near_z`` of the points is placed log-uniformly in
    ``eps_z <= |x| <= 1`` so that behaviour close to the singular line is
    probed; one of them sits exactly at ``|x| = eps_z``.  ``t`` values are
    drawn from ``t_range`` for expressions that carry a parameter.
    """

    xmin: float = -3.0
    xmax: float = 3.0
    ymin: float = -3.0
    ymax: float = 3.0
    eps_z: float = 0.1
    positive: bool = False
    n: int = 64
    seed: int = 0
    near_z: float = 0.0
    t_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sampler needs at least one point")
        lo = max(self.xmin, self.eps_z) if self.positive else self.xmin
        if lo >= self.xmax:
            raise ValueError("empty sampling region")
        if not self.positive and max(abs(self.xmin), abs(self.xmax)) < self.eps_z:
            raise ValueError("empty sampling region")

    def with_(self, **changes) -> Sampler:
        return replace(self, **changes)

    def _admissible(self, xs):
        ok = np.abs(xs) >= self.eps_z
        if self.positive:
            ok &= xs > 0
        return ok & (xs >= self.xmin) & (xs <= self.xmax)

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(xs, ys, ts)`` float arrays of length ``n``."""
        rng = np.random.default_rng(self.seed)
        n_near = int(round(self.near_z * self.n))
        xs = []
        if n_near:
            top = max(self.eps_z, min(1.0, max(abs(self.xmin), abs(self.xmax))))
            mags = 10 ** rng.uniform(np.log10(self.eps_z), np.log10(top), n_near)
            mags[0] = self.eps_z
            if self.positive:
                signs = np.ones(n_near)
            else:
                signs = rng.choice([-1.0, 1.0], n_near)
                signs[0] = 1.0
                if n_near > 1:
                    signs[1] = -1.0
                    mags[1] = self.eps_z
            cand = signs * mags
            xs.extend(cand[self._admissible(cand)])
        while len(xs) < self.n:
            cand = rng.uniform(self.xmin, self.xmax, 4 * self.n)
            xs.extend(cand[self._admissible(cand)])
        xs = np.asarray(xs[: self.n], dtype=float)
        ys = rng.uniform(self.ymin, self.ymax, self.n)
        ts = rng.uniform(self.t_range[0], self.t_range[1], self.n)
        return xs, ys, ts

    def z_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Points on the singular line ``x = 0`` with the sampler's ``y`` range."""
        rng = np.random.default_rng(self.seed + 1)
        ys = rng.uniform(self.ymin, self.ymax, self.n)
        return np.zeros(self.n), ys


DEFAULT_SAMPLER = Sampler()


def relative_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise ``|a - b| / (1 + max(|a|, |b|))``."""
    return np.abs(a - b) / (1.0 + np.maximum(np.abs(a), np.abs(b)))


def evaluate_on(e: Expr, s: Sampler, xs=None, ys=None, ts=None) -> np.ndarray:
    """Evaluate on the sampler's points, reporting the failing point on error."""
    if xs is None:
        xs, ys, ts = s.points()
    try:
        return eval_many(e, xs, ys, ts)
    except EvaluationError:
        point, exc = locate_failure(e, xs, ys, ts)
        if point is None:
            raise
        raise EvaluationError(exc.reason, point) from None


def semantic_error(e1: Expr, e2: Expr, s: Sampler = DEFAULT_SAMPLER) -> float:
    """Largest relative discrepancy between ``e1`` and ``e2`` over the sample."""
    xs, ys, ts = s.points()
    a = evaluate_on(e1, s, xs, ys, ts)
    b = evaluate_on(e2, s, xs, ys, ts)
    return float(relative_error(a, b).max())


def semantically_equal(e1: Expr, e2: Expr, s: Sampler = DEFAULT_SAMPLER, tol: float = DEFAULT_TOL) -> bool:
    """Randomized equality: ``|e1 - e2| <= tol * (1 + max(|e1|, |e2|))`` at every sample."""
    return semantic_error(e1, e2, s) <= tol

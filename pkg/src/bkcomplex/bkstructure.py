"""Generators ``L_k = x^k d/dx + i d/dy`` and the automorphism criterion.

A diffeomorphism ``m`` of the plane is an automorphism of the standard
b^k-complex plane exactly when ``m_* L_k = lam * L_k`` for a nowhere-vanishing
smooth ``lam``.  The test here is numerical: the cross determinant of the two
fields must vanish at every sample and the inferred ``lam`` must stay inside
``[nv, 1/nv]`` on a sampler that reaches close to the singular line
``Z = {x = 0}``.  A passing verdict is a sampling certificate, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ComplexVectorField, PlanarMap, _jacobian_values
from .symexpr import (
    ONE,
    Const,
    Expr,
    I,
    Sampler,
    differentiate,
    eval_many,
    substitute,
    x,
)
from .symexpr.evaluate import EvaluationError

DEFAULT_TOL = 1e-9
DEFAULT_NV = 1e-2
Z_TOL = 1e-9

#: near-Z sampler used for proportionality checks
BK_SAMPLER = Sampler(xmin=-2.0, xmax=2.0, ymin=-2.0, ymax=2.0, eps_z=1e-4, n=64, near_z=0.5, seed=0)


def generator(k: int) -> ComplexVectorField:
    """``L_k = (x^k, i)``; ``k = 0`` gives the Cauchy-Riemann field ``(1, i)``."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError("k must be an integer")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return ComplexVectorField(ONE, I)
    if k == 1:
        return ComplexVectorField(x, I)
    return ComplexVectorField(x ** Const(int(k)), I)


def vanishes_to_order(a: Expr, k: int, ys=None, tol: float = 1e-12) -> bool:
    """True when ``d^j a/dx^j`` vanishes on ``x = 0`` for ``j = 0..k-1``.

    Each restricted derivative is evaluated along sampled ``y`` values.
    """
    if ys is None:
        ys = np.random.default_rng(0).uniform(-3.0, 3.0, 32)
    ys = np.asarray(ys, dtype=float)
    d = a
    for j in range(k):
        if j:
            d = differentiate(d, "x")
        on_z = substitute(d, {"x": Const(0)})
        try:
            vals = eval_many(on_z, 0.0, ys)
        except EvaluationError as exc:
            raise EvaluationError(f"derivative of order {j} is not evaluable on x = 0 ({exc.reason})") from None
        if np.max(np.abs(vals)) > tol:
            return False
    return True


@dataclass(frozen=True)
class ProportionalityVerdict:
    holds: bool
    lambda_samples: list = field(default_factory=list)
    min_abs_lambda: float = math.nan
    max_abs_lambda: float = math.nan
    max_cross_det: float = math.nan
    failure_point: tuple | None = None
    reason: str = ""
    z_preserved: bool | None = None
    max_z_offset: float | None = None

    def lambda_constant(self, tol: float = 1e-9) -> complex | None:
        """The common value of ``lam`` when it is constant over the samples."""
        if not self.lambda_samples:
            return None
        vals = np.array([lam for _, lam in self.lambda_samples])
        if np.max(np.abs(vals - vals[0])) <= tol * (1 + abs(vals[0])):
            return complex(vals[0])
        return None

    def to_dict(self) -> dict:
        const = self.lambda_constant()
        return {
            "holds": bool(self.holds),
            "reason": self.reason,
            "min_abs_lambda": _num(self.min_abs_lambda),
            "max_abs_lambda": _num(self.max_abs_lambda),
            "max_cross_det": _num(self.max_cross_det),
            "lambda_constant": None if const is None else [const.real, const.imag],
            "failure_point": None if self.failure_point is None else [float(v) for v in self.failure_point],
            "z_preserved": self.z_preserved,
            "max_z_offset": _num(self.max_z_offset),
            "samples": len(self.lambda_samples),
            "lambda_samples": [
                {"point": [float(p[0]), float(p[1])], "lambda": [float(lam.real), float(lam.imag)]}
                for p, lam in self.lambda_samples
            ],
        }


def _num(v):
    return None if v is None or (isinstance(v, float) and math.isnan(v)) else float(v)


def proportionality(Xv: np.ndarray, Yv: np.ndarray, xs, ys, tol: float = DEFAULT_TOL, nv: float = DEFAULT_NV) -> ProportionalityVerdict:
    """Proportionality verdict from field values of shape ``(2, n)``.

    ``lam`` is defined by ``X = lam * Y`` and read off the larger component
    of ``Y``; it must satisfy ``nv <= |lam| <= 1/nv``.
    """
    ax, bx = Xv
    ay, by = Yv
    det = ax * by - ay * bx
    scale = np.maximum(1.0, np.hypot(np.abs(ax), np.abs(bx)) * np.hypot(np.abs(ay), np.abs(by)))
    use_a = np.abs(ay) >= np.abs(by)
    ny = np.where(use_a, np.abs(ay), np.abs(by))
    nx = np.hypot(np.abs(ax), np.abs(bx))
    points = list(zip(np.asarray(xs, float), np.asarray(ys, float)))

    both_zero = (ny == 0) & (nx == 0)
    if both_zero.any():
        j = int(np.argmax(both_zero))
        return ProportionalityVerdict(False, failure_point=points[j], reason="indeterminate: both fields vanish")
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(use_a, ax / np.where(ay == 0, 1, ay), bx / np.where(by == 0, 1, by))
    lam = np.where(ny == 0, np.inf, lam)
    mags = np.abs(lam)
    max_det = float(np.max(np.abs(det)))
    samples = [(p, complex(v)) for p, v in zip(points, lam)]
    verdict = dict(
        lambda_samples=samples,
        min_abs_lambda=float(mags.min()),
        max_abs_lambda=float(mags.max()),
        max_cross_det=max_det,
    )
    bad_det = np.abs(det) > tol * scale
    if bad_det.any():
        j = int(np.argmax(np.abs(det) / scale))
        return ProportionalityVerdict(False, failure_point=points[j], reason=f"cross determinant {complex(det[j]):.6g} is not zero", **verdict)
    bad_lam = (mags < nv) | (mags > 1.0 / nv)
    if bad_lam.any():
        j = int(np.argmax(np.where(bad_lam, np.abs(np.log(np.maximum(mags, 1e-300))), -1)))
        return ProportionalityVerdict(
            False, failure_point=points[j], reason=f"|lambda| = {mags[j]:.3g} outside [{nv:g}, {1 / nv:g}]", **verdict
        )
    return ProportionalityVerdict(True, reason="proportional at all samples", **verdict)


def is_proportional(
    X: ComplexVectorField,
    Y: ComplexVectorField,
    s: Sampler = BK_SAMPLER,
    tol: float = DEFAULT_TOL,
    nv_threshold: float = DEFAULT_NV,
) -> ProportionalityVerdict:
    """Is ``X = lam * Y`` with ``lam`` nowhere vanishing, on the sample?"""
    xs, ys, ts = s.points()
    return proportionality(X(xs, ys, ts), Y(xs, ys, ts), xs, ys, tol, nv_threshold)


def _injective_on(images: np.ndarray) -> bool:
    pts = images.T
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    return bool(dist.min() > 0)


def is_bk_automorphism(
    m: PlanarMap,
    k: int,
    s: Sampler = BK_SAMPLER,
    tol: float = DEFAULT_TOL,
    nv_threshold: float = DEFAULT_NV,
) -> ProportionalityVerdict:
    """Test ``m_* L_k ~ L_k`` at the sample and that ``m`` preserves ``Z``.

    Diffeomorphy is only spot-checked: the Jacobian must be nonsingular at
    the samples, of one sign (the plane is connected), and the sampled
    images pairwise distinct.
    """
    L = generator(k)
    xs, ys, ts = s.points()
    try:
        J = _jacobian_values(m, xs, ys, ts)
        img = m(xs, ys, ts)
    except EvaluationError as exc:
        return ProportionalityVerdict(False, reason=f"map not evaluable: {exc}")
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if (np.abs(det) < 1e-12).any():
        j = int(np.argmin(np.abs(det)))
        return ProportionalityVerdict(False, failure_point=(xs[j], ys[j]), reason="singular Jacobian: not a diffeomorphism")
    sign = np.sign(np.real(det))
    if (sign != sign[0]).any():
        j = int(np.argmax(sign != sign[0]))
        return ProportionalityVerdict(False, failure_point=(xs[j], ys[j]), reason="Jacobian determinant changes sign: not a diffeomorphism")
    if not _injective_on(img):
        return ProportionalityVerdict(False, reason="sampled images collide: not injective")
    Xv = np.einsum("ijn,jn->in", J, L(xs, ys, ts))
    try:
        Yv = L(img[0], img[1], ts)
    except EvaluationError as exc:
        return ProportionalityVerdict(False, reason=f"generator not evaluable at image: {exc}")
    verdict = proportionality(Xv, Yv, xs, ys, tol, nv_threshold)

    zx, zy = s.z_points()
    try:
        zimg = m(zx, zy, np.zeros_like(zx))
        offset = float(np.max(np.abs(zimg[0])))
    except EvaluationError as exc:
        return ProportionalityVerdict(False, reason=f"map not evaluable on Z: {exc}")
    preserved = offset <= Z_TOL
    holds = verdict.holds and preserved
    reason = verdict.reason if verdict.holds is False or preserved else f"Z not preserved (max |x| offset {offset:.3g})"
    return ProportionalityVerdict(
        holds,
        verdict.lambda_samples,
        verdict.min_abs_lambda,
        verdict.max_abs_lambda,
        verdict.max_cross_det,
        verdict.failure_point,
        reason,
        preserved,
        offset,
    )

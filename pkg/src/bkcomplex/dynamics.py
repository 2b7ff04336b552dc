"""Flows of real planar vector fields.

Fixed-step classical Runge-Kutta (RK4).  Steps are batched over many start
points at once, since a field is compiled to array code anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PLANE, ComplexVectorField, Domain, PlanarMap, relation_error, strip
from .report import ReportBuilder, VerificationReport
from .symexpr import (
    Const,
    I,
    Sampler,
    compile_expr,
    cos,
    exp,
    simplify,
    sin,
    x,
    y,
)
from .symexpr.evaluate import EvaluationError

DEFAULT_STEP = 1e-3
REAL_TOL = 1e-12
STRIP_MARGIN = 1e-9
DIVERGENCE_BOUND = 1e12


@dataclass(frozen=True)
class FlowProblem:
    field: ComplexVectorField
    p0: tuple[float, float]
    t: float
    h: float = DEFAULT_STEP
    domain: Domain = PLANE


@dataclass(frozen=True)
class FlowResult:
    endpoint: tuple[float, float]
    event: str | None = None  # None, "boundary" or "divergence"
    event_time: float | None = None
    trajectory: np.ndarray | None = None  # rows (t, x, y)

    @property
    def ok(self) -> bool:
        return self.event is None


def _field_function(V: ComplexVectorField):
    fa, fb = compile_expr(V.a), compile_expr(V.b)

    def f(px: np.ndarray, py: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        env = {"x": px.astype(complex), "y": py.astype(complex)}
        n = px.size
        with np.errstate(over="raise", divide="raise", invalid="raise", under="ignore"):
            a, b = fa(env, n), fb(env, n)
        if np.max(np.abs(a.imag), initial=0) > REAL_TOL * (1 + np.max(np.abs(a))) or np.max(
            np.abs(b.imag), initial=0
        ) > REAL_TOL * (1 + np.max(np.abs(b))):
            raise ValueError("flow field is not real-valued")
        return a.real, b.real

    return f


def flow_points(V: ComplexVectorField, xs, ys, t: float, h: float = DEFAULT_STEP, domain: Domain = PLANE,
                margin: float = 0.0, record: bool = False):
    """Integrate many start points to time ``t`` (negative ``t`` runs backward).

    Returns ``(X, Y, events, event_times, trajectory)``.  A point that leaves
    ``domain`` (shrunk by ``margin``) or overflows is frozen at its last good
    position with an event label.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    f = _field_function(V)
    px = np.array(xs, dtype=float, ndmin=1)
    py = np.array(ys, dtype=float, ndmin=1)
    n = px.size
    steps = int(math.ceil(abs(t) / h - 1e-12)) if t != 0 else 0
    dt = t / steps if steps else 0.0
    events = np.array([None] * n, dtype=object)
    times = np.full(n, np.nan)
    alive = np.ones(n, dtype=bool)
    traj = [np.vstack([np.zeros(n), px, py])] if record else None
    for j in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        x0, y0 = px[idx], py[idx]
        try:
            k1 = f(x0, y0)
            k2 = f(x0 + 0.5 * dt * k1[0], y0 + 0.5 * dt * k1[1])
            k3 = f(x0 + 0.5 * dt * k2[0], y0 + 0.5 * dt * k2[1])
            k4 = f(x0 + dt * k3[0], y0 + dt * k3[1])
            nx = x0 + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            ny = y0 + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        except (FloatingPointError, EvaluationError):
            nx = np.full(idx.size, np.inf)
            ny = np.full(idx.size, np.inf)
            if idx.size > 1:
                # redo one by one so only the offending points stop
                for m, i in enumerate(idx):
                    sub = flow_points(V, [px[i]], [py[i]], dt, abs(dt), PLANE)
                    nx[m], ny[m] = sub[0][0], sub[1][0]
        diverged = ~(np.isfinite(nx) & np.isfinite(ny)) | (np.hypot(nx, ny) > DIVERGENCE_BOUND)
        outside = ~diverged & ~domain.contains(nx, ny, margin)
        for flag, label in ((diverged, "divergence"), (outside, "boundary")):
            hit = idx[flag]
            events[hit] = label
            times[hit] = (j + 1) * dt
            alive[hit] = False
        ok = ~(diverged | outside)
        px[idx[ok]] = nx[ok]
        py[idx[ok]] = ny[ok]
        if record:
            traj.append(np.vstack([np.full(n, (j + 1) * dt), px.copy(), py.copy()]))
    trajectory = np.stack(traj, axis=0) if record else None
    return px, py, events, times, trajectory


def integrate_flow(fp: FlowProblem, record: bool = False) -> FlowResult:
    """RK4 from ``fp.p0`` over time ``fp.t`` with fixed step ``fp.h``."""
    margin = STRIP_MARGIN if fp.domain.kind == "strip" else 0.0
    X, Y, events, times, traj = flow_points(fp.field, [fp.p0[0]], [fp.p0[1]], fp.t, fp.h, fp.domain, margin, record)
    rows = traj[:, :, 0] if record else None
    ev = events[0]
    return FlowResult((float(X[0]), float(Y[0])), ev, None if ev is None else float(times[0]), rows)


def mobius_reference(z0, t: float) -> tuple[float, float]:
    """``z0 / (1 - t z0)`` split into real coordinates."""
    z = complex(z0[0], z0[1]) if not isinstance(z0, complex) else z0
    den = 1 - t * z
    if den == 0:
        raise ZeroDivisionError(f"pole: 1 - t z0 = 0 for z0={z}, t={t}")
    w = z / den
    return w.real, w.imag


def mobius_many(xs, ys, t: float) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(xs, dtype=float) + 1j * np.asarray(ys, dtype=float)
    den = 1 - t * z
    if np.any(den == 0):
        raise ZeroDivisionError("pole in Moebius flow")
    w = z / den
    return w.real, w.imag


#: generator of ``z -> z / (1 - t z)``, i.e. ``z^2 d/dz`` in real form
MOBIUS_FIELD = ComplexVectorField(x**2 - y**2, Const(2) * x * y)


def one_parameter_check(V: ComplexVectorField, fam, s: Sampler, ts=(0.1, 0.5, 1.0), h: float = DEFAULT_STEP,
                        tol: float = 1e-6, name: str | None = None) -> VerificationReport:
    """Compare ``V`` with ``d/dt fam(t)`` at ``t = 0`` and its flow with ``fam(t)``.

    ``fam`` is an :class:`~bkcomplex.autgroups.AutFamily` or a callable
    ``(xs, ys, t) -> (X, Y)`` giving the family numerically.
    """
    from .symexpr import semantic_error

    label = name or getattr(fam, "name", "family")
    rb = ReportBuilder(f"one-parameter:{label}", tol, "generator of a one-parameter group")
    xs, ys, _ = s.points()
    if hasattr(fam, "generator"):
        G = fam.generator()
        err = max(semantic_error(G.a, V.a, s), semantic_error(G.b, V.b, s))
        rb.measure("d/dt fam(t) at t=0 equals V", err, tol=1e-10)
        apply = lambda px, py, tt: fam.at(tt)(px, py)  # noqa: E731
    else:
        apply = lambda px, py, tt: np.vstack(fam(px, py, tt))  # noqa: E731
        delta = 1e-6
        moved = apply(xs, ys, delta)
        fd = np.vstack([(moved[0] - xs) / delta, (moved[1] - ys) / delta])
        Vv = V(xs, ys).real
        rb.measure("finite-difference generator matches V", float(np.max(np.abs(fd - Vv) / (1 + np.abs(Vv)))), tol=1e-4)
    for tt in ts:
        X, Y, events, _, _ = flow_points(V, xs, ys, tt, h)
        ref = apply(xs, ys, tt)
        err = float(np.max(np.hypot(X - ref[0], Y - ref[1]) / (1 + np.hypot(ref[0], ref[1]))))
        rb.measure("flow of V matches fam(t)", err, at=tt)
        rb.expect("no integration events", all(e is None for e in events), at=tt)
    return rb.build()


# ------------------------------------------------------------ strip example
OMEGA = strip(-math.pi / 2, math.pi / 2)
#: u(x, y) = x e^{iy} as a real map
U_MAP = PlanarMap(x * cos(y), x * sin(y), OMEGA)


def zbar_field(power: int = 1) -> ComplexVectorField:
    """``zbar^n (d/dX + i d/dY)`` in the real coordinates ``(X, Y)`` = ``(x, y)``."""
    zb = (x - I * y) ** Const(power) if power != 1 else x - I * y
    return ComplexVectorField(zb, I * zb)


def strip_multiplier(conjugate: bool = True):
    """``x e^{-iy}`` (the conjugate of ``u``) or ``x e^{iy}``."""
    return x * exp(-I * y) if conjugate else x * exp(I * y)


def strip_real_field(conjugate: bool = True) -> ComplexVectorField:
    """Real part of ``multiplier * L_1``, simplified."""
    from .bkstructure import generator

    L1 = generator(1)
    # real and imaginary parts of x e^{+-iy} written with cos/sin keep the field visibly real
    sign = Const(-1) if conjugate else Const(1)
    re_m, im_m = x * cos(y), sign * x * sin(y)
    a = re_m * L1.a  # L1.a = x is real
    b = -im_m  # Re(mult * i) = -Im(mult)
    return ComplexVectorField(simplify(a), simplify(b))


STRIP_SAMPLER = Sampler(xmin=-2.0, xmax=2.0, ymin=-math.pi / 2 + 0.05, ymax=math.pi / 2 - 0.05, eps_z=0.1, n=64, seed=0)
STRIP_SEEDS = (
    (0.05, 0.0), (-0.05, 0.3), (0.1, -0.5), (-0.1, 0.9), (0.2, 0.2),
    (-0.2, -0.7), (0.25, -0.1), (-0.3, 0.4), (0.15, 0.6), (-0.12, -1.0),
)


def strip_example_check(seeds=STRIP_SEEDS, t_max: float = 2.0, h: float = DEFAULT_STEP, tol: float = 1e-6) -> VerificationReport:
    """Local automorphisms of the strip from the Moebius flow.

    1. ``u_* L_1 = zbar (d/dX + i d/dY)`` and, with multiplier ``x e^{-iy}``,
       ``u_*(x e^{-iy} L_1) = zbar^2 (d/dX + i d/dY)``; the unconjugated multiplier
       ``x e^{iy}`` instead yields ``|z|^2 (d/dX + i d/dY)`` and is recorded.
    2. The real field ``W = Re(x e^{-iy} L_1) = (x^2 cos y, x sin y)`` is carried
       to ``(X^2 - Y^2, 2XY)`` and its flow stays in the strip for ``|t| <= t_max``.
    3. ``u(flow_t(p)) = u(p) / (1 - t u(p))``.
    """
    from .bkstructure import generator

    rb = ReportBuilder("strip-example", tol, "Moebius flow pulled back to the strip")
    L1 = generator(1)
    s = STRIP_SAMPLER
    rb.measure("u_* L_1 = zbar (d/dX + i d/dY)", relation_error(U_MAP, L1, zbar_field(1), s), tol=1e-10)
    conj_mult = strip_multiplier(True)
    rb.measure("u_*(x e^{-iy} L_1) = zbar^2 (d/dX + i d/dY)",
               relation_error(U_MAP, L1.scaled(conj_mult), zbar_field(2), s), tol=1e-10)
    plain = strip_multiplier(False)
    mismatch = relation_error(U_MAP, L1.scaled(plain), zbar_field(2), s)
    modulus = ComplexVectorField(x**2 + y**2, I * (x**2 + y**2))
    rb.note("multiplier x e^{iy} does not give zbar^2 (d/dX + i d/dY)", observed=mismatch, expected="nonzero")
    rb.measure("u_*(x e^{iy} L_1) = |z|^2 (d/dX + i d/dY)", relation_error(U_MAP, L1.scaled(plain), modulus, s), tol=1e-10)

    W = strip_real_field(True)
    rb.note("derived real field W", observed=str(W), expected="(x^2 cos y, x sin y)")
    rb.note("real part with multiplier x e^{iy}", observed=str(strip_real_field(False)))
    rb.measure("u_* W = (X^2 - Y^2, 2XY)", relation_error(U_MAP, W, MOBIUS_FIELD, s), tol=1e-10)

    sx = np.array([p[0] for p in seeds])
    sy = np.array([p[1] for p in seeds])
    for tt in (t_max, -t_max):
        X, Y, events, times, _ = flow_points(W, sx, sy, tt, h, OMEGA, STRIP_MARGIN)
        rb.expect(f"flow of W stays in the strip up to t={tt:+g}", all(e is None for e in events),
                  observed=[e for e in events if e is not None], expected=[])
    for tt in (0.5, 1.0):
        off_z = np.abs(sx) > 0
        X, Y, events, _, _ = flow_points(W, sx[off_z], sy[off_z], tt, h, OMEGA, STRIP_MARGIN)
        img = U_MAP(X, Y)
        start = U_MAP(sx[off_z], sy[off_z])
        ref = mobius_many(start[0], start[1], tt)
        err = float(np.max(np.hypot(img[0] - ref[0], img[1] - ref[1]) / (1 + np.hypot(ref[0], ref[1]))))
        rb.measure("u(flow_t(p)) = u(p)/(1 - t u(p))", err, at=tt)
    return rb.build()


# ------------------------------------------------------------ Moebius flow
def mobius_seeds(n: int = 20, t: float = 0.5, seed: int = 0, margin: float = 0.2) -> np.ndarray:
    """Seeds ``z0`` with ``|1 - s z0| > margin`` for every ``s`` between 0 and ``t``."""
    rng = np.random.default_rng(seed)
    out = []
    ss = np.linspace(0.0, t, 201)
    while len(out) < n:
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if np.min(np.abs(1 - ss * z)) > margin:
            out.append(z)
    return np.array(out)


def mobius_error(zs: np.ndarray, t: float, h: float) -> float:
    """Largest endpoint distance between RK4 and the closed-form Moebius flow."""
    X, Y, events, _, _ = flow_points(MOBIUS_FIELD, zs.real, zs.imag, t, h)
    if any(e is not None for e in events):
        return math.inf
    rx, ry = mobius_many(zs.real, zs.imag, t)
    return float(np.max(np.hypot(X - rx, Y - ry)))


def rk4_order_ratio(zs: np.ndarray, t: float = 0.5, h: float = DEFAULT_STEP) -> float:
    """Error at ``h`` divided by error at ``h/2``; about 16 for a fourth order method."""
    return mobius_error(zs, t, h) / mobius_error(zs, t, h / 2)


def flow_group_error(V: ComplexVectorField, xs, ys, s: float, t: float, h: float = DEFAULT_STEP) -> float:
    """Distance between flowing ``s`` then ``t`` and flowing ``s + t`` in one go."""
    X1, Y1, *_ = flow_points(V, xs, ys, s, h)
    X2, Y2, *_ = flow_points(V, X1, Y1, t, h)
    X3, Y3, *_ = flow_points(V, xs, ys, s + t, h)
    return float(np.max(np.hypot(X2 - X3, Y2 - Y3)))


def mobius_flow_check(n_seeds: int = 20, t: float = 0.5, h: float = DEFAULT_STEP, seed: int = 0,
                      tol: float = 1e-8, order_h: float | None = None) -> VerificationReport:
    """RK4 on ``(x^2 - y^2, 2xy)`` against ``z0 / (1 - t z0)``.

    The halving test runs at ``h`` unless ``order_h`` is given; it is only
    meaningful while the error stays well above roundoff.
    """
    order_h = h if order_h is None else order_h
    rb = ReportBuilder("mobius-flow", tol, "Moebius flow z/(1-tz)")
    zs = mobius_seeds(n_seeds, t, seed)
    rb.measure("RK4 endpoint vs closed form", mobius_error(zs, t, h), at={"t": t, "h": h, "seeds": n_seeds})
    ratio = rk4_order_ratio(zs, t, order_h)
    rb.expect("halving h divides the error by 8..32", 8 <= ratio <= 32, at={"h": order_h}, observed=ratio, expected=16)
    g = flow_group_error(MOBIUS_FIELD, zs.real[:5], zs.imag[:5], 0.2, 0.3, h)
    rb.measure("flow(s) then flow(t) equals flow(s+t)", g, tol=1e-7, at={"s": 0.2, "t": 0.3})
    return rb.build()

"""The full verification suite: every identity and property as a report."""

from __future__ import annotations

import math

import numpy as np

from . import autgroups as ag
from . import dynamics as dyn
from . import holospaces as hs
from .bkstructure import BK_SAMPLER, generator, is_bk_automorphism, is_proportional, vanishes_to_order
from .geometry import D_Y, ComplexVectorField, PlanarMap, pushforward_residual, relation_error
from .report import ReportBuilder, VerificationReport, skipped
from .symexpr import (
    Const,
    Sampler,
    differentiate,
    eval_many,
    evaluable_exprs,
    exp,
    parse_expr,
    semantic_error,
    simplify,
    to_text,
    x,
    y,
)

ROUND_TRIP_COUNT = 1000
FD_STEP = 1e-6
DERIVATIVE_BOUND = 1e2

#: (e^y x, y) carries d/dy to x d/dx + d/dy but is not an automorphism
EXP_Y_MAP = PlanarMap(exp(y) * x, y)
SHEAR_MAP = PlanarMap(x, y + x)


def symexpr_roundtrip_check(seed: int = 0, count: int = ROUND_TRIP_COUNT) -> VerificationReport:
    rb = ReportBuilder("symexpr:print-parse-roundtrip", 1e-10, "printing then parsing is the identity up to evaluation")
    s = Sampler(n=16, seed=seed)
    xs, ys, ts = s.points()
    worst, where = 0.0, None
    for e in evaluable_exprs(count, seed, xs, ys, ts):
        err = semantic_error(parse_expr(to_text(e)), e, s)
        if err > worst:
            worst, where = err, to_text(e)
    rb.measure(f"{count} random trees", worst, observed=worst if where is None else [worst, where])
    return rb.build()


def symexpr_derivative_check(seed: int = 0, count: int = 200) -> VerificationReport:
    """Symbolic derivatives against centred differences with ``h = 1e-6``."""
    rb = ReportBuilder("symexpr:derivative-vs-finite-difference", 1e-5, "symbolic derivative agrees with difference quotients")
    s = Sampler(n=8, seed=seed + 1, xmin=-2, xmax=2, ymin=-2, ymax=2)
    xs, ys, ts = s.points()
    worst, used = 0.0, 0
    for e in evaluable_exprs(count, seed + 1, xs, ys, ts, guards=False, risky=False, bound=1e3):
        ds = [eval_many(differentiate(e, v), xs, ys, ts) for v in ("x", "y")]
        # steep trees make the difference quotient itself inaccurate at this step
        if max(np.max(np.abs(d)) for d in ds) > DERIVATIVE_BOUND:
            continue
        used += 1
        for d, dx, dy in ((ds[0], FD_STEP, 0.0), (ds[1], 0.0, FD_STEP)):
            fd = (eval_many(e, xs + dx, ys + dy, ts) - eval_many(e, xs - dx, ys - dy, ts)) / (2 * FD_STEP)
            worst = max(worst, float(np.max(np.abs(d - fd) / (1 + np.abs(d)))))
    rb.measure(f"d/dx and d/dy of {used} random trees", worst)
    return rb.build()


def symexpr_simplify_check(seed: int = 0, count: int = 300) -> VerificationReport:
    rb = ReportBuilder("symexpr:simplify-preserves-values", 1e-10, "simplification keeps values")
    s = Sampler(n=16, seed=seed + 2)
    xs, ys, ts = s.points()
    worst = 0.0
    for e in evaluable_exprs(count, seed + 2, xs, ys, ts):
        worst = max(worst, semantic_error(simplify(e), e, s))
    rb.measure(f"{count} random trees", worst)
    u = x * exp(Const(0, 1) * y)
    L1u = x * differentiate(u, "x") + Const(0, 1) * differentiate(u, "y")
    rb.expect("L_1 u simplifies to 0", simplify(L1u) == Const(0), observed=to_text(simplify(L1u)), expected="0")
    return rb.build()


def exp_y_pushforward_check(seed: int = 0) -> VerificationReport:
    """``(e^y x, y)`` relates ``d/dy`` to ``x d/dx + d/dy`` yet fails the criterion."""
    rb = ReportBuilder("exp-y-map:pushforward-and-non-automorphism", 1e-10, "a map relating fields but not preserving <L_k>")
    target = ComplexVectorField(x, Const(1))
    s = BK_SAMPLER.with_(seed=seed)
    rb.measure("pushforward of d/dy is x d/dx + d/dy", relation_error(EXP_Y_MAP, D_Y, target, s))
    res = pushforward_residual(EXP_Y_MAP, D_Y, target)
    rb.expect("symbolic residual simplifies to 0", res.is_zero(), observed=str(res), expected="(0, 0)")
    for k in (1, 2):
        v = is_bk_automorphism(EXP_Y_MAP, k, s)
        rb.expect(f"not an automorphism for k={k}", not v.holds, at=k, observed=v.reason)
    return rb.build()


def generator_check(k: int) -> VerificationReport:
    rb = ReportBuilder(f"generator:k={k}", 0.0, "L_k and its vanishing order")
    L = generator(k)
    rb.expect("x-coefficient of L_k vanishes to order k on Z", vanishes_to_order(L.a, k))
    rb.expect("but not to order k+1", not vanishes_to_order(L.a, k + 1))
    v = is_proportional(L.scaled(Const(3, 1)), L)
    rb.expect("L_k ~ (3+i) L_k", v.holds, observed=v.lambda_constant(), expected=[3, 1])
    v = is_proportional(L.scaled(x), L)
    rb.expect("x L_k is not ~ L_k (lambda vanishes on Z)", not v.holds, observed=v.reason)
    return rb.build()


def counterexample_check(k: int, seed: int = 0) -> VerificationReport:
    rb = ReportBuilder(f"counterexamples:k={k}", 0.0, "maps that must fail the automorphism test")
    s = BK_SAMPLER.with_(seed=seed)
    for label, m in (("(e^y x, y)", EXP_Y_MAP), ("(x, y + x)", SHEAR_MAP)):
        v = is_bk_automorphism(m, k, s)
        rb.expect(f"{label} is rejected", not v.holds, observed=v.reason)
    if k >= 2:
        # hyperbolic exponent from a neighbouring k must fail
        wrong = PlanarMap(exp(Const(-1) / Const(k)) * x, exp(Const(1)) * y)
        v = is_bk_automorphism(wrong, k, s)
        rb.expect("hyperbolic map with the wrong exponent is rejected", not v.holds, observed=v.reason)
    return rb.build()


def elliptic_probe_check(k: int, t0: float = math.pi / 4, ys=(0.0, 1.0)) -> VerificationReport:
    rb = ReportBuilder(f"elliptic-probe:k={k}", 1e-3, "elliptic pullbacks blow up at Z")
    m = ag.elliptic_pullback(k, t0)
    cot = 1.0 / math.tan(t0)
    for y0 in ys:
        p = ag.extendability_probe(m, y0)
        rb.expect("classified diverges", p.classification == "diverges", at=y0, observed=p.reason)
        if k == 2:
            _, u, v = p.row_at(1e-6)
            rb.expect("first component > 1e3 at x=1e-6", u > 1e3, at=y0, observed=u)
            rb.measure("second component -> cot(t) at x=1e-6", abs(v - cot), at=y0, observed=v, expected=cot)
        else:
            rb.note("limit of second component", at=y0, observed=p.rows[-1][2], expected=cot)
    return rb.build()


def scaling_probe_check() -> VerificationReport:
    rb = ReportBuilder("scaling-probe:k=1", 0.0, "complex scalings pull back to non-extendable maps")
    for a, b, expect in ((1.0, 1.0, "diverges"), (math.cos(0.5), math.sin(0.5), "diverges"), (2.0, 0.0, "extends")):
        m = ag.scaling_pullback(a, b)
        p = ag.extendability_probe(m, 0.5)
        rb.expect(f"z -> ({a:.3g}{b:+.3g}i) z {expect}", p.classification == expect, at=[a, b], observed=p.reason)
    return rb.build()


def hyperbolic_probe_check(k: int) -> VerificationReport:
    rb = ReportBuilder(f"hyperbolic-probe:k={k}", 0.0, "hyperbolic pullbacks extend across Z")
    iso = ag.halfplane_iso(k)
    p = ag.extendability_probe(ag.conjugate_through(iso, ag.moebius_hyperbolic(0.7)), 1.0)
    rb.expect("classified extends", p.classification == "extends", observed=p.reason)
    return rb.build()


def one_parameter_suite(k: int) -> list[VerificationReport]:
    cat = ag.catalog(k)
    s = ag.PLANE_SAMPLER.with_(n=16)
    out = []
    for fam in cat:
        r = dyn.one_parameter_check(fam.generator(), fam, s, name=f"{fam.name}:k={k}")
        out.append(r)
    return out


def mobius_family_check() -> VerificationReport:
    s = Sampler(xmin=-0.5, xmax=0.5, ymin=-0.5, ymax=0.5, eps_z=0.0, n=16, seed=4)
    return dyn.one_parameter_check(dyn.MOBIUS_FIELD, lambda px, py, tt: dyn.mobius_many(px, py, tt), s, name="mobius")


def residual_check() -> VerificationReport:
    rb = ReportBuilder("bholo:residuals", 1e-10, "functions killed by L_1")
    for f in hs.catalog_bholo():
        r = hs.residual_sup(f.expr, 1, f.residual_grid)
        if f.name == "flat":
            rb.measure("flat function residual on x in [1e-3, 1]", r, observed=r)
        else:
            rb.expect(f"L_1 {f.name} = 0 symbolically", r == 0.0, observed=r, expected=0.0)
    r = hs.residual_sup(x, 1, hs.Grid(-2, 2, 0.25, -3, 3, 0.25))
    rb.measure("|L_1 x| peaks at 2", abs(r - 2.0), observed=r, expected=2.0)
    derivs = hs.flat_derivatives()
    rb.expect("flat function x-derivatives below 1e-40 at x=1e-3", all(v < 1e-40 for v in derivs.values()), observed=derivs)
    return rb.build()


def entire_pushforward_check() -> VerificationReport:
    rb = ReportBuilder("bholo:entire-pushforward", 1e-10, "f(e^X, Y) as an entire function")
    for f in hs.catalog_bholo():
        if not f.entire_symbolic:
            continue
        g = hs.b_to_entire(f)
        rb.measure(f"{f.name} pushes forward to the expected entire function",
                   semantic_error(g.entire, f.entire, Sampler()), observed=to_text(g.entire))
    return rb.build()


def norm_check(nodes: int = 64) -> VerificationReport:
    rb = ReportBuilder("bholo:segal-bargmann-norms", 1e-6, "Gaussian integrals pi e^{n^2}")
    q = hs.QuadratureSpec(nodes)
    for n in range(0, 4):
        F = exp(Const(n) * hs.W) if n else Const(1)
        exact = math.pi * math.exp(n * n)
        m = hs.entire_membership(F, q)
        rb.expect(f"exp({n}w) is a member", m.verdict == "member", at=n, observed=m.to_dict())
        if m.norm_sq is not None:
            rb.measure(f"norm^2 of exp({n}w) = pi e^{n * n}", abs(m.norm_sq - exact) / exact, at=n, observed=m.norm_sq, expected=exact)
            rb.measure("N vs 2N relative change", m.rel_change, at=n, tol=1e-8)
    flat = hs.b_bargmann_member(hs.bholo_by_name("flat"), q)
    rb.note("flat function pushforward exp(-exp(-w))", observed=flat.to_dict())
    rb.expect("flat function is not a member", flat.verdict == "not-member", observed=flat.verdict)
    return rb.build()


def _safe(name: str, fn, *args, **kw) -> VerificationReport:
    try:
        return fn(*args, **kw)
    except Exception as exc:  # a crash is a failed check, never an aborted suite
        rb = ReportBuilder(name, 0.0)
        rb.crash(exc)
        return rb.build()


def run_suite(k_values=(1, 2), seed: int = 0) -> list[VerificationReport]:
    """Run every check in a fixed order.  Deterministic for a given seed."""
    ks = sorted(set(int(k) for k in k_values))
    if not ks or ks[0] < 1:
        raise ValueError("k values must be a nonempty list of integers >= 1")
    out: list[VerificationReport] = [
        _safe("symexpr:print-parse-roundtrip", symexpr_roundtrip_check, seed),
        _safe("symexpr:derivative-vs-finite-difference", symexpr_derivative_check, seed),
        _safe("symexpr:simplify-preserves-values", symexpr_simplify_check, seed),
        _safe("exp-y-map:pushforward-and-non-automorphism", exp_y_pushforward_check, seed),
    ]
    for k in ks:
        out.append(_safe(f"generator:k={k}", generator_check, k))
    for k in ks:
        out.append(_safe(f"catalog-automorphisms:k={k}", ag.automorphism_check, k))
        out.append(_safe(f"counterexamples:k={k}", counterexample_check, k, seed))
    for k in ks:
        out.append(_safe(f"chart-conjugation:k={k}", ag.chart_conjugation_check, k))
        out.append(_safe(f"conjugation-consistency:k={k}", ag.conjugation_consistency_check, k))
    higher = [k for k in ks if k >= 2]
    if 1 in ks:
        out.append(_safe("scaling-probe:k=1", scaling_probe_check))
    if higher:
        for k in higher:
            out.append(_safe(f"elliptic-probe:k={k}", elliptic_probe_check, k))
            out.append(_safe(f"hyperbolic-probe:k={k}", hyperbolic_probe_check, k))
    else:
        out.append(skipped("elliptic-probe", "needs k >= 2"))
        out.append(skipped("hyperbolic-probe", "needs k >= 2"))
    for k in ks:
        for fam in ag.catalog(k):
            out.append(_safe(f"group-law:{fam.name}:k={k}", ag.group_law_check, fam))
        out.append(_safe(f"structure:k={k}", ag.structure_check, k))
        out.append(_safe(f"semidirect:k={k}", ag.semidirect_check, k))
        out.append(_safe(f"faithful-on-Z:k={k}", ag.faithfulness_check, k))
    for k in ks:
        out.extend(one_parameter_suite(k))
    out.append(_safe("one-parameter:mobius", mobius_family_check))
    out.append(_safe("mobius-flow", dyn.mobius_flow_check, seed=seed))
    out.append(_safe("strip-example", dyn.strip_example_check))
    out.append(_safe("bholo:residuals", residual_check))
    out.append(_safe("bholo:entire-pushforward", entire_pushforward_check))
    out.append(_safe("bholo:segal-bargmann-norms", norm_check))
    return out

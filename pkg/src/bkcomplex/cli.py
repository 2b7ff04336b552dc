"""Command-line front end.

Every command prints either aligned text or (with ``--json``) one JSON
object carrying ``"schema": 1``.  Exit status: 0 when every emitted report
passes, 1 when any fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import __version__
from . import autgroups as ag
from . import holospaces as hs
from .bkstructure import DEFAULT_NV, DEFAULT_TOL, BK_SAMPLER, is_bk_automorphism
from .dynamics import DEFAULT_STEP, FlowProblem, integrate_flow
from .geometry import PLANE, ComplexVectorField, Domain, PlanarMap, parse_point, pushforward, pushforward_residual, relation_error, strip
from .report import SCHEMA_VERSION, ReportBuilder, VerificationReport, jsonable
from .suite import run_suite
from .symexpr import ParseError, parse_expr, to_text
from .symexpr.evaluate import EvaluationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _k_list(text: str) -> list[int]:
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be a comma-separated list of integers, got {text!r}") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("k values must be integers >= 1")
    return ks


def _k_single(text: str) -> int:
    ks = _k_list(text)
    if len(ks) != 1:
        raise argparse.ArgumentTypeError("expected a single k")
    return ks[0]


def _domain(text: str) -> Domain:
    names = {"plane": "plane", "right": "right-half-plane", "left": "left-half-plane", "upper": "upper-half-plane"}
    if text in names:
        return Domain(names[text])
    if text.startswith("strip:"):
        try:
            y0, y1 = (float(v) for v in text[6:].split(":"))
            return strip(y0, y1)
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"domain must be plane, right, left, upper or strip:y0:y1, got {text!r}")


def default_seed() -> int:
    env = os.environ.get("BKC_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"BKC_SEED must be an integer, got {env!r}") from None


# ------------------------------------------------------------ emitters
def _dumps(payload: dict) -> str:
    return json.dumps(jsonable({"schema": SCHEMA_VERSION, **payload}), indent=2, sort_keys=False, allow_nan=False)


def _emit(args, command: str, reports: list[VerificationReport], extra: dict | None = None, text_lines=()) -> int:
    ok = all(r.passed for r in reports)
    if args.json:
        payload = {"command": command, "ok": ok, **(extra or {}), "reports": [r.to_dict() for r in reports]}
        print(_dumps(payload))
    else:
        for line in text_lines:
            print(line)
        for r in reports:
            print(r.summary_line())
            if getattr(args, "verbose", False) or not r.passed:
                for d in r.details:
                    mark = " " if d.ok else "!"
                    at = "" if d.at is None else f" at {d.at}"
                    print(f"    {mark} {d.description}{at}: {d.observed}")
        n_fail = sum(not r.passed for r in reports)
        print(f"{len(reports)} reports, {n_fail} failed")
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------ commands
def cmd_verify_all(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    reports = run_suite(args.k, seed)
    return _emit(args, "verify-all", reports, {"k": args.k, "seed": seed})


def cmd_check_aut(args) -> int:
    m = PlanarMap.parse(args.map)
    s = BK_SAMPLER.with_(seed=args.seed if args.seed is not None else default_seed())
    v = is_bk_automorphism(m, args.k, s, args.tol, args.nv)
    rb = ReportBuilder(f"check-aut:k={args.k}", args.tol, "automorphism criterion")
    rb.expect(f"{m} is an automorphism for k={args.k}", v.holds, observed=v.reason)
    verdict = v.to_dict()
    if not args.samples:
        verdict.pop("lambda_samples")
    lam = v.lambda_constant()
    lines = [f"map {m}  k={args.k}  holds={v.holds}  lambda={'varies' if lam is None else lam}"]
    return _emit(args, "check-aut", [rb.build()], {"map": str(m), "k": args.k, "verdict": verdict}, lines)


def cmd_catalog(args) -> int:
    cat = ag.catalog(args.k)
    iso = ag.halfplane_iso(args.k)
    info = {
        "k": args.k,
        "families": [{"name": f.name, "map": f.formula(), "generator": str(f.generator())} for f in cat],
        "flip": str(cat.flip),
        "chart": {"map": str(iso.map), "target": str(iso.target), "multiplier": to_text(iso.multiplier)},
    }
    reports = [ag.automorphism_check(args.k)]
    lines = [f"k = {args.k}"]
    lines += [f"  {f['name']:22s} {f['map']}   generator {f['generator']}" for f in info["families"]]
    lines += [f"  {'flip':22s} {info['flip']}", f"  chart to {info['chart']['target']}: {info['chart']['map']}"]
    return _emit(args, "catalog", reports, {"catalog": info}, lines)


def _probe_map(args) -> PlanarMap:
    if args.map:
        return PlanarMap.parse(args.map, domain=Domain("right-half-plane"))
    if args.family == "scaling":
        if args.k != 1:
            raise UsageError("scaling pullbacks exist for k = 1 only")
        return ag.scaling_pullback(math.cos(args.t) * args.r, math.sin(args.t) * args.r)
    if args.k < 2:
        raise UsageError(f"{args.family} pullbacks need k >= 2")
    target = {"elliptic": ag.moebius_elliptic, "hyperbolic": ag.moebius_hyperbolic, "parabolic": ag.moebius_parabolic}[args.family]
    iso = ag.halfplane_iso(args.k)
    return ag.conjugate_through(iso, target(args.t), simplify_result=args.family != "elliptic")


def cmd_probe_extend(args) -> int:
    m = _probe_map(args)
    rb = ReportBuilder("probe-extend", 0.0, "behaviour as x -> 0+")
    probes = []
    for y0 in args.y0:
        p = ag.extendability_probe(m, y0)
        probes.append(p.to_dict())
        if args.expect:
            rb.expect(f"classified {args.expect}", p.classification == args.expect, at=y0, observed=p.classification)
        else:
            rb.note(p.classification, at=y0, observed=p.reason)
    lines = [f"map {m}"]
    for p in probes:
        lines.append(f"y0={p['y0']:g}: {p['classification']} ({p['reason']})")
        lines += [f"    x={r['x']:.1e}  u={r['u']:.12g}  v={r['v']:.12g}" for r in p["table"]]
    return _emit(args, "probe-extend", [rb.build()], {"map": str(m), "probes": probes}, lines)


def cmd_flow(args) -> int:
    V = ComplexVectorField.parse(args.vf)
    p0 = parse_point(args.p0)
    if args.h <= 0:
        raise UsageError("--h must be positive")
    res = integrate_flow(FlowProblem(V, p0, args.t, args.h, args.domain), record=bool(args.trace))
    if args.trace:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y"])
            for row in res.trajectory:
                w.writerow([repr(float(v)) for v in row])
    rb = ReportBuilder("flow", 0.0, "RK4 integration")
    rb.expect("integration finished without events", res.ok, observed=res.event, expected=None)
    extra = {"endpoint": list(res.endpoint), "event": res.event, "event_time": res.event_time, "t": args.t, "h": args.h}
    lines = [f"endpoint ({res.endpoint[0]:.15g}, {res.endpoint[1]:.15g})"]
    if res.event:
        lines.append(f"{res.event} at t = {res.event_time:g}")
    return _emit(args, "flow", [rb.build()], extra, lines)


def cmd_residual(args) -> int:
    f = parse_expr(args.f)
    grid = hs.Grid.parse(args.grid)
    value = hs.residual_sup(f, args.k, grid)
    rb = ReportBuilder(f"residual:k={args.k}", args.tol, "L_k f = 0")
    rb.measure(f"sup |L_{args.k} f| over the grid", value, observed=value)
    return _emit(args, "residual", [rb.build()], {"value": value, "f": to_text(f), "k": args.k}, [f"sup |L_{args.k} f| = {value:.6g}"])


def cmd_norm(args) -> int:
    q = hs.QuadratureSpec(args.nodes)
    if args.entire:
        F = parse_expr(args.entire, {"w": hs.W})
        m = hs.entire_membership(F, q)
        label = to_text(F)
    else:
        f = hs.BHoloFunction("cli", parse_expr(args.bfunc))
        residual = hs.residual_sup(f.expr, 1, hs.ROUND_TRIP_SAMPLER)
        if residual > 1e-8:
            raise UsageError(f"--bfunc is not killed by L_1 on x > 0 (residual {residual:.3g})")
        g = hs.b_to_entire(f)
        m = hs.b_bargmann_member(g, q)
        label = to_text(g.entire)
    rb = ReportBuilder("norm", q.rtol, "Segal-Bargmann membership")
    rb.expect("quadrature converged", m.converged, observed=m.verdict)
    if m.verdict == "undecided":
        rb.undecided = True
    info = m.to_dict()
    lines = [f"F = {label}", f"{m.verdict}: norm^2 = {m.norm_sq} (N={m.nodes}, relative change {m.rel_change:.3g})"]
    return _emit(args, "norm", [rb.build()], {"entire": label, **info}, lines)


def cmd_pushforward(args) -> int:
    m = PlanarMap.parse(args.map, domain=args.domain)
    X = ComplexVectorField.parse(args.vf)
    s = args.domain.sampler(n=64)
    extra: dict = {"map": str(m), "field": str(X)}
    lines = []
    rb = ReportBuilder("pushforward", args.tol, "m_* X")
    if args.inverse:
        m = m.with_inverse(PlanarMap.parse(args.inverse))
        Y = pushforward(m, X)
        extra["pushforward"] = str(Y)
        lines.append(f"m_* X = {Y}")
        rb.measure("pushforward relates X to m_* X", relation_error(m, X, Y, s))
    if args.target:
        Y = ComplexVectorField.parse(args.target)
        err = relation_error(m, X, Y, s)
        res = pushforward_residual(m, X, Y)
        extra.update(target=str(Y), residual=str(res), relation_error=err)
        lines.append(f"residual Dm X - Y o m = {res}")
        rb.measure("m relates X to the target", err)
        rb.note("symbolic residual", observed=str(res), expected="(0, 0)")
    if args.at:
        from .geometry import pushforward_at

        p = parse_point(args.at)
        val = pushforward_at(m, X, p)
        extra["at"] = {"point": list(p), "image": m(p[0], p[1])[:, 0].tolist(), "value": val}
        lines.append(f"(m_* X)(m(p)) = ({val[0]:.12g}, {val[1]:.12g})")
    if not (args.inverse or args.target or args.at):
        raise UsageError("pushforward needs --inverse, --target or --at")
    return _emit(args, "pushforward", [rb.build()], extra, lines)


# ------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bkc", description="Numerics and symbolic checks for b^k-complex structures on the plane.",
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON object")
    common.add_argument("-v", "--verbose", action="store_true", help="show every detail line")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    q = sub.add_parser("verify-all", parents=[common], formatter_class=fmt, help="run the whole suite")
    q.add_argument("--k", type=_k_list, default=[1, 2], help="comma-separated k values")
    q.add_argument("--seed", type=int, default=None, help="sampling seed; falls back to $BKC_SEED, then 0")
    q.set_defaults(func=cmd_verify_all)

    q = sub.add_parser("check-aut", parents=[common], formatter_class=fmt, help="test a map against the automorphism criterion")
    q.add_argument("--k", type=_k_single, required=True, help="order of the structure, k >= 1")
    q.add_argument("--map", required=True, help='map as "(u, v)" in x, y')
    q.add_argument("--tol", type=float, default=DEFAULT_TOL, help="cross-determinant tolerance")
    q.add_argument("--nv", type=float, default=DEFAULT_NV, help="lambda must lie in [nv, 1/nv]")
    q.add_argument("--seed", type=int, default=None, help="sampling seed; falls back to $BKC_SEED, then 0")
    q.add_argument("--samples", action="store_true", help="include per-sample lambda values in JSON")
    q.set_defaults(func=cmd_check_aut)

    q = sub.add_parser("catalog", parents=[common], formatter_class=fmt, help="list the automorphism families for k")
    q.add_argument("--k", type=_k_single, required=True, help="order of the structure, k >= 1")
    q.set_defaults(func=cmd_catalog)

    q = sub.add_parser("probe-extend", parents=[common], formatter_class=fmt, help="follow a pulled-back map as x -> 0+")
    q.add_argument("--k", type=_k_single, default=2, help="order of the structure, k >= 1")
    q.add_argument("--family", choices=("elliptic", "hyperbolic", "parabolic", "scaling"), default="elliptic")
    q.add_argument("--t", type=float, default=math.pi / 4, help="parameter (angle for elliptic and scaling)")
    q.add_argument("--r", type=float, default=1.0, help="modulus for k=1 scalings")
    q.add_argument("--map", default=None, help='explicit map "(u, v)" instead of a family')
    q.add_argument("--y0", type=float, nargs="+", default=[0.0, 1.0])
    q.add_argument("--expect", choices=("extends", "diverges"), default=None)
    q.set_defaults(func=cmd_probe_extend)

    q = sub.add_parser("flow", parents=[common], formatter_class=fmt, help="RK4 flow of a real vector field")
    q.add_argument("--vf", required=True, help='field as "(a, b)"')
    q.add_argument("--p0", required=True, help="start point x0,y0")
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--h", type=float, default=DEFAULT_STEP)
    q.add_argument("--domain", type=_domain, default=PLANE, help="plane, right, left, upper or strip:y0:y1")
    q.add_argument("--trace", default=None, help="write t,x,y rows to this CSV file")
    q.set_defaults(func=cmd_flow)

    q = sub.add_parser("residual", parents=[common], formatter_class=fmt, help="sup of |L_k f| on a grid")
    q.add_argument("--k", type=_k_single, default=1, help="order of the structure, k >= 1")
    q.add_argument("--f", required=True, help="expression in x, y")
    q.add_argument("--grid", default="-2:2:0.25,-3:3:0.25", help="xmin:xmax:step,ymin:ymax:step")
    q.add_argument("--tol", type=float, default=1e-10)
    q.set_defaults(func=cmd_residual)

    q = sub.add_parser("norm", parents=[common], formatter_class=fmt, help="Segal-Bargmann norm by Gauss-Hermite quadrature")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--entire", help="entire function of w (w = X + iY)")
    g.add_argument("--bfunc", help="function of x, y killed by L_1")
    q.add_argument("--nodes", type=int, default=64, help="nodes per axis (compared with twice as many)")
    q.set_defaults(func=cmd_norm)

    q = sub.add_parser("pushforward", parents=[common], formatter_class=fmt, help="push a vector field through a map")
    q.add_argument("--map", required=True)
    q.add_argument("--vf", required=True)
    q.add_argument("--inverse", default=None, help="inverse map for a symbolic pushforward")
    q.add_argument("--target", default=None, help="field the map should relate --vf to")
    q.add_argument("--at", default=None, help="point x0,y0 for a numeric value")
    q.add_argument("--domain", type=_domain, default=PLANE)
    q.add_argument("--tol", type=float, default=1e-10)
    q.set_defaults(func=cmd_pushforward)
    return p


# options whose values may start with a minus sign
_SIGNED_VALUES = ("--grid", "--p0", "--at", "--t", "--y0", "--vf", "--map", "--f", "--entire", "--bfunc")


def _join_signed(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _SIGNED_VALUES and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2] not in ("-", ""):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_signed(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, ValueError) as exc:
        print(f"bkc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvaluationError, ArithmeticError) as exc:
        print(f"bkc {args.command}: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


dispatch = main

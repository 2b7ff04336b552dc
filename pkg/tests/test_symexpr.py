import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkcomplex.symexpr import (
    E,
    I,
    PI,
    Binary,
    Const,
    EvaluationError,
    ParseError,
    Sampler,
    Unary,
    Var,
    cos,
    differentiate,
    eval_at,
    eval_many,
    evaluable_exprs,
    exp,
    ifpos,
    is_zero,
    log,
    parse_expr,
    parse_pair,
    random_expr,
    semantic_error,
    semantically_equal,
    simplify,
    sin,
    sqrt,
    to_text,
    x,
    y,
)

U = x * exp(I * y)
POS = Sampler(xmin=0.1, xmax=10.0, eps_z=0.1, positive=True)


# ---------------------------------------------------------------- parser
def test_parse_variable():
    assert parse_expr("x") == Var("x")


def test_parse_u():
    assert parse_expr("x*exp(i*y)") == Binary("mul", Var("x"), Unary("exp", Binary("mul", Const(0, 1), Var("y"))))


def test_parse_with_bound_k():
    e = parse_expr("y + 1/((k-1)*x^(k-1))", {"k": 2})
    assert semantically_equal(e, y + 1 / x, POS)
    assert simplify(e) == simplify(y + 1 / x)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2^3^2", 2.0**9),
        ("-2^2", -4.0),
        ("2*3+4", 10.0),
        ("2+3*4", 14.0),
        ("(2+3)*4", 20.0),
        ("8/4/2", 1.0),
        ("1.5e1", 15.0),
        ("3/4", 0.75),
        ("-x*y", -6.0),
    ],
)
def test_precedence(text, expected):
    assert eval_at(parse_expr(text), 2.0, 3.0) == pytest.approx(expected)


def test_unary_minus_binds_tighter_than_product():
    assert parse_expr("-x*y") == Binary("mul", Unary("neg", Var("x")), Var("y"))


def test_named_constants():
    assert eval_at(parse_expr("pi"), 0, 0) == pytest.approx(math.pi)
    assert eval_at(parse_expr("e"), 0, 0) == pytest.approx(math.e)
    assert eval_at(parse_expr("i*i"), 0, 0) == pytest.approx(-1)


@pytest.mark.parametrize("text", ["x +", "exp(x", "foo(x)", "z", "x $ y", "ifpos(x, y)", "exp(x, y)", "()", "x y"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_expr("x + * y")
    assert info.value.pos == 4


def test_parse_pair():
    a, b = parse_pair("(x^2 - y^2, 2*x*y)")
    assert eval_at(a, 1.0, 2.0) == pytest.approx(-3)
    assert eval_at(b, 1.0, 2.0) == pytest.approx(4)


def test_roundtrip_1000_random_trees():
    s = Sampler(n=16, seed=11)
    xs, ys, ts = s.points()
    for e in evaluable_exprs(1000, 11, xs, ys, ts):
        assert semantic_error(parse_expr(to_text(e)), e, s) <= 1e-10, to_text(e)


@given(st.integers(0, 10**6))
def test_roundtrip_property(seed):
    s = Sampler(n=8, seed=seed % 97)
    xs, ys, ts = s.points()
    (e,) = evaluable_exprs(1, seed, xs, ys, ts)
    assert semantic_error(parse_expr(to_text(e)), e, s) <= 1e-10


@given(st.fractions(min_value=-100, max_value=100, max_denominator=50),
       st.fractions(min_value=-100, max_value=100, max_denominator=50))
def test_constant_print_parse_exact(a, b):
    c = Const(a, b)
    assert eval_at(parse_expr(to_text(c)), 0, 0) == pytest.approx(complex(float(a), float(b)), abs=1e-12)
    assert simplify(parse_expr(to_text(c))) == c


# -------------------------------------------------------------- evaluate
def test_eval_examples():
    assert eval_at(U, 1.0, math.pi / 2) == pytest.approx(1j)
    assert eval_at(U, 2.0, 0.0) == pytest.approx(2)
    assert eval_at(log(x) + I * y, math.e, 1.0) == pytest.approx(1 + 1j)


@pytest.mark.parametrize("e, point", [(log(x), (-1.0, 0.0)), (log(x), (0.0, 0.0)), (1 / x, (0.0, 1.0)),
                                       (sqrt(x), (-2.0, 0.0)), (x ** Const(Fraction(1, 2)), (-1.0, 0.0))])
def test_domain_errors_are_reported(e, point):
    with pytest.raises(EvaluationError) as info:
        eval_at(e, *point)
    assert info.value.reason


def test_overflow_is_an_error():
    with pytest.raises(EvaluationError):
        eval_at(exp(exp(x)), 10.0, 0.0)


def test_ifpos_strict_guard_takes_else_branch_on_boundary():
    f = ifpos(x, Const(1), Const(2))
    assert eval_at(f, 0.0, 0.0) == 2
    assert eval_at(f, 1e-300, 0.0) == 1


def test_ifpos_does_not_evaluate_unused_branch():
    f = ifpos(x, log(x), Const(0))
    vals = eval_many(f, np.array([-1.0, 0.0, 2.0]), np.zeros(3))
    assert vals[2] == pytest.approx(math.log(2))
    assert vals[0] == 0


def test_eval_many_matches_cmath(rng):
    xs, ys = rng.uniform(0.1, 3, 50), rng.uniform(-3, 3, 50)
    e = parse_expr("log(x)*sin(y) + exp(i*x*y)/(1+x^2)")
    ref = [cmath.log(a) * cmath.sin(b) + cmath.exp(1j * a * b) / (1 + a * a) for a, b in zip(xs, ys)]
    assert np.allclose(eval_many(e, xs, ys), ref, rtol=1e-14)


# ----------------------------------------------------------- differentiate
@pytest.mark.parametrize(
    "e, v, expected",
    [
        (x ** Const(3), "x", Const(3) * x ** Const(2)),
        (U, "y", I * x * exp(I * y)),
        (log(x), "x", 1 / x),
        (sin(x * y), "y", x * cos(x * y)),
        (x ** y, "y", log(x) * x ** y),
    ],
)
def test_derivative_examples(e, v, expected):
    assert semantically_equal(differentiate(e, v), expected, POS)


def test_derivative_of_ifpos_is_branchwise():
    d = differentiate(ifpos(x, x ** Const(2), -x), "x")
    assert eval_at(d, 2.0, 0.0) == pytest.approx(4)
    assert eval_at(d, -2.0, 0.0) == pytest.approx(-1)


def _fd(e, v, xs, ys, ts, h=1e-6):
    dx, dy = (h, 0.0) if v == "x" else (0.0, h)
    return (eval_many(e, xs + dx, ys + dy, ts) - eval_many(e, xs - dx, ys - dy, ts)) / (2 * h)


@given(st.integers(0, 10**6), st.sampled_from(["x", "y"]))
def test_derivative_matches_finite_difference(seed, v):
    s = Sampler(n=6, seed=seed % 101, xmin=-2, xmax=2, ymin=-2, ymax=2)
    xs, ys, ts = s.points()
    for e in evaluable_exprs(3, seed, xs, ys, ts, guards=False, risky=False, bound=1e3):
        d = eval_many(differentiate(e, v), xs, ys, ts)
        if np.max(np.abs(d)) > 1e2:  # the difference quotient is the weak side there
            continue
        assert np.all(np.abs(d - _fd(e, v, xs, ys, ts)) <= 1e-5 * (1 + np.abs(d))), to_text(e)


@given(st.integers(0, 10**6), st.integers(-5, 5), st.integers(-5, 5))
def test_derivative_linearity(seed, a, b):
    s = Sampler(n=8, seed=3)
    xs, ys, ts = s.points()
    e1, e2 = evaluable_exprs(2, seed, xs, ys, ts, guards=False)
    lhs = differentiate(Const(a) * e1 + Const(b) * e2, "x")
    rhs = Const(a) * differentiate(e1, "x") + Const(b) * differentiate(e2, "x")
    assert semantic_error(lhs, rhs, s) <= 1e-9


# -------------------------------------------------------------- simplify
def test_simplify_examples():
    assert simplify(U - U) == Const(0)
    assert simplify(exp(log(x)), positive=("x",)) == x
    L1u = x * differentiate(U, "x") + I * differentiate(U, "y")
    assert simplify(L1u) == Const(0)


def test_simplify_constant_folding():
    assert simplify(Const(2) * Const(3) + Const(1)) == Const(7)
    assert simplify(x * Const(1) + Const(0)) == x
    assert simplify(x ** Const(0)) == Const(1)
    assert simplify(Const(0) ** Const(0)) == Const(1)


def test_simplify_power_collection():
    assert simplify(x * x * x) == simplify(x ** Const(3))
    assert simplify(x ** Const(2) / x) == x


def test_simplify_exp_merge():
    assert simplify(exp(x) * exp(I * y)) == simplify(exp(x + I * y))
    assert is_zero(U ** Const(3) - exp(Const(3) * (log(x) + I * y)), positive=("x",))


@given(st.integers(0, 10**6))
def test_simplify_preserves_values(seed):
    s = Sampler(n=12, seed=seed % 89)
    xs, ys, ts = s.points()
    (e,) = evaluable_exprs(1, seed, xs, ys, ts)
    assert semantic_error(simplify(e), e, s) <= 1e-10


def test_simplify_terminates_on_deep_trees():
    rng = np.random.default_rng(5)
    for _ in range(50):
        simplify(random_expr(rng, depth=6))


# ---------------------------------------------------------- equality oracle
def test_semantic_equality_examples():
    assert semantically_equal(exp(log(x)), x, POS)
    assert not semantically_equal(x, -x, POS)
    assert semantically_equal(sin(x) ** Const(2) + cos(x) ** Const(2), Const(1))


def test_semantic_equality_reports_failing_point():
    with pytest.raises(EvaluationError) as info:
        semantically_equal(log(x), x, Sampler())
    assert info.value.point is not None


def test_sampler_reproducible_and_constrained():
    s = Sampler(xmin=-1, xmax=1, eps_z=0.2, n=200, seed=4, near_z=0.3)
    a, b = s.points(), s.points()
    assert all(np.array_equal(p, q) for p, q in zip(a, b))
    assert np.all(np.abs(a[0]) >= 0.2) and np.all(np.abs(a[0]) <= 1)
    pos = Sampler(xmin=-1, xmax=1, eps_z=0.01, positive=True, n=50).points()[0]
    assert np.all(pos >= 0.01)


def test_named_constants_print():
    assert to_text(PI * x) in ("pi*x",)
    assert eval_at(parse_expr(to_text(E ** x)), 1.0, 0.0) == pytest.approx(math.e)

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkcomplex.geometry import (
    D_X,
    D_Y,
    L0,
    PLANE,
    RIGHT,
    UPPER,
    ComplexVectorField,
    NonConvergence,
    PlanarMap,
    compose,
    invert_numerically,
    jacobian,
    lie_bracket,
    parse_point,
    pushforward,
    pushforward_at,
    pushforward_many,
    pushforward_residual,
    relates,
    relation_error,
    strip,
)
from bkcomplex.symexpr import I, Const, Sampler, cos, exp, log, semantic_error, sin, x, y

S = Sampler(xmin=-2, xmax=2, ymin=-2, ymax=2, n=32, seed=1)
POS = Sampler(xmin=0.1, xmax=3, ymin=-2, ymax=2, eps_z=0.1, positive=True, n=32, seed=2)

FIELDS = [
    ComplexVectorField(x * y, Const(1)),
    ComplexVectorField(sin(y), x ** Const(2)),
    ComplexVectorField(x, I),
    ComplexVectorField(exp(I * x), y - x),
    ComplexVectorField(Const(2), x * cos(y)),
]
MAPS = [
    PlanarMap(exp(y) * x, y),
    PlanarMap(x + y ** Const(2), y),
    PlanarMap(x * cos(y) - y, sin(x) + Const(2) * y),
    PlanarMap(-x, y + Const(1)),
]


def _values(F, xs, ys):
    return F(xs, ys)


def test_pushforward_of_dy_under_exp_y_map():
    m = PlanarMap(exp(y) * x, y)
    target = ComplexVectorField(x, Const(1))
    assert relates(m, D_Y, target, S)
    assert pushforward_residual(m, D_Y, target).is_zero()


def test_pushforward_at_matches_hand_jacobian():
    m = PlanarMap(exp(y) * x, y)
    # Dm = [[e^y, x e^y], [0, 1]] applied to (0, 1) at (1, 0)
    assert np.allclose(pushforward_at(m, D_Y, (1.0, 0.0)), [1.0, 1.0])
    k1 = PlanarMap(log(x), y, RIGHT)
    assert np.allclose(pushforward_at(k1, ComplexVectorField(x, I), (2.0, 0.3)), [1.0, 1j])


def test_symbolic_pushforward_with_inverse():
    chart = PlanarMap(log(x), y, RIGHT, PlanarMap(exp(x), y))
    Y = pushforward(chart, ComplexVectorField(x, I))
    assert Y.a == Const(1) and Y.b == I


def test_symbolic_pushforward_needs_inverse():
    with pytest.raises(ValueError):
        pushforward(PlanarMap(x, y), D_X)


def test_wrong_target_is_detected():
    m = PlanarMap(exp(y) * x, y)
    assert not relates(m, D_Y, D_Y, S)
    assert relation_error(m, D_Y, D_Y, S) > 0.1


def test_jacobian_entries():
    J = jacobian(PlanarMap(x * y, x + y ** Const(3)))
    assert semantic_error(J[0][0], y, S) == 0
    assert semantic_error(J[1][1], Const(3) * y ** Const(2), S) < 1e-14


@given(st.sampled_from(FIELDS), st.sampled_from(FIELDS))
def test_bracket_antisymmetry(X, Y):
    B1, B2 = lie_bracket(X, Y), lie_bracket(Y, X)
    assert semantic_error(B1.a, -B2.a, S) < 1e-10
    assert semantic_error(B1.b, -B2.b, S) < 1e-10


@given(st.sampled_from(FIELDS), st.sampled_from(FIELDS), st.sampled_from(FIELDS))
def test_jacobi_identity(X, Y, Z):
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    xs, ys, _ = S.points()
    vals = total(xs, ys)
    assert np.max(np.abs(vals)) < 1e-8


def test_bracket_of_coordinate_fields():
    assert lie_bracket(D_X, D_Y).is_zero()
    B = lie_bracket(D_X, ComplexVectorField(Const(0), x))
    assert B.a == Const(0) and B.b == Const(1)


@given(st.sampled_from(MAPS), st.sampled_from(MAPS), st.sampled_from(FIELDS))
def test_functoriality_of_pushforward(m1, m2, X):
    """(m2 o m1)_* X at p equals Dm2(m1 p) Dm1(p) X(p)."""
    xs, ys, _ = Sampler(xmin=-1, xmax=1, ymin=-1, ymax=1, n=12, seed=5).points()
    direct = pushforward_many(compose(m2, m1), X, xs, ys)
    inner = pushforward_many(m1, X, xs, ys)
    img = m1(xs, ys)
    from bkcomplex.geometry import _jacobian_values

    J2 = _jacobian_values(m2, img[0], img[1])
    chained = np.einsum("ijn,jn->in", J2, inner)
    assert np.allclose(direct, chained, rtol=1e-10, atol=1e-10)


@given(st.sampled_from(MAPS), st.sampled_from(FIELDS))
def test_chain_rule_for_derivations(m, X):
    """(m_* X) f at m(p) equals X (f o m) at p."""
    f = x ** Const(2) * y + sin(x)
    xs, ys, _ = Sampler(xmin=-1, xmax=1, ymin=-1, ymax=1, n=12, seed=6).points()
    pf = pushforward_many(m, X, xs, ys)
    img = m(xs, ys)
    from bkcomplex.symexpr import differentiate, eval_many, substitute

    grad = np.vstack([eval_many(differentiate(f, v), img[0], img[1]) for v in ("x", "y")])
    lhs = np.sum(pf * grad, axis=0)
    rhs = eval_many(X.apply(substitute(f, {"x": m.u, "y": m.v})), xs, ys)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


def test_bracket_naturality_under_chart():
    """The chart (log x, y) commutes with brackets: m_*[X, Y] = [m_*X, m_*Y]."""
    m = PlanarMap(log(x), y, RIGHT, PlanarMap(exp(x), y))
    X, Y = ComplexVectorField(x, I), ComplexVectorField(x * y, x ** Const(2))
    lhs = pushforward(m, lie_bracket(X, Y))
    rhs = lie_bracket(pushforward(m, X), pushforward(m, Y))
    assert semantic_error(lhs.a, rhs.a, S) < 1e-10
    assert semantic_error(lhs.b, rhs.b, S) < 1e-10


def test_compose_warns_on_domain_violation():
    chart = PlanarMap(log(x), y, RIGHT)
    with pytest.warns(RuntimeWarning):
        compose(chart, PlanarMap(-x, y), check=POS)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compose(chart, PlanarMap(Const(2) * x, y), check=POS)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_invert_numerically_round_trip(a, b):
    m = PlanarMap(x + Const(0.3) * sin(y), y + Const(0.2) * x ** Const(3) / Const(10))
    q = m(a, b)[:, 0]
    p = invert_numerically(m, q, (0.0, 0.0))
    assert np.allclose(m(p[0], p[1])[:, 0], q, atol=1e-11)


def test_invert_numerically_reports_non_convergence():
    m = PlanarMap(x ** Const(2), y)
    with pytest.raises(NonConvergence) as info:
        invert_numerically(m, (-1.0, 0.0), (1.0, 0.0), max_iter=20)
    assert info.value.last is not None


def test_domains():
    assert RIGHT.contains([1.0, -1.0], [0.0, 0.0]).tolist() == [True, False]
    st_ = strip(-1, 1)
    assert st_.contains([0, 0], [0.5, 1.0]).tolist() == [True, False]
    assert st_.contains([0], [0.999], margin=0.01).tolist() == [False]
    assert UPPER.contains([0], [1]).all() and PLANE.contains([1e300], [0]).all()
    with pytest.raises(ValueError):
        strip(1, 0)


def test_parse_point():
    assert parse_point("0.5, -1") == (0.5, -1.0)
    with pytest.raises(ValueError):
        parse_point("1")


def test_field_parse_and_conjugate():
    X = ComplexVectorField.parse("(x, i)")
    assert X == ComplexVectorField(x, I)
    C = X.conjugate()
    assert C.b == Const(0, -1)
    assert (L0 - L0).is_zero()


def test_real_part_of_u_times_l1():
    # Re(x e^{-iy} (x, i)) = (x^2 cos y, x sin y)
    V = ComplexVectorField(x * exp(-I * y) * x, x * exp(-I * y) * I).real_part()
    xs, ys, _ = S.points()
    ref = np.vstack([xs**2 * np.cos(ys), xs * np.sin(ys)])
    assert np.allclose(V(xs, ys), ref, rtol=1e-12, atol=1e-12)
    assert math.isfinite(float(np.max(np.abs(ref))))

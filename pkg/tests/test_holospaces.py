import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkcomplex import holospaces as hs
from bkcomplex.symexpr import I, ONE, Const, EvaluationError, Sampler, exp, log, semantic_error, x, y

NEAR = hs.Grid(-2.0, 2.0, 0.25, -3.0, 3.0, 0.25)


def _gauss_oracle(n):
    # integral of e^{2nX - X^2 - Y^2}: complete the square in X
    return math.pi * math.exp(n * n)


def test_grid_parse():
    g = hs.Grid.parse("-2:2:0.5,0:1:0.5")
    xs, ys, _ = g.points()
    assert sorted(set(xs.tolist())) == [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
    assert sorted(set(ys.tolist())) == [0.0, 0.5, 1.0]
    for bad in ("1:2", "a:b:c,1:2:3", "0:1:-1,0:1:1"):
        with pytest.raises(ValueError):
            hs.Grid.parse(bad)


def test_catalog_names():
    assert [f.name for f in hs.catalog_bholo()] == ["u", "u^2", "u^3", "u/(1-u)", "flat"]


def test_residual_of_u_is_exactly_zero():
    assert hs.residual_sup(hs.U, 1, NEAR) == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_residual_of_powers(n):
    assert hs.residual_sup(hs.U ** Const(n), 1, NEAR) == 0.0


def test_residual_of_x():
    assert hs.residual_sup(x, 1, NEAR) == pytest.approx(2.0)


def test_residual_polynomial_in_u():
    h = Const(3) * hs.U ** Const(3) - Const(2, 1) * hs.U + Const(5)
    assert hs.residual_sup(h, 1, NEAR) == 0.0


@pytest.mark.parametrize("k", [2, 3])
def test_residual_for_higher_k(k):
    # functions of y + i/((k-1) x^(k-1)) are killed by L_k on x > 0
    g = y + I / (Const(k - 1) * x ** Const(k - 1))
    grid = hs.Grid(0.1, 2.0, 0.1, -2.0, 2.0, 0.5)
    assert hs.residual_sup(g ** Const(2), k, grid) == pytest.approx(0.0, abs=1e-9)
    assert hs.residual_sup(hs.U, k, grid) > 0.1


def test_flat_residual_small():
    f = hs.bholo_by_name("flat")
    grid = hs.Grid(1e-3, 1.0, 0.01, -math.pi / 4 + 0.01, math.pi / 4 - 0.01, 0.05)
    assert hs.residual_sup(f.expr, 1, grid) < 1e-10


def test_flat_function_values():
    f = hs.flat_function()
    from bkcomplex.symexpr import eval_at

    assert eval_at(f, 0.0, 0.3) == 0
    assert eval_at(f, -1.0, 0.3) == 0
    assert eval_at(f, 1.0, 0.0) == pytest.approx(math.exp(-1))


def test_flat_derivatives():
    d = hs.flat_derivatives(1e-3)
    assert set(d) == {1, 2, 3}
    assert all(v < 1e-40 for v in d.values())


@given(st.floats(-0.7, 0.7))
def test_flat_derivatives_decay_towards_z(y0):
    vals = [hs.flat_derivatives(x0, ys=(y0,), orders=(1, 2)) for x0 in (0.1, 0.05, 0.02)]
    for j in (1, 2):
        assert vals[2][j] < vals[0][j]


def test_residual_failure_reports_point():
    with pytest.raises(EvaluationError):
        hs.residual_sup(log(x) * x * y, 1, NEAR)


def test_b_to_entire():
    g = hs.b_to_entire(hs.bholo_by_name("u"))
    assert semantic_error(g.entire, exp(x + I * y), Sampler()) == 0
    one = hs.b_to_entire(hs.BHoloFunction("one", ONE))
    assert one.entire == ONE
    cube = hs.b_to_entire(hs.bholo_by_name("u^3"))
    assert semantic_error(cube.entire, exp(Const(3) * (x + I * y)), Sampler()) < 1e-12


def test_b_to_entire_rejects_non_holomorphic_round_trip_failure():
    # x*y pushes forward to e^X Y and back without loss, so the round trip holds
    g = hs.b_to_entire(hs.BHoloFunction("xy", x * y))
    assert semantic_error(g.entire, exp(x) * y, Sampler()) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 2])
def test_norms_match_gaussian_oracle(n):
    F = exp(Const(n) * hs.W) if n else ONE
    v = hs.bargmann_norm_sq(F, hs.QuadratureSpec(64))
    assert v == pytest.approx(_gauss_oracle(n), rel=1e-6 if n else 1e-10)


def test_norm_n3():
    assert hs.bargmann_norm_sq(exp(Const(3) * hs.W)) == pytest.approx(_gauss_oracle(3), rel=1e-6)


def test_convergence_between_n_and_2n():
    for n in range(3):
        F = exp(Const(n) * hs.W)
        a = hs.gauss_hermite_2d(F, 64)
        b = hs.gauss_hermite_2d(F, 128)
        assert hs.relative_change(a, b) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quadrature_change_shrinks(n):
    F = exp(Const(n) * hs.W)
    changes = [hs.relative_change(hs.gauss_hermite_2d(F, N), hs.gauss_hermite_2d(F, 2 * N)) for N in (16, 32, 64)]
    floor = 1e-13  # below this both values agree to roundoff
    for a, b in zip(changes, changes[1:]):
        assert b < a or max(a, b) < floor


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_norm_scaling(a, b):
    c = complex(a, b)
    F = exp(hs.W)
    scaled = hs.bargmann_norm_sq(Const.of(a) * F + Const.of(b) * I * F, hs.QuadratureSpec(32))
    base = hs.bargmann_norm_sq(F, hs.QuadratureSpec(32))
    assert scaled == pytest.approx(abs(c) ** 2 * base, rel=1e-10, abs=1e-12)
    assert base > 0


def test_quadrature_spec_minimum():
    with pytest.raises(ValueError):
        hs.QuadratureSpec(8)


def test_divergent_integrand_raises():
    with pytest.raises(hs.QuadratureDivergence):
        hs.bargmann_norm_sq(exp(hs.W ** Const(2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_powers_of_u_are_members(n):
    f = hs.bholo_by_name("u" if n == 1 else f"u^{n}")
    m = hs.b_bargmann_member(f)
    assert m.verdict == "member"
    assert m.norm_sq == pytest.approx(_gauss_oracle(n), rel=1e-6)


def test_constant_is_member():
    m = hs.b_bargmann_member(hs.BHoloFunction("one", ONE))
    assert m.verdict == "member" and m.norm_sq == pytest.approx(math.pi, rel=1e-10)


def test_flat_function_is_not_member():
    m = hs.b_bargmann_member(hs.bholo_by_name("flat"))
    assert m.verdict == "not-member"
    assert not m.converged


def test_slow_growth_is_undecided_or_worse():
    # e^{w^2/2} sits exactly on the boundary of the space
    F = exp(hs.W ** Const(2) / Const(2))
    assert hs.entire_membership(F).verdict in ("undecided", "not-member")


def test_membership_serialises():
    d = hs.b_bargmann_member(hs.bholo_by_name("u")).to_dict()
    assert set(d) >= {"value", "nodes", "converged"}
    assert d["nodes"] == 64 and d["converged"]
    assert np.isfinite(d["value"])

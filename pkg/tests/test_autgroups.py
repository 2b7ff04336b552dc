import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkcomplex import autgroups as ag
from bkcomplex.bkstructure import is_bk_automorphism
from bkcomplex.geometry import PlanarMap
from bkcomplex.symexpr import Const, exp, semantic_error, x, y

PARAMS = (-1.0, -0.3, 0.7, 2.0)


def _same_map(m1, m2, s=ag.RIGHT_SAMPLER):
    return max(semantic_error(m1.u, m2.u, s), semantic_error(m1.v, m2.v, s))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_catalog_families(k):
    cat = ag.catalog(k)
    names = [f.name for f in cat]
    assert names == ["vertical-translation", "horizontal-scaling" if k == 1 else "hyperbolic"]
    for fam in cat:
        for t0 in PARAMS:
            assert is_bk_automorphism(fam.at(t0), k).holds


def test_catalog_rejects_bad_k():
    with pytest.raises(ValueError):
        ag.catalog(0)
    with pytest.raises(ValueError):
        ag.hyperbolic(1)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_hyperbolic_exponent(k):
    # independent oracle: the x-scaling exponent is -t/(k-1)
    m = ag.hyperbolic(k).at(0.7)
    xs = np.array([0.5, 1.5])
    assert np.allclose(m(xs, np.zeros(2))[0], np.exp(-0.7 / (k - 1)) * xs)


def test_generators():
    assert str(ag.translations().generator()) == "(0, 1)"
    G = ag.hyperbolic(2).generator()
    assert semantic_error(G.a, -x, ag.PLANE_SAMPLER) == 0
    assert semantic_error(G.b, y, ag.PLANE_SAMPLER) == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_halfplane_iso(k):
    iso = ag.halfplane_iso(k)
    assert iso.construction_error <= 1e-10
    assert iso.multiplier == (Const(1) if k == 1 else Const(0, 1))
    # inverse really inverts on the right half-plane
    xs, ys, _ = ag.RIGHT_SAMPLER.points()
    img = iso.map(xs, ys)
    back = iso.inverse(img[0], img[1])
    assert np.allclose(back, [xs, ys], rtol=1e-10)


def test_conjugation_k2_hyperbolic_and_parabolic():
    iso = ag.halfplane_iso(2)
    for t0 in PARAMS:
        h = ag.conjugate_through(iso, ag.moebius_hyperbolic(t0))
        assert _same_map(h, PlanarMap(exp(Const.of(-t0)) * x, exp(Const.of(t0)) * y)) <= 1e-10
        p = ag.conjugate_through(iso, ag.moebius_parabolic(t0))
        assert _same_map(p, PlanarMap(x, y + Const.of(t0))) <= 1e-10


def test_conjugation_k1_translation_gives_scaling():
    iso = ag.halfplane_iso(1)
    for s in PARAMS:
        m = ag.conjugate_through(iso, ag.complex_translation(s, 0.0))
        assert _same_map(m, PlanarMap(exp(Const.of(s)) * x, y)) <= 1e-10
        # the other reading, (x + s, ...), is not what comes out
        assert _same_map(m, PlanarMap(x + Const.of(s), y)) > 1e-3


def test_conjugation_rejects_domain_violation():
    iso = ag.halfplane_iso(2)
    with pytest.raises(ValueError):
        ag.conjugate_through(iso, ag.complex_translation(0.0, -5.0))


def test_elliptic_probe_limit():
    m = ag.elliptic_pullback(2, math.pi / 4)
    for y0 in (0.0, 1.0):
        p = ag.extendability_probe(m, y0)
        assert p.classification == "diverges"
        _, u, v = p.row_at(1e-6)
        assert u > 1e3
        assert abs(v - 1.0) <= 1e-3
        assert p.trend["u"] == "+inf"


@given(st.floats(0.2, 1.3))
def test_elliptic_second_component_tends_to_cot(t0):
    m = ag.elliptic_pullback(2, t0)
    _, u, v = ag.extendability_probe(m, 0.5).row_at(1e-6)
    assert abs(v - 1 / math.tan(t0)) <= 1e-3 * (1 + abs(1 / math.tan(t0)))


def test_scaling_probe():
    assert ag.extendability_probe(ag.scaling_pullback(1.0, 1.0), 0.5).classification == "diverges"
    assert ag.extendability_probe(ag.scaling_pullback(2.0, 0.0), 0.5).classification == "extends"


def test_probe_rejects_bad_abscissae():
    with pytest.raises(ValueError):
        ag.extendability_probe(PlanarMap(x, y), 0.0, xs=(0.1, 0.2, 0.3))


def test_probe_identity_extends():
    p = ag.extendability_probe(PlanarMap(x, y), 0.5)
    assert p.classification == "extends"
    assert p.limit == pytest.approx((1e-8, 0.5))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_group_checks_pass(k):
    for fam in ag.catalog(k):
        assert ag.group_law_check(fam).status == "pass"
    assert ag.structure_check(k).status == "pass"
    assert ag.semidirect_check(k).status == "pass"
    assert ag.faithfulness_check(k).status == "pass"
    assert ag.conjugation_consistency_check(k).status == "pass"
    assert ag.chart_conjugation_check(k).status == "pass"
    assert ag.automorphism_check(k).status == "pass"


@given(s=st.floats(-2, 2), t=st.floats(-2, 2))
def test_group_law_property(s, t):
    fam = ag.hyperbolic(3)
    from bkcomplex.geometry import compose

    lhs = compose(fam.at(s), fam.at(t))
    assert _same_map(lhs, fam.at(s + t), ag.PLANE_SAMPLER) <= 1e-10


@given(s=st.floats(-2, 2), t=st.floats(-2, 2))
def test_ax_plus_b_relation_k2(s, t):
    from bkcomplex.geometry import compose

    H, T = ag.hyperbolic(2), ag.translations()
    lhs = compose(H.at(t), compose(T.at(s), H.at(-t)))
    assert _same_map(lhs, T.at(math.exp(t) * s), ag.PLANE_SAMPLER) <= 1e-9


def test_faithfulness_on_z():
    ok2, trivial2 = ag.faithful_on_z(2)
    assert ok2 and trivial2 == []
    ok1, trivial1 = ag.faithful_on_z(1)
    assert not ok1
    assert {f for f, _ in trivial1} == {"horizontal-scaling"}

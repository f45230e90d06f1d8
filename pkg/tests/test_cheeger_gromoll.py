import numpy as np
import pytest
from hypothesis import given

from tangentgeom import cheeger_gromoll as cg
from tangentgeom.bundle import BundleMetric, Variant
from tangentgeom.errors import ZeroFiber
from tangentgeom.local import LocalGeometry
from tangentgeom.manifold import TangentPoint, gram_schmidt
from tangentgeom.oracle import BundleOracle

from helpers import field, manifold, seeded, tangent_points


def close(a, b, rel=1e-7, floor=1e-9):
    a, b = np.atleast_1d(a), np.atleast_1d(b)
    err = np.abs(a - b).max()
    return err <= floor or err <= rel * np.abs(b).max()


def pairs(spec, f_text, n=20, seed=9):
    M = manifold(spec)
    f = field(f_text, M.m)
    metric = BundleMetric(Variant.CHEEGER_GROMOLL, M, f)
    for s in seeded(spec, n, seed):
        yield s, LocalGeometry(M, f, s.tp), BundleOracle(metric, s.tp)


def _bundle(o, lift):
    return o.h(lift.hor) + o.v(lift.ver)


def test_fibre_connection_vanishes_on_zero_section(sphere):
    geo = LocalGeometry(sphere, field("1"), TangentPoint([0.1, 0.2], [0.0, 0.0]))
    assert np.all(cg.connection(geo, "vv", np.array([1.0, 0.3]), np.array([0.2, -1.0])).stacked() == 0)


def test_flat_base_mixed_connection_has_no_horizontal_part(plane):
    geo = LocalGeometry(plane, field("1"), TangentPoint([0.1, 0.2], [0.6, -0.4]))
    X, Y = np.array([1.0, 0.3]), np.array([0.2, -1.0])
    assert np.all(cg.connection(geo, "hv", X, Y).hor == 0)
    assert np.all(cg.connection(geo, "vh", X, Y).hor == 0)


@pytest.mark.parametrize("spec", ["sphere_stereo(1)", "poincare_disk()", "euclidean(3)", "space_form(1,3)"])
@pytest.mark.parametrize("f_text", ["1", "exp(x1)"])
@pytest.mark.parametrize("pattern", cg.CONNECTION_PATTERNS)
def test_connection_matches_oracle(spec, f_text, pattern):
    for s, geo, o in pairs(spec, f_text):
        X, Y, _ = s.vectors
        assert close(cg.connection(geo, pattern, X, Y).stacked(), o.lifted_connection(pattern, X, Y).stacked())


CG_DEVIATIONS = {"hhv": "the first covariant derivative is taken along Z",
                 "vvh": "the horizontal part disagrees with the oracle"}


@pytest.mark.parametrize("pattern", [
    pytest.param(p, marks=[pytest.mark.xfail(strict=True, reason=CG_DEVIATIONS[p])] if p in CG_DEVIATIONS else [])
    for p in ("hhh", "hhv", "hvh", "hvv", "vvh", "vvv", "vhv", "vhh")])
def test_curvature_against_oracle_at_unit_scaling(pattern):
    for s, geo, o in pairs("sphere_stereo(1)", "1", 10):
        assert close(cg.curvature(geo, pattern, *s.vectors).stacked(),
                     o.lifted_curvature(pattern, *s.vectors).stacked())


def test_curvature_patterns_with_curvature_factor_vanish_on_flat_base(plane):
    geo = LocalGeometry(plane, field("1"), TangentPoint([0.1, 0.2], [0.6, -0.4]))
    X, Y, Z = np.eye(2)[0], np.eye(2)[1], np.array([0.5, 0.5])
    for p in ("hvv", "vvh"):
        assert np.abs(cg.curvature(geo, p, X, Y, Z).stacked()).max() == 0


def test_fibre_curvature_at_zero_section_on_flat_base(plane):
    tp = TangentPoint([0.0, 0.0], [0.0, 0.0])
    geo = LocalGeometry(plane, field("1"), tp)
    o = BundleOracle(BundleMetric(Variant.CHEEGER_GROMOLL, plane, field("1")), tp)
    X, Y, Z = np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.3, 0.7])
    np.testing.assert_allclose(cg.curvature(geo, "vvv", X, Y, Z).stacked(),
                               o.lifted_curvature("vvv", X, Y, Z).stacked(), atol=1e-12)
    # at u = 0 the fibre is a space of constant curvature 3
    np.testing.assert_allclose(cg.curvature(geo, "vvv", X, Y, Z).ver, 3 * (Z @ Y * X - Z @ X * Y))


def test_area_examples(sphere):
    tp = TangentPoint([0.2, 0.1], [0.5, 0.5])
    geo = LocalGeometry(sphere, field("1"), tp)
    e1, e2 = gram_schmidt(sphere, tp.x, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    assert cg.q_area(geo, "hh", e1, e2) == pytest.approx(1.0)
    geo0 = LocalGeometry(sphere, field("3"), TangentPoint([0.2, 0.1], [0.0, 0.0]))
    assert cg.q_area(geo0, "vv", e1, e2) == pytest.approx(1.0)


def test_area_on_adapted_pair(sphere):
    tp = TangentPoint([0.0, 0.0], [1.0, 0.0])
    geo = LocalGeometry(sphere, field("1"), tp)
    o = BundleOracle(BundleMetric(Variant.CHEEGER_GROMOLL, sphere, field("1")), tp)
    e1, e2 = cg.adapted_basis(geo)
    A, B = o.v(e1), o.v(e2)
    direct = o.inner(A, A) * o.inner(B, B) - o.inner(A, B) ** 2
    assert cg.q_area(geo, "vv", e1, e2) == pytest.approx(direct, abs=1e-10)
    assert cg.q_area_direct(geo, "vv", e1, e2) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("spec", ["sphere_stereo(1)", "poincare_disk()", "space_form(1,3)"])
def test_areas_equal_gram_determinants(spec):
    M = manifold(spec)
    f = field("exp(x1)", M.m)
    metric = BundleMetric(Variant.CHEEGER_GROMOLL, M, f)
    raw = list(np.random.default_rng(4).normal(size=(2, M.m)))

    @given(tangent_points(M))
    def check(tp):
        geo, o = LocalGeometry(M, f, tp), BundleOracle(metric, tp)
        X, Y = gram_schmidt(M, tp.x, raw)
        for p in cg.SECTIONAL_PATTERNS:
            A, B = o.lift(p[0], X), o.lift(p[1], Y)
            direct = o.inner(A, A) * o.inner(B, B) - o.inner(A, B) ** 2
            assert cg.q_area(geo, p, X, Y) == pytest.approx(direct, rel=1e-10, abs=1e-10)

    check()


def test_fibre_sectional_at_zero_section(plane):
    geo = LocalGeometry(plane, field("1"), TangentPoint([0.0, 0.0], [0.0, 0.0]))
    assert cg.sectional(geo, "vv", np.eye(2)[0], np.eye(2)[1]) == pytest.approx(3.0)


def test_mixed_sectional_vanishes_on_flat_base(plane):
    geo = LocalGeometry(plane, field("exp(x1)"), TangentPoint([0.0, 0.0], [0.5, 0.2]))
    assert cg.sectional(geo, "hv", np.eye(2)[0], np.eye(2)[1]) == 0


def test_constant_curvature_mixed_sectional():
    assert cg.sectional_constant_kappa(1.0, 1.0, 1.0, 0.0, 2.0, "hv") == pytest.approx(0.125)
    S = manifold("space_form(1,2)")
    x = np.array([0.1, -0.2])
    X, Y = gram_schmidt(S, x, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    tp = TangentPoint(x, X)
    o = BundleOracle(BundleMetric(Variant.CHEEGER_GROMOLL, S, field("1")), tp)
    assert cg.sectional(LocalGeometry(S, field("1"), tp), "hv", X, Y) == pytest.approx(0.125)
    assert o.sectional(o.h(X), o.v(Y)) == pytest.approx(0.125)


@pytest.mark.parametrize("pattern, reading", [("hh", "printed"), ("hv", "printed"), ("vv", "printed")])
def test_sectional_against_oracle_at_unit_scaling(pattern, reading):
    for s, geo, o in pairs("sphere_stereo(1)", "1", 10):
        e1, e2 = s.frame
        ref = o.sectional(o.lift(pattern[0], e1), o.lift(pattern[1], e2))
        assert close(cg.sectional(geo, pattern, e1, e2, reading=reading), ref)


def test_alternative_horizontal_coefficient_disagrees_with_oracle():
    errs = [abs(cg.sectional(geo, "hh", *s.frame, reading="alpha2") - o.sectional(o.h(s.frame[0]), o.h(s.frame[1])))
            for s, geo, o in pairs("sphere_stereo(1)", "1", 5)]
    assert max(errs) > 1e-3


@pytest.mark.parametrize("pattern, reading", [("hh", "alpha2"), ("hv", "printed"), ("vv", "printed")])
@pytest.mark.parametrize("spec, f_text", [("sphere_stereo(1)", "1"), ("poincare_disk()", "1 + x1^2"),
                                          ("space_form(1,3)", "2 + x1")])
def test_sectional_equals_g_over_q(pattern, reading, spec, f_text):
    for s, geo, _ in pairs(spec, f_text, 10):
        e1, e2 = s.frame[:2]
        q = cg.g_form(geo, pattern, e1, e2) / cg.q_area(geo, pattern, e1, e2)
        assert cg.sectional(geo, pattern, e1, e2, reading=reading) == pytest.approx(q, rel=1e-9, abs=1e-9)


@pytest.mark.xfail(strict=True, reason="the displayed hh coefficient 3/(4 alpha f^4) is not G/Q")
def test_displayed_horizontal_sectional_equals_g_over_q():
    for s, geo, _ in pairs("sphere_stereo(1)", "1", 10):
        e1, e2 = s.frame
        q = cg.g_form(geo, "hh", e1, e2) / cg.q_area(geo, "hh", e1, e2)
        assert cg.sectional(geo, "hh", e1, e2) == pytest.approx(q, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("spec", ["space_form(1,2)", "space_form(-1,3)", "sphere_stereo(2)", "euclidean(2)"])
@pytest.mark.parametrize("pattern", cg.SECTIONAL_PATTERNS)
def test_constant_curvature_forms_match_general_forms(spec, pattern):
    M = manifold(spec)
    for s, geo, _ in pairs(spec, "1 + 0.3*x1^2", 10):
        e1, e2 = s.frame[:2]
        lv = cg.l_tilde(geo, e1, e2) if pattern == "hh" else 0.0
        a = cg.sectional_constant_kappa(M.kappa, geo.f, geo.inner(e1, geo.u), geo.inner(e2, geo.u),
                                        geo.alpha, pattern, lv)
        assert a == pytest.approx(cg.sectional(geo, pattern, e1, e2), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("spec", ["sphere_stereo(1)", "poincare_disk()", "space_form(1,3)"])
def test_adapted_frame_is_orthonormal(spec):
    M = manifold(spec)
    f = field("exp(x1)", M.m)
    metric = BundleMetric(Variant.CHEEGER_GROMOLL, M, f)

    @given(tangent_points(M))
    def check(tp):
        if np.abs(tp.u).max() < 1e-3:
            return
        geo, o = LocalGeometry(M, f, tp), BundleOracle(metric, tp)
        e, frame = cg.adapted_frame(geo)
        np.testing.assert_allclose(e[0], tp.u / geo.r)
        T = np.array([_bundle(o, t) for t in frame])
        assert np.abs(T @ o.G @ T.T - np.eye(2 * M.m)).max() <= 1e-10
        assert np.abs(cg.frame_gramian(geo, frame) - np.eye(2 * M.m)).max() <= 1e-10

    check()


def test_adapted_frame_needs_nonzero_fibre(sphere):
    with pytest.raises(ZeroFiber):
        cg.adapted_frame(LocalGeometry(sphere, field("1"), TangentPoint([0.0, 0.0], [0.0, 0.0])))


def test_adapted_frame_with_fibre_along_coordinate(plane):
    e, _ = cg.adapted_frame(LocalGeometry(plane, field("1"), TangentPoint([0.0, 0.0], [0.0, 2.0])))
    np.testing.assert_allclose(e, [[0.0, 1.0], [1.0, 0.0]])


@pytest.mark.parametrize("kind", [
    "hh", "h_v1", pytest.param("h_vk", marks=pytest.mark.xfail(
        strict=True, reason="the displayed value lacks a factor 1/alpha")), "v1_vk", "vk_vl"])
def test_frame_sectionals_at_unit_scaling(kind):
    m = 3
    idx = {"hh": [(0, 1), (0, 2), (1, 2)], "h_v1": [(i, m) for i in range(m)],
           "h_vk": [(i, m + k) for i in range(m) for k in (1, 2)], "v1_vk": [(m, m + 1), (m, m + 2)],
           "vk_vl": [(m + 1, m + 2)]}[kind]
    for s, geo, o in pairs("space_form(1,3)", "1", 5):
        e, frame = cg.adapted_frame(geo)
        for i, j in idx:
            ref = o.sectional(_bundle(o, frame[i]), _bundle(o, frame[j]))
            assert close(cg.frame_sectional(geo, i, j, e), ref)


def test_scalar_examples(plane):
    one = field("1")
    geo = LocalGeometry(plane, one, TangentPoint([0.1, 0.2], [1.0, 0.0]))
    assert cg.scalar(geo) == pytest.approx(1.5)
    geo0 = LocalGeometry(plane, one, TangentPoint([0.1, 0.2], [0.0, 0.0]))
    assert cg.scalar(geo0) == pytest.approx(6.0)
    for tp in (geo.tp, geo0.tp):
        o = BundleOracle(BundleMetric(Variant.CHEEGER_GROMOLL, plane, one), tp)
        assert o.scalar() == pytest.approx(cg.scalar(LocalGeometry(plane, one, tp)), abs=1e-12)


def test_scalar_disagrees_with_oracle_on_curved_base():
    errs = [abs(cg.scalar(geo) - o.scalar()) for _, geo, o in pairs("sphere_stereo(1)", "1", 5)]
    assert max(errs) > 1e-3

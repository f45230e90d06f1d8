"""The brute-force Levi-Civita calculus of the 2m-dimensional bundle metric."""

import numpy as np
import pytest

from tangentgeom import jets
from tangentgeom.bundle import BundleMetric, Variant
from tangentgeom.local import LocalGeometry
from tangentgeom.oracle import BundleOracle
from tangentgeom.riemann import christoffel_from_values
from tangentgeom.verify import _koszul_sides

from helpers import fd_grad, field, manifold, seeded

CASES = [("sphere_stereo(1)", "1"), ("sphere_stereo(1)", "exp(x1)"), ("poincare_disk()", "1 + 0.5*x1^2"),
         ("space_form(1,3)", "2 + x2")]
VARIANTS = [Variant.SASAKI, Variant.CHEEGER_GROMOLL]


def oracles(spec, f_text, variant, n=4):
    M = manifold(spec)
    metric = BundleMetric(variant, M, field(f_text, M.m))
    return [(s, BundleOracle(metric, s.tp)) for s in seeded(spec, n)]


@pytest.mark.parametrize("spec, f_text", CASES)
@pytest.mark.parametrize("variant", VARIANTS)
def test_christoffel_matches_finite_differences(spec, f_text, variant):
    for s, o in oracles(spec, f_text, variant, 2):
        y = o.y
        dG = fd_grad(o.metric.matrix, y, 1e-6)
        np.testing.assert_allclose(o.gamma, christoffel_from_values(o.G, dG), atol=2e-6)


@pytest.mark.parametrize("spec, f_text", CASES)
@pytest.mark.parametrize("variant", VARIANTS)
def test_levi_civita_identities(spec, f_text, variant):
    for s, o in oracles(spec, f_text, variant):
        assert np.array_equal(o.gamma, o.gamma.transpose(0, 2, 1))
        low = np.einsum("lij,lk->ijk", o.gamma, o.G)
        assert np.abs(o.g_jet.grad - low - low.transpose(0, 2, 1)).max() <= 1e-9
        R = o.R
        assert np.abs(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)).max() <= 1e-8
        Rl = np.einsum("lp,pijk->lijk", o.G, R)
        assert np.abs(Rl - Rl.transpose(2, 3, 0, 1)).max() <= 1e-8
        assert np.abs(R + R.transpose(0, 2, 1, 3)).max() <= 1e-12


@pytest.mark.parametrize("spec, f_text", CASES)
@pytest.mark.parametrize("variant", VARIANTS)
def test_bracket_of_horizontal_lifts(spec, f_text, variant):
    M = manifold(spec)
    for s, o in oracles(spec, f_text, variant):
        X, Y, _ = s.vectors
        geo = LocalGeometry(M, field(f_text, M.m), s.tp)
        br = o.decompose(o.bracket(o.h_field(X), o.h_field(Y)))
        np.testing.assert_allclose(br.ver, -geo.curv(X, Y, geo.u), atol=1e-7)
        np.testing.assert_allclose(br.hor, 0, atol=1e-12)


@pytest.mark.parametrize("relation", ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"])
@pytest.mark.parametrize("variant", VARIANTS)
def test_natural_metric_connection_relations(relation, variant):
    spec, f_text = "space_form(1,3)", "1 + 0.5*x1^2"
    M = manifold(spec)
    f = field(f_text, M.m)
    for s, o in oracles(spec, f_text, variant, 10):
        lhs, rhs = _koszul_sides(LocalGeometry(M, f, s.tp), o, variant, relation, *s.vectors)
        assert lhs == pytest.approx(rhs, rel=1e-7, abs=1e-9)


def test_displayed_fibre_relation_differs_for_cheeger_gromoll():
    spec = "sphere_stereo(1)"
    M = manifold(spec)
    s, o = oracles(spec, "1", Variant.CHEEGER_GROMOLL, 1)[0]
    lhs, rhs = _koszul_sides(LocalGeometry(M, field("1"), s.tp), o, Variant.CHEEGER_GROMOLL,
                             "viii.printed", *s.vectors)
    assert abs(lhs - rhs) > 1e-3


def test_flat_bundle_is_flat():
    for _, o in oracles("euclidean(2)", "1", Variant.SASAKI):
        assert np.all(o.R == 0)


def test_sectional_and_scalar_agree_with_frame_sum():
    spec = "poincare_disk()"
    for _, o in oracles(spec, "exp(x1)", Variant.CHEEGER_GROMOLL, 2):
        # G-orthonormal basis of the 4-dimensional tangent space
        L = np.linalg.cholesky(np.linalg.inv(o.G))
        E = L.T
        total = sum(o.sectional(E[a], E[b]) for a in range(4) for b in range(4) if a != b)
        assert total == pytest.approx(o.scalar(), rel=1e-10)


def test_nabla_of_vertical_field_is_christoffel_column():
    _, o = oracles("sphere_stereo(1)", "1", Variant.SASAKI, 1)[0]
    A = np.array([1.0, 0.0, 0.0, 0.0])
    B = jets.Jet.constant(np.array([0.0, 0.0, 1.0, 0.0]), 4, 1)
    np.testing.assert_allclose(o.nabla(A, B), o.gamma[:, 0, 2])

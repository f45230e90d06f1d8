"""Coordinate Riemannian calculus in any dimension.

Conventions, shared by every module:

* ``gamma[k, i, j]`` is the Christoffel symbol of the second kind, the
  k-th component of the covariant derivative of the j-th coordinate field
  along the i-th one.
* ``R[l, i, j, k]`` is the l-th component of ``R(e_i, e_j) e_k`` with
  ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``, so::

      R[l,i,j,k] = d_i gamma[l,j,k] - d_j gamma[l,i,k]
                   + gamma[l,i,p] gamma[p,j,k] - gamma[l,j,p] gamma[p,i,k]

* The lowered tensor is ``Rlow[l, i, j, k] = G[l, p] R[p, i, j, k]`` and the
  sectional curvature of span{v, w} is ``<R(v, w)w, v> / (|v|^2 |w|^2 - <v, w>^2)``.
"""

from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DegeneratePlane
from .linalg import pivoted_inverse

PLANE_THRESHOLD = 1e-12


class MetricFn:
    """A metric field on an open set of R^n, evaluable as a matrix jet.

    Subclasses implement :meth:`jet`; ``order`` is the number of derivatives
    requested at ``y``.
    """

    n = None

    def jet(self, y, order):
        raise NotImplementedError

    def matrix(self, y):
        return jets.value(self.jet(y, 0))


class ChartMetric(MetricFn):
    """Adapter exposing a :class:`~tangentgeom.manifold.ChartedManifold` as a MetricFn."""

    def __init__(self, M):
        self.M = M
        self.n = M.m

    def jet(self, y, order):
        y = self.M.check_point(y)
        return self.M.metric_jet(y, order)

    def matrix(self, y):
        return self.M.metric(self.M.check_point(y))


# -- jet-level building blocks ----------------------------------------------------

def christoffel_jet(g):
    """Christoffel jet (one order lower) from a metric jet."""
    dg = g.D()  # dg[a, b, c] = d_a g_bc
    ginv = jets.inv(g.truncate(dg.order))
    first = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # [l, i, j]
    gam = jets.einsum("kl,lij->kij", ginv, first)
    return 0.5 * (gam + gam.transpose(0, 2, 1))


def riemann_jet(gam):
    """Riemann jet (one order lower) from a Christoffel jet."""
    dgam = gam.D()  # dgam[i, l, j, k] = d_i gamma[l, j, k]
    g0 = gam.truncate(dgam.order)
    lin = jets.einsum("iljk->lijk", dgam)
    quad = jets.einsum("lip,pjk->lijk", g0, g0)
    return lin - lin.transpose(0, 2, 1, 3) + quad - quad.transpose(0, 2, 1, 3)


def christoffel_from_values(g, dg):
    """Christoffel symbols from ``G`` and ``dg[a, b, c] = d_a G[b, c]`` (plain arrays)."""
    ginv = pivoted_inverse(g)
    first = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)
    gam = np.einsum("kl,lij->kij", ginv, first)
    return 0.5 * (gam + gam.transpose(0, 2, 1))


# -- pointwise tensors ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointCurvature:
    """Metric, Christoffel symbols and curvature at one point."""

    g: np.ndarray
    ginv: np.ndarray
    gamma: np.ndarray
    R: np.ndarray

    @classmethod
    def from_metric_jet(cls, g):
        if g.order < 2:
            raise ValueError("curvature needs a metric jet of order >= 2")
        gam = christoffel_jet(g.truncate(2))
        R = riemann_jet(gam)
        g0 = jets.value(g)
        return cls(g0, pivoted_inverse(g0), jets.value(gam), jets.value(R))

    @property
    def Rlow(self):
        return np.einsum("lp,pijk->lijk", self.g, self.R)

    def inner(self, v, w):
        return float(v @ self.g @ w)

    def curvature(self, a, b, c):
        """``R(a, b)c`` as a component vector."""
        return np.einsum("lijk,i,j,k->l", self.R, a, b, c)

    def sectional(self, v, w):
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        vv, ww, vw = self.inner(v, v), self.inner(w, w), self.inner(v, w)
        area = vv * ww - vw * vw
        if not area > PLANE_THRESHOLD * max(1.0, vv * ww):
            raise DegeneratePlane(f"vectors span a degenerate plane (Gram determinant {area:.3e})")
        return self.inner(self.curvature(v, w, w), v) / area

    def scalar(self):
        # sum over orthonormal pairs of <R(e_a, e_b) e_b, e_a>
        return float(np.einsum("lijk,li,jk->", self.Rlow, self.ginv, self.ginv))


def christoffel(mf, y):
    """Christoffel symbols ``gamma[k, i, j]`` of ``mf`` at ``y``."""
    return jets.value(christoffel_jet(mf.jet(y, 1)))


def riemann(mf, y):
    """Riemann components ``R[l, i, j, k]`` of ``mf`` at ``y``."""
    return PointCurvature.from_metric_jet(mf.jet(y, 2)).R


def sectional(mf, y, v, w):
    return PointCurvature.from_metric_jet(mf.jet(y, 2)).sectional(v, w)


def scalar(mf, y):
    return PointCurvature.from_metric_jet(mf.jet(y, 2)).scalar()


def covariant_deriv_field(mf, y, field):
    """``out[i, k] = (nabla_i V)^k`` for a vector-field jet ``field`` of order >= 1 at ``y``."""
    gam = christoffel(mf, y)
    return field.grad + np.einsum("kij,j->ik", gam, jets.value(field))


def curve_accel(mf, position, velocity, acceleration):
    """Covariant acceleration ``x'' + gamma(x', x')`` of a curve through ``position``."""
    gam = christoffel(mf, position)
    velocity = np.asarray(velocity, dtype=float)
    return np.asarray(acceleration, dtype=float) + np.einsum("kij,i,j->k", gam, velocity, velocity)


def geodesic_rhs(mf, y, v):
    """First-order geodesic system: returns ``(y', v') = (v, -gamma(v, v))``."""
    gam = christoffel(mf, y)
    v = np.asarray(v, dtype=float)
    return v.copy(), -np.einsum("kij,i,j->k", gam, v, v)

"""Base-manifold data at one tangent point, shared by the closed-form modules.

Closed-form expressions are evaluated with X, Y, Z extended as constant
coordinate vector fields, so ``[X, Y] = 0`` and ``nabla_X Y = gamma(X, Y)``.
Quantities that are differentiated along the base (``nabla_X W``) are
carried as first-order jets in the m base variables.  The fibre vector u is
extended parallel to first order, which is the extension seen along a
horizontal curve through (x, u).
"""

import math

import numpy as np

from . import jets
from .bundle import Variant, vertical_block
from .linalg import pivoted_inverse
from .manifold import FiberScalars
from .riemann import christoffel_jet, riemann_jet


class LocalGeometry:
    """Metric, connection, curvature and scaling data at ``tp``.

    Parameters
    ----------
    M : ChartedManifold
    f : ScalingField
    tp : TangentPoint
    """

    def __init__(self, M, f, tp):
        self.M = M
        self.fld = f
        self.tp = tp
        self.m = m = M.m
        x = M.check_point(tp.x)
        self.x = x
        self.u = u = np.asarray(tp.u, dtype=float)
        g3 = M.metric_jet(x, 3)
        gam2 = christoffel_jet(g3)
        r1 = riemann_jet(gam2)
        self.g = jets.value(g3)
        self.ginv = pivoted_inverse(self.g)
        self.gamma = jets.value(gam2)
        self.R = jets.value(r1)
        # first-order fields along the base
        self.g_jet = g3.truncate(1)
        self.gamma_jet = gam2.truncate(1)
        self.R_jet = r1
        fj = jets.as_jet(f.jet(x, 2), m, 2)
        self.f = float(fj.value)
        self.df = np.array(fj.grad)
        self.grad_f = self.ginv @ self.df
        self.f_jet = fj.truncate(1)
        self.df_jet = fj.D()
        self.grad_f_jet = jets.einsum("ab,b->a", jets.inv(self.g_jet), self.df_jet)
        self.u_jet = jets.Jet([u, -np.einsum("kij,j->ik", self.gamma, u)], m)
        gu = self.g @ u
        self.gu = gu
        r2 = float(u @ gu)
        self.r = math.sqrt(max(r2, 0.0))
        self.alpha = 1.0 + r2

    @property
    def scalars(self):
        return FiberScalars(self.r, self.alpha)

    # -- pointwise algebra ------------------------------------------------------
    def inner(self, a, b):
        return float(a @ self.g @ b)

    def norm2(self, a):
        return self.inner(a, a)

    def curv(self, a, b, c):
        """``R(a, b)c``."""
        return np.einsum("lijk,i,j,k->l", self.R, a, b, c)

    def cov(self, X, Y):
        """``nabla_X Y`` for constant coordinate fields."""
        return np.einsum("kij,i,j->k", self.gamma, X, Y)

    def a_f(self, X, Y):
        """``(1/2f)(df(X) Y + df(Y) X - g(X, Y) grad f)``."""
        return (np.dot(self.df, X) * Y + np.dot(self.df, Y) * X
                - self.inner(X, Y) * self.grad_f) / (2.0 * self.f)

    def sectional(self, X, Y):
        """Base sectional curvature of span{X, Y}."""
        area = self.norm2(X) * self.norm2(Y) - self.inner(X, Y) ** 2
        return self.inner(self.curv(X, Y, Y), X) / area

    def scalar(self):
        Rlow = np.einsum("lp,pijk->lijk", self.g, self.R)
        return float(np.einsum("lijk,li,jk->", Rlow, self.ginv, self.ginv))

    def vertical_pairing(self, variant, a, b):
        """Fibre pairing of ``a^v`` and ``b^v`` for the given metric variant."""
        return float(a @ vertical_block(variant, self.g, self.u) @ b)

    # -- first-order fields along the base --------------------------------------
    def const(self, X):
        return jets.Jet.constant(X, self.m, 1)

    def curv_field(self, a, b, c):
        return jets.einsum("lijk,i,j,k->l", self.R_jet, a, b, c)

    def cov_field(self, X, Y):
        return jets.einsum("kij,i,j->k", self.gamma_jet, X, Y)

    def inner_field(self, a, b):
        return jets.einsum("ij,i,j->", self.g_jet, a, b)

    def a_f_field(self, X, Y):
        df = self.df_jet
        return (jets.einsum("a,a->", df, X) * Y + jets.einsum("a,a->", df, Y) * X
                - self.inner_field(X, Y) * self.grad_f_jet) / (2.0 * self.f_jet)

    def nabla(self, X, W):
        """``nabla_X W`` at the point for a vector-field jet ``W`` of order >= 1."""
        return np.einsum("i,ik->k", X, W.grad) + np.einsum("kij,i,j->k", self.gamma, X, jets.value(W))

    def derivative(self, X, h):
        """Directional derivative ``X(h)`` of a scalar-field jet."""
        return float(np.dot(X, h.grad))

    def vertical_pairing_field(self, variant, a, b):
        """Fibre pairing of ``a^v`` and ``b^v`` along the base with u extended parallel."""
        gab = self.inner_field(a, b)
        if variant is Variant.SASAKI:
            return gab
        uj = self.u_jet
        return (gab + self.inner_field(a, uj) * self.inner_field(b, uj)) / (1.0 + self.inner_field(uj, uj))

    def vertical_pairing_fibre_derivative(self, variant, X, a, b):
        """``X^v`` applied to the fibre pairing of ``a^v`` and ``b^v`` (derivative in u)."""
        if variant is Variant.SASAKI:
            return 0.0
        uj = jets.Jet.variables(self.u, 1)
        gab = float(a @ self.g @ b)
        ga = jets.einsum("ij,i,j->", self.g, a, uj)
        gb = jets.einsum("ij,i,j->", self.g, b, uj)
        val = (gab + ga * gb) / (1.0 + jets.einsum("ij,i,j->", self.g, uj, uj))
        return float(np.dot(X, val.grad))

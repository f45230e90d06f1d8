"""Rescaled Sasaki and Cheeger-Gromoll metrics on TM in induced coordinates.

Bundle coordinates are ordered ``(x_1..x_m, u_1..u_m)``.  With the connection
map ``N[a, i] = gamma[a, i, b] u^b`` the lifts of a base vector X are::

    X^h = (X, -N X)        X^v = (0, X)

and the bundle metric has blocks ``xx = f G + N^T V N``, ``xu = N^T V``,
``uu = V``, where ``V = G`` (Sasaki) or ``V = (G + Gu Gu^T) / alpha``
(Cheeger-Gromoll) with ``alpha = 1 + u^T G u``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import jets
from .riemann import ChartMetric, MetricFn, christoffel, christoffel_jet


class Variant(str, Enum):
    SASAKI = "sasaki"
    CHEEGER_GROMOLL = "cg"

    @classmethod
    def parse(cls, text):
        key = str(text).lower().replace("-", "_")
        aliases = {"sasaki": cls.SASAKI, "cg": cls.CHEEGER_GROMOLL,
                   "cheeger_gromoll": cls.CHEEGER_GROMOLL}
        if key not in aliases:
            raise ValueError(f"unknown metric variant {text!r}; use 'sasaki' or 'cg'")
        return aliases[key]


@dataclass(frozen=True)
class LiftDecomposition:
    """A tangent vector of TM written as ``hor^h + ver^v``."""

    hor: np.ndarray
    ver: np.ndarray

    def __add__(self, other):
        return LiftDecomposition(self.hor + other.hor, self.ver + other.ver)

    def __sub__(self, other):
        return LiftDecomposition(self.hor - other.hor, self.ver - other.ver)

    def __neg__(self):
        return LiftDecomposition(-self.hor, -self.ver)

    def __mul__(self, s):
        return LiftDecomposition(s * self.hor, s * self.ver)

    __rmul__ = __mul__

    def stacked(self):
        """``(hor, ver)`` concatenated; used when comparing two results."""
        return np.concatenate([self.hor, self.ver])

    @classmethod
    def horizontal(cls, X):
        X = np.asarray(X, dtype=float)
        return cls(X, np.zeros_like(X))

    @classmethod
    def vertical(cls, X):
        X = np.asarray(X, dtype=float)
        return cls(np.zeros_like(X), X)


FrameResult = LiftDecomposition


def connection_map(M, x, u):
    """``N[a, i] = gamma[a, i, b] u^b`` at the base point ``x``."""
    return np.einsum("aib,b->ai", christoffel(ChartMetric(M), x), np.asarray(u, dtype=float))


def horizontal_lift(M, tp, X):
    X = np.asarray(X, dtype=float)
    return np.concatenate([X, -connection_map(M, tp.x, tp.u) @ X])


def vertical_lift(M, tp, X):
    X = np.asarray(X, dtype=float)
    return np.concatenate([np.zeros_like(X), X])


def canonical_U(M, tp):
    """The vertical lift of ``u`` at ``(x, u)``."""
    return vertical_lift(M, tp, tp.u)


def decompose(M, tp, Z):
    Z = np.asarray(Z, dtype=float)
    m = M.m
    return LiftDecomposition(Z[:m].copy(), Z[m:] + connection_map(M, tp.x, tp.u) @ Z[:m])


def recompose(M, tp, lift):
    return np.concatenate([lift.hor, lift.ver - connection_map(M, tp.x, tp.u) @ lift.hor])


def vertical_block(variant, g, u):
    """The vertical pairing matrix V for plain-array ``g`` and ``u``."""
    if variant is Variant.SASAKI:
        return np.array(g, dtype=float)
    gu = g @ u
    return (g + np.outer(gu, gu)) / (1.0 + u @ gu)


class BundleMetric(MetricFn):
    """The 2m x 2m coordinate metric of the rescaled Sasaki or Cheeger-Gromoll metric.

    Parameters
    ----------
    variant : Variant
    M : ChartedManifold
    f : ScalingField
    """

    def __init__(self, variant, M, f):
        self.variant = Variant.parse(variant) if not isinstance(variant, Variant) else variant
        self.M = M
        self.f = f
        self.n = 2 * M.m

    def split(self, y):
        y = np.asarray(y, dtype=float)
        m = self.M.m
        if y.shape != (2 * m,):
            raise ValueError(f"expected {2 * m} bundle coordinates, got shape {y.shape}")
        return self.M.check_point(y[:m]), y[m:]

    def pieces(self, y, order):
        """Jets (in the 2m bundle variables) of G, gamma, f, u and N at ``y``."""
        x, u = self.split(y)
        m, n = self.M.m, self.n
        g_base = self.M.metric_jet(x, order + 1)
        gam = christoffel_jet(g_base).pad(n)
        g = g_base.truncate(order).pad(n)
        f = jets.as_jet(self.f.jet(x, order), m, order).pad(n)
        uj = jets.Jet.variables(u, order, n=n, offset=m)
        N = jets.einsum("aib,b->ai", gam, uj)
        return g, gam, f, uj, N

    def vertical_jet(self, g, uj):
        if self.variant is Variant.SASAKI:
            return g
        gu = jets.einsum("ab,b->a", g, uj)
        alpha = 1.0 + jets.einsum("a,a->", uj, gu)
        return (g + jets.einsum("a,b->ab", gu, gu)) / alpha

    def jet(self, y, order):
        g, _, f, uj, N = self.pieces(y, order)
        V = self.vertical_jet(g, uj)
        NtV = jets.einsum("ai,ab->ib", N, V)
        xx = f * g + jets.einsum("ib,bj->ij", NtV, N)
        full = jets.block([[xx, NtV], [NtV.T, V]])
        return 0.5 * (full + full.T)

    def matrix_at(self, tp):
        return self.matrix(np.concatenate([tp.x, tp.u]))


def assemble(variant, M, f):
    return BundleMetric(variant, M, f)

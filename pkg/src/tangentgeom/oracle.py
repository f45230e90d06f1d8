"""Brute-force Levi-Civita calculus of the assembled bundle metric at one point.

Everything here is computed from the 2m x 2m coordinate matrix and its
derivatives alone; none of the closed-form connection or curvature formulas
are used, which is what makes it an independent reference.
"""

import numpy as np

from . import jets
from .bundle import LiftDecomposition
from .linalg import pivoted_inverse
from .riemann import PLANE_THRESHOLD, christoffel_jet, riemann_jet
from .errors import DegeneratePlane


class BundleOracle:
    """Connection and curvature of a :class:`~tangentgeom.bundle.BundleMetric` at ``tp``."""

    def __init__(self, metric, tp):
        self.metric = metric
        self.tp = tp
        self.m = metric.M.m
        self.y = np.concatenate([tp.x, tp.u])
        full = metric.jet(self.y, 2)
        gam = christoffel_jet(full)
        self.g_jet = full.truncate(1)
        self.G = jets.value(full)
        self.ginv = pivoted_inverse(self.G)
        self.gamma = jets.value(gam)
        self.R = jets.value(riemann_jet(gam))
        _, _, _, _, N = metric.pieces(self.y, 1)
        self.N_jet = N
        self.N = jets.value(N)

    # -- vectors and fields -------------------------------------------------------
    def h(self, X):
        """Horizontal lift of X as a 2m coordinate vector at the point."""
        X = np.asarray(X, dtype=float)
        return np.concatenate([X, -self.N @ X])

    def v(self, X):
        X = np.asarray(X, dtype=float)
        return np.concatenate([np.zeros_like(X), X])

    def lift(self, kind, X):
        return self.h(X) if kind == "h" else self.v(X)

    def h_field(self, X):
        """Horizontal lift of the constant coordinate field X, as a jet over TM."""
        X = np.asarray(X, dtype=float)
        n = 2 * self.m
        top = jets.Jet.constant(X, n, 1)
        return jets.concatenate([top, -jets.einsum("ai,i->a", self.N_jet, X)])

    def v_field(self, X):
        X = np.asarray(X, dtype=float)
        return jets.Jet.constant(np.concatenate([np.zeros_like(X), X]), 2 * self.m, 1)

    def lift_field(self, kind, X):
        return self.h_field(X) if kind == "h" else self.v_field(X)

    def decompose(self, Z):
        m = self.m
        return LiftDecomposition(Z[:m].copy(), Z[m:] + self.N @ Z[:m])

    # -- calculus -----------------------------------------------------------------
    def inner(self, a, b):
        return float(a @ self.G @ b)

    def nabla(self, A, B):
        """``nabla_A B`` for a vector A at the point and a vector-field jet B."""
        return np.einsum("i,ik->k", A, B.grad) + np.einsum("kij,i,j->k", self.gamma, A, jets.value(B))

    def bracket(self, A, B):
        """Lie bracket of two vector-field jets at the point."""
        a, b = jets.value(A), jets.value(B)
        return np.einsum("i,ik->k", a, B.grad) - np.einsum("i,ik->k", b, A.grad)

    def curvature(self, a, b, c):
        return np.einsum("lijk,i,j,k->l", self.R, a, b, c)

    def sectional(self, a, b):
        aa, bb, ab = self.inner(a, a), self.inner(b, b), self.inner(a, b)
        area = aa * bb - ab * ab
        if not area > PLANE_THRESHOLD * max(1.0, aa * bb):
            raise DegeneratePlane(f"bundle vectors span a degenerate plane (Gram determinant {area:.3e})")
        return self.inner(self.curvature(a, b, b), a) / area

    def scalar(self):
        Rlow = np.einsum("lp,pijk->lijk", self.G, self.R)
        return float(np.einsum("lijk,li,jk->", Rlow, self.ginv, self.ginv))

    def lifted_connection(self, pattern, X, Y):
        """``nabla_{X^a} Y^b`` decomposed into lifts, for ``pattern = a + b``."""
        A = self.lift(pattern[0], X)
        return self.decompose(self.nabla(A, self.lift_field(pattern[1], Y)))

    def lifted_curvature(self, pattern, X, Y, Z):
        """``R(X^a, Y^b)Z^c`` decomposed into lifts, for ``pattern = a + b + c``."""
        vecs = [self.lift(k, V) for k, V in zip(pattern, (X, Y, Z))]
        return self.decompose(self.curvature(*vecs))

    # -- self-checks of the Levi-Civita construction ---------------------------------
    def torsion_defect(self):
        return float(np.abs(self.gamma - self.gamma.transpose(0, 2, 1)).max())

    def compatibility_defect(self):
        dg = self.g_jet.grad  # dg[i, j, k] = d_i g_jk
        low = np.einsum("lij,lk->ijk", self.gamma, self.G)
        return float(np.abs(dg - low - low.transpose(0, 2, 1)).max())

    def bianchi_defect(self):
        R = self.R
        cyc = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
        return float(np.abs(cyc).max())

    def pair_symmetry_defect(self):
        Rlow = np.einsum("lp,pijk->lijk", self.G, self.R)
        return float(np.abs(Rlow - Rlow.transpose(2, 3, 0, 1)).max())

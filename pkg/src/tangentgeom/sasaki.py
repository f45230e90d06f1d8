"""Closed forms for the rescaled Sasaki metric.

All functions take a :class:`~tangentgeom.local.LocalGeometry` ``geo`` and
base vectors; lift patterns are strings over {"h", "v"} naming the lift of
each argument in order, e.g. ``curvature(geo, "hvh", X, Y, Z)`` is
``R(X^h, Y^v)Z^h``.  Results are :class:`~tangentgeom.bundle.FrameResult`.
"""

from dataclasses import dataclass

import numpy as np

from .bundle import BundleMetric, FrameResult, Variant
from .errors import NonPositiveScaling
from .local import LocalGeometry
from .oracle import BundleOracle

CONNECTION_PATTERNS = ("hh", "hv", "vh", "vv")
CURVATURE_PATTERNS = ("vvv", "hvv", "vvh", "hvh", "hhv", "hhh", "vhv", "vhh")
SECTIONAL_PATTERNS = ("hh", "hv", "vv")


def a_f(M, f, x, X, Y):
    """The rescaling tensor ``(1/2f)(df(X) Y + df(Y) X - g(X, Y) grad f)``.

    Examples
    --------
    On the Euclidean plane with ``f = exp(x1)`` at the origin and
    ``X = Y = (1, 0)`` the value is ``(1/2, 0)``.
    """
    fj = f.jet(M.check_point(x), 1)
    if fj.value <= 0:
        raise NonPositiveScaling(f"f = {float(fj.value):g} is not positive")
    g = M.metric(x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    grad = np.linalg.solve(g, fj.grad)
    return (fj.grad @ X * Y + fj.grad @ Y * X - (X @ g @ Y) * grad) / (2.0 * float(fj.value))


def _h(v):
    return FrameResult.horizontal(v)


def _v(v):
    return FrameResult.vertical(v)


def connection(geo, pattern, X, Y):
    """``nabla_{X^a} Y^b`` for the rescaled Sasaki metric, ``pattern = a + b``.

    Parameters
    ----------
    geo : LocalGeometry
    pattern : {"hh", "hv", "vh", "vv"}
    X, Y : array_like
        Base vectors, extended as constant coordinate fields.
    """
    f, u = geo.f, geo.u
    if pattern == "hh":
        return _h(geo.cov(X, Y) + geo.a_f(X, Y)) - 0.5 * _v(geo.curv(X, Y, u))
    if pattern == "hv":
        return _v(geo.cov(X, Y)) + _h(geo.curv(u, Y, X) / (2.0 * f))
    if pattern == "vh":
        return _h(geo.curv(u, X, Y) / (2.0 * f))
    if pattern == "vv":
        return _v(np.zeros(geo.m))
    raise ValueError(f"unknown connection pattern {pattern!r}")


def _hhh(geo, X, Y, Z, c_uRXY, c_uRXZ, c_uRYZ):
    """Shared horizontal-triple formula; the three coefficients differ between variants."""
    u = geo.u
    WY = geo.cov_field(Y, Z) + geo.a_f_field(Y, Z)
    WX = geo.cov_field(X, Z) + geo.a_f_field(X, Z)
    wy, wx = WY.value, WX.value
    hor = (geo.nabla(X, WY) + geo.a_f(X, wy) - geo.nabla(Y, WX) - geo.a_f(Y, wx)
           + c_uRXY * geo.curv(u, geo.curv(X, Y, u), Z)
           + c_uRXZ * geo.curv(u, geo.curv(X, Z, u), Y)
           - c_uRYZ * geo.curv(u, geo.curv(Y, Z, u), X))
    uj = geo.u_jet
    ver = (-0.5 * geo.curv(X, wy, u) + 0.5 * geo.curv(Y, wx, u)
           + 0.5 * geo.nabla(Y, geo.curv_field(X, Z, uj))
           - 0.5 * geo.nabla(X, geo.curv_field(Y, Z, uj)))
    return FrameResult(hor, ver)


def curvature(geo, pattern, X, Y, Z, form="proof"):
    """``R(X^a, Y^b)Z^c`` for the rescaled Sasaki metric, ``pattern = a + b + c``.

    ``form`` selects between the two printed versions of the mixed
    ``hvh`` pattern: ``"proof"`` (the intermediate line of its derivation)
    or ``"statement"``.  Patterns ``vhv`` and ``vhh`` follow from ``hvv`` and
    ``hvh`` by antisymmetry in the first two slots.
    """
    f, u = geo.f, geo.u
    X, Y, Z = (np.asarray(V, dtype=float) for V in (X, Y, Z))
    R = geo.curv
    if pattern == "vvv":
        return _v(np.zeros(geo.m))
    if pattern == "hvv":
        return _h(-R(Y, Z, X) / (2 * f) - R(u, Y, R(u, Z, X)) / (4 * f * f))
    if pattern == "vvh":
        return _h(-R(Y, X, Z) / (2 * f) - R(u, Y, R(u, X, Z)) / (4 * f * f)
                  + R(X, Y, Z) / (2 * f) + R(u, X, R(u, Y, Z)) / (4 * f * f))
    if pattern == "hvh":
        uj = geo.u_jet
        F1 = geo.curv_field(uj, Y, Z) / (2.0 * geo.f_jet)
        f1 = F1.value
        hor = (geo.nabla(X, F1) + geo.a_f(X, f1)
               - R(u, Y, geo.cov(X, Z) + geo.a_f(X, Z)) / (2 * f)
               - R(u, geo.cov(X, Y), Z) / (2 * f))
        if form == "proof":
            ver = -0.5 * R(X, f1, u) + R(X, Z, Y) / (2 * f)
        elif form == "statement":
            ver = R(R(u, Y, Z), X, u) / (4 * f) + 0.5 * R(X, Z, u)
        else:
            raise ValueError(f"unknown form {form!r}")
        return FrameResult(hor, ver)
    if pattern == "hhv":
        uj = geo.u_jet
        FY = geo.curv_field(uj, Z, Y) / (2.0 * geo.f_jet)
        FX = geo.curv_field(uj, Z, X) / (2.0 * geo.f_jet)
        hor = (geo.nabla(X, FY) - geo.nabla(Y, FX)
               + geo.a_f(X, R(u, Z, Y)) / (2 * f) - geo.a_f(Y, R(u, Z, X)) / (2 * f)
               + R(u, geo.cov(Y, Z), X) / (2 * f) - R(u, geo.cov(X, Z), Y) / (2 * f))
        ver = (R(R(u, Z, Y), X, u) / (4 * f) - R(R(u, Z, X), Y, u) / (4 * f)
               + R(X, Y, u))
        return FrameResult(hor, ver)
    if pattern == "hhh":
        return _hhh(geo, X, Y, Z, 1.0 / (2 * f), 1.0 / (4 * f), 1.0 / (4 * f))
    if pattern == "vhv":
        return -curvature(geo, "hvv", Y, X, Z, form)
    if pattern == "vhh":
        return -curvature(geo, "hvh", Y, X, Z, form)
    raise ValueError(f"unknown curvature pattern {pattern!r}")


def l_f(geo, X, Y):
    """The rescaling contribution to the horizontal sectional curvature.

    Evaluated term by term as displayed, with X, Y constant coordinate
    fields (so ``[X, Y] = 0``); it is not tensorial in general.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g, A, cov = geo.inner, geo.a_f, geo.cov
    t1 = g(geo.nabla(X, geo.a_f_field(Y, Y)) - geo.nabla(Y, geo.a_f_field(X, Y)), X)
    t2 = g(A(X, cov(Y, Y) + A(Y, Y)), X)
    t3 = g(A(Y, cov(X, Y) + A(X, Y)), X)
    return (t1 - t2 - t3) / geo.f


def hh_sectional_terms(geo, X, Y):
    """``(1/f)K(X,Y)``, ``-(3/4f^2)|R(X,Y)u|^2`` and ``L_f(X,Y)`` for orthonormal X, Y.

    Returned separately so frame sums can include the ``X = Y`` terms.
    """
    f = geo.f
    K = geo.inner(geo.curv(X, Y, Y), X)
    return K / f, -0.75 * geo.norm2(geo.curv(X, Y, geo.u)) / f ** 2, l_f(geo, X, Y)


def sectional(geo, pattern, X, Y):
    """Sectional curvature of span{X^a, Y^b} for g-orthonormal X, Y.

    Examples
    --------
    The ``"vv"`` pattern is identically zero.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if pattern == "vv":
        return 0.0
    if pattern == "hv":
        return geo.norm2(geo.curv(geo.u, Y, X)) / (4.0 * geo.f ** 2)
    if pattern == "hh":
        return float(sum(hh_sectional_terms(geo, X, Y)))
    raise ValueError(f"unknown sectional pattern {pattern!r}")


def scalar(geo, frame):
    """Scalar curvature from the closed form, over a g-orthonormal ``frame``."""
    f, u = geo.f, geo.u
    S = geo.scalar()
    quad = sum(geo.norm2(geo.curv(Xi, Xj, u)) for Xi in frame for Xj in frame)
    lsum = sum(l_f(geo, Xi, Xj) for Xi in frame for Xj in frame)
    return S / f - quad / (4 * f ** 2) + lsum


def scalar_from_sectionals(geo, frame):
    """Frame sum of the closed-form sectional curvatures.

    Uses ``sum_ij [hh(X_i, X_j) + 2 hv(X_i, X_j) + vv(X_i, X_j)]`` with the
    diagonal ``hh`` terms reduced to their ``L_f`` part.
    """
    total = 0.0
    for i, Xi in enumerate(frame):
        for j, Xj in enumerate(frame):
            k, q, lf = hh_sectional_terms(geo, Xi, Xj)
            total += (0.0 if i == j else k + q) + lf
            total += 2.0 * sectional(geo, "hv", Xi, Xj)
    return total


def sectional_sweep(geo_factory, X, Y, t_grid):
    """hh sectional curvature with u replaced by ``t u`` for each t.

    ``geo_factory(t)`` must return the :class:`LocalGeometry` at ``(x, t u)``.
    """
    return [sectional(geo_factory(t), "hh", X, Y) for t in t_grid]


@dataclass(frozen=True)
class FlatnessProbe:
    """Largest oracle curvature component over a set of points."""

    max_abs: float
    index: int
    component: tuple


def flatness_probe(M, f, points):
    """Brute-force check of flatness of the rescaled Sasaki metric.

    Parameters
    ----------
    M : ChartedManifold
    f : ScalingField
    points : iterable of TangentPoint

    Returns
    -------
    FlatnessProbe
        ``index`` is the position of the point with the largest component
        ``R[l, i, j, k]`` in bundle coordinates.
    """
    metric = BundleMetric(Variant.SASAKI, M, f)
    best = FlatnessProbe(-1.0, -1, ())
    for n, tp in enumerate(points):
        R = BundleOracle(metric, tp).R
        idx = np.unravel_index(int(np.argmax(np.abs(R))), R.shape)
        val = float(abs(R[idx]))
        if val > best.max_abs:
            best = FlatnessProbe(val, n, tuple(int(i) for i in idx))
    return best


def geometry(M, f, tp):
    return LocalGeometry(M, f, tp)

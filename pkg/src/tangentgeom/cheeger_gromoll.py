"""Closed forms for the rescaled Cheeger-Gromoll metric.

The conventions match :mod:`tangentgeom.sasaki`: lift patterns are strings
over {"h", "v"}, base vectors are extended as constant coordinate fields and
results are :class:`~tangentgeom.bundle.FrameResult` values.  Pairings of two
vertical lifts use the Cheeger-Gromoll fibre metric
``(g(X, Y) + g(X, u) g(Y, u)) / alpha``; the pairing of ``X^v`` with the
canonical field ``U = u^v`` reduces to ``g(X, u)``.

The horizontal-plane sectional curvature involves a rescaling term that is
only named, never displayed, for this metric; it is evaluated with the
rescaled-Sasaki ``L_f`` (see :func:`l_tilde`).
"""

import math

import numpy as np

from .bundle import FrameResult, Variant
from .errors import DegenerateInput, ZeroFiber
from .local import LocalGeometry
from .manifold import gram_schmidt
from .sasaki import l_f

CONNECTION_PATTERNS = ("hh", "hv", "vh", "vv")
CURVATURE_PATTERNS = ("hhh", "hhv", "hvh", "hvv", "vvh", "vvv", "vhv", "vhh")
SECTIONAL_PATTERNS = ("hh", "hv", "vv")
HH_READINGS = ("printed", "alpha2")

CG = Variant.CHEEGER_GROMOLL


def _h(v):
    return FrameResult.horizontal(v)


def _v(v):
    return FrameResult.vertical(v)


def pairing_with_U(geo, X):
    """``g~(X^v, U)``, computed from the fibre metric (equals ``g(X, u)``)."""
    return geo.vertical_pairing(CG, X, geo.u)


def vertical_connection(geo, X, Y):
    """Fibre part of ``nabla_{X^v} Y^v``; every pairing is taken in the fibre metric."""
    a, u = geo.alpha, geo.u
    gxu, gyu = pairing_with_U(geo, X), pairing_with_U(geo, Y)
    pxy = geo.vertical_pairing(CG, X, Y)
    return -(gxu * Y + gyu * X) / a + (1 + a) / a * pxy * u - gxu * gyu / a * u


def connection(geo, pattern, X, Y):
    """``nabla_{X^a} Y^b`` for the rescaled Cheeger-Gromoll metric.

    Parameters
    ----------
    geo : LocalGeometry
    pattern : {"hh", "hv", "vh", "vv"}
    X, Y : array_like

    Examples
    --------
    At ``u = 0`` the ``"vv"`` pattern vanishes because U does.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    f, u, a = geo.f, geo.u, geo.alpha
    if pattern == "hh":
        return _h(geo.cov(X, Y) + geo.a_f(X, Y)) - 0.5 * _v(geo.curv(X, Y, u))
    if pattern == "hv":
        return _v(geo.cov(X, Y)) + _h(geo.curv(u, Y, X) / (2 * a * f))
    if pattern == "vh":
        return _h(geo.curv(u, X, Y) / (2 * a * f))
    if pattern == "vv":
        return _v(vertical_connection(geo, X, Y))
    raise ValueError(f"unknown connection pattern {pattern!r}")


def _hhh(geo, X, Y, Z):
    f, u, a = geo.f, geo.u, geo.alpha
    R = geo.curv
    WY = geo.cov_field(Y, Z) + geo.a_f_field(Y, Z)
    WX = geo.cov_field(X, Z) + geo.a_f_field(X, Z)
    wy, wx = WY.value, WX.value
    uj = geo.u_jet
    hor = (geo.nabla(X, WY) + geo.a_f(X, wy) - geo.nabla(Y, WX) - geo.a_f(Y, wx)
           + R(u, R(X, Y, u), Z) / (2 * a * f)
           + R(u, R(X, Z, u), Y) / (4 * a * f)
           - R(u, R(Y, Z, u), X) / (4 * a * f))
    ver = (-0.5 * R(X, wy, u) + 0.5 * R(Y, wx, u)
           + 0.5 * geo.nabla(Y, geo.curv_field(X, Z, uj))
           - 0.5 * geo.nabla(X, geo.curv_field(Y, Z, uj)))
    return FrameResult(hor, ver)


def _hhv(geo, X, Y, Z):
    f, u, a = geo.f, geo.u, geo.alpha
    R = geo.curv
    uj = geo.u_jet
    FY = geo.curv_field(uj, Z, Y) / geo.f_jet
    FX = geo.curv_field(uj, Z, X) / geo.f_jet
    rxyu = R(X, Y, u)
    hor = ((geo.nabla(Z, FY) - geo.nabla(Y, FX)) / (2 * a)
           + (geo.a_f(X, R(u, Z, Y) / (2 * f)) - geo.a_f(Y, R(u, Z, X) / (2 * f))) / a)
    ver = (R(X, Y, Z)
           - (R(X, R(u, Z, Y), u) - R(Y, R(u, Z, X), u)) / (4 * a * f)
           - pairing_with_U(geo, Z) / a * rxyu
           + (1 + a) / a * geo.vertical_pairing(CG, rxyu, Z) * u)
    return FrameResult(hor, ver)


def _hvh(geo, X, Y, Z):
    f, u, a = geo.f, geo.u, geo.alpha
    R = geo.curv
    uj = geo.u_jet
    W = geo.curv_field(uj, Y, Z) / geo.f_jet
    w = W.value
    rxzu = R(X, Z, u)
    gyu = pairing_with_U(geo, Y)
    gru = pairing_with_U(geo, rxzu)
    hor = ((geo.nabla(X, W) + geo.a_f(X, w)) / (2 * a)
           - R(u, geo.cov(X, Y), Z) / (2 * a * f)
           - R(u, Y, geo.cov(X, Z)) / (2 * a * f)
           - R(u, Y, geo.a_f(X, Z)) / (2 * a * f))
    ver = (-0.25 / a * R(X, w, u)
           + 0.5 * R(X, Z, Y)
           - gyu / (2 * a) * rxzu
           - gru / (2 * a) * Y
           + (1 + a) / (2 * a) * geo.vertical_pairing(CG, rxzu, Y) * u
           - gyu * gru / (2 * a) * u)
    return FrameResult(hor, ver)


def _hvv(geo, X, Y, Z):
    f, u, a = geo.f, geo.u, geo.alpha
    R = geo.curv
    hor = (-R(Y, Z, X) / (2 * a * f)
           - R(u, Y, R(u, Z, X)) / (4 * a * a * f * f)
           + (geo.inner(Y, u) * R(u, Z, X) - geo.inner(Z, u) * R(u, Y, X)) / (2 * a * a * f))
    return _h(hor)


def _vvh(geo, X, Y, Z):
    f, u, a = geo.f, geo.u, geo.alpha
    R = geo.curv
    hor = (-R(X, Y, Z) / (2 * a * f) - R(u, X, R(u, Y, Z)) / (4 * a * a * f * f)
           + R(Y, X, Z) / (2 * a * f) + R(u, Y, R(u, X, Z)) / (4 * a * a * f * f))
    return _h(hor)


def _vvv(geo, X, Y, Z):
    u, a = geo.u, geo.alpha
    p = lambda A, B: geo.vertical_pairing(CG, A, B)
    gxu, gyu, gzu = geo.inner(X, u), geo.inner(Y, u), geo.inner(Z, u)
    c1 = (1 + a + a * a) / a ** 2
    c2 = (2 + a) / a ** 2
    ver = (c1 * (p(Y, Z) * X - p(X, Z) * Y)
           + c2 * (p(X, Z) * gyu - p(Y, Z) * gxu) * u
           + c2 * (gxu * gzu * Y - gyu * gzu * X))
    return _v(ver)


_CURVATURE = {"hhh": _hhh, "hhv": _hhv, "hvh": _hvh, "hvv": _hvv, "vvh": _vvh, "vvv": _vvv}


def curvature(geo, pattern, X, Y, Z):
    """``R(X^a, Y^b)Z^c`` for the rescaled Cheeger-Gromoll metric.

    The six displayed patterns are evaluated term by term; ``vhv`` and
    ``vhh`` follow from ``hvv`` and ``hvh`` by antisymmetry.  In the
    ``hhv`` pattern the first covariant derivative is taken along Z, as
    displayed.
    """
    X, Y, Z = (np.asarray(V, dtype=float) for V in (X, Y, Z))
    if pattern in _CURVATURE:
        return _CURVATURE[pattern](geo, X, Y, Z)
    if pattern == "vhv":
        return -_hvv(geo, Y, X, Z)
    if pattern == "vhh":
        return -_hvh(geo, Y, X, Z)
    raise ValueError(f"unknown curvature pattern {pattern!r}")


# -- areas, G-forms and sectional curvature --------------------------------------

def l_tilde(geo, X, Y):
    """Rescaling term of the horizontal sectional curvature (taken equal to ``L_f``)."""
    return l_f(geo, X, Y)


def q_area(geo, pattern, X, Y):
    """Closed-form squared area of span{X^a, Y^b} for g-orthonormal X, Y.

    Examples
    --------
    For the ``"hh"`` pattern the value is ``f**2``.
    """
    f, a = geo.f, geo.alpha
    if pattern == "hh":
        return f * f
    gyu = geo.inner(Y, geo.u)
    if pattern == "hv":
        return f / a * (1 + gyu ** 2)
    if pattern == "vv":
        gxu = geo.inner(X, geo.u)
        return (1 + gyu ** 2 + gxu ** 2) / a ** 2
    raise ValueError(f"unknown sectional pattern {pattern!r}")


def bundle_inner(geo, A, B):
    """``g~(A, B)`` for two lift decompositions at the point."""
    return (geo.f * geo.inner(A.hor, B.hor)
            + geo.vertical_pairing(CG, A.ver, B.ver))


def q_area_direct(geo, pattern, X, Y):
    """``|V|^2 |W|^2 - g~(V, W)^2`` computed from the metric itself."""
    V = FrameResult.horizontal(X) if pattern[0] == "h" else FrameResult.vertical(X)
    W = FrameResult.horizontal(Y) if pattern[1] == "h" else FrameResult.vertical(Y)
    return bundle_inner(geo, V, V) * bundle_inner(geo, W, W) - bundle_inner(geo, V, W) ** 2


def g_form(geo, pattern, X, Y):
    """Closed-form ``g~(R~(V, W)W, V)`` for g-orthonormal X, Y."""
    f, u, a = geo.f, geo.u, geo.alpha
    if pattern == "hh":
        K = geo.inner(geo.curv(X, Y, Y), X)
        return K / f - 3.0 / (4 * a * a * f * f) * geo.norm2(geo.curv(X, Y, u)) + l_tilde(geo, X, Y)
    if pattern == "hv":
        return geo.norm2(geo.curv(u, Y, X)) / (4 * a * a * f * f)
    if pattern == "vv":
        gxu, gyu = geo.inner(X, u), geo.inner(Y, u)
        return ((1 + a + a * a) / a ** 2 * q_area(geo, "vv", X, Y)
                - (2 + a) / a ** 3 * (gxu ** 2 + gyu ** 2))
    raise ValueError(f"unknown sectional pattern {pattern!r}")


def sectional(geo, pattern, X, Y, reading="printed"):
    """Closed-form sectional curvature of span{X^a, Y^b} for g-orthonormal X, Y.

    ``reading`` selects the coefficient of ``|R(X, Y)u|^2`` in the ``"hh"``
    pattern: ``3/(4 alpha f^4)`` as displayed, or ``3/(4 alpha^2 f^4)``,
    which is what dividing :func:`g_form` by :func:`q_area` gives.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    f, u, a = geo.f, geo.u, geo.alpha
    if pattern == "hh":
        if reading not in HH_READINGS:
            raise ValueError(f"unknown reading {reading!r}")
        K = geo.inner(geo.curv(X, Y, Y), X)
        c = 3.0 / (4 * a * f ** 4) if reading == "printed" else 3.0 / (4 * a * a * f ** 4)
        return K / f ** 3 - c * geo.norm2(geo.curv(X, Y, u)) + l_tilde(geo, X, Y) / f ** 2
    gyu = geo.inner(Y, u)
    if pattern == "hv":
        return geo.norm2(geo.curv(u, Y, X)) / (4 * a * f ** 3 * (1 + gyu ** 2))
    if pattern == "vv":
        gxu = geo.inner(X, u)
        return (1 - a) / a ** 2 + (2 + a) / a / (1 + gyu ** 2 + gxu ** 2)
    raise ValueError(f"unknown sectional pattern {pattern!r}")


def sectional_constant_kappa(kappa, f_val, gXu, gYu, alpha, pattern, l_value=0.0):
    """Sectional curvature over a base of constant curvature ``kappa``.

    Parameters
    ----------
    kappa, f_val : float
    gXu, gYu : float
        ``g(X, u)`` and ``g(Y, u)`` for g-orthonormal X, Y.
    alpha : float
    pattern : {"hh", "hv", "vv"}
    l_value : float
        Value of the rescaling term for the ``"hh"`` pattern.

    Examples
    --------
    >>> sectional_constant_kappa(1.0, 1.0, 1.0, 0.0, 2.0, "hv")
    0.125
    """
    f, a = f_val, alpha
    if pattern == "hh":
        return (kappa / f ** 3 - 3 * kappa ** 2 / (4 * a * f ** 4) * (gXu ** 2 + gYu ** 2)
                + l_value / f ** 2)
    if pattern == "hv":
        return kappa ** 2 * gXu ** 2 / (4 * a * f ** 3 * (1 + gYu ** 2))
    if pattern == "vv":
        return (1 - a) / a ** 2 + (2 + a) / a / (1 + gYu ** 2 + gXu ** 2)
    raise ValueError(f"unknown sectional pattern {pattern!r}")


# -- adapted frame and scalar curvature --------------------------------------------

def adapted_basis(geo):
    """g-orthonormal base frame ``e_1 = u/|u|, e_2, ..., e_m``."""
    if not geo.r > 0:
        raise ZeroFiber("the adapted frame needs a nonzero fibre vector")
    basis = gram_schmidt(geo.M, geo.x, [geo.u])
    # coordinate vectors in index order, skipping those already (nearly) spanned
    for ek in np.eye(geo.m):
        if len(basis) == geo.m:
            break
        try:
            basis = gram_schmidt(geo.M, geo.x, basis + [ek], pivot=1e-6)
        except DegenerateInput:
            continue
    return basis


def adapted_frame(geo):
    """The 2m bundle vectors ``e_i^h/sqrt(f), e_1^v, sqrt(alpha) e_k^v``.

    The horizontal members carry ``1/sqrt(f)`` so the frame is orthonormal
    for every f.  Returns ``(basis, frame)`` with ``frame`` a list of
    :class:`FrameResult`.
    """
    e = adapted_basis(geo)
    s = 1.0 / math.sqrt(geo.f)
    frame = [FrameResult.horizontal(s * ei) for ei in e]
    frame.append(FrameResult.vertical(e[0]))
    frame.extend(FrameResult.vertical(math.sqrt(geo.alpha) * ek) for ek in e[1:])
    return e, frame


def frame_gramian(geo, frame):
    n = len(frame)
    return np.array([[bundle_inner(geo, frame[i], frame[j]) for j in range(n)] for i in range(n)])


def frame_sectional(geo, i, j, e):
    """Closed-form sectional curvature of span{t_i, t_j} in the adapted frame (0-based)."""
    m, f, a, u = geo.m, geo.f, geo.alpha, geo.u
    if i > j:
        i, j = j, i
    if j < m:
        ei, ej = e[i], e[j]
        return (geo.inner(geo.curv(ei, ej, ej), ei) / f ** 3
                - 3.0 / (4 * a * f ** 4) * geo.norm2(geo.curv(ei, ej, u))
                + l_tilde(geo, ei, ej) / f ** 2)
    if i < m and j == m:
        return 0.0
    if i < m:
        return geo.norm2(geo.curv(u, e[j - m], e[i])) / (4 * f ** 3)
    if i == m:
        return 3.0 / a ** 2
    return (a * a + a + 1) / a ** 2


def scalar(geo, base_over_f=False):
    """Closed-form scalar curvature at the point.

    ``base_over_f=True`` divides the base scalar curvature by f, as in the
    rescaled-Sasaki formula; the default uses it undivided, as displayed.
    """
    m, f, a, u = geo.m, geo.f, geo.alpha, geo.u
    e = adapted_basis(geo) if geo.r > 0 else gram_schmidt(geo.M, geo.x, list(np.eye(m)))
    S = geo.scalar()
    quad = sum(geo.norm2(geo.curv(ei, ej, u)) for ei in e for ej in e)
    lsum = sum(l_tilde(geo, ei, ej) for ei in e for ej in e)
    base = S / f if base_over_f else S
    return (base + (2 * a - 3) / (4 * a * f ** 4) * quad + lsum / f ** 2
            + (m - 1) / a ** 2 * (6 + (m - 2) * (a * a + a + 1)))


def geometry(M, f, tp):
    return LocalGeometry(M, f, tp)


"""Geodesics of a bundle metric and residuals of horizontal-lift curves.

A bundle state is ``(x, u, xdot, udot)`` in induced coordinates.  Integration
is classic fixed-step RK4 on the first-order system ``(y, v)' = (v, -Gamma(v, v))``
of the assembled 2m x 2m metric.

Curves on the base are lifted as ``c(s) = (x(s), x'(s))``.  Their
acceleration ``nabla_T T`` is computed two ways: by the oracle from the
bundle metric, and from the closed form

    ``(nabla_{x'}x' + A_f(x', x') + (1/f) R(y, nabla_{x'}y) x')^h + (nabla_{x'}nabla_{x'}y)^v``

whose horizontal and vertical parts are the residuals (a) and (b).
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .bundle import BundleMetric, LiftDecomposition, Variant
from .errors import ChartExit, NonFiniteState, OutsideChart, ParallelVectors
from .riemann import ChartMetric, christoffel, christoffel_jet, geodesic_rhs, riemann

DEFAULT_STEP = 1e-3
PARALLEL_THRESHOLD = 1e-10


@dataclass(frozen=True)
class BundleState:
    """A point of a curve in TM together with its velocity."""

    x: np.ndarray
    u: np.ndarray
    xdot: np.ndarray
    udot: np.ndarray
    t: float = 0.0

    @property
    def position(self):
        return np.concatenate([self.x, self.u])

    @property
    def velocity(self):
        return np.concatenate([self.xdot, self.udot])

    @classmethod
    def from_arrays(cls, t, position, velocity):
        m = len(position) // 2
        return cls(position[:m].copy(), position[m:].copy(), velocity[:m].copy(), velocity[m:].copy(), float(t))

    @classmethod
    def parse(cls, text, m):
        """Read ``x,u,xdot,udot`` from ``4m`` comma-separated numbers."""
        vals = [float(s) for s in text.replace(";", ",").split(",") if s.strip()]
        if len(vals) != 4 * m:
            raise ValueError(f"expected {4 * m} comma-separated numbers for the start state, got {len(vals)}")
        a = np.array(vals)
        return cls(a[:m], a[m:2 * m], a[2 * m:3 * m], a[3 * m:])

    def as_dict(self, energy=None):
        d = {"t": self.t, "x": self.x.tolist(), "u": self.u.tolist(),
             "xdot": self.xdot.tolist(), "udot": self.udot.tolist()}
        if energy is not None:
            d["energy"] = energy
        return d


@dataclass(frozen=True)
class Trajectory:
    h: float
    states: tuple
    energies: tuple

    def energy_drift(self):
        """``max_t |E(t) - E(0)| / E(0)``."""
        e = np.asarray(self.energies)
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))

    def to_dict(self):
        return {"h": self.h,
                "states": [s.as_dict(e) for s, e in zip(self.states, self.energies)]}

    def to_csv(self):
        m = len(self.states[0].x)
        cols = (["t"] + [f"x{i + 1}" for i in range(m)] + [f"u{i + 1}" for i in range(m)]
                + [f"xdot{i + 1}" for i in range(m)] + [f"udot{i + 1}" for i in range(m)] + ["energy"])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for s, e in zip(self.states, self.energies):
            w.writerow([repr(s.t)] + [repr(float(v)) for v in np.concatenate([s.x, s.u, s.xdot, s.udot])] + [repr(e)])
        return buf.getvalue()


def energy(metric, state):
    """``g(c', c')`` of the bundle metric at the state."""
    v = state.velocity
    return float(v @ metric.matrix(state.position) @ v)


def _rhs(metric, y, v, t):
    try:
        return geodesic_rhs(metric, y, v)
    except OutsideChart:
        raise ChartExit(t) from None


def integrate(metric, s0, t_end, h=DEFAULT_STEP):
    """Integrate the geodesic of ``metric`` from ``s0`` over ``[s0.t, s0.t + t_end]``.

    Parameters
    ----------
    metric : BundleMetric
    s0 : BundleState
    t_end : float
        Length of the time interval.
    h : float
        Fixed step; the last step lands on ``round(t_end / h)`` steps.

    Returns
    -------
    Trajectory

    Raises
    ------
    ChartExit
        If the base point leaves the chart box.
    NonFiniteState
        If a component overflows.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    M = metric.M
    if not M.contains(s0.x):
        raise ChartExit(s0.t)
    n = int(round(t_end / h))
    y, v = s0.position, s0.velocity
    states = [s0]
    energies = [energy(metric, s0)]
    t0 = s0.t
    for k in range(n):
        t = t0 + k * h
        k1y, k1v = _rhs(metric, y, v, t)
        k2y, k2v = _rhs(metric, y + 0.5 * h * k1y, v + 0.5 * h * k1v, t)
        k3y, k3v = _rhs(metric, y + 0.5 * h * k2y, v + 0.5 * h * k2v, t)
        k4y, k4v = _rhs(metric, y + h * k3y, v + h * k3v, t)
        y = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t_next = t0 + (k + 1) * h
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(v))):
            raise NonFiniteState(f"non-finite state at t={t_next:.6g}")
        state = BundleState.from_arrays(t_next, y, v)
        if not M.contains(state.x):
            raise ChartExit(t_next)
        states.append(state)
        energies.append(energy(metric, state))
    return Trajectory(h, tuple(states), tuple(energies))


def horizontal_start(M, x, u, xdot):
    """Start state whose velocity is the horizontal lift of ``xdot``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    N = np.einsum("aib,b->ai", christoffel(ChartMetric(M), x), u)
    return BundleState(x, u, xdot, -N @ xdot)


# -- base curves ------------------------------------------------------------------

class BaseCurve:
    """A curve on the base with derivatives up to order three."""

    def derivatives(self, t):
        """``(x, x', x'', x''')`` at parameter ``t``."""
        raise NotImplementedError


@dataclass(frozen=True)
class Line(BaseCurve):
    """``x(t) = p + t v`` in coordinates."""

    p: np.ndarray
    v: np.ndarray

    def derivatives(self, t):
        p = np.asarray(self.p, dtype=float)
        v = np.asarray(self.v, dtype=float)
        z = np.zeros_like(p)
        return p + t * v, v.copy(), z, z.copy()


@dataclass(frozen=True)
class CoordinateCircle(BaseCurve):
    """A circle of coordinate radius ``radius`` in the ``(i, j)`` coordinate plane."""

    center: np.ndarray
    radius: float
    i: int = 0
    j: int = 1
    omega: float = 1.0

    def derivatives(self, t):
        c = np.asarray(self.center, dtype=float)
        r, w = self.radius, self.omega
        out = [c.copy()] + [np.zeros_like(c) for _ in range(3)]
        cs, sn = math.cos(w * t), math.sin(w * t)
        # k-th derivative of (cos, sin)(w t)
        for k, (a, b) in enumerate([(cs, sn), (-sn, cs), (-cs, -sn), (sn, -cs)]):
            out[k][self.i] += r * w ** k * a
            out[k][self.j] += r * w ** k * b
        return tuple(out)


@dataclass
class BaseGeodesic(BaseCurve):
    """A geodesic of the base metric, integrated with RK4 on a fixed grid.

    Derivatives at grid times are recovered from the geodesic equation:
    ``x'' = -Gamma(x', x')`` and its derivative along the curve, so no
    interpolation is involved.  ``derivatives`` accepts grid times only.
    """

    M: object
    p: np.ndarray
    v: np.ndarray
    t_end: float = 1.0
    h: float = DEFAULT_STEP
    _xs: list = field(default=None, repr=False)
    _vs: list = field(default=None, repr=False)

    def __post_init__(self):
        mf = ChartMetric(self.M)
        y = np.asarray(self.p, dtype=float)
        v = np.asarray(self.v, dtype=float)
        xs, vs = [y], [v]
        h = self.h
        for k in range(int(round(self.t_end / h))):
            try:
                k1y, k1v = geodesic_rhs(mf, y, v)
                k2y, k2v = geodesic_rhs(mf, y + 0.5 * h * k1y, v + 0.5 * h * k1v)
                k3y, k3v = geodesic_rhs(mf, y + 0.5 * h * k2y, v + 0.5 * h * k2v)
                k4y, k4v = geodesic_rhs(mf, y + h * k3y, v + h * k3v)
            except OutsideChart:
                raise ChartExit(k * h) from None
            y = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
            v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            xs.append(y)
            vs.append(v)
        self._xs, self._vs = xs, vs

    def derivatives(self, t):
        k = int(round(t / self.h))
        if not (0 <= k < len(self._xs)) or abs(k * self.h - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a grid time of this geodesic")
        x, x1 = self._xs[k], self._vs[k]
        gam = christoffel_jet(self.M.metric_jet(self.M.check_point(x), 2))
        g0, dg = jets.value(gam), gam.grad
        x2 = -np.einsum("lij,i,j->l", g0, x1, x1)
        x3 = -np.einsum("alij,a,i,j->l", dg, x1, x1, x1) - 2 * np.einsum("lij,i,j->l", g0, x2, x1)
        return x.copy(), x1.copy(), x2, x3


# -- residuals along lifted curves ------------------------------------------------------

@dataclass(frozen=True)
class LiftSample:
    """Acceleration of the lifted curve at one parameter value.

    ``oracle`` and ``closed`` are the two evaluations of ``nabla_T T``;
    ``residual_a`` and ``residual_b`` are the g-norms of the horizontal and
    vertical parts of the closed form, and ``oracle_norm`` is the bundle
    norm of the oracle value.
    """

    t: float
    oracle: LiftDecomposition
    closed: LiftDecomposition
    oracle_norm: float
    residual_a: float
    residual_b: float


def _closed_acceleration(M, f, x, x1, x2, x3):
    gam = christoffel_jet(M.metric_jet(x, 2))
    g0, dg = jets.value(gam), gam.grad
    g = M.metric(x)
    R = riemann(ChartMetric(M), x)
    fj = f.jet(x, 1)
    fv, df = float(fj.value), np.asarray(fj.grad, dtype=float)
    grad_f = np.linalg.solve(g, df)
    y = x1
    acc = x2 + np.einsum("kij,i,j->k", g0, x1, x1)            # nabla_{x'} x'
    w = x2 + np.einsum("kij,i,j->k", g0, x1, y)               # nabla_{x'} y with y = x'
    dw = x3 + np.einsum("akij,a,i,j->k", dg, x1, x1, y) + np.einsum("kij,i,j->k", g0, x2, y) \
        + np.einsum("kij,i,j->k", g0, x1, x2)
    ww = dw + np.einsum("kij,i,j->k", g0, x1, w)              # nabla_{x'} nabla_{x'} y
    a_f = (2 * (df @ x1) * x1 - (x1 @ g @ x1) * grad_f) / (2 * fv)
    hor = acc + a_f + np.einsum("lijk,i,j,k->l", R, y, w, x1) / fv
    return LiftDecomposition(hor, ww), g


def lift_residual(metric, curve, t_samples):
    """Acceleration of the lift ``(x(t), x'(t))`` of ``curve`` at each sample time.

    Parameters
    ----------
    metric : BundleMetric
    curve : BaseCurve
    t_samples : iterable of float

    Returns
    -------
    list of LiftSample
    """
    M, f = metric.M, metric.f
    out = []
    for t in t_samples:
        x, x1, x2, x3 = curve.derivatives(t)
        x = M.check_point(x)
        pos = np.concatenate([x, x1])
        vel = np.concatenate([x1, x2])
        acc = np.concatenate([x2, x3])
        gam_hat = christoffel(metric, pos)
        a = acc + np.einsum("kij,i,j->k", gam_hat, vel, vel)
        N = np.einsum("aib,b->ai", christoffel(ChartMetric(M), x), x1)
        m = M.m
        oracle = LiftDecomposition(a[:m].copy(), a[m:] + N @ a[:m])
        G = metric.matrix(pos)
        closed, g = _closed_acceleration(M, f, x, x1, x2, x3)
        out.append(LiftSample(
            float(t), oracle, closed, math.sqrt(max(float(a @ G @ a), 0.0)),
            math.sqrt(max(float(closed.hor @ g @ closed.hor), 0.0)),
            math.sqrt(max(float(closed.ver @ g @ closed.ver), 0.0))))
    return out


# -- probes of the geodesic statements --------------------------------------------------

@dataclass(frozen=True)
class SpeedReport:
    """Result of :func:`constant_speed_check`.

    ``applicable`` is False when ``|u|`` drifts by more than ``tol``
    (relative), in which case ``residuals`` is empty.
    """

    applicable: bool
    speed_drift: float
    residuals: tuple


def _base_acceleration(metric, state):
    """``x''`` of the bundle geodesic through ``state``."""
    _, dv = geodesic_rhs(metric, state.position, state.velocity)
    return dv[: metric.M.m]


def constant_speed_check(metric, traj, tol=1e-6):
    """Residual ``|nabla_{x'}x' + A_f(x', x')|`` along a geodesic with constant ``|u|``."""
    M, f = metric.M, metric.f
    speeds = np.array([math.sqrt(s.u @ M.metric(s.x) @ s.u) for s in traj.states])
    drift = float(np.max(np.abs(speeds - speeds[0])) / max(speeds[0], 1e-300))
    if drift > tol:
        return SpeedReport(False, drift, ())
    res = []
    for s in traj.states:
        x1 = s.xdot
        x2 = _base_acceleration(metric, s)
        g = M.metric(s.x)
        gam = christoffel(ChartMetric(M), s.x)
        fj = f.jet(s.x, 1)
        df = np.asarray(fj.grad, dtype=float)
        a_f = (2 * (df @ x1) * x1 - (x1 @ g @ x1) * np.linalg.solve(g, df)) / (2 * float(fj.value))
        r = x2 + np.einsum("kij,i,j->k", gam, x1, x1) + a_f
        res.append(math.sqrt(max(float(r @ g @ r), 0.0)))
    return SpeedReport(True, drift, tuple(res))


@dataclass(frozen=True)
class ProbeReport:
    """Lift residuals of two base geodesics through one point, and ``|grad f|`` there."""

    residual_1: float
    residual_2: float
    grad_f_norm: float

    def violation(self, floor=1e-9):
        """Nonzero only if both lifts are geodesic while ``grad f`` is not zero."""
        if self.residual_1 <= floor and self.residual_2 <= floor:
            return self.grad_f_norm
        return 0.0


def two_geodesic_probe(M, f, p, v1, v2, t_end=0.1, h=1e-2):
    """Check the two-geodesic statement numerically at ``p``.

    Raises
    ------
    ParallelVectors
        If ``v1`` and ``v2`` are (nearly) parallel.
    """
    p = M.check_point(p)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    g = M.metric(p)
    a, b, c = v1 @ g @ v1, v2 @ g @ v2, v1 @ g @ v2
    if not (a > 0 and b > 0) or (a * b - c * c) / (a * b) < PARALLEL_THRESHOLD:
        raise ParallelVectors("initial vectors are parallel (normalised Gram determinant below 1e-10)")
    metric = BundleMetric(Variant.SASAKI, M, f)
    res = []
    for v in (v1, v2):
        curve = BaseGeodesic(M, p, v, t_end, h)
        samples = lift_residual(metric, curve, [k * h for k in range(int(round(t_end / h)) + 1)])
        res.append(max(s.residual_a for s in samples))
    df = np.asarray(f.jet(p, 1).grad, dtype=float)
    grad_norm = math.sqrt(max(float(df @ np.linalg.solve(g, df)), 0.0))
    return ProbeReport(res[0], res[1], grad_norm)


def submersion_check(metric, traj):
    """g-norm of the base acceleration ``x'' + Gamma(x', x')`` of the projected curve."""
    M = metric.M
    out = []
    for s in traj.states:
        x2 = _base_acceleration(metric, s)
        r = x2 + np.einsum("kij,i,j->k", christoffel(ChartMetric(M), s.x), s.xdot, s.xdot)
        g = M.metric(s.x)
        out.append(math.sqrt(max(float(r @ g @ r), 0.0)))
    return np.array(out)

"""Adjudication of the closed-form statements against the brute-force oracle.

Every registered item compares a claimed value ``a`` with a reference ``b``
at a set of seeded samples.  For one comparison ``abs = max|a - b|``; it is
treated as exact when ``abs <= ABS_FLOOR`` and otherwise contributes
``rel = abs / max|b|``.  An item is CONFIRMED when the largest ``rel`` is at
most its tolerance.  Items whose hypotheses do not hold for the configured
manifold are NOT_APPLICABLE, and an exception inside an item turns it into
ERROR without stopping the run.

Items flagged ``must`` decide the exit status of :func:`run_suite` callers:
the run passes when every such item is CONFIRMED or NOT_APPLICABLE.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import numpy as np

from . import cheeger_gromoll as cg
from . import geodesics as gd
from . import jets
from . import sasaki as sk
from .bundle import BundleMetric, LiftDecomposition, Variant
from .errors import ConfigError, GeometryError
from .local import LocalGeometry
from .manifold import ScalingField, resolve_manifold
from .oracle import BundleOracle
from .sampling import sample_stream

SCHEMA = 1
DEFAULT_TOL = 1e-6
ABS_FLOOR = 1e-9
FLAT_THRESHOLD = 1e-12
UNFLAT_THRESHOLD = 1e-3
SWEEP_GRID = (0.0, 1.0, 2.0, 4.0)

CONFIRMED = "CONFIRMED"
DEVIATION = "DEVIATION"
NOT_APPLICABLE = "NOT_APPLICABLE"
ERROR = "ERROR"

SASAKI = Variant.SASAKI
CG = Variant.CHEEGER_GROMOLL


class NotApplicable(Exception):
    """Raised by an evaluator when the item's hypotheses do not hold."""


# -- configuration ----------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    manifold: str = "sphere_stereo(1)"
    f: str = "1"
    seed: int = 42
    samples: int = 20
    tol: float = DEFAULT_TOL
    variants: tuple = ("sasaki", "cg")
    suite: str = "all"

    def validate(self):
        if self.samples < 1:
            raise ConfigError(f"samples must be at least 1, got {self.samples}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        try:
            for v in self.variants:
                Variant.parse(v)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.suite != "all" and self.suite not in GROUPS:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {['all', *GROUPS]}")
        try:
            M = resolve_manifold(self.manifold)
            f = ScalingField.parse(self.f, M.m)
        except GeometryError as exc:
            raise ConfigError(str(exc)) from None
        return M, f

    def as_dict(self):
        return {"manifold": self.manifold, "f": self.f, "seed": int(self.seed),
                "samples": int(self.samples), "tol": self.tol,
                "variants": [Variant.parse(v).value for v in self.variants], "suite": self.suite}


# -- run context with per-sample caches ----------------------------------------------

class RunContext:
    def __init__(self, cfg):
        self.cfg = cfg
        self.M, self.f = cfg.validate()
        self.f1 = ScalingField.parse("1", self.M.m)
        self.variants = {Variant.parse(v) for v in cfg.variants}
        self.samples = list(sample_stream(int(cfg.seed), self.M, int(cfg.samples)))
        self._geo = {}
        self._oracle = {}
        self._flat = None

    def field(self, one):
        return self.f1 if one else self.f

    def geo(self, s, one=False):
        key = (s.index, one)
        if key not in self._geo:
            self._geo[key] = LocalGeometry(self.M, self.field(one), s.tp)
        return self._geo[key]

    def oracle(self, variant, s, one=False):
        key = (variant, s.index, one)
        if key not in self._oracle:
            self._oracle[key] = BundleOracle(BundleMetric(variant, self.M, self.field(one)), s.tp)
        return self._oracle[key]

    def require(self, variant):
        if variant not in self.variants:
            raise NotApplicable(f"variant {variant.value} not selected")

    def base_is_flat(self):
        if self._flat is None:
            self._flat = all(np.abs(self.geo(s).R).max() <= FLAT_THRESHOLD for s in self.samples)
        return self._flat


# -- adjudication ------------------------------------------------------------------------

class Collector:
    """Accumulates (claimed, reference) pairs for one item."""

    def __init__(self):
        self.rows = []
        self.detail = None

    def add(self, sample, a, b, case=None):
        a = np.atleast_1d(np.asarray(a, dtype=float)).ravel()
        b = np.atleast_1d(np.asarray(b, dtype=float)).ravel()
        self.rows.append((sample, case, a, b))


def _compare(a, b):
    abs_err = float(np.max(np.abs(a - b))) if a.size else 0.0
    if not math.isfinite(abs_err):
        return abs_err, math.inf
    if abs_err <= ABS_FLOOR:
        return abs_err, 0.0
    scale = float(np.max(np.abs(b))) if b.size else 0.0
    return abs_err, (abs_err / scale if scale > 0 else math.inf)


@dataclass
class ItemResult:
    id: str
    status: str
    must: bool
    tol: float
    max_abs_err: float = 0.0
    max_rel_err: float = 0.0
    n_samples: int = 0
    worst_sample: dict = None
    note: str = ""
    detail: dict = None

    def as_dict(self):
        d = {"id": self.id, "status": self.status, "must_confirm": self.must,
             "max_abs_err": _num(self.max_abs_err), "max_rel_err": _num(self.max_rel_err),
             "tol": self.tol, "n_samples": self.n_samples, "worst_sample": self.worst_sample}
        if self.note:
            d["note"] = self.note
        if self.detail is not None:
            d["detail"] = self.detail
        return d


def _num(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "nan")


def adjudicate(entry, collector, tol):
    if not collector.rows:
        raise NotApplicable("no comparisons were produced")
    worst = None
    max_abs = max_rel = 0.0
    seen = set()
    for sample, case, a, b in collector.rows:
        if a.shape != b.shape:
            raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
        ae, re_ = _compare(a, b)
        seen.add(sample.index if sample is not None else None)
        if worst is None or re_ > max_rel or (re_ == max_rel and ae > max_abs and max_rel == 0.0):
            worst = (sample, case)
        max_abs = max(max_abs, ae)
        max_rel = max(max_rel, re_)
    sample, case = worst
    desc = sample.descriptor() if sample is not None else {}
    if case is not None:
        desc["case"] = case
    status = CONFIRMED if max_rel <= tol else DEVIATION
    return ItemResult(entry.id, status, entry.must, tol, max_abs, max_rel, len(seen), desc,
                      entry.note, collector.detail)


# -- registry ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    id: str
    group: str
    must: bool
    fn: Callable
    tol: float = None
    note: str = ""


REGISTRY = []
GROUPS = ("oracle", "natural", "sasaki", "cg", "geodesics")


def register(id, must=False, tol=None, note=""):
    def deco(fn):
        REGISTRY.append(Entry(id, id.split(".")[0], must, fn, tol, note))
        return fn
    return deco


def _variants(ctx):
    chosen = [v for v in (SASAKI, CG) if v in ctx.variants]
    if not chosen:
        raise NotApplicable("no bundle variant selected")
    return chosen


def _bundle_vector(o, lift):
    return o.h(lift.hor) + o.v(lift.ver)


# oracle self-checks

@register("oracle.torsion_free", must=True)
def _oracle_torsion(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o = ctx.oracle(var, s)
            X, Y, _ = s.vectors
            for p in ("hh", "hv", "vh", "vv"):
                A, B = o.lift_field(p[0], X), o.lift_field(p[1], Y)
                a = o.nabla(jets.value(A), B) - o.nabla(jets.value(B), A)
                col.add(s, a, o.bracket(A, B), f"{var.value}:{p}")


@register("oracle.metric_compatibility", must=True)
def _oracle_compat(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o = ctx.oracle(var, s)
            low = np.einsum("lij,lk->ijk", o.gamma, o.G)
            col.add(s, o.g_jet.grad, low + low.transpose(0, 2, 1), var.value)


@register("oracle.first_bianchi", must=True)
def _oracle_bianchi(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            R = ctx.oracle(var, s).R
            col.add(s, R + R.transpose(0, 2, 3, 1), -R.transpose(0, 3, 1, 2), var.value)


@register("oracle.bracket_identity", must=True)
def _oracle_bracket(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o, geo = ctx.oracle(var, s), ctx.geo(s)
            X, Y, _ = s.vectors
            expected = {"hh": LiftDecomposition.vertical(-geo.curv(X, Y, geo.u)),
                        "hv": LiftDecomposition.vertical(geo.cov(X, Y)),
                        "vv": LiftDecomposition.vertical(np.zeros(geo.m))}
            for p, want in expected.items():
                got = o.decompose(o.bracket(o.lift_field(p[0], X), o.lift_field(p[1], Y)))
                col.add(s, got.stacked(), want.stacked(), f"{var.value}:{p}")


@register("oracle.pair_symmetry")
def _oracle_pair(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o = ctx.oracle(var, s)
            Rlow = np.einsum("lp,pijk->lijk", o.G, o.R)
            col.add(s, Rlow, Rlow.transpose(2, 3, 0, 1), var.value)


# natural metrics

@register("natural.def2.1.submersion")
def _nat_submersion(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o, geo = ctx.oracle(var, s), ctx.geo(s)
            X, Y, _ = s.vectors
            col.add(s, o.inner(o.h(X), o.h(Y)), geo.f * geo.inner(X, Y), var.value)


@register("natural.def2.1.hv_orthogonal")
def _nat_orth(ctx, col):
    for var in _variants(ctx):
        for s in ctx.samples:
            o = ctx.oracle(var, s)
            X, Y, _ = s.vectors
            col.add(s, [o.inner(o.h(X), o.v(Y)), o.inner(o.v(X), o.h(Y))], [0.0, 0.0], var.value)


def _koszul_sides(geo, o, var, rel, X, Y, Z):
    """Left side (from the oracle) and right side of one natural-metric relation."""
    V = lambda a, b: geo.vertical_pairing(var, a, b)
    Xh = lambda W, a, b: geo.derivative(W, geo.vertical_pairing_field(var, a, b))
    Xv = lambda W, a, b: geo.vertical_pairing_fibre_derivative(var, W, a, b)
    f, u, df = geo.f, geo.u, geo.df
    R, cov, g = geo.curv, geo.cov, geo.inner
    pattern = {"i": "hh", "ii": "hh", "iii": "hv", "iv": "hv",
               "v": "vh", "vi": "vh", "vii": "vv", "viii": "vv", "viii.printed": "vv"}[rel]
    target = "h" if rel in ("i", "iii", "v", "vii") else "v"
    conn = o.lifted_connection(pattern, X, Y)
    lhs = g(conn.hor, Z) if target == "h" else V(conn.ver, Z)
    if rel == "i":
        rhs = (df @ X * g(Y, Z) + df @ Y * g(Z, X) - df @ Z * g(X, Y)) / (2 * f) + g(cov(X, Y), Z)
    elif rel == "ii":
        rhs = -0.5 * V(R(X, Y, u), Z)
    elif rel == "iii":
        rhs = V(R(X, Z, u), Y) / (2 * f)
    elif rel == "iv":
        rhs = 0.5 * (Xh(X, Y, Z) - V(Y, cov(X, Z)) + V(Z, cov(X, Y)))
    elif rel == "v":
        rhs = V(R(Y, Z, u), X) / (2 * f)
    elif rel == "vi":
        rhs = 0.5 * (Xh(Y, Z, X) - V(X, cov(Y, Z)) - V(Z, cov(Y, X)))
    elif rel == "vii":
        rhs = (-Xh(Z, X, Y) + V(Y, cov(Z, X)) + V(X, cov(Z, Y))) / (2 * f)
    elif rel == "viii":
        rhs = 0.5 * (Xv(X, Y, Z) + Xv(Y, Z, X) - Xv(Z, X, Y))
    else:
        rhs = 0.5 * (Xv(X, X, Z) + Xv(Y, Z, X) - Xv(Y, X, Y))
    return lhs, rhs


def _natural_item(rel):
    def fn(ctx, col):
        for var in _variants(ctx):
            for s in ctx.samples:
                X, Y, Z = s.vectors
                lhs, rhs = _koszul_sides(ctx.geo(s), ctx.oracle(var, s), var, rel, X, Y, Z)
                col.add(s, rhs, lhs, var.value)
    return fn


for _rel in ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii"):
    register(f"natural.lemma2.2.{_rel}", must=True,
             note=("fibre-derivative terms taken as X^v g(Y,Z) + Y^v g(Z,X) - Z^v g(X,Y)"
                   if _rel == "viii" else ""))(_natural_item(_rel))
register("natural.lemma2.2.viii.printed",
         note="fibre-derivative terms exactly as displayed")(_natural_item("viii.printed"))


# rescaled Sasaki

_ROMAN = ("i", "ii", "iii", "iv", "v", "vi")
_SK_CONN = dict(zip(_ROMAN, sk.CONNECTION_PATTERNS))


def _connection_item(module, variant, pattern, one):
    def fn(ctx, col):
        ctx.require(variant)
        for s in ctx.samples:
            X, Y, _ = s.vectors
            a = module.connection(ctx.geo(s, one), pattern, X, Y)
            b = ctx.oracle(variant, s, one).lifted_connection(pattern, X, Y)
            col.add(s, a.stacked(), b.stacked(), pattern)
    return fn


for _r, _p in _SK_CONN.items():
    register(f"sasaki.prop3.2.{_r}", must=True)(_connection_item(sk, SASAKI, _p, False))
    register(f"sasaki.prop3.2.{_r}.f1", must=True)(_connection_item(sk, SASAKI, _p, True))


def _curvature_item(module, variant, pattern, **kw):
    def fn(ctx, col):
        ctx.require(variant)
        for s in ctx.samples:
            X, Y, Z = s.vectors
            a = module.curvature(ctx.geo(s), pattern, X, Y, Z, **kw)
            b = ctx.oracle(variant, s).lifted_curvature(pattern, X, Y, Z)
            col.add(s, a.stacked(), b.stacked(), pattern)
    return fn


for _r, _p in zip(_ROMAN, ("vvv", "hvv", "vvh", "hvh", "hhv", "hhh")):
    register(f"sasaki.prop3.4.{_r}",
             note=("second line read with R(u,X)(R(u,Y)Z)" if _r == "iii" else
                   "derivation form of the vertical part" if _r == "iv" else ""))(
        _curvature_item(sk, SASAKI, _p))
register("sasaki.prop3.4.iv.statement", note="vertical part as in the statement")(
    _curvature_item(sk, SASAKI, "hvh", form="statement"))


def _antisymmetry_item(module, variant, pairs):
    def fn(ctx, col):
        ctx.require(variant)
        for s in ctx.samples:
            X, Y, Z = s.vectors
            geo = ctx.geo(s)
            for p, q in pairs:
                a = module.curvature(geo, p, X, Y, Z)
                b = -module.curvature(geo, q, Y, X, Z)
                col.add(s, a.stacked(), b.stacked(), f"{p}/{q}")
    return fn


_PAIRS = (("hhh", "hhh"), ("hhv", "hhv"), ("vvh", "vvh"), ("vvv", "vvv"),
          ("hvv", "vhv"), ("hvh", "vhh"))
register("sasaki.prop3.4.antisymmetry", tol=1e-9)(_antisymmetry_item(sk, SASAKI, _PAIRS))


def _flat_and_constant(ctx):
    return ctx.base_is_flat() and ctx.f.is_constant


@register("sasaki.thm3.5.forward", must=True)
def _thm35(ctx, col):
    ctx.require(SASAKI)
    if not _flat_and_constant(ctx):
        raise NotApplicable("needs a flat base and constant f")
    for s in ctx.samples:
        R = ctx.oracle(SASAKI, s).R
        col.add(s, R, np.zeros_like(R))


@register("sasaki.cor3.6.unflat")
def _cor36(ctx, col):
    ctx.require(SASAKI)
    if _flat_and_constant(ctx):
        raise NotApplicable("the base is flat and f is constant")
    probe = sk.flatness_probe(ctx.M, ctx.f, [s.tp for s in ctx.samples])
    s, val, idx = ctx.samples[probe.index], probe.max_abs, list(probe.component)
    col.detail = {"sample": s.index, "component": idx, "value": val, "threshold": UNFLAT_THRESHOLD}
    col.add(s, max(0.0, UNFLAT_THRESHOLD - val), 0.0, f"R{idx}")


def _sectional_item(module, variant, pattern, **kw):
    def fn(ctx, col):
        ctx.require(variant)
        for s in ctx.samples:
            o = ctx.oracle(variant, s)
            e1, e2 = s.frame[0], s.frame[1]
            a = module.sectional(ctx.geo(s), pattern, e1, e2, **kw)
            col.add(s, a, o.sectional(o.lift(pattern[0], e1), o.lift(pattern[1], e2)), pattern)
    return fn


for _r, _p in zip(("i", "ii", "iii"), ("vv", "hv", "hh")):
    register(f"sasaki.prop3.7.{_r}")(_sectional_item(sk, SASAKI, _p))


@register("sasaki.thm3.8.sweep", note="oracle hh sectional with u scaled by t in {0,1,2,4}")
def _thm38(ctx, col):
    ctx.require(SASAKI)
    if ctx.base_is_flat():
        raise NotApplicable("the base is flat")
    metric = BundleMetric(SASAKI, ctx.M, ctx.f)
    series = []
    for s in ctx.samples:
        e1, e2 = s.frame[0], s.frame[1]
        vals = []
        for t in SWEEP_GRID:
            o = BundleOracle(metric, type(s.tp)(s.tp.x, t * s.tp.u))
            vals.append(o.sectional(o.h(e1), o.h(e2)))
        series.append(vals)
        tail = [vals[k + 1] - vals[k] for k in range(1, len(vals) - 1)]
        violation = max((0.0 if d < 0 else 1.0 + d) for d in tail)
        col.add(s, violation, 0.0, "tail")
    col.detail = {"t_grid": list(SWEEP_GRID), "first_series": series[0]}


@register("sasaki.prop3.9")
def _prop39(ctx, col):
    ctx.require(SASAKI)
    for s in ctx.samples:
        col.add(s, sk.scalar(ctx.geo(s), s.frame), ctx.oracle(SASAKI, s).scalar())


@register("sasaki.prop3.9.consistency", tol=1e-9)
def _prop39c(ctx, col):
    ctx.require(SASAKI)
    for s in ctx.samples:
        geo = ctx.geo(s)
        col.add(s, sk.scalar(geo, s.frame), sk.scalar_from_sectionals(geo, s.frame))


# rescaled Cheeger-Gromoll

@register("cg.canonical_U", tol=1e-12)
def _cg_U(ctx, col):
    ctx.require(CG)
    for s in ctx.samples:
        o, geo = ctx.oracle(CG, s), ctx.geo(s)
        for k, X in enumerate(s.vectors):
            col.add(s, o.inner(o.v(X), o.v(geo.u)), geo.inner(X, geo.u), f"vector {k}")


for _r, _p in _SK_CONN.items():
    register(f"cg.prop5.2.{_r}", must=True)(_connection_item(cg, CG, _p, False))
    register(f"cg.prop5.2.{_r}.f1", must=True)(_connection_item(cg, CG, _p, True))

for _r, _p in zip(_ROMAN, ("hhh", "hhv", "hvh", "hvv", "vvh", "vvv")):
    register(f"cg.prop5.4.{_r}",
             note="first covariant derivative taken along Z as displayed" if _r == "ii" else "")(
        _curvature_item(cg, CG, _p))


@register("cg.prop5.4.antisymmetry", tol=1e-9)
def _cg_anti(ctx, col):
    _antisymmetry_item(cg, CG, _PAIRS)(ctx, col)


def _q_item(pattern):
    def fn(ctx, col):
        ctx.require(CG)
        for s in ctx.samples:
            o = ctx.oracle(CG, s)
            e1, e2 = s.frame[0], s.frame[1]
            A, B = o.lift(pattern[0], e1), o.lift(pattern[1], e2)
            direct = o.inner(A, A) * o.inner(B, B) - o.inner(A, B) ** 2
            col.add(s, cg.q_area(ctx.geo(s), pattern, e1, e2), direct, pattern)
    return fn


def _g_item(pattern):
    def fn(ctx, col):
        ctx.require(CG)
        for s in ctx.samples:
            o = ctx.oracle(CG, s)
            e1, e2 = s.frame[0], s.frame[1]
            A, B = o.lift(pattern[0], e1), o.lift(pattern[1], e2)
            col.add(s, cg.g_form(ctx.geo(s), pattern, e1, e2), o.inner(o.curvature(A, B, B), A), pattern)
    return fn


for _r, _p in zip(("i", "ii", "iii"), ("hh", "hv", "vv")):
    register(f"cg.lemma5.5.{_r}", must=True, tol=1e-10)(_q_item(_p))
for _r, _p in zip(("i", "ii", "iii"), ("hh", "hv", "vv")):
    register(f"cg.lemma5.6.{_r}", note="rescaling term taken as L_f" if _r == "i" else "")(_g_item(_p))

register("cg.prop5.7.i", note="coefficient 3/(4 alpha f^4) as displayed; rescaling term taken as L_f")(
    _sectional_item(cg, CG, "hh"))
register("cg.prop5.7.i.alpha2", note="coefficient 3/(4 alpha^2 f^4)")(
    _sectional_item(cg, CG, "hh", reading="alpha2"))
register("cg.prop5.7.ii")(_sectional_item(cg, CG, "hv"))
register("cg.prop5.7.iii")(_sectional_item(cg, CG, "vv"))


def _division_item(readings):
    def fn(ctx, col):
        ctx.require(CG)
        for s in ctx.samples:
            geo = ctx.geo(s)
            e1, e2 = s.frame[0], s.frame[1]
            for p, reading in readings:
                a = cg.sectional(geo, p, e1, e2, reading=reading)
                col.add(s, a, cg.g_form(geo, p, e1, e2) / cg.q_area(geo, p, e1, e2), f"{p}:{reading}")
    return fn


register("cg.prop5.7.consistency", tol=1e-9,
         note="hh uses the 3/(4 alpha^2 f^4) coefficient")(
    _division_item((("hh", "alpha2"), ("hv", "printed"), ("vv", "printed"))))
register("cg.prop5.7.i.printed_consistency", tol=1e-9,
         note="hh with the displayed 3/(4 alpha f^4) coefficient")(_division_item((("hh", "printed"),)))


def _kappa_args(ctx, s, pattern):
    geo = ctx.geo(s)
    e1, e2 = s.frame[0], s.frame[1]
    lv = cg.l_tilde(geo, e1, e2) if pattern == "hh" else 0.0
    return (ctx.M.kappa, geo.f, geo.inner(e1, geo.u), geo.inner(e2, geo.u), geo.alpha, pattern, lv)


def _require_kappa(ctx):
    ctx.require(CG)
    if ctx.M.kappa is None:
        raise NotApplicable("the manifold declares no constant curvature")


def _kappa_item(pattern):
    def fn(ctx, col):
        _require_kappa(ctx)
        for s in ctx.samples:
            o = ctx.oracle(CG, s)
            e1, e2 = s.frame[0], s.frame[1]
            b = o.sectional(o.lift(pattern[0], e1), o.lift(pattern[1], e2))
            col.add(s, cg.sectional_constant_kappa(*_kappa_args(ctx, s, pattern)), b, pattern)
    return fn


for _r, _p in zip(("i", "ii", "iii"), ("hh", "hv", "vv")):
    register(f"cg.prop5.8.{_r}")(_kappa_item(_p))


@register("cg.prop5.8.consistency", tol=1e-9)
def _kappa_consistency(ctx, col):
    _require_kappa(ctx)
    for s in ctx.samples:
        geo = ctx.geo(s)
        for p in cg.SECTIONAL_PATTERNS:
            a = cg.sectional_constant_kappa(*_kappa_args(ctx, s, p))
            col.add(s, a, cg.sectional(geo, p, s.frame[0], s.frame[1]), p)


@register("cg.lemma5.11.frame", tol=1e-10, note="horizontal members scaled by 1/sqrt(f)")
def _frame(ctx, col):
    ctx.require(CG)
    for s in ctx.samples:
        o = ctx.oracle(CG, s)
        _, frame = cg.adapted_frame(ctx.geo(s))
        T = np.array([_bundle_vector(o, t) for t in frame])
        col.add(s, T @ o.G @ T.T, np.eye(len(frame)))


def _frame_pairs(m, kind):
    if kind == "i":
        return [(i, j) for i in range(m) for j in range(i + 1, m)]
    if kind == "ii":
        return [(i, m) for i in range(m)]
    if kind == "iii":
        return [(i, m + k) for i in range(m) for k in range(1, m)]
    if kind == "iv":
        return [(m, m + k) for k in range(1, m)]
    return [(m + k, m + l) for k in range(1, m) for l in range(k + 1, m)]


def _frame_sectional_item(kind):
    def fn(ctx, col):
        ctx.require(CG)
        pairs = _frame_pairs(ctx.M.m, kind)
        if not pairs:
            raise NotApplicable(f"no frame pairs of this kind for m = {ctx.M.m}")
        for s in ctx.samples:
            o, geo = ctx.oracle(CG, s), ctx.geo(s)
            e, frame = cg.adapted_frame(geo)
            for i, j in pairs:
                b = o.sectional(_bundle_vector(o, frame[i]), _bundle_vector(o, frame[j]))
                col.add(s, cg.frame_sectional(geo, i, j, e), b, f"t{i + 1},t{j + 1}")
    return fn


for _r in ("i", "ii", "iii", "iv", "v"):
    register(f"cg.lemma5.11.{_r}")(_frame_sectional_item(_r))


@register("cg.prop5.12", note="base term S_p as displayed; rescaling term taken as L_f")
def _prop512(ctx, col):
    ctx.require(CG)
    for s in ctx.samples:
        col.add(s, cg.scalar(ctx.geo(s)), ctx.oracle(CG, s).scalar())


@register("cg.prop5.12.base_over_f", note="base term S_p / f")
def _prop512f(ctx, col):
    ctx.require(CG)
    for s in ctx.samples:
        col.add(s, cg.scalar(ctx.geo(s), base_over_f=True), ctx.oracle(CG, s).scalar())


# geodesics

GEO_STEP = 1e-3
CIRCLE_RADIUS = 0.05
ENERGY_TRAJECTORIES = 2
PROBE_SAMPLES = 5


def _sasaki_metric(ctx):
    ctx.require(SASAKI)
    return BundleMetric(SASAKI, ctx.M, ctx.f)


def _start(s, scale=0.2):
    """A modest start state near the sample, kept well inside the chart box."""
    return gd.BundleState(0.5 * s.tp.x, 0.5 * s.tp.u, scale * s.frame[0], scale * s.vectors[0])


@register("geodesics.eq4.1", note="lifted coordinate circles and lines, y = x'")
def _eq41(ctx, col):
    metric = _sasaki_metric(ctx)
    for s in ctx.samples:
        x = s.tp.x
        e0 = np.zeros(ctx.M.m)
        e0[0] = 1.0
        curves = {"circle": gd.CoordinateCircle(x - CIRCLE_RADIUS * e0, CIRCLE_RADIUS, 0, 1, 3.0),
                  "line": gd.Line(x, s.vectors[0])}
        for name, c in curves.items():
            r = gd.lift_residual(metric, c, [0.0])[0]
            col.add(s, r.closed.stacked(), r.oracle.stacked(), name)


@register("geodesics.eq4.2.lift_residual", note="lifted base geodesics; residuals (a) and (b)")
def _eq42(ctx, col):
    metric = _sasaki_metric(ctx)
    for s in ctx.samples[:PROBE_SAMPLES]:
        x = 0.5 * s.tp.x
        curve = gd.BaseGeodesic(ctx.M, x, 0.3 * s.frame[0], 0.1, 0.01)
        for r in gd.lift_residual(metric, curve, [0.0, 0.05, 0.1]):
            g = ctx.M.metric(curve.derivatives(r.t)[0])
            ref = [math.sqrt(max(r.oracle.hor @ g @ r.oracle.hor, 0.0)),
                   math.sqrt(max(r.oracle.ver @ g @ r.oracle.ver, 0.0))]
            col.add(s, [r.residual_a, r.residual_b], ref, f"t={r.t:g}")


@register("geodesics.energy", must=True, note="RK4, h = 1e-3 over unit time")
def _energy(ctx, col):
    metric = _sasaki_metric(ctx)
    for s in ctx.samples[:ENERGY_TRAJECTORIES]:
        traj = gd.integrate(metric, _start(s), 1.0, GEO_STEP)
        e = np.asarray(traj.energies)
        col.add(s, e, np.full_like(e, e[0]))


@register("geodesics.cor4.2", note="horizontal start state")
def _cor42(ctx, col):
    metric = _sasaki_metric(ctx)
    applicable = False
    for s in ctx.samples[:ENERGY_TRAJECTORIES]:
        st = _start(s)
        traj = gd.integrate(metric, gd.horizontal_start(ctx.M, st.x, st.u, st.xdot), 0.2, GEO_STEP)
        rep = gd.constant_speed_check(metric, traj)
        if rep.applicable:
            applicable = True
            col.add(s, rep.residuals, np.zeros(len(rep.residuals)))
    if not applicable:
        raise NotApplicable("|u| is not constant along the integrated geodesics")


@register("geodesics.thm4.3", note="violation = |grad f| when both lifts are geodesic, else 0")
def _thm43(ctx, col):
    for s in ctx.samples[:PROBE_SAMPLES]:
        ctx.require(SASAKI)
        rep = gd.two_geodesic_probe(ctx.M, ctx.f, 0.5 * s.tp.x, 0.3 * s.frame[0], 0.3 * s.frame[1])
        col.add(s, rep.violation(ABS_FLOOR), 0.0)


@register("geodesics.thm4.4.submersion", note="base acceleration of the projected geodesic")
def _thm44(ctx, col):
    metric = _sasaki_metric(ctx)
    if not ctx.base_is_flat():
        raise NotApplicable("the base is not flat")
    for s in ctx.samples[:ENERGY_TRAJECTORIES]:
        traj = gd.integrate(metric, _start(s), 0.2, GEO_STEP)
        r = gd.submersion_check(metric, traj)
        col.add(s, r, np.zeros_like(r))


REGISTRY_IDS = tuple(e.id for e in REGISTRY)


# -- running -----------------------------------------------------------------------------

def run_item(entry, ctx):
    tol = entry.tol if entry.tol is not None else ctx.cfg.tol
    col = Collector()
    try:
        entry.fn(ctx, col)
        return adjudicate(entry, col, tol)
    except NotApplicable as exc:
        return ItemResult(entry.id, NOT_APPLICABLE, entry.must, tol, note=str(exc))
    except Exception as exc:  # item-level failures never abort the suite
        return ItemResult(entry.id, ERROR, entry.must, tol, note=f"{type(exc).__name__}: {exc}")


@dataclass
class VerificationReport:
    config: dict
    items: list
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def summary(self):
        count = lambda st: sum(1 for r in self.items if r.status == st)
        return {"confirmed": count(CONFIRMED), "deviation": count(DEVIATION), "error": count(ERROR),
                "not_applicable": count(NOT_APPLICABLE)}

    @property
    def passed(self):
        return all(r.status in (CONFIRMED, NOT_APPLICABLE) for r in self.items if r.must)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def item(self, id):
        for r in self.items:
            if r.id == id:
                return r
        raise KeyError(id)

    def as_dict(self):
        return {"schema": SCHEMA, "config": self.config, "items": [r.as_dict() for r in self.items],
                "summary": self.summary, "timestamp": self.timestamp}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, allow_nan=False) + "\n"

    def to_csv(self):
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "status", "must_confirm", "max_abs_err", "max_rel_err", "tol", "n_samples", "note"])
        for r in self.items:
            w.writerow([r.id, r.status, r.must, repr(_num(r.max_abs_err)), repr(_num(r.max_rel_err)),
                        repr(r.tol), r.n_samples, r.note])
        return buf.getvalue()


def selected_entries(suite="all"):
    return [e for e in REGISTRY if suite == "all" or e.group == suite]


def run_suite(cfg):
    """Evaluate every registered item (or one group) for ``cfg``.

    Raises
    ------
    ConfigError
        If the configuration is invalid.
    """
    ctx = RunContext(cfg)
    items = [run_item(e, ctx) for e in selected_entries(cfg.suite)]
    return VerificationReport(cfg.as_dict(), items)

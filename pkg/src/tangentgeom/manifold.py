"""Charted base manifolds, scaling fields and points of the tangent bundle."""

import json
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import expr as fexpr
from . import jets
from .errors import (BadParams, ConfigError, DegenerateInput, NonPositiveScaling,
                     OutsideChart, UnknownManifold)

GRAM_SCHMIDT_PIVOT = 1e-10
CURVED_HALF_WIDTH = 0.5


@dataclass(frozen=True, eq=False)
class ChartedManifold:
    """A single chart ``box`` carrying a metric ``G(x)`` given by field expressions.

    Attributes
    ----------
    name : str
        Catalog label such as ``"sphere_stereo(1)"`` or ``"custom"``.
    m : int
        Dimension of the base.
    metric_exprs : tuple of tuple of Expr
        Parsed entries of ``G``; the matrix is symmetrised on evaluation.
    box : tuple of (float, float)
        Closed coordinate interval per axis.
    kappa : float or None
        Declared constant sectional curvature, if known.
    """

    name: str
    m: int
    metric_exprs: tuple
    box: tuple
    kappa: Optional[float] = None
    metric_texts: tuple = field(default=(), repr=False)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.m,) and all(lo <= xi <= hi for xi, (lo, hi) in zip(x, self.box))

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.m,):
            raise OutsideChart(f"expected {self.m} coordinates, got shape {x.shape}")
        if not np.all(np.isfinite(x)) or not self.contains(x):
            raise OutsideChart(f"point {x.tolist()} is outside the chart box {list(self.box)}")
        return x

    def metric_jet(self, x, order=jets.MAX_ORDER):
        """``G`` and its derivatives at ``x`` as an m x m matrix jet in m variables."""
        x = np.asarray(x, dtype=float)
        var = jets.Jet.variables(x, order)
        env = [var[i] for i in range(self.m)]
        cache = {}
        rows = []
        for row in self.metric_exprs:
            entries = []
            for node in row:
                key = id(node)
                if key not in cache:
                    cache[key] = jets.as_jet(fexpr.evaluate_with(node, env), self.m, order)
                entries.append(cache[key])
            rows.append(jets.stack(entries))
        g = jets.stack(rows)
        return 0.5 * (g + g.T)

    def metric(self, x):
        """Value of ``G(x)``."""
        env = [float(v) for v in np.asarray(x, dtype=float)]
        g = np.array([[float(fexpr.evaluate_with(node, env)) for node in row] for row in self.metric_exprs])
        return 0.5 * (g + g.T)


@dataclass(frozen=True, eq=False)
class ScalingField:
    """The positive function ``f`` rescaling horizontal lengths."""

    expr: object
    text: str

    @classmethod
    def parse(cls, text, m):
        return cls(fexpr.parse(text, m), text)

    @property
    def is_constant(self):
        return fexpr.is_constant(self.expr)

    def value(self, x):
        v = fexpr.evaluate(self.expr, x)
        if v <= 0.0:
            raise NonPositiveScaling(f"f = {v:g} at {np.asarray(x).tolist()} is not positive")
        return v

    def jet(self, x, order=jets.MAX_ORDER):
        j = fexpr.eval_jet(self.expr, x, order)
        if j.value <= 0.0:
            raise NonPositiveScaling(f"f = {float(j.value):g} at {np.asarray(x).tolist()} is not positive")
        return j


@dataclass(frozen=True, eq=False)
class TangentPoint:
    """A point ``(x, u)`` of the tangent bundle in induced coordinates."""

    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.array(self.x, dtype=float))
        object.__setattr__(self, "u", np.array(self.u, dtype=float))
        if self.x.shape != self.u.shape or self.x.ndim != 1:
            raise ValueError(f"x and u must be vectors of equal length, got {self.x.shape} and {self.u.shape}")

    def as_dict(self):
        return {"x": self.x.tolist(), "u": self.u.tolist()}


@dataclass(frozen=True)
class FiberScalars:
    r: float
    alpha: float


# -- catalog ------------------------------------------------------------------

def _squares(m):
    return " + ".join(f"x{i + 1}^2" for i in range(m))


def _conformal(name, m, factor_text, kappa, half_width=CURVED_HALF_WIDTH):
    texts = [[factor_text if i == j else "0" for j in range(m)] for i in range(m)]
    return from_texts(name, texts, [(-half_width, half_width)] * m, kappa)


def from_texts(name, texts, box, kappa=None):
    """Build a manifold from a square array of expression strings."""
    m = len(texts)
    if m < 2:
        raise BadParams(f"dimension must be at least 2, got {m}")
    if any(len(row) != m for row in texts):
        raise ConfigError("metric must be a square array of expressions")
    if len(box) != m or any(len(b) != 2 or not b[0] < b[1] for b in box):
        raise ConfigError(f"box must list {m} intervals [lo, hi] with lo < hi")
    parsed = {}
    nodes = []
    for row in texts:
        out = []
        for text in row:
            text = str(text)
            if text not in parsed:
                parsed[text] = fexpr.parse(text, m)
            out.append(parsed[text])
        nodes.append(tuple(out))
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    return ChartedManifold(name, m, tuple(nodes), box, kappa, tuple(tuple(map(str, r)) for r in texts))


def _number(p, what):
    try:
        v = float(p)
    except (TypeError, ValueError):
        raise BadParams(f"{what} must be a number, got {p!r}") from None
    if not math.isfinite(v):
        raise BadParams(f"{what} must be finite, got {p!r}")
    return v


def _dimension(p):
    v = _number(p, "dimension")
    if v != int(v) or v < 2:
        raise BadParams(f"dimension must be an integer >= 2, got {p!r}")
    return int(v)


def euclidean(m=2):
    m = _dimension(m)
    texts = [["1" if i == j else "0" for j in range(m)] for i in range(m)]
    return from_texts(f"euclidean({m})", texts, [(-1.0, 1.0)] * m, 0.0)


def sphere_stereo(radius=1.0):
    radius = _number(radius, "radius")
    if radius <= 0:
        raise BadParams(f"radius must be positive, got {radius:g}")
    factor = f"4/(1 + ({_squares(2)})/{radius!r}^2)^2"
    return _conformal(f"sphere_stereo({radius:g})", 2, factor, 1.0 / radius ** 2)


def poincare_disk():
    return _conformal("poincare_disk()", 2, f"4/(1 - ({_squares(2)}))^2", -1.0)


def space_form(kappa=1.0, m=2):
    kappa = _number(kappa, "kappa")
    m = _dimension(m)
    # the conformal factor blows up where 1 + kappa |x|^2 = 0; keep a margin on the box
    if 1.0 + min(kappa, 0.0) * m * CURVED_HALF_WIDTH ** 2 < 0.05:
        raise BadParams(f"space_form({kappa:g}, {m}) is singular on the box [-0.5, 0.5]^{m}")
    factor = f"4/(1 + ({kappa!r})*({_squares(m)}))^2"
    return _conformal(f"space_form({kappa:g},{m})", m, factor, kappa)


CATALOG = {
    "euclidean": euclidean,
    "sphere_stereo": sphere_stereo,
    "poincare_disk": poincare_disk,
    "space_form": space_form,
}


def catalog(name, *params):
    """Look up a catalog manifold by name, e.g. ``catalog("space_form", -1, 3)``."""
    if name not in CATALOG:
        raise UnknownManifold(f"unknown manifold {name!r}; choose from {sorted(CATALOG)}")
    try:
        return CATALOG[name](*params)
    except TypeError:
        raise BadParams(f"wrong number of parameters for {name}: {list(params)}") from None


_SPEC = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def parse_manifold_spec(spec):
    """Parse ``"name(p1, p2, ...)"`` and return the catalog manifold."""
    m = _SPEC.match(spec)
    if m is None:
        raise UnknownManifold(f"cannot parse manifold spec {spec!r}")
    name, args = m.group(1), m.group(2)
    params = [a.strip() for a in args.split(",")] if args and args.strip() else []
    return catalog(name, *params)


def from_json(doc):
    """Manifold from ``{"dimension", "metric", "box", "kappa"?}`` (dict or JSON text)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"metric document is not valid JSON: {exc}") from None
    try:
        m = int(doc["dimension"])
        texts = doc["metric"]
        box = doc["box"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"metric document needs dimension, metric and box: {exc}") from None
    if len(texts) != m:
        raise ConfigError(f"metric has {len(texts)} rows but dimension is {m}")
    kappa = doc.get("kappa")
    return from_texts(doc.get("name", "custom"), texts, box, None if kappa is None else float(kappa))


def resolve_manifold(spec):
    """Catalog spec ``name(...)``, inline JSON metric document, or path to a ``.json`` document."""
    text = spec.strip()
    if text.startswith("{"):
        return from_json(text)
    if text.endswith(".json"):
        try:
            with open(text, encoding="utf-8") as fh:
                return from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read metric document {text!r}: {exc}") from None
    return parse_manifold_spec(text)


# -- pointwise operations -------------------------------------------------------

def inner(M, x, v, w):
    x = M.check_point(x)
    return float(np.asarray(v, dtype=float) @ M.metric(x) @ np.asarray(w, dtype=float))


def norm_r(M, tp):
    r2 = inner(M, tp.x, tp.u, tp.u)
    return FiberScalars(math.sqrt(max(r2, 0.0)), 1.0 + r2)


def grad_f(M, f, x):
    """Metric dual of ``df``: ``G(x)^{-1} df``.

    Only the differential is used, so f need not be positive here.
    """
    x = M.check_point(x)
    return jets.inv(M.metric(x)) @ fexpr.eval_jet(f.expr, x, 1).grad


def gram_schmidt(M, x, vectors, pivot=GRAM_SCHMIDT_PIVOT):
    """G(x)-orthonormalise ``vectors`` in the given order (modified Gram-Schmidt).

    Each vector is projected twice, which keeps the result orthonormal to
    roundoff even when most of a vector cancels against earlier directions.

    Raises
    ------
    DegenerateInput
        If a vector has norm below ``pivot`` after removing earlier directions.
    """
    x = M.check_point(x)
    g = M.metric(x)
    out = []
    for k, v in enumerate(vectors):
        w = np.array(v, dtype=float)
        for _ in range(2):
            for e in out:
                w = w - (e @ g @ w) * e
        n2 = w @ g @ w
        if not n2 > pivot ** 2:
            raise DegenerateInput(f"vector {k} is (numerically) dependent on the previous ones")
        out.append(w / math.sqrt(n2))
    return out

"""Curvature and geodesics of rescaled natural metrics on tangent bundles."""

from .bundle import BundleMetric, LiftDecomposition, Variant
from .errors import GeometryError
from .local import LocalGeometry
from .manifold import ScalingField, TangentPoint, catalog, parse_manifold_spec
from .oracle import BundleOracle
from .verify import RunConfig, run_suite

__version__ = "0.1.0"

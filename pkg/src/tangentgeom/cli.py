"""Command-line interface: ``tangentgeom <subcommand> [options]``."""

import argparse
import csv
import inspect
import io
import json
import sys

import numpy as np

from . import cheeger_gromoll as cg
from . import geodesics as gd
from . import sasaki as sk
from .bundle import BundleMetric, Variant
from .errors import GeometryError
from .local import LocalGeometry
from .manifold import CATALOG, ScalingField, TangentPoint, resolve_manifold
from .oracle import BundleOracle
from .verify import GROUPS, RunConfig, run_suite

CLOSED = {Variant.SASAKI: sk, Variant.CHEEGER_GROMOLL: cg}


def _vector(text, m, what):
    vals = [float(s) for s in text.split(",") if s.strip()]
    if len(vals) != m:
        raise GeometryError(f"{what} needs {m} comma-separated numbers, got {len(vals)}")
    return np.array(vals)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--manifold", default="euclidean(2)",
                   help="catalog spec such as sphere_stereo(1), or a JSON metric document / .json path")
    p.add_argument("--f", default="1", help="scaling function expression in x1..xm")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _point_args(p, patterns=None):
    p.add_argument("--x", help="base point, comma separated (default: origin)")
    p.add_argument("--u", help="fibre vector (default: 0.5 e1)")
    p.add_argument("--variant", default="sasaki", help="sasaki or cg")
    if patterns:
        p.add_argument("--X", help="first base vector (default e1)")
        p.add_argument("--Y", help="second base vector (default e2)")
        p.add_argument("--Z", help="third base vector (default e1)")
        p.add_argument("--pattern", required=True, choices=patterns)
    p.add_argument("--mode", choices=("closed", "oracle"), default="closed")


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="tangentgeom", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common], help="list catalog manifolds")

    p = sub.add_parser("metric", parents=[common], help="bundle metric matrix at (x, u)")
    _point_args(p)

    p = sub.add_parser("curvature", parents=[common],
                       help="lifted connection (two-letter pattern) or curvature (three letters)")
    _point_args(p, sk.CONNECTION_PATTERNS + sk.CURVATURE_PATTERNS)
    p.add_argument("--form", choices=("proof", "statement"), default="proof",
                   help="rescaled-Sasaki hvh/vhh vertical part")

    p = sub.add_parser("sectional", parents=[common], help="sectional curvature of span{X^a, Y^b}")
    _point_args(p, cg.SECTIONAL_PATTERNS)
    p.add_argument("--reading", choices=cg.HH_READINGS, default="printed",
                   help="Cheeger-Gromoll hh coefficient")

    p = sub.add_parser("scalar", parents=[common], help="scalar curvature at (x, u)")
    _point_args(p)

    p = sub.add_parser("geodesic", parents=[common], help="integrate a bundle geodesic with RK4")
    p.add_argument("--start", required=True, help="x,u,xdot,udot as 4m comma-separated numbers")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--variant", default="sasaki")

    p = sub.add_parser("verify", parents=[common], help="adjudicate closed forms against the oracle")
    p.add_argument("--suite", default="all", choices=("all", *GROUPS))
    p.add_argument("--variants", default="sasaki,cg")
    return parser


# -- subcommands ---------------------------------------------------------------------------

def _setup(args):
    M = resolve_manifold(args.manifold)
    f = ScalingField.parse(args.f, M.m)
    return M, f


def _tangent_point(args, M):
    x = _vector(args.x, M.m, "--x") if args.x else np.zeros(M.m)
    u = _vector(args.u, M.m, "--u") if args.u else 0.5 * np.eye(M.m)[0]
    return TangentPoint(M.check_point(x), u)


def _vectors(args, m):
    e = np.eye(m)
    defaults = (e[0], e[1], e[0])
    return [(_vector(t, m, name) if t else d)
            for t, name, d in zip((args.X, args.Y, args.Z), ("--X", "--Y", "--Z"), defaults)]


def _point_dict(args, tp, variant):
    return {"manifold": args.manifold, "f": args.f, "variant": variant.value,
            "x": tp.x.tolist(), "u": tp.u.tolist()}


def cmd_catalog(args):
    rows = []
    for name, fn in CATALOG.items():
        params = [f"{p.name}={p.default!r}" for p in inspect.signature(fn).parameters.values()]
        M = fn()
        rows.append({"name": name, "params": params, "example": M.name, "dimension": M.m,
                     "kappa": M.kappa, "box": [list(b) for b in M.box]})
    return rows


def cmd_metric(args):
    M, f = _setup(args)
    tp = _tangent_point(args, M)
    variant = Variant.parse(args.variant)
    G = BundleMetric(variant, M, f).matrix_at(tp)
    return {**_point_dict(args, tp, variant), "matrix": G.tolist()}


def cmd_curvature(args):
    M, f = _setup(args)
    tp = _tangent_point(args, M)
    variant = Variant.parse(args.variant)
    X, Y, Z = _vectors(args, M.m)
    pat = args.pattern
    if args.mode == "oracle":
        o = BundleOracle(BundleMetric(variant, M, f), tp)
        res = o.lifted_connection(pat, X, Y) if len(pat) == 2 else o.lifted_curvature(pat, X, Y, Z)
    else:
        geo, mod = LocalGeometry(M, f, tp), CLOSED[variant]
        if len(pat) == 2:
            res = mod.connection(geo, pat, X, Y)
        elif variant is Variant.SASAKI:
            res = mod.curvature(geo, pat, X, Y, Z, form=args.form)
        else:
            res = mod.curvature(geo, pat, X, Y, Z)
    return {**_point_dict(args, tp, variant), "pattern": pat, "mode": args.mode,
            "X": X.tolist(), "Y": Y.tolist(), "Z": Z.tolist(),
            "hor": res.hor.tolist(), "ver": res.ver.tolist()}


def cmd_sectional(args):
    M, f = _setup(args)
    tp = _tangent_point(args, M)
    variant = Variant.parse(args.variant)
    X, Y, _ = _vectors(args, M.m)
    pat = args.pattern
    if args.mode == "oracle":
        o = BundleOracle(BundleMetric(variant, M, f), tp)
        value = o.sectional(o.lift(pat[0], X), o.lift(pat[1], Y))
    elif variant is Variant.SASAKI:
        value = sk.sectional(LocalGeometry(M, f, tp), pat, X, Y)
    else:
        value = cg.sectional(LocalGeometry(M, f, tp), pat, X, Y, reading=args.reading)
    return {**_point_dict(args, tp, variant), "pattern": pat, "mode": args.mode,
            "X": X.tolist(), "Y": Y.tolist(), "sectional": value}


def cmd_scalar(args):
    M, f = _setup(args)
    tp = _tangent_point(args, M)
    variant = Variant.parse(args.variant)
    if args.mode == "oracle":
        value = BundleOracle(BundleMetric(variant, M, f), tp).scalar()
    elif variant is Variant.SASAKI:
        geo = LocalGeometry(M, f, tp)
        value = sk.scalar(geo, cg.adapted_basis(geo) if geo.r > 0 else list(np.eye(M.m)))
    else:
        value = cg.scalar(LocalGeometry(M, f, tp))
    return {**_point_dict(args, tp, variant), "mode": args.mode, "scalar": value}


def cmd_geodesic(args):
    M, f = _setup(args)
    s0 = gd.BundleState.parse(args.start, M.m)
    traj = gd.integrate(BundleMetric(Variant.parse(args.variant), M, f), s0, args.t, args.h)
    return traj.to_csv() if args.format == "csv" else traj.to_dict()


def cmd_verify(args):
    cfg = RunConfig(manifold=args.manifold, f=args.f, seed=args.seed, samples=args.samples,
                    tol=args.tol, variants=tuple(v.strip() for v in args.variants.split(",") if v.strip()),
                    suite=args.suite)
    return run_suite(cfg)


def _rows_csv(rows):
    buf = io.StringIO()
    if isinstance(rows, dict):
        rows = [rows]
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


COMMANDS = {"catalog": cmd_catalog, "metric": cmd_metric, "curvature": cmd_curvature,
            "sectional": cmd_sectional, "scalar": cmd_scalar, "geodesic": cmd_geodesic,
            "verify": cmd_verify}


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (GeometryError, ValueError) as exc:
        print(f"tangentgeom: error: {exc}", file=sys.stderr)
        return 2
    code = 0
    if args.command == "verify":
        text = result.to_csv() if args.format == "csv" else result.to_json()
        code = result.exit_code
    elif isinstance(result, str):
        text = result
    elif args.format == "csv":
        text = _rows_csv(result)
    else:
        text = json.dumps(result, indent=2) + "\n"
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())

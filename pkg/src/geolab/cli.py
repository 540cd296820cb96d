"""Command-line entry point: generate, solve, analyze, verify, sweep, render.

Every run prints one JSON document to stdout holding a manifest (tool
version, argument echo, input and output content hashes, wall-clock per
phase) and the command's result.  Exit code 0 means success with all
checks passing, 1 means some check failed, 2 means a structural or usage
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from . import __version__
from .development import develop_in_direction
from .errors import GeolabError
from .generate import SurfaceFamily, generate_surface
from .horizon import find_crossings
from .meshio import (
    canonical_json,
    mesh_descriptor,
    mesh_sha256,
    read_json,
    read_obj,
    read_off,
    sha256_file,
    write_json,
    write_obj,
    write_off,
)
from .paths import SurfacePoint, eps_straight_subdivide, path_diameter, total_curvature
from .solver import shortest_path
from .sweep import (
    ALL_CHECKS,
    SweepConfig,
    _json_safe,
    _probe_directions,
    aggregate_digest,
    default_config,
    instance_checks,
    run_sweep,
)
from .svg import render_report_svg

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


class _Phases:
    """Wall-clock bookkeeping, one stopwatch per named phase."""

    def __init__(self):
        self.timings = {}
        self._t0 = None
        self._name = None

    def start(self, name):
        self.stop()
        self._name = name
        self._t0 = time.perf_counter()

    def stop(self):
        if self._name is not None:
            self.timings[self._name] = round(
                self.timings.get(self._name, 0.0)
                + time.perf_counter() - self._t0,
                6,
            )
            self._name = None


def _parse_point(spec):
    """Face-barycentric point address ``f<idx>:<b1>,<b2>``."""
    if not spec.startswith("f") or ":" not in spec:
        raise ValueError(f"point must look like f<idx>:<b1>,<b2>, got {spec!r}")
    head, tail = spec[1:].split(":", 1)
    parts = tail.split(",")
    if len(parts) != 2:
        raise ValueError(f"point needs two barycentric coordinates: {spec!r}")
    face = int(head)
    b1, b2 = float(parts[0]), float(parts[1])
    return face, (b1, b2, 1.0 - b1 - b2)


def _parse_triple(spec):
    parts = [float(p) for p in spec.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers: {spec!r}")
    return parts


def _load_mesh(path):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        return read_off(path)
    if ext == ".obj":
        return read_obj(path)
    raise ValueError(f"unsupported mesh format {ext!r} (use .off or .obj)")


def _write_mesh(path, mesh):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        write_off(path, mesh)
    elif ext == ".obj":
        write_obj(path, mesh)
    else:
        raise ValueError(f"unsupported mesh format {ext!r} (use .off or .obj)")


def _surface_point(mesh, spec):
    face, bary = _parse_point(spec)
    if not 0 <= face < mesh.n_faces:
        raise ValueError(f"face {face} out of range (mesh has {mesh.n_faces})")
    return SurfacePoint.from_bary(mesh, face, bary)


def _emit(args, phases, result, inputs=(), outputs=()):
    manifest = {
        "version": __version__,
        "command": args.command,
        "arguments": {
            k: v
            for k, v in vars(args).items()
            if k not in ("func", "command") and not callable(v)
        },
        "inputs": {p: sha256_file(p) for p in inputs},
        "outputs": {p: sha256_file(p) for p in outputs},
        "timings": phases.timings,
    }
    print(canonical_json(_json_safe({"manifest": manifest, "result": result})))


def _has_fail(checks):
    return any(
        rep["verdict"] == "fail" for reports in checks.values() for rep in reports
    )


def cmd_gen(args):
    phases = _Phases()
    phases.start("generate")
    params = {}
    if args.axes:
        params["axes"] = _parse_triple(args.axes)
    if args.slope is not None:
        params["slope"] = args.slope
    if args.profile:
        params["profile"] = args.profile
    if args.law:
        params["law"] = args.law
    if args.radius is not None:
        params["radius"] = args.radius
    if args.smoothing is not None:
        params["smoothing"] = args.smoothing
    family = SurfaceFamily(
        kind=args.family, resolution=args.res, seed=args.seed, params=params
    )
    mesh = generate_surface(family)
    phases.start("write")
    _write_mesh(args.out, mesh)
    phases.stop()
    result = {"descriptor": mesh_descriptor(mesh), "hash": mesh_sha256(mesh)}
    _emit(args, phases, result, outputs=[args.out])
    return EXIT_OK


def _solve(args, phases):
    phases.start("load")
    mesh = _load_mesh(args.mesh)
    start = _surface_point(mesh, getattr(args, "from_"))
    end = _surface_point(mesh, args.to)
    phases.start("solve")
    path, cert = shortest_path(mesh, start, end, k=args.k)
    phases.stop()
    return mesh, path, cert


def cmd_geodesic(args):
    phases = _Phases()
    mesh, path, cert = _solve(args, phases)
    result = {
        "path": path.to_json(),
        "certificate": cert.to_json(),
        "tc": total_curvature(path),
        "diameter": path_diameter(path),
    }
    outputs = []
    if args.out:
        phases.start("write")
        write_json(args.out, _json_safe(result))
        phases.stop()
        outputs.append(args.out)
    _emit(args, phases, result, inputs=[args.mesh], outputs=outputs)
    return EXIT_OK if cert.certified else EXIT_CHECK_FAILED


def cmd_analyze(args):
    phases = _Phases()
    mesh, path, cert = _solve(args, phases)
    phases.start("analyze")
    axis = path.points[-1] - path.points[0]
    axis = axis / np.linalg.norm(axis)
    directions = _probe_directions(axis, args.directions)
    developments = [develop_in_direction(path, u).to_json() for u in directions]
    crossings = [find_crossings(path, mesh, u).to_json() for u in directions]
    subdivisions = []
    for eps in (0.5, 0.2, 0.1):
        dec = eps_straight_subdivide(path, eps)
        subdivisions.append(
            {"eps": eps, "count": dec.count, "boundaries": list(dec.boundaries)}
        )
    phases.stop()
    result = {
        "certificate": cert.to_json(),
        "stats": {
            "length": path.length,
            "tc": total_curvature(path),
            "diameter": path_diameter(path),
            "chord": path.chord,
        },
        "developments": developments,
        "crossings": crossings,
        "subdivisions": subdivisions,
    }
    outputs = []
    if args.out:
        phases.start("write")
        write_json(args.out, _json_safe(result))
        phases.stop()
        outputs.append(args.out)
    _emit(args, phases, result, inputs=[args.mesh], outputs=outputs)
    return EXIT_OK


def cmd_verify(args):
    phases = _Phases()
    mesh, path, cert = _solve(args, phases)
    names = ALL_CHECKS if args.checks == "all" else tuple(args.checks.split(","))
    unknown = set(names) - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    phases.start("checks")
    axis = path.points[-1] - path.points[0]
    axis = axis / np.linalg.norm(axis)
    checks = instance_checks(path, mesh, axis, names)
    phases.stop()
    result = {"certificate": cert.to_json(), "checks": checks}
    outputs = []
    if args.out:
        phases.start("write")
        write_json(args.out, _json_safe(result))
        phases.stop()
        outputs.append(args.out)
    _emit(args, phases, result, inputs=[args.mesh], outputs=outputs)
    if not cert.certified or _has_fail(checks):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_sweep(args):
    phases = _Phases()
    phases.start("load")
    if args.config:
        config = SweepConfig.from_json(read_json(args.config))
    else:
        config = default_config()
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    phases.start("sweep")
    aggregate = run_sweep(config, out_dir=args.out)
    phases.stop()
    result = {
        "digest": aggregate_digest(aggregate),
        "counts": aggregate["counts"],
        "leaderboard": aggregate["leaderboard"],
    }
    if not args.out:
        result["aggregate"] = aggregate
    inputs = [args.config] if args.config else []
    outputs = [os.path.join(args.out, "aggregate.json")] if args.out else []
    _emit(args, phases, result, inputs=inputs, outputs=outputs)
    counts = aggregate["counts"]
    if counts["fail"]:
        return EXIT_CHECK_FAILED
    if counts["errors"]:
        return EXIT_ERROR
    return EXIT_OK


def cmd_report(args):
    phases = _Phases()
    phases.start("load")
    bundle = read_json(args.bundle)
    phases.start("render")
    os.makedirs(args.out, exist_ok=True)
    files = render_report_svg(bundle, args.out)
    phases.stop()
    _emit(args, phases, {"files": files}, inputs=[args.bundle], outputs=files)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geolab",
        description="geodesics, developments, and curvature checks on "
        "convex triangulated surfaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a surface mesh")
    p.add_argument("--family", required=True,
                   choices=["ellipsoid", "random_hull", "lipschitz_graph"])
    p.add_argument("--res", type=int, default=320)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--axes", help="ellipsoid semi-axes a,b,c")
    p.add_argument("--slope", type=float, help="lipschitz_graph slope")
    p.add_argument("--profile", help="lipschitz_graph profile")
    p.add_argument("--radius", type=float)
    p.add_argument("--smoothing", type=float)
    p.add_argument("--law", help="random_hull radial law")
    p.add_argument("--out", required=True, help="mesh file (.off or .obj)")
    p.set_defaults(func=cmd_gen)

    def endpoint_flags(p):
        p.add_argument("--mesh", required=True)
        p.add_argument("--from", dest="from_", required=True,
                       metavar="F<idx>:<b1>,<b2>")
        p.add_argument("--to", required=True, metavar="F<idx>:<b1>,<b2>")
        p.add_argument("--k", type=int, default=4,
                       help="Steiner points per edge")

    p = sub.add_parser("geodesic", help="solve one certified geodesic")
    endpoint_flags(p)
    p.add_argument("--out", help="write the path JSON here")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("analyze",
                       help="developments, crossings, and subdivision stats")
    endpoint_flags(p)
    p.add_argument("--directions", type=int, default=3,
                   help="probe directions orthogonal to the chord")
    p.add_argument("--out", help="write the bundle JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run named checks on one geodesic")
    endpoint_flags(p)
    p.add_argument("--checks", default="all",
                   help="'all' or comma list of " + ",".join(ALL_CHECKS))
    p.add_argument("--out", help="write the report bundle here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a seeded verification sweep")
    p.add_argument("--config", help="SweepConfig JSON (default desk-scale)")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", help="run directory for artifacts")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render a bundle to SVG files")
    p.add_argument("--bundle", required=True,
                   help="JSON with developments and/or crossings")
    p.add_argument("--out", required=True, help="directory for the SVGs")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_ERROR
    try:
        return args.func(args)
    except (GeolabError, ValueError, KeyError, OSError) as exc:
        print(f"geolab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Seeded verification sweeps over generated surfaces.

A sweep draws surfaces from configured families, samples endpoint pairs,
solves each geodesic with a certificate, and runs the enabled checks on
every instance.  All randomness is derived from the master seed, and the
aggregate is merged in instance order, so a sweep is byte-reproducible no
matter how its instances are scheduled.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .development import develop_in_direction, check_liberman
from .errors import GeolabError
from .generate import SurfaceFamily, child_seed, generate_surface
from .horizon import classify_sides, find_crossings
from .lemmas import (
    check_drift_monotonicity,
    check_global_bounds,
    check_growth,
    detect_and_check_tongues,
)
from .meshio import canonical_json, mesh_descriptor, mesh_sha256, write_json
from .paths import SurfacePoint, eps_straight_subdivide, path_diameter, total_curvature
from .reports import FAIL, INCONCLUSIVE, PASS, LemmaReport
from .solver import shortest_path
from .spairs import SignSequence, check_depth_bounds
from .svg import render_report_svg
from .tolerances import DEFAULT

SCHEMA_VERSION = "sweep-report/1"

ALL_CHECKS = (
    "global-bounds",
    "liberman",
    "tongues",
    "depth-bounds",
    "eps-straight",
    "drift-monotonicity",
    "growth",
)

# azimuth offset for probe directions, off the exact-symmetry planes of
# generated surfaces
_AZIMUTH = 0.37


@dataclass(frozen=True)
class SweepConfig:
    """Recipe for one sweep.

    Parameters
    ----------
    families : tuple of SurfaceFamily
        Surfaces to generate, one mesh each.
    pairs_per_surface : int
        Endpoint pairs (geodesic instances) sampled on each surface.
    directions_per_path : int
        Probe directions orthogonal to each chord for crossing-based
        checks.
    master_seed : int
        Root of every random choice in the sweep.
    checks : tuple of str
        Names from ALL_CHECKS to run on each instance.
    eps_values : tuple of float
        Straightness thresholds for the subdivision-count check.
    """

    families: tuple
    pairs_per_surface: int = 10
    directions_per_path: int = 3
    master_seed: int = 42
    checks: tuple = ALL_CHECKS
    eps_values: tuple = (0.5, 0.2, 0.1)

    def to_json(self):
        return {
            "families": [f.descriptor() for f in self.families],
            "pairs_per_surface": int(self.pairs_per_surface),
            "directions_per_path": int(self.directions_per_path),
            "master_seed": int(self.master_seed),
            "checks": list(self.checks),
            "eps_values": [float(e) for e in self.eps_values],
        }

    @classmethod
    def from_json(cls, obj):
        families = tuple(
            SurfaceFamily(
                kind=f["kind"],
                resolution=int(f["resolution"]),
                seed=int(f.get("seed", 0)),
                params=dict(f.get("params", {})),
            )
            for f in obj["families"]
        )
        return cls(
            families=families,
            pairs_per_surface=int(obj.get("pairs_per_surface", 10)),
            directions_per_path=int(obj.get("directions_per_path", 3)),
            master_seed=int(obj.get("master_seed", 42)),
            checks=tuple(obj.get("checks", ALL_CHECKS)),
            eps_values=tuple(obj.get("eps_values", (0.5, 0.2, 0.1))),
        )


def default_config(master_seed=42):
    """Desk-scale sweep: 10 surfaces x 10 pairs at roughly 1280 faces."""
    families = (
        SurfaceFamily("ellipsoid", 1280, seed=1, params={"axes": [1.0, 1.0, 1.0]}),
        SurfaceFamily("ellipsoid", 1280, seed=2, params={"axes": [1.2, 1.0, 0.8]}),
        SurfaceFamily("ellipsoid", 1280, seed=3, params={"axes": [1.5, 0.8, 0.6]}),
        SurfaceFamily("ellipsoid", 1280, seed=4, params={"axes": [1.0, 0.75, 0.5]}),
        SurfaceFamily("random_hull", 1280, seed=5),
        SurfaceFamily("random_hull", 1280, seed=6, params={"law": "ball"}),
        SurfaceFamily("random_hull", 1280, seed=7),
        SurfaceFamily("lipschitz_graph", 1280, seed=8, params={"slope": 1.0}),
        SurfaceFamily(
            "lipschitz_graph", 1280, seed=9,
            params={"slope": 1.0, "profile": "paraboloid"},
        ),
        SurfaceFamily(
            "lipschitz_graph", 1280, seed=10,
            params={"slope": 0.6, "smoothing": 0.3},
        ),
    )
    return SweepConfig(families=families, master_seed=master_seed)


def _thread_count():
    raw = os.environ.get("GEOLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def _probe_directions(axis, count):
    """Unit directions orthogonal to ``axis``, spread over a half turn."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    helper = np.array([1.0, 0.0, 0.0])
    if abs(axis[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    out = []
    for d in range(count):
        phi = _AZIMUTH + math.pi * d / max(count, 1)
        out.append(math.cos(phi) * e1 + math.sin(phi) * e2)
    return out


def _crossing_K(mesh, axis, points):
    """Defect accumulated below each point's coordinate along ``axis``.

    Mirrors the curvature prefix attached to crossing moments: the defect
    of every vertex strictly lower along the axis than the crossing.
    """
    heights = mesh.vertices @ axis
    order = np.argsort(heights, kind="stable")
    cum = np.concatenate([[0.0], np.cumsum(mesh.vertex_defects[order])])
    h_sorted = heights[order]
    idx = np.searchsorted(h_sorted, np.asarray(points) @ axis, side="left")
    return cum[idx]


def _sample_pair(mesh, rng):
    """Two surface points with a chord long enough to carry checks."""
    floor = 0.2 * mesh.bbox_diameter
    for _ in range(64):
        a = SurfacePoint.toward(mesh, rng.standard_normal(3))
        b = SurfacePoint.toward(mesh, rng.standard_normal(3))
        if np.linalg.norm(a.xyz - b.xyz) >= floor:
            return a, b
    raise GeolabError("could not sample a separated endpoint pair")


def _depth_check(path, mesh, u, axis):
    """Crossing-sequence depth bounds for one probe direction."""
    crossings = find_crossings(path, mesh, u)
    keep = crossings.transversal
    signs = crossings.sign[keep]
    alpha = crossings.alpha[keep]
    pts = crossings.point[keep]
    base = {
        "n_crossings": int(keep.sum()),
        "dropped_non_transversal": int((~keep).sum()),
    }
    if len(signs) < 2:
        return LemmaReport(
            lemma="crossing-depth-bounds",
            instance=base,
            residuals={},
            tolerance={"tc": DEFAULT.curvature},
            verdict=PASS,
            details=[{"note": "fewer than two transversal crossings"}],
        )
    K = _crossing_K(mesh, axis, pts)
    drops = np.diff(K)
    if len(drops) and drops.min() < -1e-6:
        return LemmaReport(
            lemma="crossing-depth-bounds",
            instance=base,
            residuals={"k_monotonicity_drop": float(-drops.min())},
            tolerance={"tc": DEFAULT.curvature},
            verdict=INCONCLUSIVE,
            details=[{"note": "chord coordinate not monotone at crossings"}],
        )
    K = np.minimum(np.maximum.accumulate(np.clip(K, 0.0, None)), 4 * math.pi)
    seq = SignSequence.from_alternating(alpha, signs, K=K)
    report = check_depth_bounds(seq)
    report.instance.update(base)
    return report


def _drift_check(path, mesh, axis):
    """Drift monotonicity on the longest one-sided run of the path.

    The monotonicity claims concern arcs on a single side for the axis;
    whole geodesics almost always change side, so the check runs on the
    longest run of segments with constant side.
    """
    seg_dark = classify_sides(mesh, axis).dark[path.seg_faces]
    best = (0.0, 0, len(seg_dark))
    i = 0
    while i < len(seg_dark):
        j = i
        while j < len(seg_dark) and seg_dark[j] == seg_dark[i]:
            j += 1
        span = path.arclengths[j] - path.arclengths[i]
        if span > best[0]:
            best = (span, i, j)
        i = j
    _, i0, j0 = best
    arc = path if (i0, j0) == (0, len(seg_dark)) else path.slice_samples(i0, j0)
    report = check_drift_monotonicity(arc, mesh, axis=axis)
    report.instance["run_samples"] = [int(i0), int(j0)]
    return report


def _eps_counts(path, eps_values):
    """Greedy subdivision counts against the 2/eps + 1 budget."""
    residuals = {}
    details = []
    for eps in eps_values:
        dec = eps_straight_subdivide(path, eps)
        bound = math.ceil(2.0 / eps) + 1
        residuals[f"count_excess_{eps:g}"] = float(dec.count - bound)
        details.append({"eps": float(eps), "count": dec.count, "bound": bound})
    diam = path_diameter(path)
    residuals["diameter_deficit"] = float(path.length / 10.0 - diam)
    verdict = FAIL if max(residuals.values()) > DEFAULT.length_rel else PASS
    return LemmaReport(
        lemma="eps-straight-counts",
        instance={"length": float(path.length)},
        residuals=residuals,
        tolerance={"length": DEFAULT.length_rel},
        verdict=verdict,
        details=details,
    )


def _json_safe(obj):
    """Recursively coerce numpy scalars/arrays; drop non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _point_json(sp):
    return {
        "face": int(sp.face),
        "bary": [float(b) for b in sp.bary],
        "point": [float(x) for x in sp.point],
    }


def _run_instance(mesh, surface_index, pair_index, config):
    """Solve and check one endpoint pair; returns the instance record."""
    seed = child_seed(config.master_seed, f"pair:{surface_index}:{pair_index}")
    rng = np.random.default_rng(seed)
    start, end = _sample_pair(mesh, rng)
    record = {
        "surface": int(surface_index),
        "pair": int(pair_index),
        "start": _point_json(start),
        "end": _point_json(end),
        "error": None,
    }
    path, cert = shortest_path(mesh, start, end)
    axis = end.xyz - start.xyz
    axis = axis / np.linalg.norm(axis)
    record.update(
        {
            "length": float(path.length),
            "tc": float(total_curvature(path)),
            "diameter": float(path_diameter(path)),
            "certified": bool(cert.certified),
            "certificate": cert.to_json(),
        }
    )

    directions = _probe_directions(axis, config.directions_per_path)
    record["checks"] = instance_checks(
        path, mesh, axis, config.checks, directions, config.eps_values
    )
    record["_path"] = path
    record["_directions"] = directions
    return record


def instance_checks(path, mesh, axis, checks=ALL_CHECKS, directions=None,
                    eps_values=(0.5, 0.2, 0.1)):
    """Run the named checks on one solved path.

    Returns a dict mapping each check name to a list of report JSON
    objects, one per probe direction for the crossing-based checks.
    """
    if directions is None:
        directions = _probe_directions(axis, 3)
    out = {}
    for name in checks:
        if name == "global-bounds":
            out[name] = [check_global_bounds(path, mesh).to_json()]
        elif name == "liberman":
            out[name] = [
                check_liberman(path, mesh, u).to_json() for u in directions
            ]
        elif name == "tongues":
            out[name] = [
                detect_and_check_tongues(path, mesh, u).to_json()
                for u in directions
            ]
        elif name == "depth-bounds":
            out[name] = [
                _depth_check(path, mesh, u, axis).to_json() for u in directions
            ]
        elif name == "eps-straight":
            out[name] = [_eps_counts(path, eps_values).to_json()]
        elif name == "drift-monotonicity":
            out[name] = [_drift_check(path, mesh, axis).to_json()]
        elif name == "growth":
            out[name] = [check_growth(path, mesh).to_json()]
        else:
            raise ValueError(f"unknown check {name!r}")
    return out


def _instance_artifacts(record, mesh, out_dir):
    path = record.pop("_path")
    directions = record.pop("_directions")
    tag = f"instance_{record['surface']:02d}_{record['pair']:02d}"
    inst_dir = os.path.join(out_dir, tag)
    os.makedirs(inst_dir, exist_ok=True)
    write_json(
        os.path.join(inst_dir, "path.json"),
        _json_safe(
            {
                "path": path.to_json(),
                "certificate": record["certificate"],
                "tc": record["tc"],
            }
        ),
    )
    bundle = {"developments": [], "crossings": []}
    if directions:
        u = directions[0]
        bundle["developments"].append(develop_in_direction(path, u).to_json())
        crossings = find_crossings(path, mesh, u)
        write_json(
            os.path.join(inst_dir, "crossings.json"),
            _json_safe(crossings.to_json()),
        )
        if len(crossings):
            bundle["crossings"].append(crossings.to_json())
    render_report_svg(_json_safe(bundle), inst_dir)
    record["artifacts"] = tag


def run_sweep(config, out_dir=None):
    """Run every instance of ``config`` and merge reports in seed order.

    Returns the aggregate report dict (schema ``sweep-report/1``): per
    instance the certificate summary and one report list per enabled
    check, overall verdict counts, and a leaderboard of the largest total
    curvatures seen on certified geodesics.  With ``out_dir`` the
    aggregate plus per-instance artifacts (path, crossings, SVG
    developments) are written there.

    Instances run concurrently (capped by GEOLAB_THREADS) but the output
    order and content depend only on the config.
    """
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    surfaces = []
    meshes = []
    for si, family in enumerate(config.families):
        mesh = generate_surface(family)
        meshes.append(mesh)
        surfaces.append(
            {
                "index": si,
                "descriptor": _json_safe(mesh_descriptor(mesh)),
                "hash": mesh_sha256(mesh),
            }
        )

    jobs = [
        (si, pi)
        for si in range(len(meshes))
        for pi in range(config.pairs_per_surface)
    ]

    def work(job):
        si, pi = job
        try:
            return _run_instance(meshes[si], si, pi, config)
        except GeolabError as exc:
            return {
                "surface": si,
                "pair": pi,
                "error": f"{type(exc).__name__}: {exc}",
                "checks": {},
            }

    if jobs:
        with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
            records = list(pool.map(work, jobs))
    else:
        records = []

    counts = {"pass": 0, "fail": 0, "inconclusive": 0, "errors": 0}
    leaderboard = []
    for rec in records:
        if rec.get("error"):
            counts["errors"] += 1
            continue
        if out_dir is not None:
            _instance_artifacts(rec, meshes[rec["surface"]], out_dir)
        else:
            rec.pop("_path", None)
            rec.pop("_directions", None)
        for reports in rec["checks"].values():
            for rep in reports:
                key = {PASS: "pass", FAIL: "fail", INCONCLUSIVE: "inconclusive"}[
                    rep["verdict"]
                ]
                counts[key] += 1
        if rec["certified"]:
            leaderboard.append(
                {
                    "tc": rec["tc"],
                    "length": rec["length"],
                    "surface": rec["surface"],
                    "pair": rec["pair"],
                }
            )
    leaderboard.sort(key=lambda e: (-e["tc"], e["surface"], e["pair"]))

    aggregate = _json_safe(
        {
            "schema": SCHEMA_VERSION,
            "config": config.to_json(),
            "surfaces": surfaces,
            "instances": records,
            "counts": counts,
            "leaderboard": leaderboard[:10],
        }
    )
    if out_dir is not None:
        write_json(os.path.join(out_dir, "aggregate.json"), aggregate)
    return aggregate


def aggregate_digest(aggregate):
    """Stable content hash of an aggregate report."""
    import hashlib

    return hashlib.sha256(canonical_json(aggregate).encode()).hexdigest()

"""Planar developments of surface paths and their convexity classification.

A development flattens a space polyline into the plane while preserving the
data relevant to one reference: distances to a point (about-point) or
heights along a direction plus arc length (in-direction).  Developments
never increase total curvature, and for geodesics on a convex surface the
in-direction development is locally convex on the dark side and locally
concave on the bright side; ``check_liberman`` verifies exactly that sign
pattern on the realized polylines.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DevelopmentError
from .paths import KIND_EDGE, as_points
from .reports import FAIL, INCONCLUSIVE, PASS, LemmaReport
from .tolerances import DEFAULT

ABOUT_POINT = "about-point"
IN_DIRECTION = "in-direction"


@dataclass
class PlanarDevelopment:
    """A planar polyline mirroring a surface path.

    ``points`` is the (n, 2) planar polyline; ``arclengths`` is the source
    path's cumulative arc-length table, which the planar segments reproduce
    within 1e-10 of the total length.  ``reference`` is the planar image of
    the reference data: the point z's image for about-point developments
    (always the origin), the unit direction's image for in-direction ones
    (always +y, so "up" is the direction and x is the unfolded abscissa).
    """

    kind: str
    points: np.ndarray
    arclengths: np.ndarray
    reference: tuple

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.arclengths = np.asarray(self.arclengths, dtype=np.float64)
        total = float(self.arclengths[-1]) if len(self.arclengths) else 0.0
        err = self.max_length_error()
        if err > DEFAULT.development_rel * max(total, 1e-300):
            raise DevelopmentError(
                f"development distorts arc length by {err:.3e} (kind={self.kind})"
            )

    def max_length_error(self):
        planar = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        source = np.diff(self.arclengths)
        if len(planar) == 0:
            return 0.0
        return float(np.abs(planar - source).max())

    @property
    def signed_turnings(self):
        """Signed exterior angle at each interior vertex (ccw positive)."""
        d = np.diff(self.points, axis=0)
        a, b = d[:-1], d[1:]
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
        ang = np.arctan2(cross, dot)
        good = (np.einsum("ij,ij->i", a, a) > 0) & (np.einsum("ij,ij->i", b, b) > 0)
        ang[~good] = 0.0
        return ang

    @property
    def total_curvature(self):
        flat = np.concatenate([self.points, np.zeros((len(self.points), 1))], axis=1)
        return float(_kernels.turning_angles(flat).sum())

    def to_json(self):
        return {
            "kind": self.kind,
            "points": [[float(x), float(y)] for x, y in self.points],
            "arclengths": [float(s) for s in self.arclengths],
            "reference": [float(v) for v in self.reference],
        }


def _path_data(path):
    pts = as_points(path)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arcs = np.concatenate([[0.0], np.cumsum(seg)])
    return pts, seg, arcs


def develop_about_point(path, z):
    """Development preserving distances to ``z`` with monotone azimuth.

    The reference point maps to the origin; sample i maps to the point at
    source distance |gamma_i - z| and azimuth accumulated by the planar
    triangles (z, gamma_i, gamma_{i+1}), which is nondecreasing by
    construction.
    """
    pts, seg, arcs = _path_data(path)
    z = np.asarray(z, dtype=np.float64)
    r = np.linalg.norm(pts - z, axis=1)
    scale = max(float(arcs[-1]), float(r.max()), 1e-300)
    if _point_polyline_distance(z, pts) <= 1e-12 * scale:
        raise DevelopmentError("reference point lies on the path")
    ra, rb = r[:-1], r[1:]
    cos_step = (ra * ra + rb * rb - seg * seg) / (2 * ra * rb)
    steps = np.arccos(np.clip(cos_step, -1.0, 1.0))
    az = np.concatenate([[0.0], np.cumsum(steps)])
    planar = np.stack([r * np.cos(az), r * np.sin(az)], axis=1)
    return PlanarDevelopment(ABOUT_POINT, planar, arcs, (0.0, 0.0))


def develop_in_direction(path, u):
    """Development preserving heights along ``u`` and arc length.

    The image has the direction pointing up (+y); the abscissa accumulates
    sqrt(ds^2 - dh^2) per segment and is monotone nondecreasing.
    """
    pts, seg, arcs = _path_data(path)
    u = np.asarray(u, dtype=np.float64)
    u = u / np.linalg.norm(u)
    h = pts @ u
    dh = np.diff(h)
    slack = seg * seg - dh * dh
    tol = DEFAULT.development_rel * max(float(arcs[-1]), 1e-300)
    bad = slack < -(2 * seg * tol + tol * tol)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise DevelopmentError(
            f"segment {j} rises faster than its length (|dh|-ds = "
            f"{abs(dh[j]) - seg[j]:.3e})"
        )
    clamped = int((slack < 0).sum())
    if clamped:
        warnings.warn(
            f"clamped {clamped} segments whose height step exceeded their "
            "length by rounding",
            stacklevel=2,
        )
    dx = np.sqrt(np.clip(slack, 0.0, None))
    x = np.concatenate([[0.0], np.cumsum(dx)])
    planar = np.stack([x, h], axis=1)
    return PlanarDevelopment(IN_DIRECTION, planar, arcs, (0.0, 1.0))


def directional_tc(path, u):
    """Total curvature of the development of ``path`` in direction ``u``."""
    return develop_in_direction(path, u).total_curvature


def _point_polyline_distance(z, pts):
    a, b = pts[:-1], pts[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.zeros(len(a))
    nz = denom > 0
    t[nz] = np.einsum("ij,ij->i", z - a[nz], ab[nz]) / denom[nz]
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[:, None] * ab
    segdist = np.linalg.norm(proj - z, axis=1)
    if len(segdist) == 0:
        return float(np.linalg.norm(pts[0] - z))
    return float(segdist.min())


def check_liberman(path, mesh, u, tol=None):
    """Constant convexity sign of the development on one-side arcs.

    For a geodesic, every maximal run of segments whose faces are all dark
    for ``u`` must turn clockwise (nonpositive signed turning) in the
    in-direction development, and bright runs counterclockwise.  Turns at
    samples where the side changes belong to neither run.  Segments that
    run along a horizon edge make the verdict inconclusive rather than
    failed.
    """
    from .horizon import classify_sides

    tol = DEFAULT.straightness if tol is None else tol
    labels = classify_sides(mesh, u)
    dev = develop_in_direction(path, u)
    turns = dev.signed_turnings
    seg_dark = labels.dark[path.seg_faces]

    horizon_runs = 0
    for j in range(len(path.seg_faces)):
        if (
            path.kinds[j] == KIND_EDGE
            and path.kinds[j + 1] == KIND_EDGE
            and path.location[j] == path.location[j + 1]
        ):
            e = int(path.location[j])
            fa, fb = mesh.edge_faces[e]
            if labels.dark[fa] != labels.dark[fb]:
                horizon_runs += 1

    violations = []
    dark_max = 0.0
    bright_min = 0.0
    for i in range(len(turns)):
        d_in, d_out = seg_dark[i], seg_dark[i + 1]
        if d_in != d_out:
            continue
        if d_in:
            dark_max = max(dark_max, float(turns[i]))
            if turns[i] > tol:
                violations.append(
                    {"sample": i + 1, "turning": float(turns[i]), "side": "dark"}
                )
        else:
            bright_min = min(bright_min, float(turns[i]))
            if turns[i] < -tol:
                violations.append(
                    {"sample": i + 1, "turning": float(turns[i]), "side": "bright"}
                )

    if violations:
        verdict = FAIL
    elif horizon_runs:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return LemmaReport(
        lemma="liberman-side-convexity",
        instance={
            "u": [float(v) for v in np.asarray(u, dtype=np.float64)],
            "n_samples": int(len(path.points)),
            "horizon_runs": horizon_runs,
        },
        residuals={"dark_max_turning": dark_max, "bright_min_turning": -bright_min},
        tolerance={"per_crossing": tol},
        verdict=verdict,
        details=violations,
    )

"""On-surface polyline paths and their curvature functionals.

A :class:`SurfacePath` is a polyline whose samples are located on a mesh
(inside a face or inside an edge) and whose straight segments each stay in a
single face.  Total curvature, straightness tests, diameters, and winding
numbers are functionals of the embedded polyline; they accept either a path
or a bare (n, 3) point array.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import NonGenericDirectionError, OffSurfaceError
from .tolerances import DEFAULT

KIND_FACE = 0
KIND_EDGE = 1


@dataclass(frozen=True)
class SurfacePoint:
    """A point on a mesh face, stored with its barycentric coordinates."""

    face: int
    bary: tuple
    point: tuple

    @classmethod
    def from_bary(cls, mesh, face, bary):
        bary = np.asarray(bary, dtype=np.float64)
        if bary.shape != (3,) or bary.min() < -1e-12 or abs(bary.sum() - 1.0) > 1e-9:
            raise ValueError("barycentric coordinates must be a convex triple")
        bary = np.clip(bary, 0.0, None)
        bary = bary / bary.sum()
        p = mesh.face_point(face, bary)
        return cls(int(face), tuple(bary), tuple(p))

    @classmethod
    def toward(cls, mesh, direction):
        face, bary, p = mesh.locate_toward(direction)
        return cls(face, tuple(bary), tuple(p))

    @property
    def xyz(self):
        return np.asarray(self.point)


def bary_in_face(mesh, face, point):
    """Barycentric coordinates of ``point`` with respect to ``face``."""
    tri = mesh.vertices[mesh.faces[int(face)]]
    t = np.asarray(point, dtype=np.float64) - tri[2]
    m = np.stack([tri[0] - tri[2], tri[1] - tri[2]], axis=1)
    sol, *_ = np.linalg.lstsq(m, t, rcond=None)
    return np.array([sol[0], sol[1], 1.0 - sol[0] - sol[1]])


class SurfacePath:
    """Polyline on a mesh with per-sample locations and per-segment faces.

    Parameters
    ----------
    mesh : ConvexMesh
    points : (n, 3) sample coordinates.
    kinds : (n,) 0 for a face-interior sample, 1 for an edge sample.
    location : (n,) face index (kind 0) or edge index (kind 1).
    params : (n,) edge parameter in [0, 1] for edge samples, nan otherwise.
    seg_faces : (n-1,) face containing each straight segment.
    closed : whether the last sample is glued to the first.
    """

    def __init__(self, mesh, points, kinds, location, params, seg_faces, closed=False, validate=True):
        self.mesh = mesh
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.location = np.asarray(location, dtype=np.int64)
        self.params = np.asarray(params, dtype=np.float64)
        self.seg_faces = np.asarray(seg_faces, dtype=np.int64)
        self.closed = bool(closed)
        n = len(self.points)
        if not (len(self.kinds) == len(self.location) == len(self.params) == n):
            raise ValueError("sample arrays disagree in length")
        if len(self.seg_faces) != max(n - 1, 0):
            raise ValueError("need one face per segment")
        if validate:
            self._check_located()

    def _check_located(self):
        mesh = self.mesh
        tol = DEFAULT.on_surface_rel * mesh.bbox_diameter
        for i in range(len(self.points)):
            if self.kinds[i] == KIND_EDGE:
                a, b = mesh.edges[self.location[i]]
                t = self.params[i]
                ref = (1 - t) * mesh.vertices[a] + t * mesh.vertices[b]
            else:
                bary = bary_in_face(mesh, self.location[i], self.points[i])
                if bary.min() < -1e-9:
                    raise OffSurfaceError(f"sample {i} outside its face")
                ref = bary @ mesh.vertices[mesh.faces[self.location[i]]]
            if np.linalg.norm(ref - self.points[i]) > max(tol, 1e-12):
                raise OffSurfaceError(f"sample {i} is off the surface")
        for i, f in enumerate(self.seg_faces):
            for j in (i, i + 1):
                if self.kinds[j] == KIND_EDGE:
                    if self.location[j] not in self.mesh.face_edge_ids[f]:
                        raise OffSurfaceError(
                            f"sample {j} not on an edge of segment face {f}"
                        )
                elif self.location[j] != f:
                    raise OffSurfaceError(f"sample {j} not on segment face {f}")

    # -- parametrization -----------------------------------------------------

    @cached_property
    def seg_lengths(self):
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    @cached_property
    def arclengths(self):
        return np.concatenate([[0.0], np.cumsum(self.seg_lengths)])

    @property
    def length(self):
        return float(self.arclengths[-1])

    @property
    def n_samples(self):
        return len(self.points)

    def point_at(self, s):
        """Point at arclength ``s`` (clamped to the parameter range)."""
        s = float(np.clip(s, 0.0, self.length))
        i = int(np.searchsorted(self.arclengths, s, side="right") - 1)
        i = min(i, len(self.points) - 2)
        ds = self.arclengths[i + 1] - self.arclengths[i]
        t = 0.0 if ds == 0 else (s - self.arclengths[i]) / ds
        return (1 - t) * self.points[i] + t * self.points[i + 1]

    def segment_at(self, s):
        """Index of the segment containing arclength ``s``."""
        i = int(np.searchsorted(self.arclengths, s, side="right") - 1)
        return min(max(i, 0), len(self.points) - 2)

    def subpath_points(self, s0, s1):
        """Polyline of the arc between arclengths ``s0 <= s1``."""
        s0 = float(np.clip(s0, 0.0, self.length))
        s1 = float(np.clip(s1, 0.0, self.length))
        if s1 < s0:
            raise ValueError("need s0 <= s1")
        inner = (self.arclengths > s0 + 1e-15) & (self.arclengths < s1 - 1e-15)
        pts = [self.point_at(s0)]
        pts.extend(self.points[inner])
        pts.append(self.point_at(s1))
        return np.asarray(pts)

    def slice_samples(self, i0, i1):
        """Sub-path on the sample range ``i0 <= i1`` (both inclusive)."""
        if not 0 <= i0 < i1 <= len(self.points) - 1:
            raise ValueError("need 0 <= i0 < i1 < n_samples")
        return SurfacePath(
            self.mesh,
            self.points[i0 : i1 + 1].copy(),
            self.kinds[i0 : i1 + 1].copy(),
            self.location[i0 : i1 + 1].copy(),
            self.params[i0 : i1 + 1].copy(),
            self.seg_faces[i0:i1].copy(),
            closed=False,
            validate=False,
        )

    def reversed_(self):
        n = len(self.points)
        return SurfacePath(
            self.mesh,
            self.points[::-1].copy(),
            self.kinds[::-1].copy(),
            self.location[::-1].copy(),
            self.params[::-1].copy(),
            self.seg_faces[::-1].copy(),
            closed=self.closed,
            validate=False,
        )

    @property
    def chord(self):
        return float(np.linalg.norm(self.points[-1] - self.points[0]))

    def to_json(self):
        """JSON-safe dict; every sample carries a face, barycentrics, and s."""
        samples = []
        for i in range(len(self.points)):
            if len(self.seg_faces) == 0:
                face = int(self.location[i])
            else:
                # express each sample in the face of its incoming segment
                face = int(self.seg_faces[i - 1] if i > 0 else self.seg_faces[0])
            bary = bary_in_face(self.mesh, face, self.points[i])
            samples.append(
                {
                    "face": face,
                    "bary": [float(b) for b in bary],
                    "s": float(self.arclengths[i]),
                }
            )
        return {"closed": self.closed, "length": self.length, "samples": samples}


def as_points(path_or_points):
    if isinstance(path_or_points, SurfacePath):
        return path_or_points.points
    return np.asarray(path_or_points, dtype=np.float64)


def total_curvature(path_or_points, closed=None):
    """Total curvature of a polyline: the sum of its exterior angles.

    For a closed path the turn where the end meets the start is included.
    Subsampling a polyline never increases this number and inserting points
    along existing segments never changes it.
    """
    pts = as_points(path_or_points)
    if closed is None:
        closed = isinstance(path_or_points, SurfacePath) and path_or_points.closed
    if len(pts) > 1:
        # the turn lives on the trace: repeated samples must not hide it
        keep = np.concatenate([[True], (np.diff(pts, axis=0) != 0.0).any(axis=1)])
        pts = pts[keep]
    total = float(_kernels.turning_angles(pts).sum())
    if closed and len(pts) >= 3:
        if np.array_equal(pts[0], pts[-1]):
            loop = np.vstack([pts[-2], pts[0], pts[1]])
        else:
            loop = np.vstack([pts[-2], pts[-1], pts[0], pts[1]])
        total += float(_kernels.turning_angles(loop).sum())
    return total


def path_diameter(path_or_points):
    """Largest pairwise distance among the polyline's vertices."""
    pts = as_points(path_or_points)
    if len(pts) < 2:
        return 0.0
    best = 0.0
    for i in range(0, len(pts), 256):
        block = pts[i : i + 256]
        d = np.linalg.norm(block[:, None, :] - pts[None, :, :], axis=2)
        best = max(best, float(d.max()))
    return best


def is_eps_straight(path_or_points, eps):
    """Whether chord length is at least (1 - eps) times arc length."""
    pts = as_points(path_or_points)
    if len(pts) < 2:
        return True
    arc = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
    chord = float(np.linalg.norm(pts[-1] - pts[0]))
    return chord >= (1.0 - eps) * arc


@dataclass
class EpsStraightDecomposition:
    """Greedy split of a path into maximal eps-straight arcs."""

    eps: float
    boundaries: list  # arclength values, first 0 and last the path length
    arcs: list  # one (m, 3) polyline per arc

    @property
    def count(self):
        return len(self.arcs)


def eps_straight_subdivide(path, eps):
    """Split a path greedily into maximal eps-straight arcs.

    Each cut is placed at the supremum of parameters keeping the current
    arc eps-straight (located by scanning the sample grid and bisecting
    inside the bracketing segment; the straightness margin is convex on
    each straight segment, so the last sign change brackets the supremum).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be inside (0, 1)")
    L = path.length
    if L == 0.0:
        return EpsStraightDecomposition(eps, [0.0, 0.0], [path.points[:2]])

    sgrid = path.arclengths

    def margin(s0, p0, s):
        return float(np.linalg.norm(path.point_at(s) - p0)) - (1.0 - eps) * (s - s0)

    boundaries = [0.0]
    while boundaries[-1] < L - 1e-12 * L - 1e-300:
        s0 = boundaries[-1]
        p0 = path.point_at(s0)
        candidates = np.concatenate([sgrid[sgrid > s0 + 1e-15], [L]])
        values = [margin(s0, p0, s) for s in candidates]
        last_true = -1
        for i, val in enumerate(values):
            if val >= 0.0:
                last_true = i
        if last_true == -1:
            # eps-straight fails immediately past s0; cannot happen for
            # eps > 0 except by rounding, take one sample step
            s_star = float(candidates[0])
        elif last_true == len(candidates) - 1:
            s_star = L
        else:
            lo, hi = float(candidates[last_true]), float(candidates[last_true + 1])
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if margin(s0, p0, mid) >= 0.0:
                    lo = mid
                else:
                    hi = mid
            s_star = lo
        if s_star <= s0 + 1e-14 * L:
            s_star = min(L, float(candidates[0]))
        boundaries.append(s_star)
    arcs = [path.subpath_points(a, b) for a, b in zip(boundaries[:-1], boundaries[1:])]
    return EpsStraightDecomposition(eps, boundaries, arcs)


def winding_number(path_or_points, axis_point, axis_dir, tol=DEFAULT):
    """Signed turns of the polyline around an oriented line.

    The azimuth sweep of a straight segment about an axis it misses is less
    than a half turn and is recovered exactly from the wrapped difference of
    its endpoint azimuths, so the total is a plain sum of wrapped deltas.
    Raises :class:`NonGenericDirectionError` when a segment comes within
    tolerance of the axis, where the sweep direction is ill-defined.
    """
    pts = as_points(path_or_points)
    axis_point = np.asarray(axis_point, dtype=np.float64)
    d = np.asarray(axis_dir, dtype=np.float64)
    d = d / np.linalg.norm(d)
    helper = np.array([1.0, 0.0, 0.0])
    if abs(d[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(d, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)

    rel = pts - axis_point
    x = rel @ e1
    y = rel @ e2
    scale = max(float(np.hypot(x, y).max()), 1e-300)
    floor = max(tol.winding * 1e-3, 1e-12) * scale

    # distance from the projected origin to each projected segment
    ax, ay, bx, by = x[:-1], y[:-1], x[1:], y[1:]
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    t = np.where(seg_sq > 0, -(ax * dx + ay * dy) / np.where(seg_sq > 0, seg_sq, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    dist = np.hypot(ax + t * dx, ay + t * dy)
    if dist.size and dist.min() < floor:
        raise NonGenericDirectionError("polyline passes through the winding axis")

    theta = np.arctan2(y, x)
    deltas = (np.diff(theta) + np.pi) % (2.0 * np.pi) - np.pi
    return float(deltas.sum() / (2.0 * np.pi))

"""Parametric families of convex triangulated surfaces.

Three families are provided: subdivided-icosahedron ellipsoids, convex hulls
of random point clouds, and closed bodies built from radial Lipschitz
profiles.  Every generator is deterministic in the family seed and returns a
mesh that passes :func:`geolab.mesh.validate_convex`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationError
from .mesh import ConvexMesh, validate_convex

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

_ICO_VERTS = np.array(
    [
        [-1, GOLDEN, 0], [1, GOLDEN, 0], [-1, -GOLDEN, 0], [1, -GOLDEN, 0],
        [0, -1, GOLDEN], [0, 1, GOLDEN], [0, -1, -GOLDEN], [0, 1, -GOLDEN],
        [GOLDEN, 0, -1], [GOLDEN, 0, 1], [-GOLDEN, 0, -1], [-GOLDEN, 0, 1],
    ],
    dtype=np.float64,
)

_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=np.int64,
)


def child_seed(master_seed, index):
    """Stable per-instance seed derived by hashing, independent of order."""
    digest = hashlib.sha256(f"{master_seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


@dataclass(frozen=True)
class SurfaceFamily:
    """Recipe for one surface instance.

    ``kind`` is one of ``ellipsoid``, ``random_hull``, ``lipschitz_graph``;
    ``params`` hold the kind-specific knobs, ``resolution`` the approximate
    face count, and ``seed`` drives every random choice.
    """

    kind: str
    resolution: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def descriptor(self):
        return {
            "kind": self.kind,
            "resolution": int(self.resolution),
            "seed": int(self.seed),
            "params": dict(self.params),
        }


def icosphere(level):
    """Unit sphere from ``level`` times subdivided icosahedron, 20*4^level faces."""
    verts = _ICO_VERTS / np.linalg.norm(_ICO_VERTS, axis=1)[:, None]
    faces = _ICO_FACES.copy()
    for _ in range(level):
        verts, faces = _subdivide(verts, faces)
        verts /= np.linalg.norm(verts, axis=1)[:, None]
    return verts, faces


def _subdivide(verts, faces):
    edges = faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    edges = np.sort(edges, axis=1)
    uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
    mids = 0.5 * (verts[uniq[:, 0]] + verts[uniq[:, 1]])
    new_verts = np.vstack([verts, mids])
    mid_ids = inverse.reshape(-1, 3) + len(verts)
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    mab, mbc, mca = mid_ids[:, 0], mid_ids[:, 1], mid_ids[:, 2]
    new_faces = np.concatenate(
        [
            np.stack([a, mab, mca], axis=1),
            np.stack([b, mbc, mab], axis=1),
            np.stack([c, mca, mbc], axis=1),
            np.stack([mab, mbc, mca], axis=1),
        ]
    )
    return new_verts, new_faces


def sphere_level_for(resolution):
    """Smallest subdivision level whose face count reaches ``resolution``."""
    level = 0
    while 20 * 4**level < resolution:
        level += 1
    return level


def _make_ellipsoid(family):
    axes = np.asarray(family.params.get("axes", [1.0, 1.0, 1.0]), dtype=np.float64)
    if axes.shape != (3,) or (axes <= 0).any():
        raise ValueError("ellipsoid axes must be three positive numbers")
    verts, faces = icosphere(sphere_level_for(family.resolution))
    return ConvexMesh(verts * axes[None, :], faces)


def _orient_outward(points, hull):
    """Hull simplices reordered so every triangle normal matches qhull's."""
    faces = hull.simplices.copy()
    a = points[faces[:, 0]]
    b = points[faces[:, 1]]
    c = points[faces[:, 2]]
    n = np.cross(b - a, c - a)
    flip = np.einsum("ij,ij->i", n, hull.equations[:, :3]) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def convex_hull_mesh(points, descriptor=None):
    """Triangulated boundary of the convex hull of ``points``.

    Interior points are dropped; faces are oriented outward.
    """
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=np.float64)
    hull = ConvexHull(pts)
    used = np.unique(hull.simplices)
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    faces = remap[_orient_outward(pts, hull)]
    return ConvexMesh(pts[used], faces, descriptor=descriptor)


def _make_random_hull(family):
    law = family.params.get("law", "uniform")
    radius = float(family.params.get("radius", 1.0))
    n_points = max(int(family.resolution) // 2 + 2, 12)
    last_issue = "no attempt"
    for attempt in range(20):
        rng = np.random.default_rng(child_seed(family.seed, attempt))
        raw = rng.normal(size=(n_points, 3))
        raw /= np.linalg.norm(raw, axis=1)[:, None]
        if law == "uniform":
            pts = radius * raw
        elif law == "ball":
            pts = radius * raw * rng.uniform(0.5, 1.0, size=(n_points, 1)) ** (1.0 / 3.0)
        else:
            raise ValueError(f"unknown radial law {law!r}")
        mesh = convex_hull_mesh(pts)
        report = validate_convex(mesh)
        if report.ok:
            mesh.descriptor["retries"] = attempt
            return mesh
        last_issue = "; ".join(report.structural + report.convexity)
    raise GenerationError(f"random_hull failed 20 attempts, last issue: {last_issue}")


_PROFILES = {
    "cone": lambda r, slope, radius, smoothing: slope
    * (np.hypot(r, smoothing * radius) - smoothing * radius),
    "paraboloid": lambda r, slope, radius, smoothing: slope * r * r / (2.0 * radius),
}


def _make_lipschitz_graph(family):
    slope = float(family.params.get("slope", 1.0))
    radius = float(family.params.get("radius", 1.0))
    profile = family.params.get("profile", "cone")
    smoothing = float(family.params.get("smoothing", 0.2))
    if profile not in _PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    if smoothing < 0.05:
        raise ValueError("smoothing below 0.05 degrades convexity margins")
    g = lambda r: _PROFILES[profile](r, slope, radius, smoothing)

    n_rings = max(3, round(np.sqrt(family.resolution / (8.0 * np.pi))))
    n_theta = max(12, round(2.0 * np.pi * n_rings))
    delta = 2.0 * np.pi / n_theta
    rim_z = float(g(radius))

    # rings share one set of angles: ring chords then come in parallel pairs,
    # every quad between adjacent rings is exactly planar, and the diagonal
    # split leaves dihedrals at pi, inside the convexity tolerance; staggered
    # rings would instead put ring chords in a reflex valley
    angles = delta * np.arange(n_theta)
    cos_a, sin_a = np.cos(angles), np.sin(angles)
    verts = [np.array([0.0, 0.0, 0.0])]
    ring_ids = []
    for j in range(1, n_rings + 1):
        r = radius * j / n_rings
        ring = np.stack([r * cos_a, r * sin_a, np.full(n_theta, g(r))], axis=1)
        ring_ids.append(np.arange(len(verts), len(verts) + n_theta))
        verts.extend(ring)
    cap_ring_ids = [ring_ids[-1]]
    for j in range(n_rings - 1, 0, -1):
        r = radius * j / n_rings
        ring = np.stack(
            [r * cos_a, r * sin_a, np.full(n_theta, 2 * rim_z - g(r))], axis=1
        )
        cap_ring_ids.append(np.arange(len(verts), len(verts) + n_theta))
        verts.extend(ring)
    apex = len(verts)
    verts.append(np.array([0.0, 0.0, 2.0 * rim_z]))
    verts = np.asarray(verts)

    faces = []
    tags = []

    def fan(center, ring, upward):
        for k in range(n_theta):
            tri = [center, ring[k], ring[(k + 1) % n_theta]]
            faces.append(tri if upward else tri[::-1])
            tags.append(1 if upward else 0)

    def strip(ring_a, ring_b, tag):
        # walking ring_a by increasing angle makes the winding outward on
        # both halves (ring_a is inner on the bowl, outer on the cap)
        for k in range(n_theta):
            k1 = (k + 1) % n_theta
            for tri in ([ring_a[k], ring_a[k1], ring_b[k]], [ring_a[k1], ring_b[k1], ring_b[k]]):
                faces.append(tri)
                tags.append(tag)

    # bowl: outward normals point downward, so wind clockwise seen from +z
    fan(0, ring_ids[0], upward=False)
    for j in range(len(ring_ids) - 1):
        strip(ring_ids[j], ring_ids[j + 1], tag=0)
    # cap: mirror image above the rim plane
    for j in range(len(cap_ring_ids) - 1):
        strip(cap_ring_ids[j], cap_ring_ids[j + 1], tag=1)
    fan(apex, cap_ring_ids[-1], upward=True)

    faces = np.asarray(faces, dtype=np.int64)
    tags = np.asarray(tags, dtype=np.int64)
    verts = verts - np.array([0.0, 0.0, rim_z])
    mesh = ConvexMesh(verts, faces, face_tags=tags)

    graph_faces = tags == 0
    normals = mesh.face_normals[graph_faces]
    nz = np.abs(normals[:, 2])
    nz = np.where(nz > 0, nz, 1.0)
    grad = np.linalg.norm(normals[:, :2], axis=1) / nz
    worst = float(grad.max())
    if worst > slope * (1.0 + 1e-9) + 1e-12:
        raise GenerationError(
            f"graph face slope {worst:.12f} exceeds the Lipschitz bound {slope}"
        )
    mesh.descriptor["max_graph_slope"] = worst
    mesh.descriptor["rim_z"] = 0.0
    return mesh


_MAKERS = {
    "ellipsoid": _make_ellipsoid,
    "random_hull": _make_random_hull,
    "lipschitz_graph": _make_lipschitz_graph,
}


def generate_surface(family):
    """Build the surface described by ``family``.

    The returned mesh carries ``descriptor`` metadata (the family recipe
    plus measured counts) and, for lipschitz_graph surfaces, per-face tags
    (0 = graph region, 1 = cap).  Raises :class:`GenerationError` when the
    family cannot produce a valid convex mesh.
    """
    if family.kind not in _MAKERS:
        raise ValueError(f"unknown surface kind {family.kind!r}")
    mesh = _MAKERS[family.kind](family)
    report = validate_convex(mesh)
    if not report.ok:
        raise GenerationError(
            f"{family.kind} produced an invalid mesh: "
            + "; ".join(report.structural + report.convexity)
        )
    mesh.descriptor.update(family.descriptor())
    mesh.descriptor["n_vertices"] = mesh.n_vertices
    mesh.descriptor["n_faces"] = mesh.n_faces
    return mesh

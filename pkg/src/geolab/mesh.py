"""Convex triangulated surfaces: adjacency, curvature bookkeeping, validation.

A :class:`ConvexMesh` is a closed, consistently oriented triangle mesh that is
expected to bound a convex body with all face normals pointing outward.
Construction itself performs only cheap shape checks; :func:`validate_convex`
runs the full structural and convexity audit and returns a report instead of
raising, so callers can decide how strict to be.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import MeshTopologyError, OffSurfaceError
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * np.pi


class ConvexMesh:
    """Closed oriented triangle mesh intended to bound a convex body.

    Parameters
    ----------
    vertices : (V, 3) float array.
    faces : (F, 3) integer array, counterclockwise as seen from outside.
    face_tags : optional (F,) integer array of generator-defined region tags.
    descriptor : optional dict recording how the mesh was generated.
    """

    def __init__(self, vertices, faces, face_tags=None, descriptor=None):
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        faces = np.ascontiguousarray(faces, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError("vertices must be (V, 3)")
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise ValueError("faces must be (F, 3)")
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise ValueError("face indices out of range")
        self.vertices = vertices
        self.faces = faces
        self.face_tags = None if face_tags is None else np.asarray(face_tags, dtype=np.int64)
        self.descriptor = descriptor or {}
        self.cache = {}

    # -- counts ------------------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_edges(self):
        return len(self.edges)

    # -- adjacency ---------------------------------------------------------

    @cached_property
    def edges(self):
        """(E, 2) sorted vertex pairs, lexicographically ordered."""
        raw = self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        raw.sort(axis=1)
        return np.unique(raw, axis=0)

    @cached_property
    def _edge_lookup(self):
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}

    def edge_id(self, u, v):
        """Index of the undirected edge (u, v); raises KeyError if absent."""
        if u > v:
            u, v = v, u
        return self._edge_lookup[(int(u), int(v))]

    @cached_property
    def face_edge_ids(self):
        """(F, 3) edge ids; entry k is the edge from corner k to corner k+1."""
        out = np.empty_like(self.faces)
        for f in range(self.n_faces):
            a, b, c = self.faces[f]
            out[f, 0] = self.edge_id(a, b)
            out[f, 1] = self.edge_id(b, c)
            out[f, 2] = self.edge_id(c, a)
        return out

    @cached_property
    def edge_faces(self):
        """(E, 2) adjacent faces per edge, -1 marking a missing side."""
        out = np.full((self.n_edges, 2), -1, dtype=np.int64)
        for f in range(self.n_faces):
            for e in self.face_edge_ids[f]:
                if out[e, 0] == -1:
                    out[e, 0] = f
                elif out[e, 1] == -1:
                    out[e, 1] = f
        return out

    @cached_property
    def _directed_edge_face(self):
        """Map from directed edge (a, b) to the face listing it in order."""
        out = {}
        for f in range(self.n_faces):
            a, b, c = (int(x) for x in self.faces[f])
            out[(a, b)] = f
            out[(b, c)] = f
            out[(c, a)] = f
        return out

    def face_across(self, edge, face):
        """The face on the other side of ``edge`` from ``face``."""
        f0, f1 = self.edge_faces[edge]
        return int(f1) if f0 == face else int(f0)

    @cached_property
    def vertex_fans(self):
        """Per-vertex cyclic fans: (faces, neighbor vertices), both ordered.

        Fan k of vertex v lists incident faces walking counterclockwise as
        seen from outside; neighbors[k] is the vertex after v inside
        faces[k], so the wedge between neighbors[k] and neighbors[k+1] is
        the corner of faces[k+1] at v.  Requires a closed oriented mesh.
        """
        start_face = np.full(self.n_vertices, -1, dtype=np.int64)
        for f in range(self.n_faces):
            for v in self.faces[f]:
                if start_face[v] == -1:
                    start_face[v] = f
        dmap = self._directed_edge_face
        fans = []
        for v in range(self.n_vertices):
            f = int(start_face[v])
            if f < 0:
                fans.append((np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)))
                continue
            faces_order = []
            nbr_order = []
            while True:
                corners = self.faces[f]
                k = int(np.where(corners == v)[0][0])
                nxt = int(corners[(k + 1) % 3])
                faces_order.append(f)
                nbr_order.append(nxt)
                f = dmap[(nxt, v)]
                if f == faces_order[0]:
                    break
                if len(faces_order) > self.n_faces:
                    raise MeshTopologyError(f"fan around vertex {v} does not close")
            fans.append(
                (np.array(faces_order, dtype=np.int64), np.array(nbr_order, dtype=np.int64))
            )
        return fans

    # -- metric quantities ---------------------------------------------------

    @cached_property
    def edge_lengths(self):
        p, q = self.vertices[self.edges[:, 0]], self.vertices[self.edges[:, 1]]
        return np.linalg.norm(q - p, axis=1)

    @cached_property
    def face_normals(self):
        """(F, 3) unit normals, outward for a positively oriented mesh."""
        v = self.vertices
        a, b, c = v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]
        n = np.cross(b - a, c - a)
        norms = np.linalg.norm(n, axis=1)
        safe = np.where(norms > 0.0, norms, 1.0)
        return n / safe[:, None]

    @cached_property
    def face_areas(self):
        v = self.vertices
        a, b, c = v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @cached_property
    def corner_angles(self):
        """(F, 3) interior angle at each face corner."""
        v = self.vertices
        out = np.empty((self.n_faces, 3), dtype=np.float64)
        for k in range(3):
            p = v[self.faces[:, k]]
            q = v[self.faces[:, (k + 1) % 3]]
            r = v[self.faces[:, (k + 2) % 3]]
            u1, u2 = q - p, r - p
            n1 = np.linalg.norm(u1, axis=1)
            n2 = np.linalg.norm(u2, axis=1)
            denom = np.where((n1 > 0) & (n2 > 0), n1 * n2, 1.0)
            cosang = np.clip(np.einsum("ij,ij->i", u1, u2) / denom, -1.0, 1.0)
            out[:, k] = np.arccos(cosang)
        return out

    @cached_property
    def vertex_defects(self):
        """(V,) angle defect 2*pi - (incident angle sum) at each vertex."""
        sums = _kernels.angle_sums_at_vertices(self.faces, self.corner_angles, self.n_vertices)
        return TWO_PI - sums

    @cached_property
    def signed_volume(self):
        v = self.vertices
        a, b, c = v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    @cached_property
    def bbox_diameter(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    @cached_property
    def interior_point(self):
        """A point strictly inside the convex body (vertex centroid)."""
        return self.vertices.mean(axis=0)

    # -- geometry helpers ----------------------------------------------------

    def face_point(self, face, bary):
        """Point with barycentric coordinates ``bary`` on ``face``."""
        b = np.asarray(bary, dtype=np.float64)
        return b @ self.vertices[self.faces[int(face)]]

    def locate_toward(self, direction):
        """Surface point hit by a ray from the interior point.

        Returns ``(face, bary, point)``.  The barycentric triple is clamped
        into the closed simplex, so a ray through an edge or vertex resolves
        to one of the incident faces deterministically.
        """
        d = np.asarray(direction, dtype=np.float64)
        nd = np.linalg.norm(d)
        if nd == 0.0:
            raise ValueError("direction must be nonzero")
        d = d / nd
        o = self.interior_point
        v = self.vertices
        a = v[self.faces[:, 0]]
        e1 = v[self.faces[:, 1]] - a
        e2 = v[self.faces[:, 2]] - a
        pvec = np.cross(d[None, :], e2)
        det = np.einsum("ij,ij->i", e1, pvec)
        ok = np.abs(det) > 1e-300
        inv = np.where(ok, det, 1.0)
        tvec = o[None, :] - a
        u = np.einsum("ij,ij->i", tvec, pvec) / inv
        qvec = np.cross(tvec, e1)
        w = np.einsum("j,ij->i", d, qvec) / inv
        t = np.einsum("ij,ij->i", e2, qvec) / inv
        eps = 1e-9
        hit = ok & (t > 0) & (u >= -eps) & (w >= -eps) & (u + w <= 1 + eps)
        if not hit.any():
            raise OffSurfaceError("ray from interior point misses every face")
        candidates = np.flatnonzero(hit)
        face = int(candidates[np.argmin(t[candidates])])
        bu, bw = u[face], w[face]
        bary = np.array([1.0 - bu - bw, bu, bw])
        bary = np.clip(bary, 0.0, 1.0)
        bary /= bary.sum()
        return face, bary, self.face_point(face, bary)


def angle_defect(mesh, vertex):
    """Angle defect at one vertex, in radians."""
    return float(mesh.vertex_defects[int(vertex)])


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_convex`.

    ``structural`` lists manifoldness and orientation problems;
    ``convexity`` lists failed convexity conditions.  ``ok`` is true when
    both lists are empty.  ``metrics`` records the measured margins.
    """

    structural: list = field(default_factory=list)
    convexity: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def structural_ok(self):
        return not self.structural

    @property
    def ok(self):
        return not self.structural and not self.convexity

    def raise_for_issues(self):
        if self.structural:
            raise MeshTopologyError("; ".join(self.structural))
        if self.convexity:
            raise MeshTopologyError("not convex: " + "; ".join(self.convexity))


def validate_convex(mesh, tol: Tolerances = DEFAULT):
    """Audit a mesh for closed-manifold structure and convexity.

    Structural checks: finite coordinates, no degenerate or duplicate
    faces, every vertex used, every edge shared by exactly two faces with
    opposite orientations, Euler characteristic 2, single connected
    component.  Convexity checks (run only when the structure is sound):
    positive enclosed volume, every vertex on the hull within tolerance,
    no reflex dihedral, nonnegative angle defects summing to 4*pi.
    """
    report = ValidationReport()
    v, f = mesh.vertices, mesh.faces
    diam = mesh.bbox_diameter
    tol_dist = tol.hull_rel * max(diam, 1e-300)

    if not np.isfinite(v).all():
        report.structural.append("non-finite vertex coordinates")
        return report
    if len(f) == 0:
        report.structural.append("no faces")
        return report
    if (f[:, 0] == f[:, 1]).any() or (f[:, 1] == f[:, 2]).any() or (f[:, 0] == f[:, 2]).any():
        report.structural.append("face with repeated vertex")
        return report
    sorted_faces = np.sort(f, axis=1)
    if len(np.unique(sorted_faces, axis=0)) != len(f):
        report.structural.append("duplicate faces")
        return report
    used = np.zeros(len(v), dtype=bool)
    used[f.ravel()] = True
    if not used.all():
        report.structural.append(f"{int((~used).sum())} unused vertices")
    area_floor = 1e-14 * diam * diam
    tiny = int((mesh.face_areas <= area_floor).sum())
    if tiny:
        report.structural.append(f"{tiny} degenerate faces")

    directed = f[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    keys = directed[:, 0] * len(v) + directed[:, 1]
    if len(np.unique(keys)) != len(keys):
        report.structural.append("repeated directed edge (inconsistent orientation)")
    twins = directed[:, 1] * len(v) + directed[:, 0]
    if not np.isin(keys, twins).all():
        report.structural.append("boundary or non-manifold edge")

    if report.structural:
        return report

    euler = len(v) - mesh.n_edges + len(f)
    report.metrics["euler_characteristic"] = euler
    if euler != 2:
        report.structural.append(f"Euler characteristic {euler}, expected 2")

    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    e = mesh.edges
    adj = coo_matrix(
        (np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(len(v), len(v))
    )
    n_comp, _ = connected_components(adj, directed=False)
    if n_comp != 1:
        report.structural.append(f"{n_comp} connected components")

    if report.structural:
        return report

    vol = mesh.signed_volume
    report.metrics["signed_volume"] = vol
    if vol <= 0:
        report.convexity.append("non-positive enclosed volume (inward orientation?)")

    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(v)
    except QhullError as exc:
        report.convexity.append(f"degenerate point set: {exc}")
        return report
    off_hull = np.setdiff1d(np.arange(len(v)), hull.vertices)
    hull_violation = 0.0
    if len(off_hull):
        # vertices absent from the hull may still lie on a facet plane
        planes = hull.equations
        dist = planes[:, :3] @ v[off_hull].T + planes[:, 3:4]
        hull_violation = float(np.abs(dist.max(axis=0)).max()) if dist.size else 0.0
    report.metrics["hull_violation"] = hull_violation
    if hull_violation > tol_dist:
        shown = ", ".join(str(i) for i in off_hull[:8])
        more = "" if len(off_hull) <= 8 else f" (+{len(off_hull) - 8} more)"
        report.convexity.append(
            f"vertices [{shown}]{more} off the hull by up to {hull_violation:.3e}"
        )

    # reflex dihedral test: the apex of the far face must not rise above the
    # near face plane by more than tol_dist
    ef = mesh.edge_faces
    n0 = mesh.face_normals[ef[:, 0]]
    far = mesh.faces[ef[:, 1]]
    # pick in each far face the vertex not on the edge
    e0, e1 = mesh.edges[:, 0], mesh.edges[:, 1]
    apex = np.where(
        (far[:, 0] != e0) & (far[:, 0] != e1),
        far[:, 0],
        np.where((far[:, 1] != e0) & (far[:, 1] != e1), far[:, 1], far[:, 2]),
    )
    rise = np.einsum("ij,ij->i", v[apex] - v[mesh.edges[:, 0]], n0)
    worst_rise = float(rise.max()) if len(rise) else 0.0
    report.metrics["max_dihedral_rise"] = worst_rise
    if worst_rise > tol_dist:
        report.convexity.append(f"reflex dihedral, apex rise {worst_rise:.3e}")

    defects = mesh.vertex_defects
    report.metrics["min_defect"] = float(defects.min())
    report.metrics["defect_sum"] = float(defects.sum())
    if defects.min() < -tol.defect:
        report.convexity.append(f"negative angle defect {defects.min():.3e}")
    if abs(defects.sum() - 4.0 * np.pi) > tol.defect:
        report.convexity.append(
            f"defect sum {defects.sum():.12f} differs from 4*pi"
        )
    return report

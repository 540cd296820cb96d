"""Dark/bright decomposition, horizon curves, crossings, and drift frames.

For a unit direction u, a face is dark when its outward normal does not
point against u (inner product >= 0, ties dark) and bright otherwise.  The
horizon is the closed cycle of edges separating the two regions; paths
crossing it produce ordered crossing sequences with meeting angles and
transition signs, the raw material for the alternating-sum bounds and
s-pair combinatorics downstream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import NonGenericDirectionError, OffSurfaceError
from .paths import KIND_EDGE, SurfacePath, as_points
from .tolerances import DEFAULT


# ---------------------------------------------------------------------------
# side labeling
# ---------------------------------------------------------------------------


@dataclass
class SideLabeling:
    """Per-face dark/bright labels for a direction."""

    u: np.ndarray
    values: np.ndarray
    dark: np.ndarray
    n_ties: int

    def to_json(self):
        return {
            "u": [float(v) for v in self.u],
            "n_dark": int(self.dark.sum()),
            "n_bright": int((~self.dark).sum()),
            "n_ties": self.n_ties,
        }


def classify_sides(mesh, u):
    """Label every face dark (normal not against ``u``; ties dark) or bright.

    Cached on the mesh per direction.
    """
    u = np.asarray(u, dtype=np.float64)
    u = u / np.linalg.norm(u)
    key = ("sides", u.tobytes())
    if key in mesh.cache:
        return mesh.cache[key]
    values = mesh.face_normals @ u
    dark = values >= -DEFAULT.generic
    n_ties = int((np.abs(values) <= DEFAULT.generic).sum())
    lab = SideLabeling(u, values, dark, n_ties)
    mesh.cache[key] = lab
    return lab


# ---------------------------------------------------------------------------
# horizon extraction
# ---------------------------------------------------------------------------


@dataclass
class HorizonCurve:
    """Closed edge cycles separating dark faces from bright ones.

    Each component stores the vertex cycle (v_0 ... v_{m-1}, closing back
    to v_0) and the edge ids walked; orientation keeps the dark side on the
    left as seen from outside.
    """

    u: np.ndarray
    components: list

    @property
    def n_components(self):
        return len(self.components)

    @property
    def edge_ids(self):
        if not self.components:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([c["edges"] for c in self.components])

    def total_length(self, mesh):
        return float(mesh.edge_lengths[self.edge_ids].sum())

    def polylines(self, mesh):
        """Closed 3d polylines (first point repeated at the end)."""
        out = []
        for c in self.components:
            vs = np.concatenate([c["vertices"], c["vertices"][:1]])
            out.append(mesh.vertices[vs])
        return out

    def to_obj(self, mesh, path):
        from .meshio import write_polyline_obj

        write_polyline_obj(path, [mesh.vertices[c["vertices"]] for c in self.components], closed=True)


def extract_horizon(mesh, u):
    """The closed edge cycle(s) between dark and bright faces.

    Each cycle is oriented with the dark region on its left (a directed
    edge of a counterclockwise face keeps that face's interior left).
    """
    labels = classify_sides(mesh, u)
    fa, fb = mesh.edge_faces[:, 0], mesh.edge_faces[:, 1]
    on_horizon = labels.dark[fa] != labels.dark[fb]
    edge_ids = np.flatnonzero(on_horizon)
    if len(edge_ids) == 0:
        raise NonGenericDirectionError("no horizon: all faces on one side")

    dmap = mesh._directed_edge_face
    out_map = {}
    for e in edge_ids:
        a, b = (int(x) for x in mesh.edges[e])
        dark_face = int(fa[e]) if labels.dark[fa[e]] else int(fb[e])
        if dmap[(a, b)] != dark_face:
            a, b = b, a
        out_map.setdefault(a, []).append((b, int(e)))
    bad = [v for v, lst in out_map.items() if len(lst) != 1]
    if bad:
        raise NonGenericDirectionError(
            f"horizon pinches at vertex {bad[0]} ({labels.n_ties} tangent "
            f"faces); perturb the direction"
        )

    components = []
    used = set()
    for e0 in edge_ids:
        if int(e0) in used:
            continue
        a, b = (int(x) for x in mesh.edges[e0])
        dark_face = int(fa[e0]) if labels.dark[fa[e0]] else int(fb[e0])
        if dmap[(a, b)] != dark_face:
            a, b = b, a
        cyc_v, cyc_e = [a], []
        v = a
        while True:
            b2, e2 = out_map[v][0]
            used.add(e2)
            cyc_e.append(e2)
            v = b2
            if v == a:
                break
            cyc_v.append(v)
        components.append(
            {
                "vertices": np.array(cyc_v, dtype=np.int64),
                "edges": np.array(cyc_e, dtype=np.int64),
            }
        )
    return HorizonCurve(labels.u, components)


# ---------------------------------------------------------------------------
# crossing sequences
# ---------------------------------------------------------------------------


@dataclass
class CrossingSequence:
    """Ordered horizon crossings of a path for a direction.

    ``sign`` is +1 where the path passes from bright to dark and -1 the
    other way; ``alpha`` is the meeting angle, the angle of the incoming
    segment to the direction minus pi/2, in [-pi/2, pi/2].  Crossings where
    the path runs along a horizon edge or grazes a vertex are flagged
    non-transversal; near-coincident opposite crossings are merged (counted
    in ``merged_pairs``).
    """

    u: np.ndarray
    t: np.ndarray
    alpha: np.ndarray
    sign: np.ndarray
    transversal: np.ndarray
    edge: np.ndarray
    point: np.ndarray
    merged_pairs: int = 0

    def __len__(self):
        return len(self.t)

    def to_json(self):
        return [
            {
                "t": float(self.t[i]),
                "alpha": float(self.alpha[i]),
                "sign": int(self.sign[i]),
                "transversal": bool(self.transversal[i]),
            }
            for i in range(len(self.t))
        ]


def find_crossings(path, mesh, u):
    """Horizon crossings of ``path`` in order of arc length."""
    labels = classify_sides(mesh, u)
    pts = path.points
    seg_dark = labels.dark[path.seg_faces]
    arcs = path.arclengths

    along_horizon = np.zeros(len(path.seg_faces), dtype=bool)
    for j in range(len(path.seg_faces)):
        if (
            path.kinds[j] == KIND_EDGE
            and path.kinds[j + 1] == KIND_EDGE
            and path.location[j] == path.location[j + 1]
        ):
            e = int(path.location[j])
            f0, f1 = mesh.edge_faces[e]
            along_horizon[j] = labels.dark[f0] != labels.dark[f1]

    idx, alpha, sign, trans, edge, pxyz = [], [], [], [], [], []
    for i in range(1, len(pts) - 1):
        if seg_dark[i - 1] == seg_dark[i]:
            continue
        d = pts[i] - pts[i - 1]
        nd = np.linalg.norm(d)
        if nd == 0.0:
            # degenerate incoming segment: use the outgoing one
            d = pts[i + 1] - pts[i]
            nd = np.linalg.norm(d)
        d = d / nd
        ang = float(np.arccos(np.clip(d @ labels.u, -1.0, 1.0)))
        ok = path.kinds[i] == KIND_EDGE
        grazes = False
        if ok:
            s = float(path.params[i])
            grazes = min(s, 1.0 - s) <= 2 * DEFAULT.graze_rel
        idx.append(i)
        alpha.append(ang - pi / 2)
        sign.append(+1 if seg_dark[i] else -1)
        trans.append(bool(ok and not grazes and not along_horizon[i - 1] and not along_horizon[i]))
        edge.append(int(path.location[i]) if ok else -1)
        pxyz.append(pts[i])

    t = arcs[idx] if idx else np.zeros(0)
    alpha = np.asarray(alpha)
    sign = np.asarray(sign, dtype=np.int64)
    trans = np.asarray(trans, dtype=bool)
    edge = np.asarray(edge, dtype=np.int64)
    pxyz = np.asarray(pxyz) if pxyz else np.zeros((0, 3))

    # merge tangential double crossings: adjacent opposite signs closer
    # than the merge tolerance cancel
    merged = 0
    if len(t):
        tol = DEFAULT.merge_rel * max(float(arcs[-1]), 1e-300)
        keep = np.ones(len(t), dtype=bool)
        i = 0
        while i + 1 < len(t):
            if keep[i] and keep[i + 1] and (t[i + 1] - t[i]) < tol:
                keep[i] = keep[i + 1] = False
                merged += 1
                i += 2
            else:
                i += 1
        if merged:
            warnings.warn(
                f"merged {merged} near-tangential crossing pairs", stacklevel=2
            )
            t, alpha, sign = t[keep], alpha[keep], sign[keep]
            trans, edge, pxyz = trans[keep], edge[keep], pxyz[keep]

    return CrossingSequence(labels.u, t, alpha, sign, trans, edge, pxyz, merged)


# ---------------------------------------------------------------------------
# drift frames
# ---------------------------------------------------------------------------


@dataclass
class DriftFrameSequence:
    """Orthonormal frames (lambda, mu, nu) and angles along a path.

    Frames live at segment midpoints: nu is the face normal, mu the unit
    vector of nu x i (so mu has no i-component), lambda = mu x nu (its
    i-component is nonnegative).  Angles: phi = angle(i, tangent), psi =
    pi/2 - angle(i, nu), theta = pi/2 - angle(mu, tangent); they satisfy
    cos(theta) cos(psi) = cos(phi) whenever phi < pi/2.
    """

    axis: np.ndarray
    t: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    theta: np.ndarray

    @property
    def identity_residual(self):
        if len(self.phi) == 0:
            return 0.0
        return float(
            np.abs(np.cos(self.theta) * np.cos(self.psi) - np.cos(self.phi)).max()
        )

    @property
    def claim_margins(self):
        """Per-sample margins of phi >= |psi| and phi >= |theta|."""
        return self.phi - np.abs(self.psi), self.phi - np.abs(self.theta)

    def to_json(self):
        return {
            "axis": [float(v) for v in self.axis],
            "t": [float(v) for v in self.t],
            "phi": [float(v) for v in self.phi],
            "psi": [float(v) for v in self.psi],
            "theta": [float(v) for v in self.theta],
            "identity_residual": self.identity_residual,
        }


def _angle(a, b):
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.einsum("...i,...i->...", a, b)
    return np.arctan2(cross, dot)


def drift_angles(path, mesh, axis=None):
    """Drift frames of a path whose tangent stays near a fixed direction.

    ``axis`` defaults to the endpoint chord direction.  Raises when the
    normal gets too close to the axis (frame degenerate) or the tangent
    strays to pi/2 from it (the angle identity needs a forward tangent).
    """
    pts = path.points
    if axis is None:
        chord = pts[-1] - pts[0]
        nc = np.linalg.norm(chord)
        if nc == 0.0:
            raise NonGenericDirectionError("closed path has no chord axis")
        axis = chord / nc
    i_dir = np.asarray(axis, dtype=np.float64)
    i_dir = i_dir / np.linalg.norm(i_dir)

    seg = np.diff(pts, axis=0)
    ns = np.linalg.norm(seg, axis=1)
    good = ns > 0
    tang = np.zeros_like(seg)
    tang[good] = seg[good] / ns[good][:, None]
    nu = mesh.face_normals[path.seg_faces]
    t_mid = 0.5 * (path.arclengths[:-1] + path.arclengths[1:])

    mu_raw = np.cross(nu, i_dir)
    n_mu = np.linalg.norm(mu_raw, axis=1)
    degenerate = n_mu <= DEFAULT.frame
    if degenerate.any():
        j = int(np.flatnonzero(degenerate)[0])
        raise NonGenericDirectionError(
            f"normal parallel to the axis at segment {j}; frame undefined"
        )
    mu = mu_raw / n_mu[:, None]
    lam = np.cross(mu, nu)

    phi = _angle(tang, i_dir[None, :].repeat(len(tang), axis=0))
    psi = pi / 2 - _angle(nu, i_dir[None, :].repeat(len(nu), axis=0))
    theta = pi / 2 - _angle(mu, tang)
    if (phi >= pi / 2 - DEFAULT.frame).any():
        j = int(np.flatnonzero(phi >= pi / 2 - DEFAULT.frame)[0])
        raise NonGenericDirectionError(
            f"tangent at segment {j} reaches pi/2 from the axis; not drifting"
        )
    return DriftFrameSequence(i_dir, t_mid, lam, mu, nu, phi, psi, theta)


def dark_faces_from_point(mesh, z):
    """Faces not visible from an external point ``z`` (dark side from z)."""
    z = np.asarray(z, dtype=np.float64)
    centroids = mesh.vertices[mesh.faces].mean(axis=1)
    return np.einsum("ij,ij->i", mesh.face_normals, centroids - z) >= -DEFAULT.generic


# ---------------------------------------------------------------------------
# plane sections
# ---------------------------------------------------------------------------


def plane_section(mesh, plane_point, plane_normal):
    """The closed convex polygon where a plane cuts the surface.

    Returns a closed :class:`SurfacePath` whose samples are the edge
    crossings in walk order.  Vertices lying exactly on the plane are
    treated as on the positive side (symbolic perturbation), which puts
    crossings at the adjacent edge endpoints.
    """
    p0 = np.asarray(plane_point, dtype=np.float64)
    n = np.asarray(plane_normal, dtype=np.float64)
    n = n / np.linalg.norm(n)
    d = (mesh.vertices - p0) @ n
    snap = 1e-14 * mesh.bbox_diameter
    d = np.where(np.abs(d) < snap, snap, d)

    ea, eb = mesh.edges[:, 0], mesh.edges[:, 1]
    crossed = (d[ea] > 0) != (d[eb] > 0)
    if not crossed.any():
        raise OffSurfaceError("plane misses the surface")
    cross_param = np.zeros(mesh.n_edges)
    ce = np.flatnonzero(crossed)
    cross_param[ce] = d[ea[ce]] / (d[ea[ce]] - d[eb[ce]])

    face_cross = crossed[mesh.face_edge_ids]
    counts = face_cross.sum(axis=1)
    if not ((counts == 0) | (counts == 2)).all():
        raise OffSurfaceError("plane is tangent to the surface; section is degenerate")

    start_face = int(np.flatnonzero(counts == 2)[0])
    e_ids = mesh.face_edge_ids[start_face][face_cross[start_face]]
    entry = int(e_ids[0])
    face = start_face
    samples, edges_seq, params, faces_seq = [], [], [], []
    e = entry
    while True:
        s = float(cross_param[e])
        a, b = mesh.edges[e]
        samples.append((1 - s) * mesh.vertices[a] + s * mesh.vertices[b])
        edges_seq.append(int(e))
        params.append(s)
        pair = mesh.face_edge_ids[face][face_cross[face]]
        exit_e = int(pair[1]) if int(pair[0]) == e else int(pair[0])
        faces_seq.append(int(face))
        face = mesh.face_across(exit_e, face)
        e = exit_e
        if e == entry:
            break
        if len(samples) > mesh.n_edges:
            raise OffSurfaceError("section walk failed to close")

    pts = np.asarray(samples + [samples[0]])
    kinds = [KIND_EDGE] * len(pts)
    locs = edges_seq + [edges_seq[0]]
    pars = params + [params[0]]
    return SurfacePath(mesh, pts, kinds, locs, pars, faces_seq, closed=True)


def plane_section_lengths(mesh, p, q, plane_normal):
    """Lengths of the two section arcs into which p and q split the cut.

    ``p`` and ``q`` are 3d surface points on the plane through ``p`` with
    the given normal.  Returns (forward, backward) arc lengths along the
    section's orientation.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    n = np.asarray(plane_normal, dtype=np.float64)
    n = n / np.linalg.norm(n)
    if abs((q - p) @ n) > 1e-9 * mesh.bbox_diameter:
        raise ValueError("q does not lie on the plane through p")
    section = plane_section(mesh, p, n)
    s_p = _project_on_path(section, p)
    s_q = _project_on_path(section, q)
    total = section.length
    fwd = (s_q - s_p) % total
    return fwd, total - fwd


def _project_on_path(path, x):
    pts = path.points
    a, b = pts[:-1], pts[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.zeros(len(a))
    nz = denom > 0
    t[nz] = np.einsum("ij,ij->i", x - a[nz], ab[nz]) / denom[nz]
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[:, None] * ab
    dist = np.linalg.norm(proj - x, axis=1)
    j = int(np.argmin(dist))
    if dist[j] > 1e-9 * path.mesh.bbox_diameter:
        raise OffSurfaceError("point does not lie on the section")
    return float(path.arclengths[j] + t[j] * (path.arclengths[j + 1] - path.arclengths[j]))

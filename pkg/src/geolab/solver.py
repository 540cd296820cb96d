"""Shortest paths on convex triangulated surfaces, with certificates.

The solver runs in two stages.  A Steiner graph (``k`` extra nodes per edge,
complete cliques inside every face) gives an initial corridor of faces via
multi-source Dijkstra.  The corridor is then straightened exactly: unfold it
into the plane, pull the string taut with a funnel sweep, and whenever the
taut path wraps a corridor vertex, reroute the corridor around that vertex's
other side and repeat.  Rerouting is adopted only when it shortens the taut
length, so the loop terminates; a wrap that cannot be improved (a flat
vertex, or a geodesic genuinely through a vertex) is accepted and shows up
in the certificate.

The certificate records per-crossing unfolded turning residuals and a
minimality gap against a denser Steiner graph: a graph with spacing ``h``
per edge overestimates the true geodesic by at most the sum of ``h`` over
crossed edges, which turns the denser optimum into a lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import _kernels
from .errors import StraighteningError
from .paths import KIND_EDGE, KIND_FACE, SurfacePath, SurfacePoint
from .tolerances import DEFAULT


# ---------------------------------------------------------------------------
# Steiner graphs
# ---------------------------------------------------------------------------


@dataclass
class SteinerGraph:
    k: int
    n_nodes: int
    positions: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    node_edge: np.ndarray
    node_param: np.ndarray
    face_nodes: np.ndarray


def steiner_graph(mesh, k):
    """Graph on mesh vertices plus ``k`` evenly spaced nodes per edge.

    Nodes of one face (3 corners, 3k edge nodes) form a complete clique
    weighted by straight-line distance; cliques of neighboring faces share
    the nodes of the common edge.  Cached on the mesh per ``k``.
    """
    key = ("steiner", k)
    if key in mesh.cache:
        return mesh.cache[key]
    from scipy.sparse import coo_matrix

    nv, ne = mesh.n_vertices, mesh.n_edges
    t = np.arange(1, k + 1, dtype=np.float64) / (k + 1)
    p0 = mesh.vertices[mesh.edges[:, 0]]
    p1 = mesh.vertices[mesh.edges[:, 1]]
    epos = (1 - t)[None, :, None] * p0[:, None, :] + t[None, :, None] * p1[:, None, :]
    positions = np.vstack([mesh.vertices, epos.reshape(-1, 3)])
    node_edge = np.concatenate(
        [np.full(nv, -1, dtype=np.int64), np.repeat(np.arange(ne, dtype=np.int64), k)]
    )
    node_param = np.concatenate([np.full(nv, np.nan), np.tile(t, ne)])

    fe = mesh.face_edge_ids
    edge_nodes = nv + fe[:, :, None] * k + np.arange(k, dtype=np.int64)[None, None, :]
    face_nodes = np.concatenate([mesh.faces, edge_nodes.reshape(mesh.n_faces, -1)], axis=1)

    iu, ju = np.triu_indices(face_nodes.shape[1], 1)
    a = face_nodes[:, iu].ravel()
    b = face_nodes[:, ju].ravel()
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    n = len(positions)
    _, first = np.unique(lo * n + hi, return_index=True)
    lo, hi = lo[first], hi[first]
    w = np.linalg.norm(positions[lo] - positions[hi], axis=1)
    mat = coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
        shape=(n, n),
    ).tocsr()
    graph = SteinerGraph(
        k,
        n,
        positions,
        mat.indptr.astype(np.int64),
        mat.indices.astype(np.int64),
        mat.data.astype(np.float64),
        node_edge,
        node_param,
        face_nodes,
    )
    mesh.cache[key] = graph
    return graph


def _as_surface_point(mesh, spec):
    if isinstance(spec, SurfacePoint):
        return spec
    face, bary = spec
    return SurfacePoint.from_bary(mesh, face, bary)


def _faces_containing(mesh, sp, tol=1e-12):
    """Faces whose closed simplex contains the point (1, 2, or a fan)."""
    bary = np.asarray(sp.bary)
    zero = bary <= tol
    corners = mesh.faces[sp.face]
    if not zero.any():
        return [int(sp.face)]
    if zero.sum() == 1:
        i = int(np.flatnonzero(zero)[0])
        others = [int(corners[j]) for j in range(3) if j != i]
        e = mesh.edge_id(*others)
        return [int(x) for x in mesh.edge_faces[e]]
    v = int(corners[int(np.flatnonzero(~zero)[0])])
    return [int(x) for x in mesh.vertex_fans[v][0]]


# ---------------------------------------------------------------------------
# corridors
# ---------------------------------------------------------------------------


def _corner_angle_at(mesh, face, v):
    k = int(np.where(mesh.faces[face] == v)[0][0])
    return float(mesh.corner_angles[face, k])


def _fan_route(mesh, v, f_in, f_out):
    """Portal/face steps around ``v`` from f_in to f_out, smaller wedge first.

    Returns a list of (edge, face) steps to append after f_in.  Empty when
    f_in == f_out.
    """
    fan_faces, fan_nbrs = mesh.vertex_fans[v]
    deg = len(fan_faces)
    ia = int(np.where(fan_faces == f_in)[0][0])
    ib = int(np.where(fan_faces == f_out)[0][0])
    if ia == ib:
        return []

    def walk(d):
        idxs = [ia]
        t = ia
        while t != ib:
            t = (t + d) % deg
            idxs.append(t)
        return idxs

    fwd, bwd = walk(1), walk(-1)

    def wedge(idxs):
        return sum(_corner_angle_at(mesh, int(fan_faces[t]), v) for t in idxs[1:-1])

    route = fwd if wedge(fwd) <= wedge(bwd) else bwd
    steps = []
    for prev, cur in zip(route[:-1], route[1:]):
        # the edge between fan positions t and t+1 is (v, fan_nbrs[t])
        t_edge = prev if (prev + 1) % deg == cur else cur
        e = mesh.edge_id(v, int(fan_nbrs[t_edge]))
        steps.append((e, int(fan_faces[cur])))
    return steps


def _corridor_from_chain(mesh, graph, chain, p_faces, q_faces):
    """Face/portal corridor realizing the Steiner node chain."""
    def node_faces(n):
        if n < mesh.n_vertices:
            return set(int(x) for x in mesh.vertex_fans[n][0])
        e = int(graph.node_edge[n])
        return set(int(x) for x in mesh.edge_faces[e])

    sets = [set(p_faces)] + [node_faces(n) for n in chain] + [set(q_faces)]
    gap_faces = []
    for left, right in zip(sets[:-1], sets[1:]):
        inter = left & right
        if not inter:
            raise StraighteningError("steiner chain has non-adjacent consecutive nodes")
        gap_faces.append(min(inter))

    faces = [gap_faces[0]]
    edges = []
    for i in range(len(gap_faces) - 1):
        f_a, f_b = gap_faces[i], gap_faces[i + 1]
        if f_a == f_b:
            continue
        node = chain[i]
        if node >= mesh.n_vertices:
            edges.append(int(graph.node_edge[node]))
            faces.append(f_b)
        else:
            for e, f in _fan_route(mesh, int(node), f_a, f_b):
                edges.append(e)
                faces.append(f)
    return faces, edges


def _normalize_corridor(faces, edges):
    """Drop immediate backtracks (same face re-entered through one portal)."""
    changed = True
    while changed:
        changed = False
        for i in range(len(faces) - 1):
            if faces[i] == faces[i + 1]:
                del faces[i + 1]
                del edges[i]
                changed = True
                break
            if i + 2 < len(faces) and faces[i] == faces[i + 2] and edges[i] == edges[i + 1]:
                del faces[i + 1 : i + 3]
                del edges[i : i + 2]
                changed = True
                break
    return faces, edges


# ---------------------------------------------------------------------------
# unfolding and the funnel
# ---------------------------------------------------------------------------


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _unfold_corridor(mesh, faces, edges, p_xyz, q_xyz):
    """Plane development of the corridor.

    Returns (p2, q2, portals) where portals[i] = (left, right, left_id,
    right_id) with left/right as seen along the direction of travel.  All
    face images are counterclockwise, so the exit edge of face i, directed
    as in that face's winding, has the interior on its left; the traveler
    crossing it keeps the second vertex of the directed edge on their left.
    """
    verts = mesh.vertices
    tri = mesh.faces[faces[0]]
    a, b, c = (int(x) for x in tri)
    pa, pb, pc = verts[a], verts[b], verts[c]
    ex = pb - pa
    lab = np.linalg.norm(ex)
    ex = ex / lab
    cx = float((pc - pa) @ ex)
    cy = sqrt(max(float(np.linalg.norm(pc - pa) ** 2 - cx * cx), 0.0))
    coords = [{a: (0.0, 0.0), b: (lab, 0.0), c: (cx, cy)}]

    for i, e in enumerate(edges):
        prev = coords[i]
        f_next = faces[i + 1]
        ea, eb = (int(x) for x in mesh.edges[e])
        A = prev[ea]
        B = prev[eb]
        other_prev = next(v for v in prev if v != ea and v != eb)
        P = prev[other_prev]
        cvert = next(int(v) for v in mesh.faces[f_next] if v != ea and v != eb)
        ra = float(np.linalg.norm(verts[cvert] - verts[ea]))
        rb = float(np.linalg.norm(verts[cvert] - verts[eb]))
        ux, uy = B[0] - A[0], B[1] - A[1]
        L = sqrt(ux * ux + uy * uy)
        ux, uy = ux / L, uy / L
        x = (ra * ra - rb * rb + L * L) / (2 * L)
        h = sqrt(max(ra * ra - x * x, 0.0))
        # place the new corner on the side away from the previous face
        s = -1.0 if _cross2(A, B, P) > 0 else 1.0
        nx, ny = -uy, ux
        C = (A[0] + x * ux + s * h * nx, A[1] + x * uy + s * h * ny)
        coords.append({ea: A, eb: B, cvert: C})

    def embed(face_idx, point):
        fdict = coords[face_idx]
        vids = list(fdict)
        tri2 = np.array([fdict[v] for v in vids])
        tri3 = verts[vids]
        bary = _bary_for(tri3, point)
        return tuple(bary @ tri2)

    p2 = embed(0, p_xyz)
    q2 = embed(len(faces) - 1, q_xyz)

    portals = []
    for i, e in enumerate(edges):
        ea, eb = (int(x) for x in mesh.edges[e])
        face_before = faces[i]
        corners = [int(x) for x in mesh.faces[face_before]]
        # directed as in the winding of the face being exited
        if corners[(corners.index(ea) + 1) % 3] == eb:
            u_id, w_id = ea, eb
        else:
            u_id, w_id = eb, ea
        fdict = coords[i]
        portals.append((fdict[w_id], fdict[u_id], w_id, u_id))  # (left, right)
    return p2, q2, portals, coords


def _bary_for(tri3, point):
    t = np.asarray(point, dtype=np.float64) - tri3[2]
    m = np.stack([tri3[0] - tri3[2], tri3[1] - tri3[2]], axis=1)
    sol, *_ = np.linalg.lstsq(m, t, rcond=None)
    return np.array([sol[0], sol[1], 1.0 - sol[0] - sol[1]])


def _funnel(p2, q2, portals):
    """Taut-string sweep through the unfolded portals.

    Returns (corners, taut_length) with corners = [(portal_index,
    vertex_id)] in path order; an empty list means the straight segment
    from p2 to q2 threads every portal.  A funnel side is degenerate while
    its boundary point coincides with the apex; coincidence is exact here
    because window portals copy the wrap vertex's coordinates bitwise.
    """
    lefts = [pt for pt, *_ in portals] + [q2]
    rights = [pt for _, pt, *_ in portals] + [q2]
    left_ids = [pid for *_, pid, _ in portals] + [-2]
    right_ids = [pid for *_, pid in portals] + [-2]

    def same(u, v):
        return u[0] == v[0] and u[1] == v[1]

    apex, apex_idx = p2, -1
    left_pt, left_idx, left_vid = p2, -1, -1
    right_pt, right_idx, right_vid = p2, -1, -1
    corners = []
    anchor_pts = [p2]
    i = 0
    n = len(lefts)
    while i < n:
        L, R = lefts[i], rights[i]
        # tighten the right side
        if same(right_pt, apex) or _cross2(apex, right_pt, R) >= 0.0:
            if (
                same(right_pt, apex)
                or same(left_pt, apex)
                or _cross2(apex, left_pt, R) < 0.0
            ):
                right_pt, right_idx, right_vid = R, i, right_ids[i]
            else:
                # right sweeps past the left chain: the left point is a corner
                corners.append((left_idx, left_vid))
                anchor_pts.append(left_pt)
                apex, apex_idx = left_pt, left_idx
                right_pt, right_idx, right_vid = apex, apex_idx, -1
                i = apex_idx + 1
                continue
        # tighten the left side
        if same(left_pt, apex) or _cross2(apex, left_pt, L) <= 0.0:
            if (
                same(left_pt, apex)
                or same(right_pt, apex)
                or _cross2(apex, right_pt, L) > 0.0
            ):
                left_pt, left_idx, left_vid = L, i, left_ids[i]
            else:
                corners.append((right_idx, right_vid))
                anchor_pts.append(right_pt)
                apex, apex_idx = right_pt, right_idx
                left_pt, left_idx, left_vid = apex, apex_idx, -1
                i = apex_idx + 1
                continue
        i += 1
    anchor_pts.append(q2)
    taut = sum(
        sqrt((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2)
        for a, b in zip(anchor_pts[:-1], anchor_pts[1:])
    )
    # corners at the virtual end portal carry no vertex; drop them
    corners = [(idx, vid) for idx, vid in corners if vid >= 0 and idx < len(portals)]
    return corners, taut


# ---------------------------------------------------------------------------
# straightening loop
# ---------------------------------------------------------------------------


def _reroute(mesh, faces, edges, v, window_a, window_b):
    """Swap the corridor to the other side of vertex ``v``.

    Portals window_a..window_b all have v as an endpoint; the faces they
    join are a fan arc at v.  Replace them by the complementary arc.
    """
    f_in = faces[window_a]
    f_out = faces[window_b + 1]
    fan_faces, fan_nbrs = mesh.vertex_fans[v]
    deg = len(fan_faces)
    ia = int(np.where(fan_faces == f_in)[0][0])
    ib = int(np.where(fan_faces == f_out)[0][0])
    current_second = faces[window_a + 1]
    step_fwd = int(fan_faces[(ia + 1) % deg])
    d = -1 if step_fwd == current_second else 1
    # the complementary arc runs in direction d
    new_faces = []
    new_edges = []
    t = ia
    if ia != ib:
        while t != ib:
            t_next = (t + d) % deg
            t_edge = t if d == 1 else t_next
            new_edges.append(mesh.edge_id(v, int(fan_nbrs[t_edge])))
            new_faces.append(int(fan_faces[t_next]))
            t = t_next
    faces2 = faces[: window_a + 1] + new_faces + faces[window_b + 2 :]
    edges2 = edges[:window_a] + new_edges + edges[window_b + 1 :]
    return faces2, edges2


def _window_around(portals_ids, idx, vid):
    a = idx
    while a > 0 and vid in portals_ids[a - 1]:
        a -= 1
    b = idx
    while b + 1 < len(portals_ids) and vid in portals_ids[b + 1]:
        b += 1
    return a, b


@dataclass
class _Straightened:
    faces: list
    edges: list
    corners: list
    p2: tuple
    q2: tuple
    portals: list
    converged: bool
    rounds: int


def _straighten(mesh, faces, edges, p_xyz, q_xyz, max_rounds=400):
    accepted = set()
    state = None
    # an endpoint sitting exactly on a mesh vertex shows up as a corner at
    # distance zero; the corridor on the far side of it is vestigial
    snap = 1e-12 * mesh.bbox_diameter
    for round_no in range(max_rounds):
        faces, edges = _normalize_corridor(faces, edges)
        p2, q2, portals, _ = _unfold_corridor(mesh, faces, edges, p_xyz, q_xyz)
        corners, cur_len = _funnel(p2, q2, portals)
        state = _Straightened(faces, edges, corners, p2, q2, portals, True, round_no + 1)
        if corners:
            idx0, vid0 = corners[0]
            if np.linalg.norm(mesh.vertices[vid0] - p_xyz) <= snap:
                faces = faces[idx0 + 1 :]
                edges = edges[idx0 + 1 :]
                continue
            idx1, vid1 = corners[-1]
            if np.linalg.norm(mesh.vertices[vid1] - q_xyz) <= snap:
                faces = faces[: idx1 + 1]
                edges = edges[:idx1]
                continue
        pending = [(idx, vid) for idx, vid in corners if vid not in accepted]
        if not pending:
            return state
        ids = [(lid, rid) for *_, lid, rid in portals]
        if len(pending) > 1:
            # splice every wrapped vertex in one pass; descending portal
            # index keeps the remaining windows' positions valid, and
            # windows that overlap an already spliced range wait a round
            cf, ce = list(faces), list(edges)
            lo = len(portals) + 1
            spliced = 0
            for cidx, cvid in sorted(pending, key=lambda c: -c[0]):
                a, b = _window_around(ids, cidx, cvid)
                if b >= lo:
                    continue
                cf, ce = _reroute(mesh, cf, ce, cvid, a, b)
                lo = a
                spliced += 1
            if spliced > 1:
                cf, ce = _normalize_corridor(cf, ce)
                p2c, q2c, pc, _ = _unfold_corridor(mesh, cf, ce, p_xyz, q_xyz)
                _, new_len = _funnel(p2c, q2c, pc)
                if new_len < cur_len - 1e-12 * max(cur_len, 1.0):
                    faces, edges = cf, ce
                    continue
        idx, vid = pending[0]
        a, b = _window_around(ids, idx, vid)
        cand_faces, cand_edges = _reroute(mesh, faces, edges, vid, a, b)
        cand_faces, cand_edges = _normalize_corridor(cand_faces, cand_edges)
        p2c, q2c, portals_c, _ = _unfold_corridor(
            mesh, cand_faces, cand_edges, p_xyz, q_xyz
        )
        _, new_len = _funnel(p2c, q2c, portals_c)
        if new_len < cur_len - 1e-12 * max(cur_len, 1.0):
            faces, edges = cand_faces, cand_edges
        else:
            # wrapping this vertex is optimal (flat vertex or dead-on hit)
            accepted.add(vid)
    state.converged = False
    return state


# ---------------------------------------------------------------------------
# realization and certificates
# ---------------------------------------------------------------------------


def _segment_portal_param(c0, c1, L, R):
    """Parameter along L->R where segment c0->c1 meets the portal line."""
    d0 = _cross2(c0, c1, L)
    d1 = _cross2(c0, c1, R)
    denom = d0 - d1
    if abs(denom) < 1e-300:
        return 0.5
    return d0 / denom


def _realize(mesh, state, p_sp, q_sp, tol):
    """Crossing parameters and the final SurfacePath."""
    faces, edges, portals = state.faces, state.edges, state.portals
    graze = tol.graze_rel * mesh.bbox_diameter
    anchor = (
        [(-1, state.p2, None)]
        + [
            (idx, portals[idx][0] if vid == portals[idx][2] else portals[idx][1], vid)
            for idx, vid in state.corners
        ]
        + [(len(portals), state.q2, None)]
    )
    params = np.empty(len(portals), dtype=np.float64)
    clamped = 0
    for (i0, c0, _), (i1, c1, vid1) in zip(anchor[:-1], anchor[1:]):
        for i in range(i0 + 1, i1):
            Lpt, Rpt, lid, rid = portals[i]
            t = _segment_portal_param(c0, c1, Lpt, Rpt)
            ea, eb = mesh.edges[edges[i]]
            # t measures L->R; convert to the canonical edge direction
            s = t if lid == ea else 1.0 - t
            params[i] = s
        if 0 <= i1 < len(portals):
            # the corner touches its portal exactly at the vertex
            ea, eb = mesh.edges[edges[i1]]
            params[i1] = 0.0 if vid1 == ea else 1.0

    points = [np.asarray(p_sp.point)]
    kinds = [KIND_FACE]
    location = [faces[0]]
    eparams = [np.nan]
    for i, e in enumerate(edges):
        lo = graze / max(float(mesh.edge_lengths[e]), 1e-300)
        s = float(params[i])
        s_cl = min(max(s, lo), 1.0 - lo)
        if s_cl != s:
            clamped += 1
        params[i] = s_cl
        a, b = mesh.edges[e]
        points.append((1 - s_cl) * mesh.vertices[a] + s_cl * mesh.vertices[b])
        kinds.append(KIND_EDGE)
        location.append(e)
        eparams.append(s_cl)
    points.append(np.asarray(q_sp.point))
    kinds.append(KIND_FACE)
    location.append(faces[-1])
    eparams.append(np.nan)

    path = SurfacePath(mesh, np.asarray(points), kinds, location, eparams, faces)
    return path, clamped


def _unfolded_residuals(mesh, state, path):
    """Per-crossing turning of the realized path in the corridor development."""
    if not state.edges:
        return np.zeros(0)
    # re-derive 2d crossing points from the clamped edge parameters
    pts2 = [np.asarray(state.p2)]
    for i, e in enumerate(state.edges):
        lpt, rpt, lid, _ = state.portals[i]
        a, _b = mesh.edges[e]
        s = path.params[i + 1]
        t = s if lid == a else 1.0 - s
        pts2.append((1 - t) * np.asarray(lpt) + t * np.asarray(rpt))
    pts2.append(np.asarray(state.q2))
    pts2 = np.asarray(pts2)
    flat = np.concatenate([pts2, np.zeros((len(pts2), 1))], axis=1)
    return _kernels.turning_angles(flat)


@dataclass
class GeodesicCertificate:
    """Evidence that a straightened path is a minimizing geodesic.

    ``residuals`` hold the unfolded turning at each edge crossing; a
    geodesic threads every crossing straight, so their maximum is the local
    straightness defect.  ``lower_bound`` is the optimum over a Steiner
    graph of doubled density minus its discretization allowance
    (``correction``: edge spacing summed over crossed edges), a true lower
    bound for the geodesic distance; ``minimality_gap`` is the path length
    minus that bound.  The path is certified when the straightening loop
    converged, the residual is small, and the gap does not exceed the
    correction plus the relative length tolerance.
    """

    length: float
    chord: float
    residuals: np.ndarray
    max_residual: float
    steiner_upper: float
    refined_upper: float
    correction: float
    lower_bound: float
    minimality_gap: float
    rounds: int
    clamped_crossings: int
    vertex_hits: int
    converged: bool
    steiner_k: int

    @property
    def certified(self):
        return bool(
            self.converged
            and np.isfinite(self.lower_bound)
            and self.max_residual <= DEFAULT.straightness
            and self.minimality_gap <= self.correction + self.length * DEFAULT.length_rel
            and self.length <= self.steiner_upper * (1 + 1e-12) + 1e-300
        )

    def to_json(self):
        return {
            "length": self.length,
            "chord": self.chord,
            "max_residual": self.max_residual,
            "steiner_upper": self.steiner_upper,
            "refined_upper": self.refined_upper,
            "correction": self.correction,
            "lower_bound": self.lower_bound,
            "minimality_gap": self.minimality_gap,
            "rounds": self.rounds,
            "clamped_crossings": self.clamped_crossings,
            "vertex_hits": self.vertex_hits,
            "converged": self.converged,
            "steiner_k": self.steiner_k,
            "certified": bool(self.certified),
        }


def _graph_query(mesh, graph, p_sp, q_sp, p_faces, q_faces):
    src = np.unique(graph.face_nodes[p_faces].ravel())
    dst = np.unique(graph.face_nodes[q_faces].ravel())
    soff = np.linalg.norm(graph.positions[src] - np.asarray(p_sp.point), axis=1)
    toff = np.linalg.norm(graph.positions[dst] - np.asarray(q_sp.point), axis=1)
    return _kernels.shortest_through(
        graph.indptr, graph.indices, graph.weights, graph.n_nodes, src, soff, dst, toff
    )


def shortest_path(mesh, start, end, k=4, certify=True, tol=DEFAULT):
    """Minimizing geodesic between two surface points.

    Parameters
    ----------
    mesh : ConvexMesh
    start, end : :class:`SurfacePoint` or ``(face, barycentric)`` pairs.
    k : Steiner nodes per edge for the initial graph (the certificate uses
        a graph of doubled density).
    certify : compute the denser-graph lower bound (skippable for speed).

    Returns
    -------
    (path, certificate)
    """
    p_sp = _as_surface_point(mesh, start)
    q_sp = _as_surface_point(mesh, end)
    if np.array_equal(np.asarray(p_sp.point), np.asarray(q_sp.point)):
        raise StraighteningError("degenerate request: start equals end")
    p_faces = _faces_containing(mesh, p_sp)
    q_faces = _faces_containing(mesh, q_sp)

    common = sorted(set(p_faces) & set(q_faces))
    if common:
        f = common[0]
        pts = np.asarray([p_sp.point, q_sp.point])
        path = SurfacePath(mesh, pts, [KIND_FACE, KIND_FACE], [f, f], [np.nan, np.nan], [f])
        d = path.length
        cert = GeodesicCertificate(
            d, d, np.zeros(0), 0.0, d, d, 0.0, d, 0.0, 0, 0, 0, True, k
        )
        return path, cert

    graph = steiner_graph(mesh, k)
    upper, chain = _graph_query(mesh, graph, p_sp, q_sp, p_faces, q_faces)
    if not chain:
        raise StraighteningError("endpoints are not connected in the Steiner graph")
    faces, edges = _corridor_from_chain(mesh, graph, chain, p_faces, q_faces)
    state = _straighten(mesh, faces, edges, np.asarray(p_sp.point), np.asarray(q_sp.point))
    path, clamped = _realize(mesh, state, p_sp, q_sp, tol)
    residuals = _unfolded_residuals(mesh, state, path)
    length = path.length

    refined_upper = np.inf
    correction = np.inf
    if certify:
        graph2 = steiner_graph(mesh, 2 * k)
        refined_upper, _ = _graph_query(mesh, graph2, p_sp, q_sp, p_faces, q_faces)
        spacing = mesh.edge_lengths / (2 * k + 1)
        crossed = path.location[path.kinds == KIND_EDGE]
        correction = float(spacing[crossed].sum())
    lower = refined_upper - correction if certify else -np.inf

    cert = GeodesicCertificate(
        length=length,
        chord=path.chord,
        residuals=residuals,
        max_residual=float(np.abs(residuals).max()) if len(residuals) else 0.0,
        steiner_upper=float(upper),
        refined_upper=float(refined_upper),
        correction=float(correction),
        lower_bound=float(lower),
        minimality_gap=float(length - lower),
        rounds=state.rounds,
        clamped_crossings=int(clamped),
        vertex_hits=len({vid for _, vid in state.corners}),
        converged=state.converged,
        steiner_k=k,
    )
    return path, cert

"""Hot numerical kernels with a numba lane and a pure numpy/scipy lane.

The numba lane is the default whenever numba imports cleanly.  Setting the
environment variable ``GEOLAB_DISABLE_NUMBA=1`` before import forces the
fallback lane, which relies on vectorized numpy and scipy.sparse.csgraph.
Both lanes implement the same contracts and are exercised by the same tests;
``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("GEOLAB_DISABLE_NUMBA", "0") != "1"


# ---------------------------------------------------------------------------
# indexed binary heap, numba lane only
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sift_up(heap, pos, keys, i):
    node = heap[i]
    key = keys[node]
    while i > 0:
        parent = (i - 1) >> 1
        pnode = heap[parent]
        if keys[pnode] <= key:
            break
        heap[i] = pnode
        pos[pnode] = i
        i = parent
    heap[i] = node
    pos[node] = i


@njit(cache=True)
def _sift_down(heap, pos, keys, size, i):
    node = heap[i]
    key = keys[node]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        right = child + 1
        if right < size and keys[heap[right]] < keys[heap[child]]:
            child = right
        cnode = heap[child]
        if keys[cnode] >= key:
            break
        heap[i] = cnode
        pos[cnode] = i
        i = child
    heap[i] = node
    pos[node] = i


@njit(cache=True)
def _dijkstra_njit(indptr, indices, weights, sources, source_offsets, toff, n):
    # toff is dense: toff[v] = exit cost at target v, +inf elsewhere.
    INF = np.inf
    dist = np.full(n, INF, dtype=np.float64)
    pred = np.full(n, -1, dtype=np.int64)
    heap = np.empty(n, dtype=np.int64)
    pos = np.full(n, -1, dtype=np.int64)  # -1 not queued, -2 settled
    size = 0

    for k in range(sources.shape[0]):
        s = sources[k]
        d = source_offsets[k]
        if d < dist[s]:
            dist[s] = d
            if pos[s] == -1:
                heap[size] = s
                pos[s] = size
                size += 1
            _sift_up(heap, pos, dist, pos[s])

    best = INF
    best_node = -1
    while size > 0:
        u = heap[0]
        if dist[u] >= best:
            break
        size -= 1
        last = heap[size]
        heap[0] = last
        pos[last] = 0
        if size > 0:
            _sift_down(heap, pos, dist, size, 0)
        pos[u] = -2

        if toff[u] < INF:
            total = dist[u] + toff[u]
            if total < best:
                best = total
                best_node = u

        du = dist[u]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if pos[v] == -2:
                continue
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                if pos[v] == -1:
                    heap[size] = v
                    pos[v] = size
                    size += 1
                _sift_up(heap, pos, dist, pos[v])

    return dist, pred, best, best_node


def _shortest_scipy(indptr, indices, weights, n, sources, source_offsets, targets, target_offsets):
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra as sp_dijkstra

    # Augment with a virtual source n and virtual sink n + 1.
    base_rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    rows = np.concatenate([base_rows, np.full(len(sources), n, dtype=np.int64), targets])
    cols = np.concatenate([indices, sources, np.full(len(targets), n + 1, dtype=np.int64)])
    data = np.concatenate([weights, source_offsets, target_offsets])
    graph = csr_matrix((data, (rows, cols)), shape=(n + 2, n + 2))
    dist, pred = sp_dijkstra(graph, directed=True, indices=n, return_predecessors=True)
    total = dist[n + 1]
    if not np.isfinite(total):
        return np.inf, []
    chain = []
    v = pred[n + 1]
    while v != n and v >= 0:
        chain.append(int(v))
        v = pred[v]
    chain.reverse()
    return float(total), chain


def shortest_through(indptr, indices, weights, n, sources, source_offsets, targets, target_offsets):
    """Cheapest source -> graph -> target route with entry/exit costs.

    Parameters
    ----------
    indptr, indices, weights : CSR arrays of a symmetric positive graph on
        ``n`` nodes.
    sources, source_offsets : node ids and the cost of entering at each.
    targets, target_offsets : node ids and the cost of leaving at each.

    Returns
    -------
    (total, path) : total cost including both offsets and the node id
        sequence through the graph (possibly a single node).  ``total`` is
        ``inf`` and ``path`` empty when unreachable.
    """
    sources = np.asarray(sources, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    source_offsets = np.asarray(source_offsets, dtype=np.float64)
    target_offsets = np.asarray(target_offsets, dtype=np.float64)
    if not USE_NUMBA:
        return _shortest_scipy(
            indptr, indices, weights, n, sources, source_offsets, targets, target_offsets
        )
    toff = np.full(n, np.inf, dtype=np.float64)
    # keep the smaller exit cost when a node appears twice
    for t, off in zip(targets, target_offsets):
        if off < toff[t]:
            toff[t] = off
    dist, pred, best, best_node = _dijkstra_njit(
        indptr, indices, weights, sources, source_offsets, toff, n
    )
    if best_node < 0:
        return np.inf, []
    chain = []
    v = best_node
    while v >= 0:
        chain.append(int(v))
        v = pred[v]
    chain.reverse()
    return float(best), chain


# ---------------------------------------------------------------------------
# angle accumulation
# ---------------------------------------------------------------------------


@njit(cache=True)
def _angle_sums_njit(faces, angles, nv):
    out = np.zeros(nv, dtype=np.float64)
    for f in range(faces.shape[0]):
        for k in range(3):
            out[faces[f, k]] += angles[f, k]
    return out


def angle_sums_at_vertices(faces, corner_angles, n_vertices):
    """Sum per-corner interior angles into per-vertex totals."""
    if USE_NUMBA:
        return _angle_sums_njit(faces, corner_angles, n_vertices)
    out = np.zeros(n_vertices, dtype=np.float64)
    np.add.at(out, faces.ravel(), corner_angles.ravel())
    return out


# ---------------------------------------------------------------------------
# polyline turning
# ---------------------------------------------------------------------------


@njit(cache=True)
def _turning_njit(points):
    # atan2 of (|cross|, dot): accurate down to machine precision for tiny
    # angles, where arccos of the normalized dot product floors at sqrt(eps)
    m = points.shape[0]
    out = np.zeros(max(m - 2, 0), dtype=np.float64)
    for i in range(m - 2):
        ax = points[i + 1, 0] - points[i, 0]
        ay = points[i + 1, 1] - points[i, 1]
        az = points[i + 1, 2] - points[i, 2]
        bx = points[i + 2, 0] - points[i + 1, 0]
        by = points[i + 2, 1] - points[i + 1, 1]
        bz = points[i + 2, 2] - points[i + 1, 2]
        na = ax * ax + ay * ay + az * az
        nb = bx * bx + by * by + bz * bz
        if na == 0.0 or nb == 0.0:
            out[i] = 0.0
            continue
        cx = ay * bz - az * by
        cy = az * bx - ax * bz
        cz = ax * by - ay * bx
        s = np.sqrt(cx * cx + cy * cy + cz * cz)
        d = ax * bx + ay * by + az * bz
        out[i] = np.arctan2(s, d)
    return out


def turning_angles(points):
    """Exterior angles at the interior vertices of a 3d polyline.

    Zero-length segments contribute zero turning; the angle at a vertex
    between a degenerate and a regular segment is also zero.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] < 3:
        return np.zeros(0, dtype=np.float64)
    if USE_NUMBA:
        return _turning_njit(points)
    seg = np.diff(points, axis=0)
    a, b = seg[:-1], seg[1:]
    dots = np.einsum("ij,ij->i", a, b)
    sins = np.linalg.norm(np.cross(a, b), axis=1)
    ang = np.arctan2(sins, dots)
    good = (np.einsum("ij,ij->i", a, a) > 0.0) & (np.einsum("ij,ij->i", b, b) > 0.0)
    ang[~good] = 0.0
    return ang


def warmup():
    """Force JIT compilation of the numba lane (no-op on the numpy lane)."""
    if not USE_NUMBA:
        return
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    weights = np.array([1.0, 1.0])
    shortest_through(indptr, indices, weights, 2, [0], [0.0], [1], [0.0])
    angle_sums_at_vertices(np.zeros((1, 3), dtype=np.int64), np.zeros((1, 3)), 1)
    turning_angles(np.zeros((3, 3)))

"""Shared fixtures: small reference meshes and point-location helpers."""

import math

import numpy as np
import pytest

from geolab import ConvexMesh, SurfacePoint, convex_hull_mesh, icosphere


# =============================================================================
# Reference meshes
# =============================================================================

@pytest.fixture(scope="session")
def cube():
    """Unit cube centered at the origin, 12 triangles."""
    corners = [
        [x, y, z]
        for x in (-0.5, 0.5)
        for y in (-0.5, 0.5)
        for z in (-0.5, 0.5)
    ]
    return convex_hull_mesh(corners, descriptor={"kind": "cube"})


@pytest.fixture(scope="session")
def tetrahedron():
    """Regular tetrahedron inscribed in the unit sphere."""
    pts = np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    ) / math.sqrt(3.0)
    return convex_hull_mesh(pts, descriptor={"kind": "tetrahedron"})


def _sphere(level):
    verts, faces = icosphere(level)
    return ConvexMesh(verts, faces, descriptor={"kind": "sphere", "level": level})


@pytest.fixture(scope="session")
def sphere_320():
    return _sphere(2)


@pytest.fixture(scope="session")
def sphere_1280():
    return _sphere(3)


@pytest.fixture(scope="session")
def sphere_5120():
    return _sphere(4)


@pytest.fixture(scope="session")
def sphere_20480():
    return _sphere(5)


# =============================================================================
# Point location
# =============================================================================

def locate(mesh, xyz):
    """SurfacePoint at the point of the mesh nearest to ``xyz``.

    Scans all faces, projects onto each supporting plane, clips the
    barycentrics, and keeps the face with the smallest displacement.
    Intended for tests only; fine for meshes up to a few 10k faces.
    """
    xyz = np.asarray(xyz, dtype=np.float64)
    tri = mesh.vertices[mesh.faces]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ab, ac, ap = b - a, c - a, xyz[None, :] - a
    d00 = (ab * ab).sum(1)
    d01 = (ab * ac).sum(1)
    d11 = (ac * ac).sum(1)
    d20 = (ap * ab).sum(1)
    d21 = (ap * ac).sum(1)
    den = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    u = 1.0 - v - w
    bary = np.clip(np.stack([u, v, w], axis=1), 0.0, None)
    bary /= bary.sum(1, keepdims=True)
    proj = (tri * bary[:, :, None]).sum(1)
    face = int(np.argmin(np.linalg.norm(proj - xyz, axis=1)))
    return SurfacePoint.from_bary(mesh, face, tuple(bary[face]))


def great_circle_points(p, q, n=200):
    """Samples of the minor great-circle arc from p to q on the unit sphere."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    ang = math.acos(np.clip(p @ q, -1.0, 1.0))
    ts = np.linspace(0.0, 1.0, n)[:, None]
    return (np.sin((1.0 - ts) * ang) * p + np.sin(ts * ang) * q) / math.sin(ang)

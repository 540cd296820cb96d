"""Tests for the convex mesh container, angle defects, and validation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geolab import (
    ConvexMesh,
    angle_defect,
    convex_hull_mesh,
    validate_convex,
)
from geolab.errors import MeshTopologyError

FOUR_PI = 4.0 * math.pi


# =============================================================================
# Structure and properties
# =============================================================================

class TestMeshStructure:
    def test_counts_euler(self, cube):
        assert cube.n_vertices == 8
        assert cube.n_faces == 12
        assert cube.n_edges == 18
        assert cube.n_vertices - cube.n_edges + cube.n_faces == 2

    def test_edge_faces_two_sided(self, cube):
        ef = cube.edge_faces
        assert ef.shape == (cube.n_edges, 2)
        assert (ef >= 0).all()

    def test_face_across(self, cube):
        for face in range(cube.n_faces):
            for eid in cube.face_edge_ids[face]:
                other = cube.face_across(eid, face)
                assert other != face
                assert set(cube.edge_faces[eid]) == {face, other}

    def test_normals_outward(self, cube):
        centers = cube.vertices[cube.faces].mean(axis=1)
        inner = cube.interior_point
        assert (((centers - inner) * cube.face_normals).sum(axis=1) > 0).all()

    def test_signed_volume(self, cube):
        assert cube.signed_volume == pytest.approx(1.0, abs=1e-12)

    def test_bbox_diameter(self, cube):
        assert cube.bbox_diameter == pytest.approx(math.sqrt(3.0), abs=1e-12)

    def test_face_point_barycentric(self, cube):
        p = cube.face_point(0, (1.0, 0.0, 0.0))
        assert np.allclose(p, cube.vertices[cube.faces[0, 0]])


# =============================================================================
# Angle defects
# =============================================================================

class TestAngleDefect:
    def test_cube_corner(self, cube):
        """Three right angles meet at each corner."""
        for v in range(cube.n_vertices):
            assert angle_defect(cube, v) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_tetrahedron_vertex(self, tetrahedron):
        """2 pi minus three equilateral angles."""
        for v in range(tetrahedron.n_vertices):
            assert angle_defect(tetrahedron, v) == pytest.approx(math.pi, abs=1e-12)

    def test_matches_vectorized(self, sphere_320):
        per_vertex = [angle_defect(sphere_320, v) for v in range(sphere_320.n_vertices)]
        assert np.allclose(per_vertex, sphere_320.vertex_defects, atol=1e-12)

    def test_sphere_voronoi_area_oracle(self, sphere_20480):
        """Per-vertex defect approximates the spherical Voronoi cell area.

        On the unit sphere the curvature density is 1, so the defect at a
        vertex should converge to the area of its Voronoi cell.
        """
        from scipy.spatial import SphericalVoronoi

        sv = SphericalVoronoi(sphere_20480.vertices)
        areas = sv.calculate_areas()
        defects = sphere_20480.vertex_defects
        rel = np.abs(defects - areas) / areas
        assert np.median(rel) < 0.05

    def test_gauss_bonnet(self, cube, tetrahedron, sphere_320, sphere_5120):
        for mesh in (cube, tetrahedron, sphere_320, sphere_5120):
            assert abs(mesh.vertex_defects.sum() - FOUR_PI) < 1e-9


# =============================================================================
# Validation
# =============================================================================

class TestValidateConvex:
    def test_tetrahedron_passes(self, tetrahedron):
        report = validate_convex(tetrahedron)
        assert report.ok
        assert report.metrics["hull_violation"] == pytest.approx(0.0, abs=1e-12)
        assert report.metrics["max_dihedral_rise"] < 0.0

    def test_cube_passes(self, cube):
        assert validate_convex(cube).ok

    def test_pushed_vertex_fails_named(self, cube):
        # deep push: the corner falls inside the hull of the other seven
        verts = cube.vertices.copy()
        verts[3] *= 0.2
        dented = ConvexMesh(verts, cube.faces.copy())
        report = validate_convex(dented)
        assert not report.ok
        assert any("[3]" in issue and "off the hull" in issue for issue in report.convexity)

    def test_shallow_dent_reflex(self, cube):
        # shallow push: still a hull vertex, but the faces fold inward
        verts = cube.vertices.copy()
        verts[3] *= 0.8
        dented = ConvexMesh(verts, cube.faces.copy())
        report = validate_convex(dented)
        assert not report.ok
        assert any("reflex dihedral" in issue for issue in report.convexity)

    def test_duplicate_face_structural(self, cube):
        faces = np.vstack([cube.faces, cube.faces[:1]])
        bad = ConvexMesh(cube.vertices.copy(), faces)
        report = validate_convex(bad)
        assert not report.structural_ok
        with pytest.raises(MeshTopologyError):
            report.raise_for_issues()

    def test_open_surface_structural(self, cube):
        bad = ConvexMesh(cube.vertices.copy(), cube.faces[:-1].copy())
        assert not validate_convex(bad).structural_ok


# =============================================================================
# Random hulls keep the invariants
# =============================================================================

@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_random_hull_defects_sum_to_4pi(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(40, 3))
    mesh = convex_hull_mesh(pts)
    assert abs(mesh.vertex_defects.sum() - FOUR_PI) < 1e-9
    assert (mesh.vertex_defects > -1e-12).all()
    assert validate_convex(mesh).ok

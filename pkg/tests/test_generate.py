"""Tests for seeded surface generation."""

import math

import numpy as np
import pytest

from geolab import (
    SurfaceFamily,
    child_seed,
    convex_hull_mesh,
    generate_surface,
    icosphere,
    validate_convex,
)

FOUR_PI = 4.0 * math.pi


# =============================================================================
# Family basics
# =============================================================================

class TestEllipsoid:
    def test_unit_sphere_gauss_bonnet(self):
        fam = SurfaceFamily("ellipsoid", 320, seed=0, params={"axes": [1, 1, 1]})
        mesh = generate_surface(fam)
        assert mesh.n_faces == 320
        assert abs(mesh.vertex_defects.sum() - FOUR_PI) < 1e-9

    def test_axes_scale_bbox(self):
        fam = SurfaceFamily("ellipsoid", 320, seed=0, params={"axes": [2, 1, 0.5]})
        mesh = generate_surface(fam)
        spans = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
        assert spans == pytest.approx([4.0, 2.0, 1.0], rel=1e-6)

    def test_resolution_rounds_up(self):
        fam = SurfaceFamily("ellipsoid", 1000, seed=0)
        assert generate_surface(fam).n_faces == 1280


class TestRandomHull:
    def test_deterministic(self):
        fam = SurfaceFamily("random_hull", 100, seed=7)
        a = generate_surface(fam)
        b = generate_surface(fam)
        assert np.array_equal(a.vertices, b.vertices)
        assert np.array_equal(a.faces, b.faces)

    def test_seed_changes_mesh(self):
        a = generate_surface(SurfaceFamily("random_hull", 100, seed=7))
        b = generate_surface(SurfaceFamily("random_hull", 100, seed=8))
        assert a.vertices.shape != b.vertices.shape or not np.array_equal(
            a.vertices, b.vertices
        )

    def test_valid_convex(self):
        for law in ("uniform", "ball"):
            fam = SurfaceFamily("random_hull", 200, seed=3, params={"law": law})
            assert validate_convex(generate_surface(fam)).ok


class TestLipschitzGraph:
    def test_slope_bound_per_face(self):
        fam = SurfaceFamily(
            "lipschitz_graph", 2000, seed=1, params={"slope": 1.0, "radius": 1.0}
        )
        mesh = generate_surface(fam)
        # gradient of the graph region faces never exceeds the requested slope
        graph = mesh.face_tags == 0
        n = mesh.face_normals[graph]
        horiz = np.linalg.norm(n[:, :2], axis=1)
        grad = horiz / np.abs(n[:, 2])
        assert grad.max() <= 1.0 + 1e-9
        assert mesh.descriptor["max_graph_slope"] <= 1.0 + 1e-9

    def test_smoothing_reduces_slope(self):
        sharp = generate_surface(
            SurfaceFamily("lipschitz_graph", 2000, seed=1, params={"slope": 0.6})
        )
        assert sharp.descriptor["max_graph_slope"] <= 0.6 + 1e-9

    def test_valid_convex(self):
        fam = SurfaceFamily(
            "lipschitz_graph", 2000, seed=2, params={"slope": 1.0, "profile": "paraboloid"}
        )
        assert validate_convex(generate_surface(fam)).ok


# =============================================================================
# Seeds and descriptors
# =============================================================================

class TestSeeds:
    def test_child_seed_stable(self):
        assert child_seed(42, "pair:0:0") == child_seed(42, "pair:0:0")

    def test_child_seed_spreads(self):
        seeds = {child_seed(42, f"pair:{i}") for i in range(100)}
        assert len(seeds) == 100

    def test_master_matters(self):
        assert child_seed(1, "x") != child_seed(2, "x")


class TestDescriptor:
    def test_family_roundtrip_keys(self):
        fam = SurfaceFamily("ellipsoid", 320, seed=5, params={"axes": [1, 2, 3]})
        d = fam.descriptor()
        assert d["kind"] == "ellipsoid"
        assert d["resolution"] == 320
        assert d["seed"] == 5
        assert d["params"]["axes"] == [1, 2, 3]

    def test_mesh_descriptor_enriched(self):
        mesh = generate_surface(SurfaceFamily("ellipsoid", 320, seed=5))
        assert mesh.descriptor["n_faces"] == mesh.n_faces
        assert mesh.descriptor["n_vertices"] == mesh.n_vertices

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            generate_surface(SurfaceFamily("klein_bottle", 100))


# =============================================================================
# Helpers
# =============================================================================

class TestHullHelper:
    def test_interior_points_dropped(self):
        pts = np.vstack([np.eye(3), -np.eye(3), [[0.01, 0.0, 0.0]]])
        mesh = convex_hull_mesh(pts)
        assert mesh.n_vertices == 6

    def test_icosphere_counts(self):
        for level in range(4):
            verts, faces = icosphere(level)
            assert len(faces) == 20 * 4**level
            assert np.allclose(np.linalg.norm(verts, axis=1), 1.0, atol=1e-12)

"""Tests for planar developments and the one-sided turning check."""

import math

import numpy as np
import pytest

from geolab import (
    check_liberman,
    classify_sides,
    develop_about_point,
    develop_in_direction,
    directional_tc,
    shortest_path,
)
from tests.conftest import locate


def fit_circle_radius(points):
    """Least-squares circle radius through planar points."""
    x, y = points[:, 0], points[:, 1]
    A = np.stack([x, y, np.ones_like(x)], axis=1)
    b = x * x + y * y
    cx, cy, c = np.linalg.lstsq(A, b, rcond=None)[0]
    return math.sqrt(c + cx * cx / 4 + cy * cy / 4)


# =============================================================================
# Development about a point
# =============================================================================

class TestAboutPoint:
    def test_planar_path_congruent(self):
        """A path coplanar with the reference develops onto itself."""
        pts = np.array([[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [3.0, 0.5, 0.0], [4.0, 2.0, 0.0]])
        dev = develop_about_point(pts, np.array([0.0, 0.0, 0.0]))
        d3 = np.linalg.norm(pts, axis=1)
        d2 = np.linalg.norm(dev.points - np.asarray(dev.reference), axis=1)
        assert np.allclose(d2, d3, atol=1e-12)
        seg3 = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        seg2 = np.linalg.norm(np.diff(dev.points, axis=0), axis=1)
        assert np.allclose(seg2, seg3, atol=1e-12)

    def test_circle_about_center(self):
        ts = np.linspace(0.0, 1.5 * math.pi, 200)
        r = 0.7
        pts = np.stack([r * np.cos(ts), r * np.sin(ts), np.full_like(ts, 2.0)], axis=1)
        dev = develop_about_point(pts, np.array([0.0, 0.0, 2.0]))
        d2 = np.linalg.norm(dev.points - np.asarray(dev.reference), axis=1)
        assert np.allclose(d2, r, atol=1e-12)

    def test_cube_geodesic_distances(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        z = np.array([-40.0, 0.0, 0.0])
        dev = develop_about_point(path, z)
        d3 = np.linalg.norm(path.points - z, axis=1)
        d2 = np.linalg.norm(dev.points - np.asarray(dev.reference), axis=1)
        assert np.abs(d2 - d3).max() <= 1e-9
        assert dev.max_length_error() <= 1e-9

    def test_monotone_azimuth(self, sphere_1280):
        p = locate(sphere_1280, (1.0, 0.0, 0.0))
        q = locate(sphere_1280, (0.0, 1.0, 0.0))
        path, _ = shortest_path(sphere_1280, p, q)
        dev = develop_about_point(path, np.array([0.0, 0.0, -3.0]))
        rel = dev.points - np.asarray(dev.reference)
        az = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
        steps = np.diff(az)
        assert (steps >= -1e-12).all() or (steps <= 1e-12).all()


# =============================================================================
# Development in a direction
# =============================================================================

class TestInDirection:
    def test_straight_along_u(self, cube):
        a = locate(cube, (0.1, 0.0, 0.5))
        b = locate(cube, (0.4, 0.0, 0.5))
        path, _ = shortest_path(cube, a, b)
        u = np.array([1.0, 0.0, 0.0])
        dev = develop_in_direction(path, u)
        # heights along u become the vertical coordinate of the plane
        assert np.allclose(dev.points[:, 1], path.points @ u, atol=1e-12)
        assert abs(dev.points[-1, 1] - dev.points[0, 1]) == pytest.approx(
            path.length, rel=1e-12
        )

    def test_straight_orthogonal_to_u(self, cube):
        a = locate(cube, (0.1, 0.0, 0.5))
        b = locate(cube, (0.4, 0.0, 0.5))
        path, _ = shortest_path(cube, a, b)
        u = np.array([0.0, 0.0, 1.0])
        dev = develop_in_direction(path, u)
        assert np.allclose(dev.points[:, 1], dev.points[0, 1], atol=1e-12)
        assert dev.total_curvature == pytest.approx(0.0, abs=1e-12)

    def test_great_circle_arc_radius(self, sphere_20480):
        # the arc lies in a plane containing u, so it develops congruently
        p = locate(sphere_20480, (math.sin(0.2), 0.0, math.cos(0.2)))
        q = locate(sphere_20480, (math.sin(1.3), 0.0, math.cos(1.3)))
        path, _ = shortest_path(sphere_20480, p, q)
        dev = develop_in_direction(path, np.array([0.0, 0.0, 1.0]))
        assert fit_circle_radius(dev.points) == pytest.approx(1.0, abs=2e-3)

    def test_arclength_preserved(self, sphere_1280):
        p = locate(sphere_1280, (1.0, 0.0, 0.0))
        q = locate(sphere_1280, (0.0, 0.8, 0.6))
        path, _ = shortest_path(sphere_1280, p, q)
        dev = develop_in_direction(path, np.array([0.0, 0.0, 1.0]))
        seg2 = np.linalg.norm(np.diff(dev.points, axis=0), axis=1)
        assert np.allclose(seg2, path.seg_lengths, atol=1e-12)
        assert np.allclose(dev.arclengths, path.arclengths, atol=1e-12)


# =============================================================================
# Directional total curvature
# =============================================================================

class TestDirectionalTc:
    def test_straight_zero(self, cube):
        a = locate(cube, (0.1, 0.0, 0.5))
        b = locate(cube, (0.4, 0.2, 0.5))
        path, _ = shortest_path(cube, a, b)
        assert directional_tc(path, np.array([1.0, 0.0, 0.0])) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_cube_geodesic_bounded(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        seg = np.diff(path.points, axis=0)
        mean_dir = seg.sum(axis=0)
        mean_dir /= np.linalg.norm(mean_dir)
        tcu = directional_tc(path, mean_dir)
        assert 0.0 <= tcu <= math.pi + 1e-4

    def test_never_negative(self, sphere_1280):
        p = locate(sphere_1280, (1.0, 0.0, 0.0))
        q = locate(sphere_1280, (0.0, 0.8, 0.6))
        path, _ = shortest_path(sphere_1280, p, q)
        for u in np.eye(3):
            assert directional_tc(path, u) >= 0.0


# =============================================================================
# One-sided turning (the geodesic development sign rule)
# =============================================================================

class TestLiberman:
    def test_dark_side_uniform_sign(self, sphere_5120):
        u = np.array([0.2, -0.1, 1.0])
        u /= np.linalg.norm(u)
        # both endpoints high on the u side: the arc stays dark
        p = locate(sphere_5120, (0.35, 0.1, 0.93))
        q = locate(sphere_5120, (-0.2, 0.3, 0.93))
        path, _ = shortest_path(sphere_5120, p, q)
        sides = classify_sides(sphere_5120, u)
        assert sides.dark[path.seg_faces].all()
        report = check_liberman(path, sphere_5120, u)
        assert report.ok
        assert report.residuals["dark_max_turning"] <= 1e-8

    def test_bright_side_uniform_sign(self, sphere_5120):
        u = np.array([0.2, -0.1, 1.0])
        u /= np.linalg.norm(u)
        p = locate(sphere_5120, (0.35, 0.1, -0.93))
        q = locate(sphere_5120, (-0.2, 0.3, -0.93))
        path, _ = shortest_path(sphere_5120, p, q)
        sides = classify_sides(sphere_5120, u)
        assert (~sides.dark[path.seg_faces]).all()
        report = check_liberman(path, sphere_5120, u)
        assert report.ok
        assert report.residuals["bright_min_turning"] >= -1e-8

    def test_single_face_straight(self, cube):
        a = locate(cube, (0.1, -0.2, 0.5))
        b = locate(cube, (0.3, 0.3, 0.5))
        path, _ = shortest_path(cube, a, b)
        report = check_liberman(path, cube, np.array([0.0, 0.0, 1.0]))
        assert report.ok
        assert report.residuals["dark_max_turning"] == pytest.approx(0.0, abs=1e-15)

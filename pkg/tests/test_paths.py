"""Tests for polyline curvature, straightness, diameter, and winding."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geolab import (
    eps_straight_subdivide,
    is_eps_straight,
    path_diameter,
    shortest_path,
    total_curvature,
    winding_number,
)
from tests.conftest import great_circle_points, locate


def semicircle(r=1.0, n=400):
    ts = np.linspace(0.0, math.pi, n)
    return np.stack([r * np.cos(ts), r * np.sin(ts), np.zeros(n)], axis=1)


# =============================================================================
# Total curvature
# =============================================================================

class TestTotalCurvature:
    def test_collinear_zero(self):
        pts = [(0, 0, 0), (1, 0, 0), (2, 0, 0)]
        assert total_curvature(pts) == 0.0

    def test_right_angle(self):
        pts = [(0, 0, 0), (1, 0, 0), (1, 1, 0)]
        assert total_curvature(pts) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_semicircle(self):
        # inscribed polyline turns pi * (n-2)/(n-1): below pi, converging up
        tc = total_curvature(semicircle(n=400))
        assert tc == pytest.approx(math.pi, abs=0.01)
        assert tc <= math.pi

    def test_closed_adds_wrap_turns(self):
        square = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]
        assert total_curvature(square, closed=True) == pytest.approx(
            2 * math.pi, abs=1e-12
        )

    def test_duplicate_samples_ignored(self):
        pts = [(0, 0, 0), (1, 0, 0), (1, 0, 0), (1, 1, 0)]
        assert total_curvature(pts) == pytest.approx(math.pi / 2, abs=1e-12)


# =============================================================================
# eps-straightness
# =============================================================================

class TestIsEpsStraight:
    def test_straight_always(self):
        pts = [(0, 0, 0), (1, 0, 0), (3, 0, 0)]
        assert is_eps_straight(pts, 0.5)
        assert is_eps_straight(pts, 1e-9)

    def test_semicircle_boundary(self):
        # chord 2r over length pi r: ratio 2/pi ~ 0.6366
        arc = semicircle()
        assert is_eps_straight(arc, 0.5)
        assert not is_eps_straight(arc, 0.3)

    def test_single_point(self):
        assert is_eps_straight([(0, 0, 0)], 0.1)


class TestSubdivide:
    def test_straight_one_arc(self, cube):
        start = locate(cube, (0.1, -0.2, 0.5))
        end = locate(cube, (0.3, 0.3, 0.5))
        path, _ = shortest_path(cube, start, end)
        dec = eps_straight_subdivide(path, 0.5)
        assert dec.count == 1

    def test_cube_geodesic_counts(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        dec = eps_straight_subdivide(path, 0.5)
        assert dec.count <= 5
        for arc in dec.arcs:
            assert is_eps_straight(arc, 0.5 + 1e-12)

    def test_great_circle_arc_count(self, sphere_5120):
        # arc of length ~0.9 pi, eps = 0.1: greedy stays under ceil(2/eps)+1
        a = np.array([1.0, 0.0, 0.0])
        b = np.array([math.cos(0.9 * math.pi), math.sin(0.9 * math.pi), 0.0])
        path, _ = shortest_path(sphere_5120, locate(sphere_5120, a), locate(sphere_5120, b))
        dec = eps_straight_subdivide(path, 0.1)
        assert dec.count <= 21
        for arc in dec.arcs:
            assert is_eps_straight(arc, 0.1 + 1e-9)

    def test_boundaries_cover_length(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        dec = eps_straight_subdivide(path, 0.3)
        assert dec.boundaries[0] == 0.0
        assert dec.boundaries[-1] == pytest.approx(path.length, rel=1e-12)
        assert np.all(np.diff(dec.boundaries) > 0)

    def test_eps_out_of_range(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.3, 0.1, 0.5))
        path, _ = shortest_path(cube, start, end)
        with pytest.raises(ValueError):
            eps_straight_subdivide(path, 0.0)
        with pytest.raises(ValueError):
            eps_straight_subdivide(path, 1.0)


# =============================================================================
# Diameter
# =============================================================================

class TestDiameter:
    def test_straight_segment(self):
        assert path_diameter([(0, 0, 0), (3, 0, 0)]) == pytest.approx(3.0)

    def test_half_great_circle(self):
        # antipodal chord dominates: diameter 2, and 2 >= pi/10
        pts = great_circle_points((1, 0, 0), (0, 1, 0), 100)
        full = np.vstack([pts, great_circle_points((0, 1, 0), (-1, 0, 0), 100)])
        d = path_diameter(full)
        assert d == pytest.approx(2.0, abs=1e-3)
        assert d >= math.pi / 10

    def test_cube_geodesic(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        d = path_diameter(path)
        assert d >= path.length / 10
        assert d >= np.linalg.norm(path.points[-1] - path.points[0]) - 1e-12


# =============================================================================
# Winding number
# =============================================================================

class TestWinding:
    def test_helix_one_turn(self):
        ts = np.linspace(0.0, 2 * math.pi, 400)
        pts = np.stack([ts, np.cos(ts), np.sin(ts)], axis=1)
        w = winding_number(pts, (0, 0, 0), (1, 0, 0))
        assert w == pytest.approx(1.0, abs=1e-6)

    def test_half_plane_zero(self):
        pts = [(0, 1, 0), (1, 2, 0), (2, 1.5, 0)]
        assert winding_number(pts, (0, 0, 0), (1, 0, 0)) == pytest.approx(0.0, abs=1e-12)

    def test_two_turns(self):
        ts = np.linspace(0.0, 4 * math.pi, 800)
        pts = np.stack([ts, np.cos(ts), np.sin(ts)], axis=1)
        w = winding_number(pts, (0, 0, 0), (1, 0, 0))
        assert w == pytest.approx(2.0, abs=1e-6)


# =============================================================================
# Path containers
# =============================================================================

class TestSurfacePath:
    def test_slice_samples(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        n = path.n_samples
        sub = path.slice_samples(1, n - 2)
        assert sub.n_samples == n - 2
        assert np.array_equal(sub.points, path.points[1 : n - 1])
        assert sub.length <= path.length

    def test_slice_bounds_checked(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.3, 0.1, 0.5))
        path, _ = shortest_path(cube, start, end)
        with pytest.raises(ValueError):
            path.slice_samples(2, 1)

    def test_reversed(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        rev = path.reversed_()
        assert rev.length == pytest.approx(path.length, rel=1e-15)
        assert np.array_equal(rev.points, path.points[::-1])

    def test_point_at_endpoints(self, cube):
        start = locate(cube, (0.0, 0.0, 0.5))
        end = locate(cube, (0.0, 0.0, -0.5))
        path, _ = shortest_path(cube, start, end)
        assert np.allclose(path.point_at(0.0), path.points[0])
        assert np.allclose(path.point_at(path.length), path.points[-1])


# =============================================================================
# Properties
# =============================================================================

coords = st.floats(min_value=-10, max_value=10, allow_nan=False, width=32)
polylines = st.lists(st.tuples(coords, coords, coords), min_size=2, max_size=30)


@settings(max_examples=80, deadline=None)
@given(pts=polylines)
def test_diameter_bounds_chord_and_length(pts):
    pts = np.asarray(pts, dtype=np.float64)
    d = path_diameter(pts)
    chord = float(np.linalg.norm(pts[-1] - pts[0]))
    length = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
    assert d >= chord - 1e-9
    assert d <= length + 1e-9


@settings(max_examples=80, deadline=None)
@given(pts=polylines)
def test_straightness_monotone_in_eps(pts):
    if is_eps_straight(pts, 0.2):
        assert is_eps_straight(pts, 0.5)


@settings(max_examples=50, deadline=None)
@given(pts=polylines)
def test_total_curvature_nonnegative(pts):
    assert total_curvature(pts) >= 0.0

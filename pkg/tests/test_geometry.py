import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morphoprint.errors import DegenerateGeometryError
from morphoprint.geometry import (
    convex_hull,
    interior_angles,
    min_diameter,
    point_segment_distances,
    polygon_area,
    polygon_perimeter,
    quartile_dispersion,
)

from .oracles import (
    hull_by_halfplanes,
    min_width_by_normal_sweep,
    point_segment_distance_by_sampling,
    quartiles_by_hand,
)


def regular_polygon(n, radius=1.0, centre=(0.0, 0.0), phase=0.0):
    theta = 2 * np.pi * np.arange(n) / n + phase
    return np.stack([centre[0] + radius * np.cos(theta),
                     centre[1] + radius * np.sin(theta)], axis=1)


class TestConvexHull:
    def test_square_with_centre_point(self):
        pts = np.array([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]], dtype=float)
        hull = convex_hull(pts)
        assert len(hull) == 4
        assert {tuple(p) for p in hull} == {(0, 0), (2, 0), (2, 2), (0, 2)}

    def test_convex_input_reordered_ccw(self):
        pts = regular_polygon(7, phase=0.3)
        hull = convex_hull(pts[::-1])
        assert len(hull) == 7
        assert polygon_area(hull) > 0  # counterclockwise

    def test_collinear_input_raises(self):
        pts = np.stack([np.linspace(0, 1, 5), np.linspace(0, 2, 5)], axis=1)
        with pytest.raises(DegenerateGeometryError):
            convex_hull(pts)

    def test_collinear_points_not_on_hull(self):
        pts = np.array([[0, 0], [1, 0], [2, 0], [2, 2], [0, 2]], dtype=float)
        hull = convex_hull(pts)
        assert len(hull) == 4
        assert not any((p == [1.0, 0.0]).all() for p in hull)

    def test_matches_halfplane_oracle_on_random_inputs(self):
        rng = np.random.default_rng(7)
        for _ in range(120):
            pts = rng.uniform(-5, 5, size=(rng.integers(4, 40), 2))
            hull = convex_hull(pts)
            oracle = hull_by_halfplanes(pts)
            assert len(hull) == len(oracle)
            # same cyclic order; align on the lexicographic minimum
            k = int(np.lexsort((hull[:, 1], hull[:, 0]))[0])
            ko = int(np.lexsort((oracle[:, 1], oracle[:, 0]))[0])
            np.testing.assert_allclose(np.roll(hull, -k, axis=0),
                                       np.roll(oracle, -ko, axis=0), atol=1e-9)


class TestMinDiameter:
    def test_rectangle(self):
        rect = np.array([[0, 0], [5, 0], [5, 2], [0, 2]], dtype=float)
        assert min_diameter(rect) == pytest.approx(2.0, abs=1e-12)

    def test_equilateral_triangle_height(self):
        s = 3.0
        tri = np.array([[0, 0], [s, 0], [s / 2, s * np.sqrt(3) / 2]])
        assert min_diameter(tri) == pytest.approx(s * np.sqrt(3) / 2, abs=1e-12)

    def test_regular_hexagon_twice_apothem(self):
        hexa = regular_polygon(6)
        assert min_diameter(hexa) == pytest.approx(np.sqrt(3), abs=1e-12)

    def test_degenerate_returns_zero(self):
        line = np.array([[0, 0], [1, 1], [2, 2]], dtype=float)
        assert min_diameter(line) == 0.0

    def test_matches_normal_sweep_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            pts = rng.uniform(-10, 10, size=(rng.integers(4, 30), 2))
            hull = convex_hull(pts)
            assert min_diameter(pts) == pytest.approx(
                min_width_by_normal_sweep(hull), abs=1e-9)


class TestPointSegmentDistance:
    def test_matches_dense_sampling_oracle(self):
        rng = np.random.default_rng(13)
        pts = rng.uniform(-4, 4, size=(60, 2))
        a = rng.uniform(-4, 4, size=(60, 2))
        b = rng.uniform(-4, 4, size=(60, 2))
        fast = point_segment_distances(pts, a, b)
        for i in range(0, 60, 7):
            for j in range(0, 60, 7):
                slow = point_segment_distance_by_sampling(pts[i], a[j], b[j])
                assert fast[i, j] == pytest.approx(slow, abs=1e-9)

    def test_degenerate_segment_is_point_distance(self):
        d = point_segment_distances(np.array([[3.0, 4.0]]),
                                    np.array([[0.0, 0.0]]),
                                    np.array([[0.0, 0.0]]))
        assert d[0, 0] == pytest.approx(5.0, abs=1e-12)


class TestAngles:
    def test_regular_hexagon_interior_angles(self):
        angles = interior_angles(regular_polygon(6))
        np.testing.assert_allclose(angles, 120.0, atol=1e-9)

    def test_square_any_orientation(self):
        sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        np.testing.assert_allclose(interior_angles(sq), 90.0, atol=1e-9)
        np.testing.assert_allclose(interior_angles(sq[::-1]), 90.0, atol=1e-9)

    def test_reflex_vertex_exceeds_180(self):
        notch = np.array([[0, 0], [4, 0], [4, 4], [2, 1.0], [0, 4]])
        angles = interior_angles(notch)
        assert (angles > 180.0).sum() == 1

    def test_rotation_translation_invariance(self):
        rng = np.random.default_rng(17)
        poly = regular_polygon(9) + rng.uniform(-0.2, 0.2, (9, 2))
        base = np.sort(interior_angles(poly))
        c, s = np.cos(0.7), np.sin(0.7)
        rot = poly @ np.array([[c, -s], [s, c]]).T + np.array([100.0, -40.0])
        np.testing.assert_allclose(np.sort(interior_angles(rot)), base, atol=1e-9)


class TestQuartileDispersion:
    def test_spec_angle_multiset(self):
        assert quartile_dispersion([90, 90, 90, 180, 180, 180]) == pytest.approx(
            1.0 / 3.0, abs=1e-12)

    def test_equal_values_zero(self):
        assert quartile_dispersion([120.0] * 6) == 0.0

    def test_scale_invariance(self):
        vals = [10.0, 20.0, 35.0, 70.0, 90.0]
        assert quartile_dispersion(vals) == pytest.approx(
            quartile_dispersion([3 * v for v in vals]), abs=1e-12)

    def test_matches_hand_quartiles(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            vals = rng.uniform(0, 360, size=rng.integers(4, 50))
            q1, q3 = quartiles_by_hand(vals)
            expected = 0.0 if q1 + q3 == 0 else (q3 - q1) / (q3 + q1)
            assert quartile_dispersion(vals) == pytest.approx(expected, abs=1e-9)


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)),
                min_size=4, max_size=40))
@settings(max_examples=120, deadline=None)
def test_hull_contains_all_points(coords):
    pts = np.array(coords)
    try:
        hull = convex_hull(pts)
    except DegenerateGeometryError:
        return
    # every input point lies on or inside every hull edge half-plane
    edges = np.roll(hull, -1, axis=0) - hull
    rel = pts[None, :, :] - hull[:, None, :]
    cross = edges[:, None, 0] * rel[:, :, 1] - edges[:, None, 1] * rel[:, :, 0]
    scale = np.abs(pts).max() + 1.0
    assert (cross >= -1e-9 * scale * scale).all()


@given(st.integers(3, 12), st.floats(0.1, 30.0),
       st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
@settings(max_examples=80, deadline=None)
def test_convex_regular_polygon_width_scales(n, radius, cx, cy):
    poly = regular_polygon(n, radius, (cx, cy))
    w = min_diameter(poly)
    assert w == pytest.approx(radius * min_width_by_normal_sweep(
        regular_polygon(n)), rel=1e-9, abs=1e-9)

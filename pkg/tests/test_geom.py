import math

import numpy as np
import pytest

from geocover.errors import InvalidPolygon
from geocover.geom import (DEFAULT_TOL, Disk, Point, Polygon, Tolerance, circle_circle_intersections,
                           contains, contains_grid, contains_many, orientation, point_inversion,
                           segment_intersection)

SQUARE = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)], reference=(0, 0))


@pytest.mark.parametrize("r, want", [((0, 1), 1), ((2, 0), 0)])
def test_orientation_basic(r, want):
    assert orientation((0, 0), (1, 0), r) == want


def test_orientation_right_turn():
    assert orientation((0, 0), (0, 1), (1, 0)) == -1


def test_orientation_within_eps_is_collinear():
    assert orientation((0, 0), (1, 0), (2, 1e-12)) == 0


def test_circle_intersections_counts():
    assert circle_circle_intersections((0, 0), (3, 0), 1) == []
    assert circle_circle_intersections((0, 0), (2, 0), 1) == [Point(1.0, 0.0)]


def test_circle_intersections_residual():
    pts = circle_circle_intersections((0, 0), (1, 0), 1)
    assert len(pts) == 2
    for p in pts:
        # both circle equations, solved independently
        assert abs(p.x ** 2 + p.y ** 2 - 1) < 1e-12
        assert abs((p.x - 1) ** 2 + p.y ** 2 - 1) < 1e-12
    assert pts[0].x == pytest.approx(0.5)
    assert sorted(p.y for p in pts) == pytest.approx([-math.sqrt(0.75), math.sqrt(0.75)])


def test_segment_intersection():
    assert segment_intersection(((0, 0), (2, 2)), ((0, 2), (2, 0))) == pytest.approx((1, 1))
    assert segment_intersection(((0, 0), (1, 0)), ((0, 1), (1, 1))) is None
    assert segment_intersection(((0, 0), (2, 0)), ((1, -1), (1, 3))) == pytest.approx((1, 0))


def test_contains_closed_boundary():
    d = Disk(1.0)
    assert contains(d, (0, 0), (1, 0))
    assert not contains(d, (0, 0), (1.1, 0))
    assert contains(SQUARE, (0, 0), (0.5, 0.5))
    assert contains(SQUARE, (0, 0), (1, 1))
    assert not contains(SQUARE, (0, 0), (1.01, 0.5))


def test_contains_holes():
    holed = Polygon([(0, 0), (4, 0), (4, 4), (0, 4)], [[(1, 1), (3, 1), (3, 3), (1, 3)]], reference=(0, 0))
    assert not contains(holed, (0, 0), (2, 2))
    assert contains(holed, (0, 0), (0.5, 2))
    assert contains(holed, (0, 0), (1, 2))   # hole boundary belongs to the polygon


def test_vectorized_containment_agrees():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-2, 2, (60, 2))
    centers = rng.uniform(-1, 1, (7, 2))
    for shape in (Disk(1.0), SQUARE):
        grid = contains_grid(shape, centers, pts)
        for row, c in zip(grid, centers):
            assert (row == contains_many(shape, Point(*c), pts)).all()
            assert list(row) == [contains(shape, c, p) for p in pts]


def test_inversion_of_disk_and_square():
    assert point_inversion(Disk(1.0)) == Disk(1.0)
    inv = point_inversion(SQUARE)
    assert sorted(inv.outer) == sorted([(0, 0), (-1, 0), (-1, -1), (0, -1)])
    assert inv.reference == (0, 0)


def test_inversion_is_involution():
    poly = Polygon([(0, 0), (3, 0), (2, 1), (3, 2), (0, 2)], reference=(1, 0.5))
    back = point_inversion(point_inversion(poly))
    assert np.allclose(back.outer, poly.outer)


def test_invalid_polygon():
    with pytest.raises(InvalidPolygon):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(InvalidPolygon):
        Polygon([(0, 0), (1, 0)])


def test_disk_radius_must_be_positive():
    with pytest.raises(ValueError):
        Disk(0.0)


def test_tolerance_scale_check():
    DEFAULT_TOL.check_scale(1.0)
    with pytest.raises(ValueError):
        Tolerance(eps=0.1).check_scale(0.5)

import math

import pytest

from geocover.geom import Disk, Point, Polygon
from geocover.oracle import oracle_canonical_disks
from geocover.pipeline import ShapeSpec, discretize, resolve_algorithm, verify

DISK = ShapeSpec(Disk(1.0))
SQUARE = ShapeSpec(Polygon([(0, 0), (1, 0), (1, 1), (0, 1)], reference=(0, 0)))
STAR = ShapeSpec(Polygon([(0, 0), (2, 0), (2, 2), (1, 0.5), (0, 2)]))


def _sets(res):
    return sorted(sorted(t.covered) for t in res.translates)


def test_routing():
    assert resolve_algorithm(DISK, "auto") == "traverse"
    assert resolve_algorithm(DISK, "sweep") == "disk-sweep"
    assert resolve_algorithm(SQUARE, "auto") == "convex-sweep"
    assert resolve_algorithm(STAR, "polygon") == "simple-sweep"
    for shape, algo in [(DISK, "polygon"), (SQUARE, "traverse"), (STAR, "sweep"), (DISK, "bogus")]:
        with pytest.raises(ValueError):
            resolve_algorithm(shape, algo)


@pytest.mark.parametrize("algo", ["sweep", "traverse", "oracle"])
def test_disk_algorithms(algo):
    res = discretize([(0, 0), (1.9, 0), (3.8, 0)], DISK, algo)
    assert _sets(res) == [[0, 1], [1, 2]]
    assert verify(res, DISK) == []
    assert res.stats["k"] == 2 and res.stats["e0"] == 0


def test_duplicates_map_back():
    res = discretize([(0, 0), (0, 0), (3, 0)], DISK)
    assert _sets(res) == [[0, 1], [2]]
    assert res.stats["duplicates"] == 1 and res.stats["n_unique"] == 2


def test_degenerate_input_is_perturbed():
    # tangent circles and a shared intersection vertex
    pts = [(0, 0), (2, 0), (1, 1), (1, -1)]
    res = discretize(pts, DISK, "sweep")
    assert res.stats["perturbation_applied"]
    assert verify(res, DISK) == []
    assert set().union(*(t.covered for t in res.translates)) == set(range(4))


def test_ellipse_transform():
    shape = ShapeSpec(Disk(1.0), ((2.0, 0.0), (0.0, 1.0)))
    res = discretize([(2, 0), (-2, 0)], shape)
    assert _sets(res) == [[0, 1]]
    assert res.translates[0].reference == pytest.approx((0, 0), abs=1e-6)
    assert verify(res, shape) == []


def test_offset_reference():
    shape = ShapeSpec(Disk(1.0, center=(0.5, 0.0), reference=(0.0, 0.0)))
    pts = [(0, 0), (1.5, 0.2), (4, 4)]
    res = discretize(pts, shape)
    plain = oracle_canonical_disks([Point(*p) for p in pts], 1.0).antichain()
    assert {t.covered for t in res.translates} == plain
    for t in res.translates:
        c = (t.reference.x + 0.5, t.reference.y)
        assert {i for i, p in enumerate(pts) if math.dist(c, p) <= 1 + 1e-9} == set(t.covered)


def test_polygon_pipeline():
    res = discretize([(0, 0), (0.5, 0.5), (3, 3)], SQUARE)
    assert _sets(res) == [[0, 1], [2]]
    assert verify(res, SQUARE) == []
    res = discretize([(0.2, 0.1), (1.8, 0.1), (1, 0.3)], STAR)
    assert verify(res, STAR) == []


def test_empty_points():
    with pytest.raises(ValueError):
        discretize([], DISK)

"""Point inverses through P and their pairwise intersection statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import SingularTransform
from .geom import (DEFAULT_TOL, Disk, Point, Polygon, Shape, Tolerance, as_point,
                   contains_many, point_inversion)


@dataclass(frozen=True)
class PointInverseSet:
    inverses: tuple
    source: tuple  # index into P for each inverse

    def __len__(self):
        return len(self.inverses)


@dataclass(frozen=True)
class IntersectionStats:
    k: int
    e0: int
    pairs: tuple

    @property
    def bound(self) -> int:
        """Upper bound on the canonical count for convex prototypes."""
        return self.k + self.e0


def normalize_affine_disk(points: Sequence, transform, radius: float,
                          offset=(0.0, 0.0), tol: Tolerance = DEFAULT_TOL):
    """Reduce an ellipse prototype ``A @ disk(radius) + offset`` to a plain disk.

    Returns the points mapped through the inverse affine map and the disk.
    A placement c' found for the mapped problem corresponds to the
    placement ``A @ c' + offset`` of the ellipse.
    """
    A = np.asarray(transform, dtype=float).reshape(2, 2)
    det = float(np.linalg.det(A))
    if abs(det) <= tol.eps:
        raise SingularTransform(f"transform determinant {det:.3g} is singular")
    pts = np.array([as_point(p) for p in points], dtype=float).reshape(-1, 2)
    mapped = np.linalg.solve(A, (pts - np.asarray(offset, dtype=float)).T).T
    return [Point(float(x), float(y)) for x, y in mapped], Disk(float(radius))


def build_inverses(points: Sequence[Point], prototype: Shape) -> PointInverseSet:
    """Inverse i is the reflected prototype with its reference point at P[i]."""
    inv = point_inversion(prototype)
    rx, ry = inv.reference
    out = tuple(inv.translated(p[0] - rx, p[1] - ry) for p in points)
    return PointInverseSet(out, tuple(range(len(points))))


def _bbox(shape: Shape) -> tuple[float, float, float, float]:
    if isinstance(shape, Disk):
        c, r = shape.center, shape.radius
        return c.x - r, c.y - r, c.x + r, c.y + r
    xs = [p.x for p in shape.outer]
    ys = [p.y for p in shape.outer]
    return min(xs), min(ys), max(xs), max(ys)


def _edge_array(poly: Polygon) -> np.ndarray:
    return np.array([(a, b) for a, b in poly.edges()], dtype=float)


def boundaries_cross(e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """Proper-crossing matrix between two (m, 2, 2) edge arrays."""
    a, b = e1[:, None, 0], e1[:, None, 1]
    c, d = e2[None, :, 0], e2[None, :, 1]

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - \
            (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    return (orient(a, b, c) * orient(a, b, d) < 0) & (orient(c, d, a) * orient(c, d, b) < 0)


def polygons_intersect(p: Polygon, q: Polygon, tol: Tolerance = DEFAULT_TOL) -> bool:
    if boundaries_cross(_edge_array(p), _edge_array(q)).any():
        return True
    return bool(contains_many(p, p.reference, [q.outer[0]], tol)[0]
                or contains_many(q, q.reference, [p.outer[0]], tol)[0])


def intersection_stats(inv: PointInverseSet, tol: Tolerance = DEFAULT_TOL) -> IntersectionStats:
    """Count intersecting inverse pairs (k) and isolated inverses (e0)."""
    shapes = inv.inverses
    n = len(shapes)
    if n == 0:
        return IntersectionStats(0, 0, ())
    if isinstance(shapes[0], Disk):
        c = np.array([s.center for s in shapes])
        pairs = sorted(cKDTree(c).query_pairs(2 * shapes[0].radius + tol.eps))
    else:
        # translates of one polygon can only meet when their references are
        # within twice the largest reference-to-vertex distance
        refs = np.array([s.reference for s in shapes])
        reach = float(np.hypot(*(np.array(shapes[0].outer) - refs[0]).T).max())
        boxes = np.array([_bbox(s) for s in shapes])
        pairs = sorted((i, j) for i, j in cKDTree(refs).query_pairs(2 * reach + tol.eps)
                       if boxes[i, 0] <= boxes[j, 2] and boxes[j, 0] <= boxes[i, 2]
                       and boxes[i, 1] <= boxes[j, 3] and boxes[j, 1] <= boxes[i, 3]
                       and polygons_intersect(shapes[i], shapes[j], tol))
    touched = {i for p in pairs for i in p}
    return IntersectionStats(len(pairs), n - len(touched), tuple(pairs))

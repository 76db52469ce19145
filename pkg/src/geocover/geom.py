"""Planar primitives shared by every discretization path.

All coordinates are double precision.  A single :class:`Tolerance` governs
every comparison; degeneracies are removed up front by perturbing the input
points (see :mod:`geocover.prepare`), so the predicates here only need to be
exact enough for inputs in general position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateOverlap, InvalidPolygon, NotConvex


class Point(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate: {p!r}")
    return Point(x, y)


@dataclass(frozen=True)
class Tolerance:
    """Comparison epsilon and perturbation magnitude, in plane units."""

    eps: float = 1e-9
    perturbation: float = 1e-7

    def __post_init__(self):
        if not (0 < self.eps < self.perturbation):
            raise ValueError(
                f"need 0 < eps < perturbation, got eps={self.eps}, "
                f"perturbation={self.perturbation}")

    def check_scale(self, feature: float) -> None:
        """Reject inputs whose smallest feature is below the perturbation."""
        if not feature > self.perturbation:
            raise ValueError(
                f"minimum feature scale {feature:.3g} must exceed the "
                f"perturbation magnitude {self.perturbation:.3g}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class CanonicalTranslate:
    """A representative reference-point placement and the indices it covers."""

    reference: Point
    covered: frozenset

    def sorted_covered(self) -> list[int]:
        return sorted(self.covered)


# -- predicates ---------------------------------------------------------------

def cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orientation(p, q, r, tol: Tolerance = DEFAULT_TOL) -> int:
    """+1 if r is left of p->q, -1 if right, 0 if within eps of the line."""
    det = cross(p, q, r)
    scale = math.hypot(q[0] - p[0], q[1] - p[1])
    if abs(det) <= tol.eps * max(scale, 1.0):
        return 0
    return 1 if det > 0 else -1


def circle_circle_intersections(c1, c2, r: float,
                                tol: Tolerance = DEFAULT_TOL) -> list[Point]:
    """Intersections of two radius-r circles, sorted by (x, y)."""
    dx, dy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d <= tol.eps or d > 2 * r + tol.eps:
        return []
    mx, my = c1[0] + dx / 2, c1[1] + dy / 2
    if abs(d - 2 * r) <= tol.eps:
        return [Point(mx, my)]
    h = math.sqrt(r * r - d * d / 4)
    ux, uy = -dy / d, dx / d
    pts = [Point(mx + h * ux, my + h * uy), Point(mx - h * ux, my - h * uy)]
    pts.sort()
    return pts


def segment_intersection(s1, s2, tol: Tolerance = DEFAULT_TOL) -> Point | None:
    """Proper crossing point of two segments, or None.

    Touching at an endpoint is not a proper crossing.  Collinear segments
    sharing a stretch of positive length raise :class:`DegenerateOverlap`.
    """
    a, b = s1
    c, d = s2
    o1 = orientation(a, b, c, tol)
    o2 = orientation(a, b, d, tol)
    o3 = orientation(c, d, a, tol)
    o4 = orientation(c, d, b, tol)
    if o1 == 0 and o2 == 0:
        # collinear: project on the dominant axis
        ax = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
        lo1, hi1 = sorted((a[ax], b[ax]))
        lo2, hi2 = sorted((c[ax], d[ax]))
        if min(hi1, hi2) - max(lo1, lo2) > tol.eps:
            raise DegenerateOverlap(f"segments {s1} and {s2} overlap")
        return None
    if o1 * o2 < 0 and o3 * o4 < 0:
        return line_crossing(a, b, c, d)
    return None


def line_crossing(a, b, c, d) -> Point:
    """Intersection of lines ab and cd (assumed non-parallel)."""
    ex, ey = b[0] - a[0], b[1] - a[1]
    fx, fy = d[0] - c[0], d[1] - c[1]
    den = ex * fy - ey * fx
    t = ((c[0] - a[0]) * fy - (c[1] - a[1]) * fx) / den
    return Point(a[0] + t * ex, a[1] + t * ey)


# -- shapes -------------------------------------------------------------------

def signed_area(ring: Sequence) -> float:
    s = 0.0
    for i in range(len(ring)):
        x1, y1 = ring[i - 1]
        x2, y2 = ring[i]
        s += x1 * y2 - x2 * y1
    return s / 2


def _ring(vertices: Iterable) -> tuple[Point, ...]:
    return tuple(as_point(v) for v in vertices)


def _reverse(ring: tuple) -> tuple:
    # keeps ring[0] first so the default reference point is stable
    return ring[:1] + ring[:0:-1]


@dataclass(frozen=True)
class Disk:
    radius: float
    center: Point = Point(0.0, 0.0)
    reference: Point | None = None
    kind = "disk"

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"disk radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", as_point(self.center))
        ref = self.center if self.reference is None else as_point(self.reference)
        object.__setattr__(self, "reference", ref)

    @property
    def offset(self) -> Point:
        """Vector from the reference point to the center."""
        return Point(self.center.x - self.reference.x, self.center.y - self.reference.y)

    def translated(self, dx: float, dy: float) -> "Disk":
        return Disk(self.radius, Point(self.center.x + dx, self.center.y + dy),
                    Point(self.reference.x + dx, self.reference.y + dy))

    def diameter(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class Polygon:
    """Polygon with optional holes.

    The outer ring is stored counter-clockwise and holes clockwise, so the
    interior always lies to the left of every directed boundary edge.
    """

    outer: tuple
    holes: tuple = ()
    reference: Point | None = None
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        outer = _ring(self.outer)
        holes = tuple(_ring(h) for h in self.holes)
        if len(outer) < 3 or any(len(h) < 3 for h in holes):
            raise InvalidPolygon("every ring needs at least 3 vertices")
        if signed_area(outer) < 0:
            outer = _reverse(outer)
        holes = tuple(_reverse(h) if signed_area(h) > 0 else h for h in holes)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)
        ref = outer[0] if self.reference is None else as_point(self.reference)
        object.__setattr__(self, "reference", ref)
        if self.validate:
            self._check_simple()

    @property
    def rings(self) -> tuple:
        return (self.outer,) + self.holes

    @property
    def m(self) -> int:
        return sum(len(r) for r in self.rings)

    @property
    def kind(self) -> str:
        return "convex" if self.is_convex() else "simple"

    def is_convex(self) -> bool:
        if self.holes:
            return False
        ring = self.outer
        n = len(ring)
        signs = {orientation(ring[i - 1], ring[i], ring[(i + 1) % n]) for i in range(n)}
        return signs == {1}

    def require_convex(self) -> None:
        if not self.is_convex():
            raise NotConvex("prototype is not a convex polygon")

    def edges(self):
        for ring in self.rings:
            for i in range(len(ring)):
                yield ring[i], ring[(i + 1) % len(ring)]

    def vertices(self):
        for ring in self.rings:
            yield from ring

    def _check_simple(self) -> None:
        edges = list(self.edges())
        ids = []
        for k, ring in enumerate(self.rings):
            ids += [(k, i, len(ring)) for i in range(len(ring))]
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                ri, ii, ni = ids[i]
                rj, jj, _ = ids[j]
                if ri == rj and (jj == ii + 1 or (ii == 0 and jj == ni - 1)):
                    continue
                try:
                    hit = segment_intersection(edges[i], edges[j])
                except DegenerateOverlap:
                    hit = True
                if hit is not None or _touches(edges[i], edges[j]):
                    raise InvalidPolygon(f"boundary edges {i} and {j} intersect")
        for hole in self.holes:
            if not all(_ring_contains(self.outer, v) for v in hole):
                raise InvalidPolygon("hole is not strictly inside the outer boundary")

    def translated(self, dx: float, dy: float) -> "Polygon":
        mv = lambda r: tuple(Point(p.x + dx, p.y + dy) for p in r)
        return Polygon(mv(self.outer), tuple(mv(h) for h in self.holes),
                       Point(self.reference.x + dx, self.reference.y + dy), validate=False)

    def transformed(self, fn) -> "Polygon":
        """Apply a point map that preserves simplicity (rotation, reflection)."""
        mv = lambda r: tuple(fn(p) for p in r)
        return Polygon(mv(self.outer), tuple(mv(h) for h in self.holes),
                       fn(self.reference), validate=False)

    def diameter(self) -> float:
        pts = np.array(self.outer)
        d = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    def min_edge(self) -> float:
        return min(math.dist(a, b) for a, b in self.edges())


def _touches(e1, e2, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True if an endpoint of one segment lies on the other."""
    for p in e1:
        if point_segment_distance(p, e2) <= tol.eps:
            return True
    for p in e2:
        if point_segment_distance(p, e1) <= tol.eps:
            return True
    return False


def point_segment_distance(p, seg) -> float:
    (ax, ay), (bx, by) = seg
    vx, vy = bx - ax, by - ay
    L = vx * vx + vy * vy
    t = 0.0 if L == 0 else max(0.0, min(1.0, ((p[0] - ax) * vx + (p[1] - ay) * vy) / L))
    return math.hypot(p[0] - ax - t * vx, p[1] - ay - t * vy)


def _ring_contains(ring, p) -> bool:
    inside = False
    x, y = p
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i - 1]
        x2, y2 = ring[i]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


Shape = Disk | Polygon


# -- containment ---------------------------------------------------------------

def contains(shape: Shape, c, p, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Does the translate of ``shape`` with reference point at ``c`` contain p?

    Containment is closed: boundary points within eps count as covered.
    """
    qx = p[0] - c[0] + shape.reference.x
    qy = p[1] - c[1] + shape.reference.y
    if isinstance(shape, Disk):
        return math.hypot(qx - shape.center.x, qy - shape.center.y) <= shape.radius + tol.eps
    q = (qx, qy)
    for e in shape.edges():
        if point_segment_distance(q, e) <= tol.eps:
            return True
    inside = False
    for ring in shape.rings:
        inside ^= _ring_contains(ring, q)
    return inside


def _ring_arrays(shape: Polygon):
    a = np.array([u for u, _ in shape.edges()], dtype=float)
    b = np.array([v for _, v in shape.edges()], dtype=float)
    return a, b


def contains_many(shape: Shape, c, pts, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`contains` over an (N, 2) array of points."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    q = pts - np.array([c[0] - shape.reference.x, c[1] - shape.reference.y])
    if isinstance(shape, Disk):
        d = np.hypot(q[:, 0] - shape.center.x, q[:, 1] - shape.center.y)
        return d <= shape.radius + tol.eps
    a, b = _ring_arrays(shape)
    return _polygon_mask(a, b, q, tol.eps)


def contains_grid(shape: Shape, centers, pts, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Boolean (len(centers), len(pts)) table of ``contains(shape, c, p)``."""
    C = np.asarray(centers, dtype=float).reshape(-1, 2)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    q = pts[None, :, :] - C[:, None, :] + np.array(shape.reference)
    flat = q.reshape(-1, 2)
    if isinstance(shape, Disk):
        d = np.hypot(flat[:, 0] - shape.center.x, flat[:, 1] - shape.center.y)
        hit = d <= shape.radius + tol.eps
    else:
        a, b = _ring_arrays(shape)
        hit = _polygon_mask(a, b, flat, tol.eps)
    return hit.reshape(len(C), len(pts))


def _polygon_mask(a, b, q, eps, chunk: int = 4096) -> np.ndarray:
    out = np.empty(len(q), dtype=bool)
    v = b - a
    L = (v ** 2).sum(1)
    L[L == 0] = 1.0
    for s in range(0, len(q), chunk):
        qq = q[s:s + chunk]
        x = qq[:, 0:1]
        y = qq[:, 1:2]
        y1, y2 = a[None, :, 1], b[None, :, 1]
        straddle = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a[None, :, 0] + (y - y1) * (b[None, :, 0] - a[None, :, 0]) / (y2 - y1)
        inside = ((straddle & (xc > x)).sum(1) % 2) == 1
        t = ((x - a[None, :, 0]) * v[None, :, 0] + (y - a[None, :, 1]) * v[None, :, 1]) / L
        t = np.clip(t, 0, 1)
        dx = x - a[None, :, 0] - t * v[None, :, 0]
        dy = y - a[None, :, 1] - t * v[None, :, 1]
        on_edge = (np.hypot(dx, dy) <= eps).any(1)
        out[s:s + chunk] = inside | on_edge
    return out


def covered_indices(shape: Shape, c, points, tol: Tolerance = DEFAULT_TOL) -> frozenset:
    if len(points) == 0:
        return frozenset()
    mask = contains_many(shape, c, points, tol)
    return frozenset(int(i) for i in np.flatnonzero(mask))


# -- inversion ----------------------------------------------------------------

def point_inversion(shape: Shape) -> Shape:
    """Reflect a shape through its reference point (reference unchanged)."""
    rx, ry = shape.reference
    flip = lambda p: Point(2 * rx - p[0], 2 * ry - p[1])
    if isinstance(shape, Disk):
        return Disk(shape.radius, flip(shape.center), shape.reference)
    # a point reflection is a half-turn, so ring orientation is preserved;
    # the Polygon constructor re-normalizes regardless
    return shape.transformed(flip)

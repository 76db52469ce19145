"""Constructions behind the lower-bound figures.

``spiked_square`` is a unit square carrying ``a`` thin spikes on every
side (m = 8a vertices).  Two translates placed so that the top spikes of
one cross the left spikes of the other, and its right spikes cross the
bottom spikes of the other, meet in 8a^2 boundary points.

``dense_circles`` places four groups of ``a`` unit circles whose
boundaries run almost straight through a small window around the
origin.  Within the window the west/east boundaries form vertical lines
at interleaved positions and the north/south boundaries horizontal ones,
giving an a x a grid of sink cells, each inside 2a+2 disks.
"""

from __future__ import annotations

import numpy as np

from .geom import Point, Polygon
from .inverses import boundaries_cross

SPIKE = 3.0
SPIKE_OFFSET = (1.5, 1.55)


def spiked_square(a: int, spike: float = SPIKE) -> Polygon:
    """Unit square with ``a`` sawtooth spikes per side, reference at (0,0)."""
    if a < 1:
        raise ValueError("need at least one spike per side")
    corners = [Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)]
    normals = [(0, -1), (1, 0), (0, 1), (-1, 0)]
    ring = []
    for k in range(4):
        p, q = corners[k], corners[(k + 1) % 4]
        nx, ny = normals[k]
        for j in range(a):
            base = Point(p.x + (q.x - p.x) * j / a, p.y + (q.y - p.y) * j / a)
            ring.append(base)
            t = (j + 0.5) / a
            ring.append(Point(p.x + (q.x - p.x) * t + nx * spike,
                              p.y + (q.y - p.y) * t + ny * spike))
    return Polygon(ring, reference=Point(0, 0))


def count_boundary_intersections(p: Polygon, q: Polygon) -> int:
    e1 = np.array(list(p.edges()), dtype=float)
    e2 = np.array(list(q.edges()), dtype=float)
    return int(boundaries_cross(e1, e2).sum())


def spiked_pair_intersections(a: int, offset=SPIKE_OFFSET) -> int:
    """Perimeter crossings of two overlapped spiked-square translates."""
    poly = spiked_square(a)
    return count_boundary_intersections(poly, poly.translated(*offset))


def dense_circles(a: int, spacing: float | None = None) -> list[Point]:
    """Centers of 4a unit circles (west, east, south, north groups)."""
    h = spacing if spacing is not None else 0.02 / (a * a)
    s = [(i + 1) * h for i in range(a)]          # west boundaries, inside to the left
    t = [(i + 0.5) * h for i in range(a)]        # east boundaries, inside to the right
    # Irregular sideways shifts of order h.  Circles of one group are nearly
    # concentric; without the shifts their far intersections pile up.
    golden = (5 ** 0.5 - 1) / 2
    w = [[h * ((g * a + i + 1) * golden % 1 - 0.5) for i in range(a)] for g in range(4)]
    pts = []
    pts += [Point(-1 + s[i], w[0][i]) for i in range(a)]
    pts += [Point(1 + t[i], w[1][i]) for i in range(a)]
    pts += [Point(w[2][i], -1 + s[i]) for i in range(a)]
    pts += [Point(w[3][i], 1 + t[i]) for i in range(a)]
    return pts

"""Canonical disks by plane sweep over the arrangement of radius-r circles."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegeneracyUnresolved
from .geom import (DEFAULT_TOL, CanonicalTranslate, Disk, Point, Tolerance,
                   circle_circle_intersections, contains_many)
from .inverses import build_inverses, intersection_stats
from .report import Report
from .sweep import is_upper, owner, sweep_convex_faces


class DiskFamily:
    """Upper and lower semicircles of equal-radius circles."""

    def __init__(self, centers: Sequence[Point], radius: float, tol: Tolerance = DEFAULT_TOL):
        self.centers = list(centers)
        self.r = radius
        self.tol = tol
        self.count = len(self.centers)

    def leftmost(self, i):
        c = self.centers[i]
        return Point(c.x - self.r, c.y)

    def rightmost(self, i):
        c = self.centers[i]
        return Point(c.x + self.r, c.y)

    def y_at(self, curve, x):
        c = self.centers[owner(curve)]
        h = math.sqrt(max(self.r * self.r - (x - c.x) ** 2, 0.0))
        return c.y + h if is_upper(curve) else c.y - h

    def next_crossing(self, a, b, x, done):
        i, j = owner(a), owner(b)
        lo, hi = min(i, j), max(i, j)
        pts = circle_circle_intersections(self.centers[lo], self.centers[hi], self.r, self.tol)
        if len(pts) == 1:
            raise DegeneracyUnresolved(f"circles {lo} and {hi} are tangent")
        best = None
        for s, p in enumerate(pts):
            key = (lo, hi, s)
            if key in done or p.x < x:
                continue
            if (p.y > self.centers[i].y) != is_upper(a) or (p.y > self.centers[j].y) != is_upper(b):
                continue
            if best is None or p < best[0]:
                best = (p, key)
        return best


def mask_to_set(mask: int) -> frozenset:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def _chord_midpoint(centers, r, members, x) -> Point:
    lo, hi = -math.inf, math.inf
    for i in members:
        c = centers[i]
        h = math.sqrt(max(r * r - (x - c.x) ** 2, 0.0))
        lo, hi = max(lo, c.y - h), min(hi, c.y + h)
    return Point(x, (lo + hi) / 2)


def face_witness(samples, members, centers, proto: Disk, points, tol, tree=None) -> Point:
    """Interior reference for a convex face, re-checked by containment.

    With a KD-tree over ``points`` only the points near the placed disk
    are tested.
    """
    cx = sum(p.x for p in samples) / len(samples)
    cy = sum(p.y for p in samples) / len(samples)
    guesses = [Point(cx, cy),
               _chord_midpoint(centers, proto.radius, members, (samples[0].x + samples[-1].x) / 2)]
    off = proto.offset
    for g in guesses:
        if tree is None:
            got = frozenset(np.flatnonzero(contains_many(proto, g, points, tol)).tolist())
        else:
            near = np.array(tree.query_ball_point((g.x + off.x, g.y + off.y), proto.radius + 2 * tol.eps),
                            dtype=int)
            got = frozenset(near[contains_many(proto, g, points[near], tol)].tolist())
        if got == members:
            return g
    raise DegeneracyUnresolved(f"no witness reproduces covered set {sorted(members)}")


def report_canonical_disks(points: Sequence[Point], radius: float,
                           tol: Tolerance = DEFAULT_TOL,
                           prototype: Disk | None = None) -> Report:
    """All distinct canonical disks of a prepared (deduplicated, generic) point set.

    ``prototype`` may carry a reference point other than the center; the
    reported references are placements of that reference point.
    """
    proto = prototype or Disk(radius)
    inv = build_inverses(points, proto)
    centers = [s.center for s in inv.inverses]
    stats = intersection_stats(inv, tol)
    outcome = sweep_convex_faces(DiskFamily(centers, proto.radius, tol))
    pts = np.array(points, dtype=float).reshape(-1, 2)
    tree = cKDTree(pts)
    translates = []
    for mask, samples in outcome.faces:
        members = mask_to_set(mask)
        ref = face_witness(samples, members, centers, proto, pts, tol, tree)
        translates.append(CanonicalTranslate(ref, members))
    translates.sort(key=lambda t: sorted(t.covered))
    return Report(translates, stats, outcome.event_count,
                  outcome.region_count - outcome.merges)

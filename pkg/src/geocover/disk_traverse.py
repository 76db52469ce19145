"""Canonical disks by walking the faces of the circle arrangement.

The arrangement of radius-r circles is stored as a DCEL.  Every face walk
keeps the face on its right, so a face is an intersection of disks (the
convex faces) exactly when every arc of its walk runs clockwise around
its own circle.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegeneracyUnresolved
from .geom import (DEFAULT_TOL, CanonicalTranslate, Disk, Point, Tolerance,
                   circle_circle_intersections, contains_many)
from .inverses import build_inverses, intersection_stats
from .disk_sweep import _chord_midpoint
from .report import Report

NEW, OLD, OBSOLETE = 0, 1, 2


def fixed_radius_neighbors(points: Sequence, radius: float) -> list[tuple[int, int]]:
    """Pairs of centers closer than 2r, found through a grid of 2r cells."""
    cell = 2 * radius
    grid = defaultdict(list)
    for i, (x, y) in enumerate(points):
        grid[(math.floor(x / cell), math.floor(y / cell))].append(i)
    pairs = []
    for (gx, gy), members in grid.items():
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in grid.get((gx + dx, gy + dy), ()):
                    for i in members:
                        if i < j and math.dist(points[i], points[j]) < cell:
                            pairs.append((i, j))
    return sorted(pairs)


@dataclass
class HalfEdge:
    origin: int
    circle: int
    cw: bool           # runs clockwise around its circle: the disk is on its right
    twin: int = -1
    next: int = -1
    mark: int = NEW


@dataclass
class CircleDCEL:
    centers: list
    radius: float
    vertices: list = field(default_factory=list)     # Point
    incident: list = field(default_factory=list)     # outgoing half-edges, CCW by tangent
    half_edges: list = field(default_factory=list)
    isolated: list = field(default_factory=list)
    neighbors: dict = field(default_factory=dict)
    components: int = 0

    @property
    def bounded_faces(self) -> int:
        # Euler with every vertex of degree 4: F - 1 = E - V + C = V + C
        return len(self.vertices) + self.components


def _angle(v: Point, c: Point) -> float:
    return math.atan2(v.y - c.y, v.x - c.x)


def build_inversion_graph(points: Sequence, radius: float, pairs,
                          tol: Tolerance = DEFAULT_TOL) -> CircleDCEL:
    centers = [Point(*p) for p in points]
    g = CircleDCEL(centers, radius)
    on_circle = defaultdict(list)
    nbr = defaultdict(set)
    for i, j in pairs:
        pts = circle_circle_intersections(centers[i], centers[j], radius, tol)
        if len(pts) != 2:
            raise DegeneracyUnresolved(f"circles {i} and {j} are tangent")
        nbr[i].add(j)
        nbr[j].add(i)
        for p in pts:
            v = len(g.vertices)
            g.vertices.append(p)
            on_circle[i].append(v)
            on_circle[j].append(v)
    g.neighbors = dict(nbr)
    if g.vertices:
        arr = np.array(g.vertices)
        if cKDTree(arr).query_pairs(10 * tol.eps):
            raise DegeneracyUnresolved("coincident intersection points")

    g.isolated = [i for i in range(len(centers)) if i not in on_circle]
    out = defaultdict(list)
    for c, vs in on_circle.items():
        vs.sort(key=lambda v: _angle(g.vertices[v], centers[c]))
        for a, b in zip(vs, vs[1:] + vs[:1]):
            # arc from a to b counter-clockwise; two half-edges
            h = len(g.half_edges)
            g.half_edges.append(HalfEdge(a, c, cw=False, twin=h + 1))
            g.half_edges.append(HalfEdge(b, c, cw=True, twin=h))
            out[a].append(h)
            out[b].append(h + 1)

    def tangent(h: int) -> float:
        e = g.half_edges[h]
        t = _angle(g.vertices[e.origin], centers[e.circle])
        return t - math.pi / 2 if e.cw else t + math.pi / 2

    g.incident = [sorted(out[v], key=lambda h: math.atan2(math.sin(tangent(h)), math.cos(tangent(h))))
                  for v in range(len(g.vertices))]
    for v, hs in enumerate(g.incident):
        if len(hs) != 4:
            raise DegeneracyUnresolved(f"vertex {v} has degree {len(hs)}")
    for h, e in enumerate(g.half_edges):
        dest = g.half_edges[e.twin].origin
        ring = g.incident[dest]
        # first arc counter-clockwise after the way back
        e.next = ring[(ring.index(e.twin) + 1) % 4]

    parent = list(range(len(centers)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        parent[find(i)] = find(j)
    g.components = len({find(i) for i in range(len(centers))})
    return g


@dataclass
class TraverseOutcome:
    faces: list  # (walk circle set, vertex list)
    steps: int


def traverse_faces(g: CircleDCEL) -> TraverseOutcome:
    """Clockwise walks marking half-edges new -> old -> obsolete."""
    faces = []
    steps = 0
    for start, e in enumerate(g.half_edges):
        if e.mark != NEW:
            continue
        if not e.cw:
            e.mark = OBSOLETE  # the disk lies on its left: bounds no convex face
            continue
        path = []
        h = start
        convex = True
        while True:
            cur = g.half_edges[h]
            if cur.mark == OBSOLETE or not cur.cw:
                # this cycle was already settled, or it turns concave
                convex = False
                break
            if cur.mark == OLD:
                convex = h == start
                break
            cur.mark = OLD
            path.append(h)
            steps += 1
            h = cur.next
        if convex:
            faces.append(({g.half_edges[k].circle for k in path},
                          [g.vertices[g.half_edges[k].origin] for k in path]))
        for k in path:
            g.half_edges[k].mark = OBSOLETE
    return TraverseOutcome(faces, steps)


def traverse_report_canonical(g: CircleDCEL, points, radius: float, tol: Tolerance = DEFAULT_TOL,
                              proto: Disk | None = None) -> tuple[list, int]:
    """Canonical translates from the convex faces and the isolated circles.

    ``points`` are the original points of P; the DCEL is built on the
    inverse centers.
    """
    proto = proto or Disk(radius)
    pts = np.array(points, dtype=float).reshape(-1, 2)
    outcome = traverse_faces(g)
    out = []
    for circles, verts in outcome.faces:
        c0 = next(iter(circles))
        near = sorted({c0} | g.neighbors.get(c0, set()))
        guesses = [Point(sum(v.x for v in verts) / len(verts), sum(v.y for v in verts) / len(verts)),
                   _chord_midpoint(g.centers, radius, circles, sum(v.x for v in verts) / len(verts))]
        for ref in guesses:
            hit = contains_many(proto, ref, pts[near], tol)
            covered = frozenset(near[k] for k in np.flatnonzero(hit))
            inside = all(math.dist(ref, g.centers[c]) < radius - tol.eps for c in circles)
            if inside and circles <= covered:
                break
        else:
            raise DegeneracyUnresolved(f"no interior witness for face {sorted(circles)}")
        out.append(CanonicalTranslate(ref, covered))
    for i in g.isolated:
        out.append(CanonicalTranslate(g.centers[i], frozenset([i])))
    out.sort(key=lambda t: sorted(t.covered))
    return out, outcome.steps


def report_canonical_disks_traverse(points: Sequence[Point], radius: float,
                                    tol: Tolerance = DEFAULT_TOL,
                                    prototype: Disk | None = None) -> Report:
    proto = prototype or Disk(radius)
    inv = build_inverses(points, proto)
    centers = [s.center for s in inv.inverses]
    stats = intersection_stats(inv, tol)
    g = build_inversion_graph(centers, proto.radius, fixed_radius_neighbors(centers, proto.radius), tol)
    translates, steps = traverse_report_canonical(g, points, proto.radius, tol, proto)
    return Report(translates, stats, steps, g.bounded_faces)

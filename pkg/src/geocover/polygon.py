"""Canonical translates of polygon prototypes.

Convex prototypes reuse the convex-face sweep of :mod:`sweep` with each
inverse split into a lower and an upper x-monotone chain.  Other simple
polygons (holes allowed) are handled as an arrangement of nm segments:
every face is recorded together with its neighbours, sinks of the dual
graph are collected, and sink sets dominated by another sink set are
dropped.
"""

from __future__ import annotations

import heapq
import itertools
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateOverlap, DegeneracyUnresolved
from .geom import (DEFAULT_TOL, CanonicalTranslate, Point, Polygon, Tolerance,
                   contains_many, point_inversion, segment_intersection)
from .inverses import build_inverses, intersection_stats
from .oracle import maximal_masks
from .prepare import GAP_FACTOR, close_x_events
from .report import Report
from .sweep import is_upper, owner, sweep_convex_faces

# directions closer than this to vertical (radians) trigger a rotation
VERTICAL_MARGIN = 0.01


@dataclass(frozen=True)
class RotationFrame:
    angle: float = 0.0

    def rotate(self, p) -> Point:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return Point(c * p[0] - s * p[1], s * p[0] + c * p[1])

    def unrotate(self, p) -> Point:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return Point(c * p[0] + s * p[1], -s * p[0] + c * p[1])

    @classmethod
    def for_polygon(cls, poly: Polygon) -> "RotationFrame":
        """Keep every vertex-pair direction away from vertical.

        Pairs, not only edges, so that two vertices of one translate never
        share an x-coordinate.  The plane is left alone when it already
        qualifies; otherwise the largest angular gap is centered on the
        horizontal.
        """
        vs = np.array(list(poly.vertices()))
        d = vs[:, None, :] - vs[None, :, :]
        iu = np.triu_indices(len(vs), 1)
        phi = np.mod(np.arctan2(d[..., 1][iu], d[..., 0][iu]), math.pi)
        if np.all(np.abs(phi - math.pi / 2) > VERTICAL_MARGIN):
            return cls(0.0)
        phi = np.sort(phi)
        gaps = np.diff(np.concatenate([phi, [phi[0] + math.pi]]))
        k = int(np.argmax(gaps))
        mid = phi[k] + gaps[k] / 2
        return cls(math.pi / 2 - mid)

    def polygon(self, poly: Polygon) -> Polygon:
        return poly.transformed(self.rotate) if self.angle else poly

    def points(self, pts) -> list[Point]:
        return [self.rotate(p) for p in pts] if self.angle else [Point(*p) for p in pts]


# -- degeneracy detection ------------------------------------------------------

def _segments(points: Sequence[Point], proto: Polygon) -> tuple[np.ndarray, np.ndarray]:
    """Boundary segments of all inverses, shape (n*m, 2, 2), plus owners."""
    inv = point_inversion(proto)
    base = np.array(list(inv.edges()), dtype=float)
    ref = np.array(inv.reference)
    pts = np.array(points, dtype=float).reshape(-1, 2)
    segs = (base[None] + (pts - ref)[:, None, None, :]).reshape(-1, 2, 2)
    return segs, np.repeat(np.arange(len(pts)), len(base))


def _crossings(segs: np.ndarray, owners: np.ndarray):
    """All proper crossings between segments of different inverses."""
    a, d = segs[:, 0], segs[:, 1] - segs[:, 0]
    lo, hi = segs.min(1), segs.max(1)
    out, who = [], []
    for i in range(len(segs)):
        j = np.arange(i + 1, len(segs))
        j = j[(owners[j] != owners[i]) & (lo[j, 0] <= hi[i, 0]) & (hi[j, 0] >= lo[i, 0])
              & (lo[j, 1] <= hi[i, 1]) & (hi[j, 1] >= lo[i, 1])]
        if not len(j):
            continue
        r, s = d[i], d[j]
        den = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = a[j] - a[i]
        ok = den != 0
        den = np.where(ok, den, 1.0)
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / den
        u = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / den
        hit = ok & (t > 0) & (t < 1) & (u > 0) & (u < 1)
        out.append(a[i] + t[hit, None] * r)
        who.append(np.stack([np.full(hit.sum(), owners[i]), owners[j[hit]]], 1))
    if not out:
        return np.empty((0, 2)), np.empty((0, 2), dtype=int)
    return np.concatenate(out), np.concatenate(who)


def polygon_degeneracies(points: Sequence[Point], proto: Polygon,
                         tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Vertex on another boundary, concurrent crossings, equal event x.

    ``proto`` and ``points`` are in the sweep (rotated) frame.
    """
    if not points:
        return []
    gap = GAP_FACTOR * tol.eps
    segs, owners = _segments(points, proto)
    reasons = []
    verts = segs[:, 0]
    # vertex of one inverse on (or within gap of) a boundary of another
    a, v = segs[:, 0], segs[:, 1] - segs[:, 0]
    L = np.maximum((v ** 2).sum(1), 1e-300)
    lo, hi = segs.min(1) - gap, segs.max(1) + gap
    for k, p in enumerate(verts):
        near = np.flatnonzero((owners != owners[k]) & (lo[:, 0] <= p[0]) & (hi[:, 0] >= p[0])
                              & (lo[:, 1] <= p[1]) & (hi[:, 1] >= p[1]))
        if not len(near):
            continue
        t = np.clip(((p - a[near]) * v[near]).sum(1) / L[near], 0, 1)
        dist = np.hypot(*(p - a[near] - t[:, None] * v[near]).T)
        if (dist < gap).any():
            reasons.append("vertex on another inverse's boundary")
            break
    cross, who = _crossings(segs, owners)
    if len(cross) > 1 and cKDTree(cross).query_pairs(gap):
        reasons.append("three boundaries meet")
    ev = np.concatenate([verts, cross])
    own = np.concatenate([np.stack([owners, owners], 1), who])
    # a segment moves at most slope * gap in y between two close events
    dx = np.abs(v[:, 0])
    slope = float((np.abs(v[:, 1]) / np.where(dx > 0, dx, np.inf)).max())
    if close_x_events(ev[:, 0], own, gap, ev[:, 1], 10 * gap * (1 + slope)):
        reasons.append("equal event x-coordinates")
    return reasons


# -- convex prototypes: chain sweep ---------------------------------------------

@dataclass(frozen=True)
class Chain:
    """x-monotone polyline with strictly increasing xs."""
    xs: tuple
    ys: tuple

    def y_at(self, x: float) -> float:
        k = min(max(bisect_right(self.xs, x) - 1, 0), len(self.xs) - 2)
        x0, x1 = self.xs[k], self.xs[k + 1]
        y0, y1 = self.ys[k], self.ys[k + 1]
        return y0 + (x - x0) * (y1 - y0) / (x1 - x0)

    def translated(self, dx: float, dy: float) -> "Chain":
        return Chain(tuple(x + dx for x in self.xs), tuple(y + dy for y in self.ys))


def split_chains(poly: Polygon) -> tuple[Chain, Chain]:
    """Lower and upper chains of a convex polygon without vertical edges."""
    ring = list(poly.outer)
    n = len(ring)
    left = min(range(n), key=lambda i: (ring[i].x, ring[i].y))
    right = max(range(n), key=lambda i: (ring[i].x, ring[i].y))
    lower = [ring[(left + k) % n] for k in range((right - left) % n + 1)]
    upper = [ring[(left - k) % n] for k in range((left - right) % n + 1)]
    for ch in (lower, upper):
        if any(b.x <= a.x for a, b in zip(ch, ch[1:])):
            raise DegeneracyUnresolved("polygon chain is not strictly x-monotone")
    mk = lambda ch: Chain(tuple(p.x for p in ch), tuple(p.y for p in ch))
    return mk(lower), mk(upper)


def neighbor_chain_intersection(a: Chain, b: Chain, x_from: float = -math.inf,
                                x_to: float = math.inf, skip=()):
    """Earliest crossing of two chains in [x_from, x_to].

    Returns ``(point, (seg_a, seg_b))`` or None.  A merge walk over the
    breakpoints of both chains: on each piece both are linear, so a sign
    change of their difference marks a crossing.  Pieces are enumerated from
    the one containing ``x_from`` so that a crossing just processed keeps
    its key and can be skipped.
    """
    lo = max(a.xs[0], b.xs[0])
    hi = min(a.xs[-1], b.xs[-1], x_to)
    if lo >= hi:
        return None
    cuts = sorted(set(x for x in a.xs + b.xs if lo < x < hi) | {lo, hi})
    start = max(bisect_right(cuts, x_from) - 1, 0)
    for x0, x1 in zip(cuts[start:], cuts[start + 1:]):
        d0 = a.y_at(x0) - b.y_at(x0)
        d1 = a.y_at(x1) - b.y_at(x1)
        if (d0 > 0) == (d1 > 0) or d0 == d1:
            continue
        x = x0 + (x1 - x0) * d0 / (d0 - d1)
        if x < x_from:
            continue
        xm = (x0 + x1) / 2
        ka = min(max(bisect_right(a.xs, xm) - 1, 0), len(a.xs) - 2)
        kb = min(max(bisect_right(b.xs, xm) - 1, 0), len(b.xs) - 2)
        if (ka, kb) in skip:
            continue
        return Point(x, a.y_at(x)), (ka, kb)
    return None


class _DoneView:
    """Segment pairs already crossed by one chain pair."""

    def __init__(self, done, pair):
        self.done, self.pair = done, pair

    def __contains__(self, seg_pair):
        return self.pair + seg_pair in self.done


class ChainFamily:
    def __init__(self, lowers: list, uppers: list):
        self.chains = [c for pair in zip(lowers, uppers) for c in pair]
        self.count = len(lowers)

    def leftmost(self, i):
        c = self.chains[2 * i]
        return Point(c.xs[0], c.ys[0])

    def rightmost(self, i):
        c = self.chains[2 * i]
        return Point(c.xs[-1], c.ys[-1])

    def y_at(self, curve, x):
        return self.chains[curve].y_at(x)

    def next_crossing(self, a, b, x, done):
        lo, hi = min(a, b), max(a, b)
        hit = neighbor_chain_intersection(self.chains[lo], self.chains[hi], x,
                                          skip=_DoneView(done, (lo, hi)))
        if hit is None:
            return None
        pt, (sa, sb) = hit
        return pt, (lo, hi, sa, sb)


def _vertical_chord_mid(family: ChainFamily, members, x: float) -> Point:
    lo = max(family.chains[2 * i].y_at(x) for i in members)
    hi = min(family.chains[2 * i + 1].y_at(x) for i in members)
    return Point(x, (lo + hi) / 2)


def report_canonical_convex_polygon(points: Sequence[Point], prototype: Polygon,
                                    tol: Tolerance = DEFAULT_TOL,
                                    frame: RotationFrame | None = None) -> Report:
    prototype.require_convex()
    frame = frame or RotationFrame.for_polygon(prototype)
    proto_r = frame.polygon(prototype)
    pts_r = frame.points(points)
    inv = build_inverses(pts_r, proto_r)
    base_lo, base_hi = split_chains(point_inversion(proto_r))
    ref = point_inversion(proto_r).reference
    lowers = [base_lo.translated(p.x - ref.x, p.y - ref.y) for p in pts_r]
    uppers = [base_hi.translated(p.x - ref.x, p.y - ref.y) for p in pts_r]
    family = ChainFamily(lowers, uppers)
    outcome = sweep_convex_faces(family)

    arr = np.array(pts_r, dtype=float).reshape(-1, 2)
    translates = []
    for mask, samples in outcome.faces:
        members = _bits(mask)
        xs = [s.x for s in samples]
        guesses = [_vertical_chord_mid(family, members, (min(xs) + max(xs)) / 2),
                   Point(sum(xs) / len(xs), sum(s.y for s in samples) / len(samples))]
        for g in guesses:
            got = frozenset(np.flatnonzero(contains_many(proto_r, g, arr, tol)).tolist())
            if got == members:
                break
        else:
            raise DegeneracyUnresolved(f"no witness reproduces covered set {sorted(members)}")
        translates.append(CanonicalTranslate(frame.unrotate(g), members))
    translates.sort(key=lambda t: sorted(t.covered))
    # convex faces are already maximal; the filter must be a no-op
    masks = [_mask(t.covered) for t in translates]
    assert len(maximal_masks(masks)) == len(masks), "convex sweep reported a dominated set"
    stats = intersection_stats(build_inverses(points, prototype), tol)
    return Report(translates, stats, outcome.event_count, outcome.region_count - outcome.merges,
                  {"rotation": frame.angle})


def _bits(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _mask(s) -> int:
    return sum(1 << i for i in s)


# -- simple polygons: segment sweep ----------------------------------------------

START, BEND, END = "start", "bend", "end"
VERTEX, CROSSING = 1, 0


@dataclass
class FaceRecord:
    mask: int
    witness: Point | None = None
    width: float = -1.0
    out_degree: int = 0
    parent: int | None = None

    @property
    def covered(self) -> frozenset:
        return _bits(self.mask)


@dataclass
class _Seg:
    a: Point   # left endpoint
    b: Point   # right endpoint
    owner: int
    interior_above: bool

    def y_at(self, x: float) -> float:
        return self.a.y + (x - self.a.x) * (self.b.y - self.a.y) / (self.b.x - self.a.x)


@dataclass
class SegmentSweep:
    segs: list
    faces: list = field(default_factory=list)
    adjacency: set = field(default_factory=set)
    event_count: int = 0


def _build_segments(points: Sequence[Point], inv_base: Polygon):
    """Segments of every inverse plus the vertex events joining them."""
    segs, events = [], []
    ref = inv_base.reference
    for i, p in enumerate(points):
        dx, dy = p.x - ref.x, p.y - ref.y
        for ring in inv_base.rings:
            ring = [Point(v.x + dx, v.y + dy) for v in ring]
            first = len(segs)
            m = len(ring)
            for k in range(m):
                u, w = ring[k], ring[(k + 1) % m]
                if u.x == w.x:
                    raise DegeneracyUnresolved("vertical edge in sweep frame")
                # interior lies left of the directed edge
                segs.append(_Seg(min(u, w), max(u, w), i, w.x > u.x))
            for k in range(m):
                e_in, e_out = first + (k - 1) % m, first + k
                events.append((ring[k], e_in, e_out))
    return segs, events


def sweep_segments(segs: list, vertex_events: list) -> SegmentSweep:
    out = SegmentSweep(segs)
    heap = []
    seq = itertools.count()
    for v, e_in, e_out in vertex_events:
        heap.append((v.x, v.y, VERTEX, next(seq), (v, e_in, e_out)))
    heapq.heapify(heap)

    faces = out.faces
    faces.append(FaceRecord(0))  # unbounded face
    status: list[int] = []
    regions: list[int] = [0]
    pending, done = set(), set()
    x_now = -math.inf

    def find(f):
        while faces[f].parent is not None:
            f = faces[f].parent
        return f

    def new_face(mask):
        faces.append(FaceRecord(mask))
        return len(faces) - 1

    def check(j):
        if j < 0 or j + 1 >= len(status):
            return
        s, t = status[j], status[j + 1]
        if segs[s].owner == segs[t].owner:
            return
        key = (min(s, t), max(s, t))
        if key in done or key in pending:
            return
        try:
            p = segment_intersection((segs[s].a, segs[s].b), (segs[t].a, segs[t].b))
        except DegenerateOverlap as exc:
            raise DegeneracyUnresolved(str(exc)) from exc
        if p is None or p.x < x_now:
            return
        pending.add(key)
        heapq.heappush(heap, (p.x, p.y, CROSSING, next(seq), key))

    def touch(lo, hi):
        """Record adjacencies and witness candidates for intervals lo..hi."""
        x_next = heap[0][0] if heap else x_now + 1.0
        xm = (x_now + x_next) / 2
        for k in range(max(lo, 0), min(hi, len(regions) - 1) + 1):
            f = find(regions[k])
            if 0 < k < len(regions) - 1 and x_next > x_now:
                y0 = segs[status[k - 1]].y_at(xm)
                y1 = segs[status[k]].y_at(xm)
                score = min(y1 - y0, x_next - x_now)
                if score > faces[f].width:
                    faces[f].width = score
                    faces[f].witness = Point(xm, (y0 + y1) / 2)
            if k + 1 < len(regions):
                g = find(regions[k + 1])
                if f != g:
                    out.adjacency.add((min(f, g), max(f, g)))

    def position(x, y):
        return bisect_left(status, y, key=lambda s: segs[s].y_at(x))

    while heap:
        x, y, kind, _, payload = heapq.heappop(heap)
        x_now = x
        out.event_count += 1
        if kind == CROSSING:
            pending.discard(payload)
            s, t = payload
            js, jt = status.index(s), status.index(t)
            if abs(js - jt) != 1:
                out.event_count -= 1
                continue
            done.add(payload)
            j = min(js, jt)
            lo, hi = status[j], status[j + 1]
            above, below = find(regions[j + 2]), find(regions[j])
            mask = faces[above].mask ^ (1 << segs[lo].owner)
            if mask != faces[below].mask ^ (1 << segs[hi].owner):
                raise DegeneracyUnresolved("inconsistent covered sets at a crossing")
            status[j], status[j + 1] = hi, lo
            regions[j + 1] = new_face(mask)
            check(j - 1)
            check(j + 1)
            touch(j, j + 2)
            continue

        v, e_in, e_out = payload
        # each edge runs from its left to its right endpoint in the sweep
        in_right = segs[e_in].a == v    # the edge entering v lies right of v
        out_right = segs[e_out].a == v
        if in_right and out_right:
            j = position(x, y)
            s1, s2 = sorted((e_in, e_out), key=lambda s: (segs[s].b.y - v.y) / (segs[s].b.x - v.x))
            old = find(regions[j])
            bit = 1 << segs[s1].owner
            if segs[s1].interior_above == bool(faces[old].mask & bit):
                raise DegeneracyUnresolved("inconsistent covered set at a start vertex")
            status[j:j] = [s1, s2]
            regions[j + 1:j + 1] = [new_face(faces[old].mask ^ bit), old]
            check(j - 1)
            check(j + 1)
            touch(j, j + 2)
        elif not in_right and not out_right:
            j = min(status.index(e_in), status.index(e_out))
            if status[j + 1] not in (e_in, e_out):
                raise DegeneracyUnresolved("segments meeting at an end vertex are not adjacent")
            below, above = find(regions[j]), find(regions[j + 2])
            if below != above:
                if faces[below].mask != faces[above].mask:
                    raise DegeneracyUnresolved("merged faces disagree on covered set")
                keep, drop = min(below, above), max(below, above)
                faces[drop].parent = keep
                if faces[drop].width > faces[keep].width:
                    faces[keep].width, faces[keep].witness = faces[drop].width, faces[drop].witness
            del status[j:j + 2]
            del regions[j + 1:j + 3]
            check(j - 1)
            touch(j - 1, j)
        else:
            old_seg, new_seg = (e_in, e_out) if out_right else (e_out, e_in)
            j = status.index(old_seg)
            status[j] = new_seg
            check(j - 1)
            check(j)
            touch(j, j + 1)
    return out


def sink_faces(sw: SegmentSweep) -> list[int]:
    """Bounded faces with no neighbour holding a larger covered set."""
    faces = sw.faces

    def find(f):
        while faces[f].parent is not None:
            f = faces[f].parent
        return f

    for f in faces:
        f.out_degree = 0
    seen = set()
    for f, g in sw.adjacency:
        f, g = find(f), find(g)
        if f == g or (min(f, g), max(f, g)) in seen:
            continue
        seen.add((min(f, g), max(f, g)))
        diff = faces[f].mask ^ faces[g].mask
        if diff == 0 or diff & (diff - 1):
            raise DegeneracyUnresolved("adjacent faces differ by other than one inverse")
        small = f if faces[f].mask & diff == 0 else g
        faces[small].out_degree += 1
    return [i for i, f in enumerate(faces)
            if f.parent is None and f.mask and f.out_degree == 0]


def report_canonical_simple_polygon(points: Sequence[Point], prototype: Polygon,
                                    tol: Tolerance = DEFAULT_TOL,
                                    frame: RotationFrame | None = None) -> Report:
    frame = frame or RotationFrame.for_polygon(prototype)
    proto_r = frame.polygon(prototype)
    pts_r = frame.points(points)
    segs, events = _build_segments(pts_r, point_inversion(proto_r))
    sw = sweep_segments(segs, events)
    sinks = sink_faces(sw)

    by_mask: dict[int, list[int]] = {}
    for f in sinks:
        by_mask.setdefault(sw.faces[f].mask, []).append(f)
    keep = maximal_masks(by_mask)
    arr = np.array(pts_r, dtype=float).reshape(-1, 2)
    translates = []
    for mask in keep:
        best = max(by_mask[mask], key=lambda f: sw.faces[f].width)
        face = sw.faces[best]
        if face.witness is None:
            raise DegeneracyUnresolved(f"face {sorted(face.covered)} has no witness")
        got = frozenset(np.flatnonzero(contains_many(proto_r, face.witness, arr, tol)).tolist())
        if got != face.covered:
            raise DegeneracyUnresolved(f"witness does not reproduce covered set {sorted(face.covered)}")
        translates.append(CanonicalTranslate(frame.unrotate(face.witness), face.covered))
    translates.sort(key=lambda t: sorted(t.covered))
    stats = intersection_stats(build_inverses(points, prototype), tol)
    bounded = sum(1 for f in sw.faces[1:] if f.parent is None)
    extra = {
        "rotation": frame.angle,
        "sink_faces": len(sinks),
        "sink_sets": len(by_mask),
        "dominated_sink_sets": len(by_mask) - len(keep),
        "max_sink_multiplicity": max((len(v) for v in by_mask.values()), default=0),
    }
    return Report(translates, stats, sw.event_count, bounded, extra)


def report_canonical_polygon(points, prototype: Polygon, tol: Tolerance = DEFAULT_TOL) -> Report:
    if prototype.is_convex():
        return report_canonical_convex_polygon(points, prototype, tol)
    return report_canonical_simple_polygon(points, prototype, tol)

"""Left-to-right plane sweep that reports the convex faces of an arrangement.

The arrangement is formed by closed convex curves (circles or convex
polygons), each split at its leftmost and rightmost vertex into a lower and
an upper x-monotone curve.  Every interval of the sweep line points to the
region (swept part of a face) it belongs to.  A region stays convex as long
as every curve bounding it has the region on its inside: a lower curve from
above, or an upper curve from below.  For convex prototypes these convex
faces are exactly the sink faces, i.e. the distinct canonical translates.

Curves are small ints: ``2*i`` is the lower curve of object i and ``2*i+1``
its upper curve.
"""

from __future__ import annotations

import heapq
import itertools
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Protocol

from .errors import DegeneracyUnresolved
from .geom import Point

RIGHTMOST, CROSSING, LEFTMOST = 0, 1, 2


def owner(curve: int) -> int:
    return curve >> 1


def is_upper(curve: int) -> bool:
    return bool(curve & 1)


class CurveFamily(Protocol):
    count: int

    def leftmost(self, i: int) -> Point: ...

    def rightmost(self, i: int) -> Point: ...

    def y_at(self, curve: int, x: float) -> float: ...

    def next_crossing(self, a: int, b: int, x: float, done: set) -> tuple[Point, tuple] | None:
        """Earliest crossing of curves a and b at or right of x, skipping ``done`` keys."""


class Region:
    __slots__ = ("rid", "mask", "convex", "samples", "parent")

    def __init__(self, rid: int, mask: int, convex: bool, samples: list):
        self.rid = rid
        self.mask = mask
        self.convex = convex
        self.samples = samples
        self.parent = None

    def find(self) -> "Region":
        r = self
        while r.parent is not None:
            r = r.parent
        return r


@dataclass
class SweepOutcome:
    faces: list = field(default_factory=list)  # (mask, boundary sample points)
    event_count: int = 0
    region_count: int = 0
    distinct_sets: int = 0
    merges: int = 0


def convexity_update(lower_upper: bool, upper_upper: bool, old_convex: bool,
                     above_convex: bool, below_convex: bool) -> tuple[bool, bool, bool]:
    """Convexity flags after two curves cross.

    ``lower_upper``/``upper_upper`` tell whether the curve that was below
    (resp. above) just before the crossing is an upper curve.  Returns the
    flags of the new region between them and of the regions above and below.
    """
    if lower_upper == upper_upper:
        # The neighbours already lie outside one of the two curves, so they
        # were non-convex before and stay as they are.
        return False, above_convex, below_convex
    # Mixed pair.  The new region is bounded by both curves from the inside
    # only when the old one was bounded by both from the outside, in which
    # case the old region was necessarily non-convex.
    new = lower_upper
    assert not (new and old_convex)
    return new, False, False


def sweep_convex_faces(family: CurveFamily) -> SweepOutcome:
    out = SweepOutcome()
    heap: list = []
    seq = itertools.count()
    for i in range(family.count):
        lp, rp = family.leftmost(i), family.rightmost(i)
        heapq.heappush(heap, (lp.x, lp.y, LEFTMOST, next(seq), i))
        heapq.heappush(heap, (rp.x, rp.y, RIGHTMOST, next(seq), i))

    rid = itertools.count()
    outer = Region(next(rid), 0, False, [])
    status: list[int] = []
    regions: list[Region] = [outer]
    pending: set = set()
    done: set = set()
    masks: set = set()
    x_now = float("-inf")

    def new_region(mask, convex, samples):
        masks.add(mask)
        out.region_count += 1
        return Region(next(rid), mask, convex, samples)

    def check(j):
        if j < 0 or j + 1 >= len(status):
            return
        a, b = status[j], status[j + 1]
        if owner(a) == owner(b):
            return
        hit = family.next_crossing(a, b, x_now, done)
        if hit is None or hit[1] in pending:
            return
        pt, key = hit
        pending.add(key)
        heapq.heappush(heap, (pt.x, pt.y, CROSSING, next(seq), (a, b, key)))

    def report(region):
        out.faces.append((region.mask, list(region.samples)))

    while heap:
        x, y, kind, _, payload = heapq.heappop(heap)
        x_now = x
        p = Point(x, y)
        out.event_count += 1

        if kind == LEFTMOST:
            i = payload
            j = bisect_left(status, y, key=lambda c: family.y_at(c, x))
            status[j:j] = [2 * i, 2 * i + 1]
            old = regions[j].find()
            old.convex = False  # the new curves bound it from outside
            inside = new_region(old.mask | (1 << i), True, [p])
            regions[j + 1:j + 1] = [inside, old]
            check(j - 1)
            check(j + 1)

        elif kind == RIGHTMOST:
            i = payload
            j = status.index(2 * i)
            if j + 1 >= len(status) or status[j + 1] != 2 * i + 1:
                raise DegeneracyUnresolved(f"curves of object {i} not adjacent at its end")
            inside = regions[j + 1].find()
            if inside.convex:
                inside.samples.append(p)
                report(inside)
            below, above = regions[j].find(), regions[j + 2].find()
            keep = below
            if below is not above:
                if below.mask != above.mask:
                    raise DegeneracyUnresolved("merged regions disagree on covered set")
                keep, drop = sorted((below, above), key=lambda r: r.rid)
                drop.parent = keep
                keep.convex = keep.convex and drop.convex
                out.merges += 1
            del status[j:j + 2]
            del regions[j + 1:j + 3]
            regions[j] = keep
            check(j - 1)

        else:
            a, b, key = payload
            pending.discard(key)
            ja, jb = status.index(a), status.index(b)
            if abs(ja - jb) != 1:
                # stale: something came between; rescheduled once adjacent again
                out.event_count -= 1
                continue
            done.add(key)
            j = min(ja, jb)
            lo, hi = status[j], status[j + 1]
            below, old, above = (regions[k].find() for k in (j, j + 1, j + 2))
            if old.convex:
                old.samples.append(p)
                report(old)
            status[j], status[j + 1] = hi, lo
            bit = 1 << owner(lo)
            mask = above.mask | bit if is_upper(lo) else above.mask & ~bit
            new_c, above_c, below_c = convexity_update(
                is_upper(lo), is_upper(hi), old.convex, above.convex, below.convex)
            above.convex = above.convex and above_c
            below.convex = below.convex and below_c
            for r in {above, below}:
                if r.convex:
                    r.samples.append(p)
            regions[j + 1] = new_region(mask, new_c, [p])
            check(j - 1)
            check(j)  # the same pair may cross a second time
            check(j + 1)

    masks.discard(0)
    out.distinct_sets = len(masks)
    return out

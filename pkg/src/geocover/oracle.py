"""Brute-force canonical families for small instances.

Two independent routes: a finite candidate family of placements (circle
centers through point pairs for disks, a slab decomposition of the naive
segment arrangement for polygons), and a dense grid sampler.  Both test
the prototype placed at a candidate directly, without point inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceeded
from .geom import (DEFAULT_TOL, Disk, Point, Polygon, Shape, Tolerance, contains_grid,
                   point_inversion)

DISK_CAP = 30
POLY_POINT_CAP = 20
POLY_VERTEX_CAP = 12


@dataclass
class CandidateFamily:
    sets: list          # frozensets, sorted
    witnesses: list     # one placement per set
    maximal: list       # bool per set

    def antichain(self) -> set:
        return {s for s, m in zip(self.sets, self.maximal) if m}

    def maximal_witnesses(self) -> dict:
        return {s: w for s, w, m in zip(self.sets, self.witnesses, self.maximal) if m}


def pack_rows(rows: np.ndarray) -> list[int]:
    """Boolean (k, n) rows to python int bitmasks."""
    rows = np.asarray(rows, dtype=bool)
    out = [0] * len(rows)
    for start in range(0, rows.shape[1], 60):
        block = rows[:, start:start + 60].astype(np.int64)
        vals = block @ (np.int64(1) << np.arange(block.shape[1], dtype=np.int64))
        out = [o | (int(v) << start) for o, v in zip(out, vals)]
    return out


def _unpack(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def maximal_masks(masks) -> list[int]:
    """Masks that are not a proper subset of another mask."""
    uniq = sorted(set(masks) - {0}, key=lambda m: -bin(m).count("1"))
    keep: list[int] = []
    for m in uniq:
        if not any(m & k == m for k in keep):
            keep.append(m)
    return keep


def _family(shape: Shape, placements: np.ndarray, points: np.ndarray, tol: Tolerance) -> CandidateFamily:
    best: dict[int, Point] = {}
    for s in range(0, len(placements), 2048):
        block = placements[s:s + 2048]
        for c, m in zip(block, pack_rows(contains_grid(shape, block, points, tol))):
            if m and m not in best:
                best[m] = Point(float(c[0]), float(c[1]))
    top = set(maximal_masks(best))
    order = sorted(best, key=lambda m: sorted(_unpack(m)))
    return CandidateFamily([_unpack(m) for m in order], [best[m] for m in order],
                           [m in top for m in order])


def disk_candidates(points: np.ndarray, radius: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Point centers plus both radius-r centers through every close pair."""
    out = [points]
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = points[i], points[j]
            v = b - a
            d = math.hypot(*v)
            if d == 0 or d > 2 * radius:
                continue
            mid = (a + b) / 2
            h = math.sqrt(max(radius * radius - d * d / 4, 0.0))
            u = np.array([-v[1], v[0]]) / d
            for s in (1, -1):
                c = mid + s * h * u
                # pull the center toward the chord so both points move inside
                toward = mid - c
                norm = math.hypot(*toward)
                if norm > 0:
                    c = c + toward / norm * tol.eps * 10
                out.append(c[None, :])
    return np.concatenate(out)


def oracle_canonical_disks(points: Sequence, radius: float, tol: Tolerance = DEFAULT_TOL,
                           cap: int = DISK_CAP, center: Point = Point(0.0, 0.0)) -> CandidateFamily:
    """Canonical disk family of ``Disk(radius)`` over ``points``.

    Witnesses are placements of the disk center; ``center`` shifts them for
    a prototype whose reference point is not the center.
    """
    if len(points) > cap:
        raise CapExceeded(f"disk oracle limited to {cap} points, got {len(points)}")
    pts = np.array(points, dtype=float).reshape(-1, 2)
    return _family(Disk(radius), disk_candidates(pts, radius, tol), pts, tol)


def all_face_sets_disks(points: Sequence, radius: float, tol: Tolerance = DEFAULT_TOL) -> set:
    """Covered sets of every face of the disk arrangement, maximal or not.

    Each face has a vertex or a whole circle on its boundary, so probing
    just off every vertex in four directions and at every center finds all
    of them.
    """
    pts = np.array(points, dtype=float).reshape(-1, 2)
    probes = [pts]
    step = 1e-6 * radius
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            v = pts[j] - pts[i]
            d = math.hypot(*v)
            if d == 0 or d >= 2 * radius:
                continue
            mid = (pts[i] + pts[j]) / 2
            h = math.sqrt(radius * radius - d * d / 4)
            u = np.array([-v[1], v[0]]) / d
            for s in (1, -1):
                c = mid + s * h * u
                # step so that the distance to each center moves by +-step
                M = np.array([c - pts[i], c - pts[j]]) / radius
                dirs = np.linalg.solve(M, np.array([[a, b] for a in (1, -1) for b in (1, -1)]).T).T
                dirs /= np.abs(dirs).max(1, keepdims=True)
                probes.append(c + step * dirs)
    fam = _family(Disk(radius), np.concatenate(probes), pts, tol)
    return set(fam.sets)


def grid_sample_sets(shape: Shape, points: Sequence, step: float,
                     tol: Tolerance = DEFAULT_TOL, chunk: int = 2048) -> set:
    """Covered sets met by placements on a lattice of spacing ``step``."""
    pts = np.array(points, dtype=float).reshape(-1, 2)
    if isinstance(shape, Disk):
        lo = np.array(shape.center) - shape.radius
        hi = np.array(shape.center) + shape.radius
    else:
        v = np.array(shape.outer)
        lo, hi = v.min(0), v.max(0)
    # c covers p iff p - c + reference lies in the shape
    ref = np.array(shape.reference)
    lo, hi = pts.min(0) + ref - hi - step, pts.max(0) + ref - lo + step
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.stack([gx.ravel(), gy.ravel()], 1)
    masks = set()
    for s in range(0, len(grid), chunk):
        masks.update(pack_rows(contains_grid(shape, grid[s:s + chunk], pts, tol)))
    return {_unpack(m) for m in masks if m}


def _slab_samples(segs: np.ndarray) -> np.ndarray:
    """Interior samples of every face of a segment arrangement.

    The plane is cut into vertical slabs at every vertex and crossing x;
    inside a slab, the midpoints between consecutive segments hit every
    face piece (a vertical trapezoid).
    """
    a, b = segs[:, 0], segs[:, 1]
    xs = [segs[:, :, 0].ravel()]
    d1 = b - a
    for i in range(len(segs)):
        p, r = a[i], d1[i]
        q, s = a[i + 1:], d1[i + 1:]
        den = r[0] * s[:, 1] - r[1] * s[:, 0]
        ok = np.abs(den) > 1e-15
        qp = q - p
        t = np.where(ok, (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / np.where(ok, den, 1), -1)
        u = np.where(ok, (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / np.where(ok, den, 1), -1)
        hit = ok & (t > 0) & (t < 1) & (u > 0) & (u < 1)
        xs.append(p[0] + t[hit] * r[0])
    xs = np.unique(np.concatenate(xs))
    out = []
    lo_x = np.minimum(a[:, 0], b[:, 0])
    hi_x = np.maximum(a[:, 0], b[:, 0])
    for x0, x1 in zip(xs[:-1], xs[1:]):
        if x1 - x0 < 1e-12:
            continue
        xm = (x0 + x1) / 2
        act = (lo_x < xm) & (hi_x > xm)
        if not act.any():
            continue
        sa, sb = a[act], b[act]
        ys = np.sort(sa[:, 1] + (xm - sa[:, 0]) * (sb[:, 1] - sa[:, 1]) / (sb[:, 0] - sa[:, 0]))
        mids = (ys[:-1] + ys[1:]) / 2
        out.append(np.stack([np.full(len(mids), xm), mids], 1))
    return np.concatenate(out) if out else np.empty((0, 2))


def oracle_canonical_polygons(points: Sequence, prototype: Polygon, tol: Tolerance = DEFAULT_TOL,
                              point_cap: int = POLY_POINT_CAP,
                              vertex_cap: int = POLY_VERTEX_CAP) -> CandidateFamily:
    """Canonical family from the naive arrangement of all inverse boundary segments."""
    if len(points) > point_cap or prototype.m > vertex_cap:
        raise CapExceeded(f"polygon oracle limited to n <= {point_cap}, m <= {vertex_cap}")
    pts = np.array(points, dtype=float).reshape(-1, 2)
    inv = point_inversion(prototype)
    rx, ry = inv.reference
    edges = np.array([e for e in inv.edges()], dtype=float)
    segs = np.concatenate([edges + (p - (rx, ry)) for p in pts]) if len(pts) else edges[:0]
    fam = _family(prototype, _slab_samples(segs), pts, tol)
    return fam

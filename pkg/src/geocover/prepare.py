"""Input preparation: deduplication, degeneracy detection and perturbation.

The discretization algorithms assume general position.  Rather than
handling special cases inside each sweep, the input points are nudged by
deterministic hash-seeded offsets until no degeneracy is detected.  Only
the points of P move; prototypes and tolerances never change.
"""

from __future__ import annotations

import hashlib
import logging
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegeneracyUnresolved
from .geom import DEFAULT_TOL, Point, Tolerance, as_point

log = logging.getLogger(__name__)

# degeneracy detection threshold, in units of Tolerance.eps
GAP_FACTOR = 10.0
# every ESCALATE_EVERY rounds the magnitude grows by ESCALATE_BY, but stays
# below min_feature / MAGNITUDE_MARGIN
ESCALATE_EVERY = 8
ESCALATE_BY = 4.0
MAGNITUDE_MARGIN = 100.0
MAX_ROUNDS = 24


@dataclass
class Prepared:
    points: list[Point]
    groups: list[list[int]]  # original input indices behind each kept point
    perturbed: bool = False
    seed: int = 0
    magnitude: float = 0.0
    rounds: int = 0
    reasons: list[str] = field(default_factory=list)

    @property
    def duplicates(self) -> list[list[int]]:
        return [g for g in self.groups if len(g) > 1]

    def original_indices(self, covered) -> list[int]:
        return sorted(i for c in covered for i in self.groups[c])


def dedupe(points: Sequence, tol: Tolerance = DEFAULT_TOL):
    """Merge points closer than eps; the first occurrence is kept."""
    pts = [as_point(p) for p in points]
    if not pts:
        return [], []
    parent = list(range(len(pts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(np.array(pts)).query_pairs(tol.eps):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    kept, groups, slot = [], [], {}
    for i, p in enumerate(pts):
        r = find(i)
        if r not in slot:
            slot[r] = len(kept)
            kept.append(pts[r])
            groups.append([])
        groups[slot[r]].append(i)
    if len(kept) < len(pts):
        log.info("merged %d duplicate points", len(pts) - len(kept))
    return kept, groups


def _unit_offsets(n: int, seed: int, rnd: int) -> np.ndarray:
    out = np.empty((n, 2))
    for i in range(n):
        h = hashlib.blake2b(f"{seed}:{rnd}:{i}".encode(), digest_size=8).digest()
        (u,) = struct.unpack("<Q", h)
        theta = (u / 2.0 ** 64) * 2 * math.pi
        out[i] = (math.cos(theta), math.sin(theta))
    return out


def perturb(points: Sequence[Point], seed: int, rnd: int, magnitude: float) -> list[Point]:
    """Shift every point by ``magnitude`` in a hash-determined direction."""
    off = _unit_offsets(len(points), seed, rnd) * magnitude
    return [Point(p.x + dx, p.y + dy) for p, (dx, dy) in zip(points, off)]


def prepare(points: Sequence, detect: Callable[[list[Point]], list[str]],
            tol: Tolerance = DEFAULT_TOL, seed: int = 0, start_round: int = 0,
            max_rounds: int = MAX_ROUNDS) -> Prepared:
    """Deduplicate, then perturb until ``detect`` reports no degeneracy.

    ``start_round > 0`` skips the unperturbed attempt; callers use it to
    retry after a sweep hit a degeneracy the detector missed.
    """
    kept, groups = dedupe(points, tol)
    reasons: list[str] = []
    if start_round == 0:
        reasons = detect(kept)
        if not reasons:
            return Prepared(kept, groups, seed=seed)
        start_round = 1
    ceiling = min_feature(kept) / MAGNITUDE_MARGIN
    for rnd in range(start_round, start_round + max_rounds):
        g = round_magnitude(tol.perturbation, rnd, ceiling)
        moved = perturb(kept, seed, rnd, g)
        left = detect(moved)
        if not left:
            log.info("perturbed input (round %d, magnitude %.3g): %s", rnd, g, "; ".join(reasons[:3]))
            return Prepared(moved, groups, True, seed, g, rnd, reasons)
        reasons = reasons or left
    raise DegeneracyUnresolved(
        f"input still degenerate after {max_rounds} perturbation rounds: "
        + "; ".join(reasons[:3]))


def round_magnitude(base: float, rnd: int, ceiling: float = math.inf) -> float:
    """Perturbation magnitude of round ``rnd`` (1-based).

    Large near-regular inputs have so many almost-degenerate pairs that a
    fixed tiny nudge leaves some of them within the detection gap; growing
    the magnitude slowly resolves them while staying far below the scale
    of the input.
    """
    g = base * ESCALATE_BY ** ((rnd - 1) // ESCALATE_EVERY)
    return max(base, min(g, ceiling))


def min_feature(points: Sequence[Point]) -> float:
    """Smallest distance between two distinct input points (inf if < 2)."""
    if len(points) < 2:
        return math.inf
    d, _ = cKDTree(np.array(points)).query(np.array(points), k=2)
    return float(d[:, 1].min())


# -- disks --------------------------------------------------------------------

def disk_vertices(centers: np.ndarray, radius: float, pairs: np.ndarray) -> np.ndarray:
    """Both intersection points of every listed circle pair, shape (2P, 2)."""
    if len(pairs) == 0:
        return np.empty((0, 2))
    a = centers[pairs[:, 0]]
    b = centers[pairs[:, 1]]
    v = b - a
    d = np.hypot(v[:, 0], v[:, 1])
    h = np.sqrt(np.maximum(radius ** 2 - d ** 2 / 4, 0.0))
    m = a + v / 2
    u = np.stack([-v[:, 1], v[:, 0]], 1) / d[:, None]
    return np.concatenate([m + h[:, None] * u, m - h[:, None] * u])


def disk_degeneracies(centers: Sequence[Point], radius: float,
                      tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Detect coincident/tangent circles, concurrent boundaries, equal event x."""
    gap = GAP_FACTOR * tol.eps
    c = np.array(centers, dtype=float).reshape(-1, 2)
    if len(c) == 0:
        return []
    reasons = []
    tree = cKDTree(c)
    pairs = np.array(sorted(tree.query_pairs(2 * radius + gap)), dtype=int).reshape(-1, 2)
    if len(pairs):
        d = np.hypot(*(c[pairs[:, 0]] - c[pairs[:, 1]]).T)
        if (d < gap).any():
            reasons.append("coincident circles")
        if (np.abs(d - 2 * radius) < gap).any():
            reasons.append("tangent circles")
        pairs = pairs[d < 2 * radius - gap]
    verts = disk_vertices(c, radius, pairs)
    extremes = np.concatenate([c - [radius, 0], c + [radius, 0]])
    owners = np.concatenate([pairs, pairs]) if len(pairs) else np.empty((0, 2), int)
    # a vertex sitting on a third circle, or an extreme point on another circle
    probes = np.concatenate([verts, extremes])
    own = np.concatenate([owners, np.tile(np.arange(len(c))[:, None], (2, 2))])
    for idx, cand in enumerate(tree.query_ball_point(probes, radius + gap)):
        p = probes[idx]
        hit = any(k not in own[idx]
                  and abs(math.hypot(p[0] - c[k, 0], p[1] - c[k, 1]) - radius) < gap
                  for k in cand)
        if hit:
            reasons.append("three boundaries meet" if idx < len(verts)
                           else "extreme point on another circle")
            break
    if len(verts):
        dy = np.abs(verts[:, 1:2] - c[owners][:, :, 1])
        if (dy < gap).any():
            reasons.append("intersection at a circle's extreme point")
    # near a vertical tangent a curve moves sqrt(2 r dx) in y over dx
    if close_x_events(probes[:, 0], own, gap, probes[:, 1], 10 * math.sqrt(2 * radius * gap)):
        reasons.append("equal event x-coordinates")
    return reasons


def close_x_events(xs: np.ndarray, owners: np.ndarray, gap: float,
                   ys: np.ndarray | None = None, ywin: float = math.inf) -> bool:
    """Two events of disjoint objects within ``gap`` in x (and ``ywin`` in y).

    Events of a shared object are ordered along that object, and near its
    extreme point their x gap shrinks quadratically, so they are skipped.
    Events far apart in y touch different parts of the sweep status, so
    their order does not matter.
    """
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    for a in np.flatnonzero(np.diff(xs) < gap):
        b = a + 1
        while b < len(xs) and xs[b] - xs[a] < gap:
            near = ys is None or abs(ys[order[a]] - ys[order[b]]) < ywin
            if near and not set(owners[order[a]]) & set(owners[order[b]]):
                return True
            b += 1
    return False

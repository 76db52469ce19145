"""End-to-end discretization: prepare P, pick an algorithm, map results back."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import disk_sweep, disk_traverse, oracle, polygon
from .errors import DegeneracyUnresolved
from .geom import DEFAULT_TOL, CanonicalTranslate, Disk, Point, Polygon, Tolerance, contains_many
from .inverses import build_inverses, intersection_stats, normalize_affine_disk
from .prepare import MAX_ROUNDS, Prepared, dedupe, disk_degeneracies, min_feature, prepare
from .report import Report

log = logging.getLogger(__name__)

ALGORITHMS = ("auto", "sweep", "traverse", "polygon", "oracle")
RETRIES = 4


@dataclass(frozen=True)
class ShapeSpec:
    """A prototype as loaded from input.

    Disks may carry a 2x2 ``transform`` turning them into ellipses; the
    reference point is then the ellipse center.
    """
    prototype: Disk | Polygon
    transform: tuple | None = None

    @property
    def is_disk(self) -> bool:
        return isinstance(self.prototype, Disk)


@dataclass
class Discretization:
    translates: list         # CanonicalTranslate over original indices, original frame
    stats: dict
    prepared: Prepared
    algorithm: str
    report: Report | None = None
    work_points: list = field(default_factory=list)   # points in the working frame


def resolve_algorithm(shape: ShapeSpec, algorithm: str) -> str:
    """Concrete routine name; raises ValueError when it cannot handle the shape."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if shape.is_disk:
        if algorithm == "auto":
            return "traverse"
        if algorithm == "polygon":
            raise ValueError("algorithm 'polygon' needs a polygon prototype")
        return {"sweep": "disk-sweep", "traverse": "traverse", "oracle": "oracle"}[algorithm]
    convex = shape.prototype.is_convex()
    if algorithm in ("auto", "polygon"):
        return "convex-sweep" if convex else "simple-sweep"
    if algorithm == "traverse":
        raise ValueError("algorithm 'traverse' needs a disk prototype")
    if algorithm == "sweep":
        if not convex:
            raise ValueError("algorithm 'sweep' needs a convex prototype; use 'polygon'")
        return "convex-sweep"
    return "oracle"


def _working_points(points: Sequence, shape: ShapeSpec, tol: Tolerance):
    """Points and prototype of the problem actually solved (ellipses become disks)."""
    if shape.is_disk and shape.transform is not None:
        return normalize_affine_disk(points, shape.transform, shape.prototype.radius, tol=tol)
    return [Point(*p) for p in points], shape.prototype


def _detector(proto, tol: Tolerance):
    if isinstance(proto, Disk):
        off = proto.offset
        # the inverse centers are the points shifted by -offset
        return lambda q: disk_degeneracies([Point(p.x - off.x, p.y - off.y) for p in q],
                                           proto.radius, tol)
    frame = polygon.RotationFrame.for_polygon(proto)
    rotated = frame.polygon(proto)
    return lambda q: polygon.polygon_degeneracies(frame.points(q), rotated, tol)


def _run(kind: str, pts: list, proto, tol: Tolerance) -> Report:
    if kind == "disk-sweep":
        return disk_sweep.report_canonical_disks(pts, proto.radius, tol, proto)
    if kind == "traverse":
        return disk_traverse.report_canonical_disks_traverse(pts, proto.radius, tol, proto)
    if kind == "convex-sweep":
        return polygon.report_canonical_convex_polygon(pts, proto, tol)
    if kind == "simple-sweep":
        return polygon.report_canonical_simple_polygon(pts, proto, tol)
    # oracle
    if isinstance(proto, Disk):
        fam = oracle.oracle_canonical_disks(pts, proto.radius, tol)
        off = proto.offset
        wit = {s: Point(w.x - off.x, w.y - off.y) for s, w in fam.maximal_witnesses().items()}
    else:
        wit = oracle.oracle_canonical_polygons(pts, proto, tol).maximal_witnesses()
    translates = sorted((CanonicalTranslate(w, s) for s, w in wit.items()),
                        key=lambda t: sorted(t.covered))
    stats = intersection_stats(build_inverses(pts, proto), tol)
    return Report(translates, stats, 0, 0)


def discretize(points: Sequence, shape: ShapeSpec, algorithm: str = "auto",
               tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> Discretization:
    kind = resolve_algorithm(shape, algorithm)
    work, proto = _working_points(points, shape, tol)
    if len(work) == 0:
        raise ValueError("point set is empty")
    kept, _ = dedupe(work, tol)
    scale = proto.radius if isinstance(proto, Disk) else proto.min_edge()
    tol.check_scale(min(min_feature(kept), scale))
    detect = _detector(proto, tol)

    prep = prepare(work, detect, tol, seed)
    for attempt in range(RETRIES + 1):
        try:
            report = _run(kind, prep.points, proto, tol)
            break
        except DegeneracyUnresolved as exc:
            if attempt == RETRIES:
                raise
            log.info("retrying after degeneracy: %s", exc)
            prep = prepare(work, detect, tol, seed, start_round=prep.rounds + 1,
                           max_rounds=MAX_ROUNDS)
            prep.reasons = prep.reasons or [str(exc)]

    A = None if shape.transform is None else np.asarray(shape.transform, dtype=float)
    out = []
    for t in report.translates:
        ref = t.reference
        if A is not None:
            x, y = A @ np.array(ref)
            ref = Point(float(x), float(y))
        out.append(CanonicalTranslate(ref, frozenset(prep.original_indices(t.covered))))
    out.sort(key=lambda t: sorted(t.covered))

    stats = {
        "n": len(points),
        "n_unique": len(prep.points),
        "duplicates": sum(len(g) - 1 for g in prep.groups),
        "k": report.stats.k,
        "e0": report.stats.e0,
        "event_count": report.event_count,
        "face_count": report.face_count,
        "canonical_count": len(out),
        "perturbation_applied": prep.perturbed,
        "algorithm": kind,
    }
    stats.update(report.extra)
    return Discretization(out, stats, prep, kind, report, prep.points)


def verify(result: Discretization, shape: ShapeSpec, tol: Tolerance = DEFAULT_TOL) -> list[str]:
    """Re-check every reported set against containment on the working points."""
    proto = shape.prototype
    A = None if shape.transform is None else np.asarray(shape.transform, dtype=float)
    pts = np.array(result.work_points, dtype=float).reshape(-1, 2)
    problems = []
    for t in result.translates:
        ref = np.array(t.reference)
        if A is not None:
            ref = np.linalg.solve(A, ref)
        got = np.flatnonzero(contains_many(proto, Point(*ref), pts, tol))
        want = result.prepared.original_indices(got.tolist())
        if want != sorted(t.covered):
            problems.append(f"translate at {tuple(t.reference)} covers {want}, reported {sorted(t.covered)}")
    return problems

"""Reading point and shape files, and building result documents."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import InvalidPolygon
from .geom import Disk, Point, Polygon
from .pipeline import Discretization, ShapeSpec
from .setcover import CoverSolution


class InputError(ValueError):
    """Malformed input file; ``where`` is "path:line:column" when known."""

    def __init__(self, path, message, line=None, column=None):
        self.where = f"{path}:{line}:{column}" if line is not None else str(path)
        super().__init__(f"{self.where}: {message}")


def _number(v, path, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InputError(path, f"{what} must be a finite number, got {v!r}")
    return float(v)


def _pair(v, path, what):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise InputError(path, f"{what} must be an [x, y] pair, got {v!r}")
    return Point(_number(v[0], path, what), _number(v[1], path, what))


def _load_json(path: Path):
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(path, exc.msg, exc.lineno, exc.colno) from None


def load_points(path) -> list[Point]:
    """JSON ``{"points": [[x, y], ...]}`` or CSV lines ``x,y``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = _load_json(path)
        if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
            raise InputError(path, 'expected an object with a "points" list')
        return [_pair(p, path, f"points[{i}]") for i, p in enumerate(doc["points"])]
    pts = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise InputError(path, f"expected 2 fields, got {len(row)}", line, 1)
            xy = []
            col = 1
            for field in row:
                try:
                    v = float(field)
                except ValueError:
                    if not pts and not xy and line == 1:
                        break  # header row
                    raise InputError(path, f"not a number: {field.strip()!r}", line, col) from None
                if not math.isfinite(v):
                    raise InputError(path, f"not a finite number: {field.strip()!r}", line, col)
                xy.append(v)
                col += len(field) + 1
            if len(xy) == 2:
                pts.append(Point(*xy))
    return pts


def load_shape(path) -> ShapeSpec:
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise InputError(path, "shape must be a JSON object")
    kind = doc.get("type")
    try:
        if kind == "disk":
            r = _number(doc.get("radius"), path, "radius")
            if r <= 0:
                raise InputError(path, f"radius must be positive, got {r}")
            tr = doc.get("transform")
            if tr is not None:
                if not (isinstance(tr, list) and len(tr) == 2 and all(isinstance(row, list) and len(row) == 2 for row in tr)):
                    raise InputError(path, "transform must be a 2x2 matrix")
                tr = tuple(tuple(_number(v, path, "transform entry") for v in row) for row in tr)
            return ShapeSpec(Disk(r), tr)
        if kind == "polygon":
            outer = doc.get("outer")
            if not isinstance(outer, list):
                raise InputError(path, 'polygon needs an "outer" vertex list')
            outer = [_pair(v, path, f"outer[{i}]") for i, v in enumerate(outer)]
            holes = doc.get("holes", [])
            if not isinstance(holes, list):
                raise InputError(path, '"holes" must be a list of vertex lists')
            holes = [[_pair(v, path, f"holes[{k}][{i}]") for i, v in enumerate(h)] for k, h in enumerate(holes)]
            ref = doc.get("reference")
            ref = None if ref is None else _pair(ref, path, "reference")
            return ShapeSpec(Polygon(outer, holes, ref))
    except InputError:
        raise
    except (ValueError, TypeError, InvalidPolygon) as exc:
        raise InputError(path, str(exc)) from None
    raise InputError(path, f'unknown shape type {kind!r}; expected "disk" or "polygon"')


def result_document(res: Discretization, solution: CoverSolution | None,
                    seed: int, magnitude: float) -> dict:
    doc = {
        "translates": [{"reference": [t.reference.x, t.reference.y],
                        "covered": sorted(t.covered)} for t in res.translates],
        "stats": res.stats,
        "perturbation": {
            "applied": res.prepared.perturbed,
            "seed": seed,
            "magnitude": res.prepared.magnitude if res.prepared.perturbed else magnitude,
            "round": res.prepared.rounds,
        },
    }
    if solution is not None:
        doc["solution"] = solution.as_dict()
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"

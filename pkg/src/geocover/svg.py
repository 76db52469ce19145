"""Static SVG plot of a discretization result.

Layers, bottom to top: inverse boundaries (``class="inverse"``), one
outline per canonical translate (``class="translate"``), the input points
(``<circle class="point">``) and star markers at the translate references
(``class="star"``).  Numbers are printed with a fixed format so equal
inputs give equal bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .geom import Disk, Point, Polygon, point_inversion
from .pipeline import ShapeSpec

SIZE = 640.0
PAD = 24.0
ELLIPSE_STEPS = 72


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _View:
    def __init__(self, lo, hi):
        span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
        self.lo, self.hi = lo, hi
        self.k = (SIZE - 2 * PAD) / span

    def __call__(self, p) -> tuple[str, str]:
        x = PAD + (p[0] - self.lo[0]) * self.k
        y = PAD + (self.hi[1] - p[1]) * self.k
        return _fmt(x), _fmt(y)


def _outline(shape: ShapeSpec, proto, at) -> list[list]:
    """Boundary rings (point lists) of ``proto`` with its reference at ``at``."""
    if isinstance(proto, Disk):
        c = Point(at[0] + proto.offset.x, at[1] + proto.offset.y)
        ring = [(c.x + proto.radius * math.cos(t), c.y + proto.radius * math.sin(t))
                for t in np.linspace(0, 2 * math.pi, ELLIPSE_STEPS, endpoint=False)]
        if shape.transform is not None:
            A = np.asarray(shape.transform, dtype=float)
            base = np.array(at)
            ring = [tuple(A @ (np.array(p) - base) + base) for p in ring]
        return [ring]
    dx, dy = at[0] - proto.reference.x, at[1] - proto.reference.y
    return [[(p.x + dx, p.y + dy) for p in r] for r in proto.rings]


def _disk_path(view: _View, c, r) -> str:
    x0, y = view((c[0] - r, c[1]))
    x1, _ = view((c[0] + r, c[1]))
    rr = _fmt(r * view.k)
    return f"M{x0} {y} A{rr} {rr} 0 1 0 {x1} {y} A{rr} {rr} 0 1 0 {x0} {y} Z"


def _ring_path(view: _View, rings) -> str:
    parts = []
    for ring in rings:
        pts = [view(p) for p in ring]
        parts.append("M" + " L".join(f"{x} {y}" for x, y in pts) + " Z")
    return " ".join(parts)


def _star(view: _View, p, r=6.0) -> str:
    cx, cy = (float(v) for v in view(p))
    pts = []
    for k in range(10):
        rad = r if k % 2 == 0 else r * 0.45
        t = math.pi / 2 + k * math.pi / 5
        pts.append(f"{_fmt(cx + rad * math.cos(t))} {_fmt(cy - rad * math.sin(t))}")
    return "M" + " L".join(pts) + " Z"


def emit_svg(doc: dict, points, shape: ShapeSpec) -> str:
    """Render a result document over its instance."""
    pts = [Point(*p) for p in points]
    proto = shape.prototype
    inv = point_inversion(proto)
    inv_rings = [_outline(shape, inv, p) for p in pts]
    refs = [tuple(t["reference"]) for t in doc.get("translates", [])]
    tr_rings = [_outline(shape, proto, r) for r in refs]

    every = [q for rings in inv_rings + tr_rings for ring in rings for q in ring] + pts + refs
    arr = np.array(every, dtype=float).reshape(-1, 2)
    view = _View(arr.min(0), arr.max(0))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(SIZE)}" height="{_fmt(SIZE)}" '
           f'viewBox="0 0 {_fmt(SIZE)} {_fmt(SIZE)}">',
           '<g fill="none" stroke="#4a6fa5" stroke-width="1">']
    plain_disk = isinstance(proto, Disk) and shape.transform is None
    for p, rings in zip(pts, inv_rings):
        if plain_disk:
            c = (p.x + inv.offset.x, p.y + inv.offset.y)
            d = _disk_path(view, c, proto.radius)
        else:
            d = _ring_path(view, rings)
        out.append(f'<path class="inverse" d="{d}"/>')
    out.append('</g>')
    out.append('<g fill="none" stroke="#c0504d" stroke-width="1.5" stroke-dasharray="4 3">')
    for r, rings in zip(refs, tr_rings):
        if plain_disk:
            d = _disk_path(view, (r[0] + proto.offset.x, r[1] + proto.offset.y), proto.radius)
        else:
            d = _ring_path(view, rings)
        out.append(f'<path class="translate" d="{d}"/>')
    out.append('</g>')
    out.append('<g fill="#222">')
    for p in pts:
        x, y = view(p)
        out.append(f'<circle class="point" cx="{x}" cy="{y}" r="3"/>')
    out.append('</g>')
    out.append('<g fill="#e8a33d" stroke="#7a4b00" stroke-width="0.8">')
    for r in refs:
        out.append(f'<path class="star" d="{_star(view, r)}"/>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"

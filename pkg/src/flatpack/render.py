"""Deterministic SVG rendering of surfaces and circle configurations.

Each sheet's polygons are drawn side by side.  Identified sides share a
stroke color, sectors are filled by generalized circle (double circles share
one fill), slits are drawn in red and cone points marked with dots.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .geom import arc_angle

WIDTH_PER_SHEET = 360.0
MARGIN = 20.0
GAP = 30.0


def _color(i: int, saturation: int, lightness: int) -> str:
    # golden-angle hues stay distinct for a few dozen classes
    hue = (i * 137.508) % 360.0
    return f"hsl({hue:.1f},{saturation}%,{lightness}%)"


def side_color(i: int) -> str:
    return _color(i, 70, 35)


def circle_color(i: int) -> str:
    return _color(i + 3, 60, 75)


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    """Maps planar coordinates of each sheet into the SVG canvas."""

    def __init__(self, surface):
        boxes: dict[int, list[float]] = {}
        for p in surface.polygons:
            xs = [float(v.x) for v in p.vertices]
            ys = [float(v.y) for v in p.vertices]
            b = boxes.setdefault(p.sheet, [min(xs), min(ys), max(xs), max(ys)])
            b[0], b[1] = min(b[0], *xs), min(b[1], *ys)
            b[2], b[3] = max(b[2], *xs), max(b[3], *ys)
        self.sheets = sorted(boxes)
        self.boxes = boxes
        span = max(max(b[2] - b[0], b[3] - b[1]) for b in boxes.values()) or 1.0
        self.scale = WIDTH_PER_SHEET / span
        self.offset: dict[int, float] = {}
        x = MARGIN
        for sh in self.sheets:
            b = boxes[sh]
            self.offset[sh] = x - b[0] * self.scale
            x += (b[2] - b[0]) * self.scale + GAP
        self.width = x - GAP + MARGIN
        top = max(b[3] for b in boxes.values())
        bottom = min(b[1] for b in boxes.values())
        self.top = top
        self.height = (top - bottom) * self.scale + 2 * MARGIN

    def xy(self, sheet: int, p) -> tuple[str, str]:
        x = self.offset[sheet] + float(p[0]) * self.scale
        y = MARGIN + (self.top - float(p[1])) * self.scale
        return _f(x), _f(y)


def _sector_path(frame: _Frame, sheet: int, sec) -> str:
    arc = sec.arc
    r = _f(math.sqrt(float(arc.radius_sq)) * frame.scale)
    sx, sy = frame.xy(sheet, arc.start)
    if arc.full:
        c = arc.center
        ox, oy = frame.xy(sheet, (2 * c.x - arc.start.x, 2 * c.y - arc.start.y))
        # planar CCW becomes sweep-flag 0 once the y axis points down
        d = f"M{sx},{sy} A{r},{r} 0 0 0 {ox},{oy} A{r},{r} 0 0 0 {sx},{sy}"
    else:
        ex, ey = frame.xy(sheet, arc.end)
        large = 1 if arc_angle(arc) > math.pi else 0
        d = f"M{sx},{sy} A{r},{r} 0 {large} 0 {ex},{ey}"
    for p in sec.chain[1:]:
        x, y = frame.xy(sheet, p)
        d += f" L{x},{y}"
    return d + " Z"


def render_svg(surface, configuration=None, slits=(), title: str | None = None) -> str:
    frame = _Frame(surface)
    sheet_of = {p.polygon_id: p.sheet for p in surface.polygons}
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(frame.width)}" '
           f'height="{_f(frame.height)}" viewBox="0 0 {_f(frame.width)} {_f(frame.height)}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")

    out.append('<g class="polygons" fill="#f7f7f7" stroke="#bbbbbb" stroke-width="0.5">')
    for p in surface.polygons:
        pts = " ".join(",".join(frame.xy(p.sheet, v)) for v in p.vertices)
        out.append(f'<polygon data-polygon="{p.polygon_id}" points="{pts}"/>')
    out.append("</g>")

    if configuration is not None:
        circle_of = {}
        for circ in configuration.circles:
            for i in circ.sectors:
                circle_of[i] = circ
        classes: dict[int, int] = {}
        for circ in configuration.circles:
            key = circ.group if circ.group >= 0 else -1 - circ.index
            classes.setdefault(key, len(classes))
        out.append('<g class="circles" stroke="#333333" stroke-width="0.6">')
        for sec in configuration.sectors:
            circ = circle_of.get(sec.sector_id)
            if circ is None:
                cls = len(classes)
                classes[("loose", sec.sector_id)] = cls
            else:
                cls = classes[circ.group if circ.group >= 0 else -1 - circ.index]
            sheet = sheet_of[sec.polygon_id]
            out.append(f'<path class="circle" data-class="{cls}" fill="{circle_color(cls)}" '
                       f'd="{_sector_path(frame, sheet, sec)}"/>')
        out.append("</g>")

    out.append('<g class="sides" stroke-width="2" stroke-linecap="round">')
    for i, ident in enumerate(surface.identifications):
        color = side_color(i)
        for side in (ident.side_a, ident.side_b):
            poly = surface.polygon(side.polygon_id)
            a = poly.vertices[side.edge_index]
            b = poly.vertices[(side.edge_index + 1) % len(poly.vertices)]
            (x1, y1), (x2, y2) = frame.xy(poly.sheet, a), frame.xy(poly.sheet, b)
            out.append(f'<line class="side" data-identification="{i}" stroke="{color}" '
                       f'x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")

    if slits:
        out.append('<g class="slits" stroke="#d00000" stroke-width="2.5">')
        for seg, sheet_a, sheet_b in slits:
            for sh in sorted({sheet_a, sheet_b}):
                if sh not in frame.offset:
                    continue
                (x1, y1), (x2, y2) = frame.xy(sh, seg.a), frame.xy(sh, seg.b)
                out.append(f'<line class="slit" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
        out.append("</g>")

    cone = [(c, cp.degree) for cp in surface.cone_points for c in cp.vertex_class]
    if cone:
        out.append('<g class="cone-points" fill="#000000">')
        for corner, degree in sorted(cone):
            poly = surface.polygon(corner.polygon_id)
            x, y = frame.xy(poly.sheet, poly.vertices[corner.vertex_index])
            out.append(f'<circle class="cone" data-degree="{degree}" cx="{x}" cy="{y}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

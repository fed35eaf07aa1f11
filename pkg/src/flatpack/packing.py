"""Polygonal sectors, generalized circles, configuration checks and contacts graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Sequence

from .errors import (AngleSumNotMultiple, ArcChainBroken, FlatpackError, IllegalRelation,
                     InvalidSector, IrrationalIntersection, OverlappingCircles)
from .geom import (ORIGIN, Arc, QPoint, QuadraticRoot, Rat, Segment, angle_key_less, arc_angle, bbox,
                   bbox_distance_sq, ccw_less, circle_line_params, circle_point_between, cross, dot, on_segment,
                   point_in_polygon, rational_sqrt, same_direction, segment_disk_params, squared_distance)
from .surface import SideId, SurfacePoint, TranslationSurface, unfold_distance, unfold_within
from .topomap import CombinatorialMap

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class PolygonalSector:
    """Region of one polygon bounded by a single CCW arc and a polygonal chain.

    ``chain`` runs along the region boundary from ``arc.end`` back to
    ``arc.start``; it is empty for a full disk.
    """
    polygon_id: int
    arc: Arc
    chain: tuple = ()
    sector_id: int = 0
    label: object = None

    def __post_init__(self):
        object.__setattr__(self, "arc", self.arc.as_ccw())
        object.__setattr__(self, "chain", tuple(QPoint(*p) for p in self.chain))
        if self.chain:
            if self.chain[0] != self.arc.end or self.chain[-1] != self.arc.start:
                raise InvalidSector("sector chain must join the arc end back to the arc start")
        elif not self.arc.full:
            raise InvalidSector("a partial arc needs a closing chain")

    @property
    def center(self) -> QPoint:
        return self.arc.center

    @property
    def radius_sq(self) -> Rat:
        return self.arc.radius_sq

    @property
    def alpha(self) -> float:
        return arc_angle(self.arc)

    @property
    def boundary_segments(self) -> list[Segment]:
        return [Segment(a, b) for a, b in zip(self.chain, self.chain[1:]) if a != b]

    def mid_arc_point(self) -> QPoint:
        return circle_point_between(self.arc.center, self.arc.radius_sq, self.arc.start, self.arc.end)


# ------------------------------------------------------------- clipping

def rational_circle_point(center, radius_sq: Rat, max_den: int = 64) -> QPoint:
    """Some rational point on the circle; raises IrrationalIntersection if none is found."""
    center = QPoint(*center)
    r = rational_sqrt(radius_sq)
    if r is not None:
        return QPoint(center.x + r, center.y)
    for den in range(1, max_den + 1):
        for num in range(0, 4 * den * den + 1):
            a = Rat(num, den)
            if a * a > radius_sq:
                break
            b = rational_sqrt(radius_sq - a * a)
            if b is not None:
                return QPoint(center.x + a, center.y + b)
    raise IrrationalIntersection(f"no rational point found on circle of radius^2 {radius_sq}")


def _angle_cmp(c):
    def cmp(p, q):
        u, v = p - c, q - c
        if angle_key_less(u, v):
            return -1
        if angle_key_less(v, u):
            return 1
        return 0
    return cmp


def _perimeter_pos(vertices, i: int, t: Rat) -> tuple[int, Rat]:
    if t == 1:
        return ((i + 1) % len(vertices), Rat(0))
    return (i, t)


def _incident_directions(vertices, pos) -> list[QPoint]:
    i, t = pos
    n = len(vertices)
    a, b = vertices[i], vertices[(i + 1) % n]
    if t == 0:
        return [b - a, vertices[(i - 1) % n] - a]
    return [b - a, a - b]


def _outgoing_direction(vertices, pos) -> QPoint:
    i, _ = pos
    return vertices[(i + 1) % len(vertices)] - vertices[i]


def _point_segment_distance_sq(a: QPoint, b: QPoint, c: QPoint) -> Rat:
    d = b - a
    t = min(max(dot(c - a, d) / dot(d, d), Rat(0)), Rat(1))
    return squared_distance(a + d.scale(t), c)


def clip_disk(vertices: Sequence, center, radius_sq: Rat) -> list[tuple[Arc, tuple]]:
    """Intersect a closed disk with a simple CCW polygon.

    Returns one (arc, chain) pair per component of the intersection.  Raises
    InvalidSector when a component is not bounded by exactly one arc, and
    IrrationalIntersection when the circle meets a side at an irrational point.
    """
    vs = [QPoint(*v) for v in vertices]
    c = QPoint(*center)
    n = len(vs)
    pos_of: dict[QPoint, tuple[int, Rat]] = {}
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if _point_segment_distance_sq(a, b, c) > radius_sq:
            continue
        for t in circle_line_params(a, b, c, radius_sq):
            if 0 <= t <= 1:
                p = a + (b - a).scale(t)
                pos_of.setdefault(p, _perimeter_pos(vs, i, t))
    if not pos_of:
        x0 = rational_circle_point(c, radius_sq)
        where = point_in_polygon(x0, vs)
        if where == "inside":
            return [(Arc(c, radius_sq, x0, x0), ())]
        if any(squared_distance(v, c) < radius_sq for v in vs):
            raise InvalidSector("polygon lies inside the disk")
        return []
    pts = sorted(pos_of, key=cmp_to_key(_angle_cmp(c)))
    m = len(pts)
    inside = []
    for k in range(m):
        p, q = pts[k], pts[(k + 1) % m]
        mid = circle_point_between(c, radius_sq, p, q)
        inside.append(point_in_polygon(mid, vs) == "inside")

    def enters(p) -> bool:
        return any(dot(d, p - c) < 0 for d in _incident_directions(vs, pos_of[p]))

    # breakpoints: keep a point unless the circle passes it inside the polygon on both sides
    # without the boundary dipping into the disk there
    keep = [not (inside[k - 1] and inside[k] and not enters(pts[k])) for k in range(m)]
    if not any(keep):
        return [(Arc(c, radius_sq, pts[0], pts[0]), ())]
    arcs = []
    for k in range(m):
        if not keep[k] or not inside[k]:
            continue
        j = (k + 1) % m
        while not keep[j]:
            j = (j + 1) % m
        arcs.append((pts[k], pts[j]))
    starts = {p for p, _ in arcs}

    def key(p):
        return pos_of[p]

    def walk(q, s) -> tuple:
        out = [q]
        (i, tq), (j, ts) = key(q), key(s)
        if not (j == i and ts > tq):
            k = i
            while True:
                k = (k + 1) % n
                out.append(vs[k])
                if k == j:
                    break
        if out[-1] != s:
            out.append(s)
        return tuple(out)

    def next_start(q):
        qi = key(q)
        if dot(_outgoing_direction(vs, qi), q - c) >= 0:
            # the boundary leaves the disk here, so the next arc starts at q
            if q not in starts:
                raise InvalidSector("arc end has no continuation along the boundary")
            return q
        best, best_d = None, None
        for s in starts:
            si = key(s)
            d = si if si > qi else (si[0] + n, si[1])
            if best_d is None or d < best_d:
                best, best_d = s, d
        return best

    nxt = {}
    for p, q in arcs:
        s = next_start(q)
        nxt[p] = (s, walk(q, s) if s != q else (q,))
    out = []
    seen = set()
    for p, q in arcs:
        if p in seen:
            continue
        cycle = [p]
        seen.add(p)
        s = nxt[p][0]
        while s != p:
            if s in seen:
                raise InvalidSector("boundary tracing did not close up")
            cycle.append(s)
            seen.add(s)
            s = nxt[s][0]
        if len(cycle) != 1:
            raise InvalidSector("disk and polygon meet in a region bounded by several arcs")
        arc = Arc(c, radius_sq, p, q)
        chain = nxt[p][1]
        if chain == (q,) and q == p:
            chain = ()
        out.append((arc, chain))
    return out


def sectors_from_disks(surface: TranslationSurface, disks: Sequence, translations: Sequence = ((0, 0),)
                       ) -> list[PolygonalSector]:
    """Clip disks against every polygon of a surface.

    ``disks`` holds (label, sheet, center, radius_sq); each disk is tried at
    every translation in ``translations`` on polygons of its sheet.
    """
    out = []
    shifts = [(Rat(tx), Rat(ty)) for tx, ty in translations]
    for pid in surface.polygon_ids:
        poly = surface.polygon(pid)
        box = bbox(poly.vertices)
        fx0, fy0, fx1, fy1 = (float(b) for b in box)
        for label, sheet, center, rsq in disks:
            if sheet != poly.sheet:
                continue
            rsq = Rat(rsq)
            limit = float(rsq) * (1 + 1e-9) + 1e-12
            for tx, ty in shifts:
                c = QPoint(Rat(center[0]) + tx, Rat(center[1]) + ty)
                # cheap float cull with a safety margin, then the exact test
                fx, fy = float(c.x), float(c.y)
                dx = max(fx0 - fx, 0.0, fx - fx1)
                dy = max(fy0 - fy, 0.0, fy - fy1)
                if dx * dx + dy * dy > limit or bbox_distance_sq(c, box) >= rsq:
                    continue
                for arc, chain in clip_disk(poly.vertices, c, rsq):
                    out.append(PolygonalSector(pid, arc, chain, len(out), label))
    return out


# ------------------------------------------------------------- assembly

@dataclass
class GeneralizedCircle:
    index: int
    sectors: tuple           # sector ids
    k: int
    center: SurfacePoint | None
    radius_sq: Rat
    angle_sum: float
    cycles: tuple = ()       # sector ids in boundary order, one tuple per closed chain of arcs
    planar_centers: tuple = ()   # (sheet, planar center) of every sector
    group: int = -1          # circles that together form one double circle share a group
    label: object = None

    @property
    def angle(self) -> float:
        return TWO_PI * self.k


@dataclass
class ConditionResult:
    passed: bool
    witness: object = None
    note: str = ""


@dataclass
class VerificationReport:
    conditions: dict
    depth: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.conditions.values())

    def first_failure(self):
        for k in sorted(self.conditions):
            if not self.conditions[k].passed:
                return k, self.conditions[k]
        return None

    def lines(self) -> list[str]:
        out = []
        for k in sorted(self.conditions):
            r = self.conditions[k]
            status = "pass" if r.passed else "FAIL"
            extra = f": {r.witness}" if not r.passed and r.witness is not None else ""
            out.append(f"condition {k}: {status}{extra}")
        out.append(f"unfolding depth: {self.depth}")
        return out


@dataclass
class Configuration:
    surface: TranslationSurface
    sectors: list
    circles: list = field(default_factory=list)
    report: VerificationReport | None = None
    slits: list = field(default_factory=list)     # (Segment, sheet_a, sheet_b)
    source: object = None
    disks: list = field(default_factory=list)     # (label, sheet, center, radius_sq) the sectors came from
    translations: list = field(default_factory=list)


def _canon(s: TranslationSurface, pid: int, p) -> SurfacePoint:
    return s.canonical(SurfacePoint(pid, QPoint(*p)))


def _segment_side(s: TranslationSurface, pid: int, seg: Segment) -> int | None:
    vs = s.polygon(pid).vertices
    n = len(vs)
    for i in range(n):
        side = Segment(vs[i], vs[(i + 1) % n])
        if on_segment(seg.a, side) and on_segment(seg.b, side):
            return i
    return None


def sector_graph(s: TranslationSurface, sectors: Sequence[PolygonalSector]) -> list[tuple[int, int]]:
    """Pairs of sectors with a boundary segment identifying entirely with the other's."""
    by_pos: dict = {}
    for idx, sec in enumerate(sectors):
        for seg in sec.boundary_segments:
            by_pos.setdefault((sec.polygon_id, frozenset((seg.a, seg.b))), set()).add(idx)
    edges = set()
    for idx, sec in enumerate(sectors):
        for seg in sec.boundary_segments:
            i = _segment_side(s, sec.polygon_id, seg)
            if i is None:
                continue
            g = s.partner[SideId(sec.polygon_id, i)]
            key = (g.side.polygon_id, frozenset((seg.a + g.translation, seg.b + g.translation)))
            for other in by_pos.get(key, ()):
                edges.add((min(idx, other), max(idx, other)))
    return sorted(edges)


def _components(n: int, edges) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


def _arc_chain(s: TranslationSurface, sectors: Sequence[PolygonalSector], members: Sequence[int]):
    """Successor of every arc in its closed boundary chain (by sector index)."""
    starts: dict = {}
    for idx in members:
        sec = sectors[idx]
        a = sec.arc
        key = (_canon(s, sec.polygon_id, a.start), a.start - a.center)
        if key in starts:
            raise ArcChainBroken(f"two arcs start at the same boundary point ({a.start})")
        starts[key] = idx
    succ = {}
    for idx in members:
        sec = sectors[idx]
        a = sec.arc
        key = (_canon(s, sec.polygon_id, a.end), a.end - a.center)
        if key not in starts:
            raise ArcChainBroken(f"arc of sector {sec.sector_id} ends at {a.end} with no continuation")
        succ[idx] = starts[key]
    if sorted(succ.values()) != sorted(members):
        raise ArcChainBroken("arcs do not chain into closed loops")
    cycles = []
    seen = set()
    for idx in sorted(members):
        if idx in seen:
            continue
        cyc = [idx]
        seen.add(idx)
        j = succ[idx]
        while j != idx:
            cyc.append(j)
            seen.add(j)
            j = succ[j]
        cycles.append(tuple(cyc))
    return succ, cycles


def _radial_center(s: TranslationSurface, sec: PolygonalSector) -> SurfacePoint | None:
    m = sec.mid_arc_point()
    return s.walk(SurfacePoint(sec.polygon_id, m), sec.center - m)


def assemble_generalized_circles(s: TranslationSurface, sectors: Sequence[PolygonalSector],
                                 eps_angle: float | None = None, strict: bool = True) -> list[GeneralizedCircle]:
    """Group sectors into circles.

    With ``strict=False`` a class whose arcs do not close up still becomes a
    circle (with no cycles) so that verification can report what is wrong.
    """
    eps = s.eps_angle if eps_angle is None else eps_angle
    classes = _components(len(sectors), sector_graph(s, sectors))
    circles = []
    for members in classes:
        k = sum(sectors[i].arc.turns() for i in members)
        total = sum(sectors[i].alpha for i in members)
        try:
            succ, cycles = _arc_chain(s, sectors, members)
            if k < 1 or abs(total - TWO_PI * k) >= eps:
                raise AngleSumNotMultiple(f"arc angles sum to {total}, not 2*pi*{k}")
        except (ArcChainBroken, AngleSumNotMultiple):
            if strict:
                raise
            cycles, k = [], max(k, 1)
        first = sectors[members[0]]
        center = _radial_center(s, first)
        planar = tuple(sorted({(s.polygon(sectors[i].polygon_id).sheet, sectors[i].center)
                               for i in members}))
        circles.append(GeneralizedCircle(len(circles), tuple(sectors[i].sector_id for i in members), k,
                                         center, first.radius_sq, total, tuple(cycles), planar,
                                         label=first.label))
    _assign_groups(s, circles)
    return circles


def _on_cross_sheet_side(s: TranslationSurface, p: SurfacePoint) -> bool:
    sides = []
    for rep in s.representatives(p):
        kind, i = s.locate(rep.polygon_id, rep.point)
        if kind == "side":
            sides.append(SideId(rep.polygon_id, i))
        elif kind == "vertex":
            n = len(s.polygon(rep.polygon_id).vertices)
            sides += [SideId(rep.polygon_id, i), SideId(rep.polygon_id, (i - 1) % n)]
    return any(s.polygon(s.partner[sd].side.polygon_id).sheet != s.polygon(sd.polygon_id).sheet
               for sd in sides)


def _assign_groups(s: TranslationSurface, circles: list[GeneralizedCircle]) -> None:
    # the two flat halves of a circle centred inside a slit form one double circle
    for c in circles:
        c.group = c.index
    shifts = {g.translation for g in s.partner.values()}
    for a in circles:
        for b in circles:
            if b.index <= a.index or b.group != b.index:
                continue
            if a.k != 1 or b.k != 1 or a.radius_sq != b.radius_sq:
                continue
            if a.center is None or b.center is None:
                continue
            same = any(sa == sb and (pa == pb or pa - pb in shifts)
                       for sa, pa in a.planar_centers for sb, pb in b.planar_centers)
            if same and _on_cross_sheet_side(s, a.center):
                b.group = a.group


def build_configuration(surface: TranslationSurface, sectors: Sequence[PolygonalSector],
                        slits: Sequence = (), source=None, disks: Sequence = (),
                        translations: Sequence = (), strict: bool = True) -> Configuration:
    sectors = [PolygonalSector(sec.polygon_id, sec.arc, sec.chain, i, sec.label)
               for i, sec in enumerate(sectors)]
    circles = assemble_generalized_circles(surface, sectors, strict=strict)
    return Configuration(surface, sectors, circles, None, list(slits), source, list(disks), list(translations))


# ---------------------------------------------------------- verification

def sector_contains(sec: PolygonalSector, x) -> str | None:
    """"inside", "boundary" or "outside"; None when the parity ray is degenerate."""
    x = QPoint(*x)
    a = sec.arc
    c = a.center
    d2 = squared_distance(x, c)
    if d2 > a.radius_sq:
        return "outside"
    for seg in sec.boundary_segments:
        if on_segment(x, seg):
            return "boundary"
    ray = x - c if x != c else QPoint(Rat(1), Rat(0))
    if d2 == a.radius_sq:
        return "boundary" if a.contains_direction(ray) else "outside"
    if not a.full:
        if same_direction(ray, a.start - c) or same_direction(ray, a.end - c):
            return None
    crossings = 1 if a.contains_direction(ray) else 0
    for seg in sec.boundary_segments:
        pa = QPoint(dot(seg.a - x, ray), cross(ray, seg.a - x))
        pb = QPoint(dot(seg.b - x, ray), cross(ray, seg.b - x))
        if pa.y == 0 and pa.x > 0 or pb.y == 0 and pb.x > 0:
            return None
        if (pa.y > 0) != (pb.y > 0):
            t = pa.y / (pa.y - pb.y)
            if pa.x + t * (pb.x - pa.x) > 0:
                crossings += 1
    return "inside" if crossings % 2 else "outside"


def _disks_apart(s1: PolygonalSector, s2: PolygonalSector) -> bool:
    D = squared_distance(s1.center, s2.center)
    r1, r2 = s1.radius_sq, s2.radius_sq
    t = D - r1 - r2
    return t >= 0 and t * t >= 4 * r1 * r2


def _upper_sqrt(q: Rat) -> Rat:
    return Rat(math.isqrt(math.ceil(q * 10**6)) + 1, 10**3)


def _sample_points(sec: PolygonalSector, box, grid: int = 12) -> list[QPoint]:
    mid = sec.mid_arc_point()
    pts = [mid]
    # chain points nudged toward the arc probe the interior near the boundary
    pts += [p + (mid - p).scale(Rat(1, 97)) for p in sec.chain]
    x0, y0, x1, y1 = box
    for i in range(1, grid):
        for j in range(1, grid):
            pts.append(QPoint(x0 + (x1 - x0) * Rat(i, grid), y0 + (y1 - y0) * Rat(j, grid)))
    return pts


def _overlap_witness(s1: PolygonalSector, s2: PolygonalSector):
    if _disks_apart(s1, s2):
        return None
    r1, r2 = _upper_sqrt(s1.radius_sq), _upper_sqrt(s2.radius_sq)
    c1, c2 = s1.center, s2.center
    box = (max(c1.x - r1, c2.x - r2), max(c1.y - r1, c2.y - r2),
           min(c1.x + r1, c2.x + r2), min(c1.y + r1, c2.y + r2))
    for a, o in ((s1, s2), (s2, s1)):
        for p in _sample_points(a, box):
            if sector_contains(a, p) == "inside" and sector_contains(o, p) == "inside":
                return p
    return None


def _check_condition1(s: TranslationSurface, sectors, circle_of) -> ConditionResult:
    by_poly_side: dict = {}
    for idx, sec in enumerate(sectors):
        for seg in sec.boundary_segments:
            i = _segment_side(s, sec.polygon_id, seg)
            if i is not None:
                by_poly_side.setdefault((sec.polygon_id, i), []).append((idx, seg))
    for idx, sec in enumerate(sectors):
        for seg in sec.boundary_segments:
            i = _segment_side(s, sec.polygon_id, seg)
            if i is None:
                return ConditionResult(False, f"sector {idx}: boundary segment {seg.a}-{seg.b} "
                                              f"is not on the polygon boundary")
            g = s.partner[SideId(sec.polygon_id, i)]
            img = Segment(seg.a + g.translation, seg.b + g.translation)
            cover = []
            for j, other in by_poly_side.get((g.side.polygon_id, g.side.edge_index), ()):
                if circle_of[j] != circle_of[idx]:
                    continue
                ta = _param_on(img, other.a)
                tb = _param_on(img, other.b)
                if ta is not None and tb is not None:
                    cover.append((min(ta, tb), max(ta, tb)))
            if not _covers(cover):
                return ConditionResult(False, f"sector {idx}: boundary {seg.a}-{seg.b} is glued to "
                                              f"{img.a}-{img.b} in polygon {g.side.polygon_id}, "
                                              f"which no related sector bounds")
    # chain points strictly inside the disk at polygon vertices must bound related
    # sectors at every corner of their class
    bounded = set()
    for j, other in enumerate(sectors):
        for p in other.chain:
            bounded.add((circle_of[j], other.polygon_id, p))
    for idx, sec in enumerate(sectors):
        for p in sec.chain:
            if squared_distance(p, sec.center) >= sec.radius_sq:
                continue
            kind, vi = s.locate(sec.polygon_id, p)
            if kind != "vertex":
                continue
            cls = s.vertex_classes[s.class_of[(sec.polygon_id, vi)]]
            for c in cls:
                q = s.vertex(c)
                if (circle_of[idx], c[0], q) not in bounded:
                    return ConditionResult(False, f"sector {idx}: vertex {p} is identified with corner "
                                                  f"{q} of polygon {c[0]}, which no related sector bounds")
    return ConditionResult(True)


def _param_on(seg: Segment, p) -> Rat | None:
    d = seg.b - seg.a
    w = QPoint(*p) - seg.a
    if cross(d, w) != 0:
        return None
    return dot(w, d) / dot(d, d)


def _covers(intervals) -> bool:
    reach = Rat(0)
    for lo, hi in sorted(intervals):
        if lo > reach:
            return False
        reach = max(reach, hi)
    return reach >= 1


def _arc_meets_boundary(s: TranslationSurface, sec: PolygonalSector) -> object:
    vs = s.polygon(sec.polygon_id).vertices
    n = len(vs)
    a = sec.arc
    c = a.center
    for i in range(n):
        p, q = vs[i], vs[(i + 1) % n]
        try:
            ts = circle_line_params(p, q, c, a.radius_sq)
        except IrrationalIntersection:
            ts = _float_line_params(p, q, c, a.radius_sq)
            for t in ts:
                if 0 < t < 1:
                    x = (float(p.x) + t * float(q.x - p.x), float(p.y) + t * float(q.y - p.y))
                    ang = math.atan2(x[1] - float(c.y), x[0] - float(c.x))
                    if _float_on_arc(a, ang):
                        return x
            continue
        for t in ts:
            if not 0 <= t <= 1:
                continue
            x = p + (q - p).scale(t)
            if x in (a.start, a.end) or not a.contains_direction(x - c):
                continue
            if len(ts) == 2:   # transversal crossing of the arc interior
                return x
    return None


def _float_line_params(a, b, c, rsq) -> list[float]:
    dx, dy = float(b[0] - a[0]), float(b[1] - a[1])
    wx, wy = float(a[0] - c[0]), float(a[1] - c[1])
    A = dx * dx + dy * dy
    B = 2 * (wx * dx + wy * dy)
    C = wx * wx + wy * wy - float(rsq)
    disc = B * B - 4 * A * C
    if disc <= 0:
        return []
    r = math.sqrt(disc)
    return [(-B - r) / (2 * A), (-B + r) / (2 * A)]


def _float_on_arc(a: Arc, ang: float) -> bool:
    if a.full:
        return True
    s0 = math.atan2(float(a.start.y - a.center.y), float(a.start.x - a.center.x))
    span = arc_angle(a)
    d = (ang - s0) % TWO_PI
    return 1e-12 < d < span - 1e-12


def _check_condition2(s: TranslationSurface, sectors) -> ConditionResult:
    for idx, sec in enumerate(sectors):
        vs = s.polygon(sec.polygon_id).vertices
        m = sec.mid_arc_point()
        if point_in_polygon(m, vs) != "inside":
            return ConditionResult(False, f"sector {idx}: arc point {m} lies outside polygon {sec.polygon_id}")
        hit = _arc_meets_boundary(s, sec)
        if hit is not None:
            return ConditionResult(False, f"sector {idx}: arc crosses the polygon boundary at {hit}")
    by_poly: dict[int, list[int]] = {}
    for idx, sec in enumerate(sectors):
        by_poly.setdefault(sec.polygon_id, []).append(idx)
    for pid, idxs in by_poly.items():
        for x in range(len(idxs)):
            for y in range(x + 1, len(idxs)):
                w = _overlap_witness(sectors[idxs[x]], sectors[idxs[y]])
                if w is not None:
                    return ConditionResult(False, f"sectors {idxs[x]} and {idxs[y]} overlap at {w}")
    return ConditionResult(True, note="pairwise overlap is decided exactly for separated disks, "
                                      "by exact sampling otherwise")


def _check_condition3(s: TranslationSurface, sectors, circles, eps: float) -> ConditionResult:
    for circ in circles:
        k = sum(sectors[i].arc.turns() for i in circ.sectors)
        total = sum(sectors[i].alpha for i in circ.sectors)
        if k != circ.k or abs(total - TWO_PI * k) >= eps:
            return ConditionResult(False, f"circle {circ.index}: angle sum {total} vs {k} turns")
        if not circ.cycles:
            return ConditionResult(False, f"circle {circ.index}: arcs do not chain into closed loops")
    return ConditionResult(True)


def _check_condition4(s: TranslationSurface, sectors, circles, depth: int) -> ConditionResult:
    for circ in circles:
        if circ.center is None:
            return ConditionResult(False, f"circle {circ.index}: radial path runs into a cone point")
        for i in circ.sectors:
            sec = sectors[i]
            if sec.radius_sq != circ.radius_sq:
                return ConditionResult(False, f"circle {circ.index}: sector {i} has a different radius")
            got = _radial_center(s, sec)
            if got != circ.center:
                x = sec.mid_arc_point()
                dist, path = unfold_distance(s, SurfacePoint(sec.polygon_id, x), circ.center, depth)
                via = "no path found" if path is None else \
                    f"shortest straight path has length {dist:.6g} crossing {list(path.crossing_sequence)}"
                return ConditionResult(False, f"circle {circ.index}: radial path from sector {i} ends at "
                                              f"{got}, not at the center {circ.center}; from boundary "
                                              f"point {x} to the center the {via}, radius "
                                              f"{math.sqrt(circ.radius_sq):.6g}")
        # one search from the center covers the start, middle and end of every arc
        probes = [(i, x) for i in circ.sectors
                  for x in (sectors[i].arc.start, sectors[i].mid_arc_point(), sectors[i].arc.end)]
        found = unfold_within(s, circ.center, [SurfacePoint(sectors[i].polygon_id, x) for i, x in probes],
                              depth, circ.radius_sq)
        if found:
            k = min(found)
            i, x = probes[k]
            path = found[k]
            return ConditionResult(False, f"circle {circ.index}: boundary point {x} of sector {i} "
                                          f"reaches the center at distance {math.sqrt(path.length_sq):.6g} "
                                          f"< radius {math.sqrt(circ.radius_sq):.6g} crossing "
                                          f"{list(path.crossing_sequence)}")
    return ConditionResult(True, note=f"no shorter path up to {depth} crossings")


def verify_configuration(c: Configuration, depth: int = 6) -> VerificationReport:
    s = c.surface
    circle_of = {}
    for circ in c.circles:
        for i in circ.sectors:
            circle_of[i] = circ.index
    conds = {
        1: _check_condition1(s, c.sectors, circle_of),
        2: _check_condition2(s, c.sectors),
        3: _check_condition3(s, c.sectors, c.circles, s.eps_angle),
        4: _check_condition4(s, c.sectors, c.circles, depth),
    }
    c.report = VerificationReport(conds, depth)
    return c.report


# --------------------------------------------------------- slit relations

def classify_slit_relation(circle: GeneralizedCircle, slit: Segment, sheets: Sequence[int] | None = None) -> str:
    """"Disjoint", "ThroughCenter" or "TwoPointCrossing" for a circle and a slit."""
    result = "Disjoint"
    for sheet, c in circle.planar_centers:
        if sheets is not None and sheet not in sheets:
            continue
        rsq = circle.radius_sq
        if on_segment(c, slit):
            return "ThroughCenter"
        if _segment_distance_sq(c, slit) >= rsq:
            continue
        inside_ends = [p for p in (slit.a, slit.b) if squared_distance(p, c) < rsq]
        if inside_ends:
            raise IllegalRelation(f"slit endpoint {inside_ends[0]} lies inside circle {circle.index} "
                                  f"whose center {c} is off the slit")
        result = "TwoPointCrossing"
    return result


def _segment_distance_sq(p, seg: Segment) -> Rat:
    d = seg.b - seg.a
    t = dot(QPoint(*p) - seg.a, d) / dot(d, d)
    t = min(max(t, Rat(0)), Rat(1))
    return squared_distance(p, seg.a + d.scale(t))


# ---------------------------------------------------------- contacts graph

@dataclass(frozen=True)
class Tangency:
    circle_a: int
    circle_b: int
    point: SurfacePoint | None      # None when the tangency point is irrational
    approx: tuple                   # float coordinates in polygon ``polygon_id``
    polygon_id: int


@dataclass
class ContactsGraph:
    n_circles: int
    tangencies: list
    map: CombinatorialMap | None
    circle_of_half_edge: list
    groups: list                    # double-circle group of every circle
    surface_genus: int

    def multiplicity(self, i: int, j: int) -> int:
        return sum(1 for t in self.tangencies if {t.circle_a, t.circle_b} == {i, j} and
                   (i != j or t.circle_a == t.circle_b))

    def edge_pairs(self) -> list[tuple[int, int]]:
        return sorted((min(t.circle_a, t.circle_b), max(t.circle_a, t.circle_b)) for t in self.tangencies)

    def group_multiplicities(self) -> dict:
        out: dict = {}
        for t in self.tangencies:
            ga, gb = self.groups[t.circle_a], self.groups[t.circle_b]
            if ga == gb:
                continue
            key = (min(ga, gb), max(ga, gb))
            out[key] = out.get(key, 0) + 1
        return out

    def group_bigons(self) -> list[tuple[int, int]]:
        """Pairs of (double) circles joined by at least two tangencies."""
        return sorted(k for k, m in self.group_multiplicities().items() if m >= 2)


def chain_groups(c: Configuration, slit: Segment) -> list[int]:
    """Groups of the circles centred on the slit, in order along it."""
    d = slit.b - slit.a
    where: dict[int, Rat] = {}
    for circ in c.circles:
        for _, p in circ.planar_centers:
            if on_segment(p, slit):
                t = dot(p - slit.a, d) / dot(d, d)
                where[circ.group] = min(t, where.get(circ.group, t))
    return sorted(where, key=lambda grp: where[grp])


def chain_bigons(c: Configuration, g: ContactsGraph, slit: Segment | None = None) -> list[tuple[int, int]]:
    """Consecutive double circles along the slit that touch at two points."""
    slit = slit if slit is not None else c.slits[0][0]
    chain = chain_groups(c, slit)
    mult = g.group_multiplicities()
    return [(a, b) for a, b in zip(chain, chain[1:]) if mult.get((min(a, b), max(a, b)), 0) >= 2]


def slit_cycle(c: Configuration, g: ContactsGraph, slit: Segment | None = None) -> list[int] | None:
    """Closed walk of half-edges through the chain circles around the slit.

    Uses only tangencies between consecutive chain groups; None unless they
    form a single cycle.  For a two-circle chain this is the bigon's loop.
    """
    slit = slit if slit is not None else c.slits[0][0]
    chain = chain_groups(c, slit)
    if len(chain) < 2 or g.map is None:
        return None
    rank = {grp: i for i, grp in enumerate(chain)}
    m = g.map
    out_of: dict[int, list[int]] = {}
    for e, t in enumerate(g.tangencies):
        ra, rb = rank.get(g.groups[t.circle_a]), rank.get(g.groups[t.circle_b])
        if ra is None or rb is None or abs(ra - rb) != 1:
            continue
        for h in (2 * e, 2 * e + 1):
            out_of.setdefault(m.vertex_of[h], []).append(h)
    if not out_of or any(len(hs) != 2 for hs in out_of.values()):
        return None
    start = min(out_of)
    walk, v, prev = [], start, None
    while True:
        h = next(x for x in out_of[v] if m.edge_of[x] != prev)
        walk.append(h)
        prev = m.edge_of[h]
        v = m.vertex_of[m.sigma[h]]
        if v == start:
            break
    return walk if len(walk) == sum(len(hs) for hs in out_of.values()) // 2 else None


def _norm_dir(d: QPoint) -> tuple:
    m = max(abs(d.x), abs(d.y))
    return (d.x / m, d.y / m)


def _float_span(arc: Arc):
    if arc.full:
        return None
    a0 = math.atan2(float(arc.start.y - arc.center.y), float(arc.start.x - arc.center.x))
    return a0, float(arc_angle(arc))


def _maybe_in_span(span, dx: float, dy: float) -> bool:
    if span is None:
        return True
    a0, sweep = span
    t = (math.atan2(dy, dx) - a0) % (2 * math.pi)
    return t <= sweep + 1e-7 or t >= 2 * math.pi - 1e-7


def _exact_tangent(c1, r1sq, c2, r2sq) -> bool:
    t = squared_distance(c1, c2) - r1sq - r2sq
    return t >= 0 and t * t == 4 * r1sq * r2sq


def _tangency_point(c1, r1sq, c2, r2sq):
    ratio = rational_sqrt(r2sq / r1sq)
    if ratio is None:
        return None
    lam = 1 / (1 + ratio)
    return c1 + (c2 - c1).scale(lam)


def _neighbour_translations(s: TranslationSurface) -> dict:
    """For every polygon p: {q: [(shift, locus)]} carrying q's coordinates into p's.

    The locus says where the two polygons touch: None for p itself, a side of
    p, or a regular vertex of p.
    """
    zero = QPoint(Rat(0), Rat(0))
    out: dict = {p: {p: [(zero, None)]} for p in s.polygon_ids}
    for p in s.polygon_ids:
        for i in range(len(s.polygon(p).vertices)):
            g = s.partner[SideId(p, i)]
            out[p].setdefault(g.side.polygon_id, []).append((zero - g.translation, ("side", i)))
    for cls in s.vertex_classes:
        if s.is_cone_corner(cls[0]):
            continue
        for cp in cls:
            for cq in cls:
                if cq != cp:
                    out[cp[0]].setdefault(cq[0], []).append((s.vertex(cp) - s.vertex(cq), ("vertex", cp[1])))
    return out


def contacts_graph(c: Configuration, depth: int = 6) -> ContactsGraph:
    s = c.surface
    sectors = c.sectors
    cond2 = _check_condition2(s, sectors)
    if not cond2.passed:
        raise OverlappingCircles(str(cond2.witness))
    circle_of = {}
    for circ in c.circles:
        for i in circ.sectors:
            circle_of[i] = circ.index
    # boundary order of each circle: cycle of sector arcs
    order_of = {}
    for circ in c.circles:
        if len(circ.cycles) != 1:
            raise FlatpackError(f"circle {circ.index} has {len(circ.cycles)} boundary loops")
        for pos, i in enumerate(circ.cycles[0]):
            order_of[i] = pos
    succ = {}
    for circ in c.circles:
        cyc = circ.cycles[0]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            succ[a] = b

    def position(i: int, d: QPoint):
        arc = sectors[i].arc
        if not arc.full and same_direction(d, arc.end - arc.center):
            i = succ[i]
            arc = sectors[i].arc
        return (order_of[i], _norm_dir(d)), i

    by_poly: dict[int, list[int]] = {}
    for j, sj in enumerate(sectors):
        by_poly.setdefault(sj.polygon_id, []).append(j)
    nbrs = _neighbour_translations(s)
    approx_of = [(float(x.center.x), float(x.center.y), math.sqrt(float(x.radius_sq))) for x in sectors]
    span_of = [_float_span(x.arc) for x in sectors]
    found = {}
    for i, si in enumerate(sectors):
        xi, yi, ri = approx_of[i]
        for q, shifts in nbrs[si.polygon_id].items():
            for j, shift, locus in ((j, sh, lc) for j in by_poly.get(q, ()) for sh, lc in shifts):
                sj = sectors[j]
                if i == j and locus is None:
                    continue
                xj, yj, rj = approx_of[j]
                gap = math.hypot(xj + float(shift.x) - xi, yj + float(shift.y) - yi) - ri - rj
                if abs(gap) > 1e-6 * (1 + ri + rj):
                    continue   # clearly not tangent; the exact test decides the rest
                dx, dy = xj + float(shift.x) - xi, yj + float(shift.y) - yi
                if not (_maybe_in_span(span_of[i], dx, dy) and _maybe_in_span(span_of[j], -dx, -dy)):
                    continue
                cj = sj.center + shift
                if not _exact_tangent(si.center, si.radius_sq, cj, sj.radius_sq):
                    continue
                d1 = cj - si.center
                d2 = si.center - cj
                if not (si.arc.contains_direction(d1) and sj.arc.contains_direction(d2)):
                    continue
                t = _tangency_point(si.center, si.radius_sq, cj, sj.radius_sq)
                if locus is not None:
                    if t is None:
                        raise IrrationalIntersection("tangency across a gluing at an irrational point")
                    vs = s.polygon(si.polygon_id).vertices
                    kind, idx = locus
                    if kind == "side" and not on_segment(t, Segment(vs[idx], vs[(idx + 1) % len(vs)])):
                        continue
                    if kind == "vertex" and t != vs[idx]:
                        continue
                pa, ia = position(i, d1)
                pb, ib = position(j, d2)
                ka, kb = (circle_of[ia], pa), (circle_of[ib], pb)
                key = (min(ka, kb), max(ka, kb))
                if key in found or ka == kb:
                    continue
                pt = _canon(s, si.polygon_id, t) if t is not None else None
                lam = 1 / (1 + math.sqrt(float(sj.radius_sq) / float(si.radius_sq)))
                approx = (float(si.center.x) + lam * float(d1.x), float(si.center.y) + lam * float(d1.y))
                found[key] = (Tangency(circle_of[ia], circle_of[ib], pt, approx, si.polygon_id), ka, kb)
    tangencies = []
    half_pos = []
    for key in sorted(found):
        tg, ka, kb = found[key]
        tangencies.append(tg)
        half_pos.append(ka)
        half_pos.append(kb)
    cmap = None
    circ_of_half = [hp[0] for hp in half_pos]
    if tangencies:
        n = len(half_pos)
        sigma = [h ^ 1 for h in range(n)]
        rho = [0] * n
        by_circle: dict[int, list[int]] = {}
        for h, (ci, _) in enumerate(half_pos):
            by_circle.setdefault(ci, []).append(h)
        for ci, hs in by_circle.items():
            hs.sort(key=cmp_to_key(_position_cmp(c, half_pos)))
            for a, b in zip(hs, hs[1:] + hs[:1]):
                rho[a] = b
        labels_map = CombinatorialMap(sigma, rho)
        cmap = CombinatorialMap(sigma, rho, vertex_labels={labels_map.vertex_of[h]: circ_of_half[h]
                                                          for h in range(n)})
    groups = [circ.group for circ in c.circles]
    return ContactsGraph(len(c.circles), tangencies, cmap, circ_of_half, groups, s.genus)


def _position_cmp(c: Configuration, half_pos):
    def cmp(h1, h2):
        (_, (o1, d1)), (_, (o2, d2)) = half_pos[h1], half_pos[h2]
        if o1 != o2:
            return -1 if o1 < o2 else 1
        circ_sec = None
        for circ in c.circles:
            if circ.index == half_pos[h1][0]:
                circ_sec = circ.cycles[0][o1]
        ref = c.sectors[circ_sec].arc.start - c.sectors[circ_sec].arc.center
        u, v = QPoint(*d1), QPoint(*d2)
        if u == v:
            return 0
        if same_direction(ref, u):
            return -1
        if same_direction(ref, v):
            return 1
        return -1 if ccw_less(ref, u, v) else 1
    return cmp


def triangulation_violations(m: CombinatorialMap) -> list[str]:
    out = []
    for f, face in enumerate(m.faces):
        if len(face) > 3:
            out.append(f"face {f} has {len(face)} sides")
    verts = [set(m.face_vertices(f)) for f in range(m.F)]
    edges = [set(m.face_edges(f)) for f in range(m.F)]
    for f in range(m.F):
        for g in range(f + 1, m.F):
            se = edges[f] & edges[g]
            sv = verts[f] & verts[g]
            if not se:
                if len(sv) <= 2:
                    continue
                out.append(f"faces {f} and {g} share {len(sv)} vertices")
            elif len(se) == 1 and sv == set(m.edge_ends(next(iter(se)))):
                continue
            else:
                out.append(f"faces {f} and {g} share edges {sorted(se)} and vertices {sorted(sv)}")
    return out


def is_triangulation(g) -> tuple[bool, list[str]]:
    """Whether a contacts graph (or a bare map) triangulates its surface."""
    if isinstance(g, CombinatorialMap):
        m = g
        expected_genus = None
        n_circles = None
    else:
        m = g.map
        expected_genus = g.surface_genus
        n_circles = g.n_circles
    if m is None or m.n_half_edges == 0:
        return False, ["no edges"]
    out = []
    if not m.connected:
        out.append("contacts graph is disconnected")
    if n_circles is not None and m.V != n_circles:
        out.append(f"{n_circles - m.V} circles touch no other circle")
    if expected_genus is not None and m.connected and m.genus != expected_genus:
        out.append(f"embedding has genus {m.genus}, surface has genus {expected_genus}")
    out += triangulation_violations(m)
    return not out, out


# ------------------------------------------------------ triangulation check

@dataclass
class TriangpropResult:
    hypotheses: dict
    conclusion: bool
    combined: Configuration | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    def as_pair(self) -> tuple[bool, bool]:
        return self.hypotheses_hold, self.conclusion


def _torus_shifts(s: TranslationSurface) -> list[QPoint]:
    base = {g.translation for g in s.partner.values()}
    return sorted({a + b for a in base | {ORIGIN} for b in base | {ORIGIN}}, key=lambda t: (t.x, t.y))


def _planar_disks(c: Configuration) -> list[tuple[QPoint, Rat]]:
    shifts = _torus_shifts(c.surface)
    out = set()
    for circ in c.circles:
        for _, p in circ.planar_centers:
            for t in shifts:
                out.add((p + t, circ.radius_sq))
    return sorted(out)


def slit_covered(c: Configuration, slit: Segment) -> bool:
    """Every point of the slit lies in some closed disk of the torus configuration."""
    intervals = [iv for center, rsq in _planar_disks(c)
                 if (iv := segment_disk_params(slit.a, slit.b, center, rsq)) is not None]
    intervals.sort(key=cmp_to_key(lambda u, v: u[0].compare(v[0])))
    reach = QuadraticRoot(Rat(0), Rat(0), Rat(0))
    for lo, hi in intervals:
        if lo.compare(reach) > 0:
            return False
        if hi.compare(reach) > 0:
            reach = hi
    return reach.compare(QuadraticRoot(Rat(1), Rat(0), Rat(0))) >= 0


def endpoints_at_centers(c: Configuration, slit: Segment) -> bool:
    centers = {p for p, _ in _planar_disks(c)}
    return slit.a in centers and slit.b in centers


def triangprop_report(pair, slit: Segment, depth: int = 6) -> TriangpropResult:
    """Test the hypotheses and the conclusion of the slit-chain triangulation statement.

    ``pair`` holds the configurations of the two tori (each built from a
    torus packing); the conclusion glues them along the slit and asks whether
    the combined contacts graph triangulates the doubled slit torus.
    """
    from .builders import doubled_configuration
    hyp = {}
    for n, c in enumerate(pair):
        report = verify_configuration(c, depth)
        ok = report.passed
        if ok:
            try:
                ok = is_triangulation(contacts_graph(c, depth))[0]
            except FlatpackError:
                ok = False
        hyp[f"torus {n} triangulated"] = ok
        hyp[f"torus {n} slit ends at centers"] = endpoints_at_centers(c, slit)
        hyp[f"torus {n} slit covered"] = slit_covered(c, slit)
    try:
        combined = doubled_configuration(pair[0].source, pair[1].source, slit)
        conclusion = verify_configuration(combined, depth).passed and \
            is_triangulation(contacts_graph(combined, depth))[0]
    except FlatpackError:
        combined, conclusion = None, False
    return TriangpropResult(hyp, conclusion, combined)


def check_triangprop(pair, slit: Segment, depth: int = 6) -> tuple[bool, bool]:
    """(hypotheses hold, conclusion holds); see triangprop_report for the details."""
    return triangprop_report(pair, slit, depth).as_pair()

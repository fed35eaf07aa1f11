"""Translation surfaces presented as finite unions of polygons glued by translations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import (AngleNotMultiple, Disconnected, DoubleIdentification, GenusTooSmall,
                     InvalidPolygon, NoSingularities, NonTranslationGluing, PointOutsidePolygons,
                     UnmatchedSide)
from .geom import (EPS_ANGLE, PointHit, QPoint, Rat, Segment, bbox, ccw_angle, ccw_less, cross, dot,
                   is_simple_polygon, on_segment, point_in_polygon, same_direction, segment_polygon_intervals,
                   segments_intersect, signed_area2, squared_distance, sweep_crosses_zero)


@dataclass(frozen=True)
class PolygonSpec:
    vertices: tuple
    polygon_id: int
    sheet: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(QPoint(*v) for v in self.vertices))


class SideId(NamedTuple):
    polygon_id: int
    edge_index: int


@dataclass(frozen=True)
class Identification:
    side_a: SideId
    side_b: SideId


class Corner(NamedTuple):
    polygon_id: int
    vertex_index: int


@dataclass(frozen=True)
class ConePoint:
    vertex_class: tuple
    degree: int

    @property
    def angle(self) -> float:
        return 2 * math.pi * (self.degree + 1)


class SurfacePoint(NamedTuple):
    polygon_id: int
    point: QPoint


@dataclass(frozen=True)
class UnfoldedPath:
    crossing_sequence: tuple
    developed_segment: Segment | None
    length_sq: Rat
    start: SurfacePoint | None = None
    end: SurfacePoint | None = None

    @property
    def length(self) -> float:
        return math.sqrt(self.length_sq)


class Glue(NamedTuple):
    side: SideId
    translation: QPoint   # maps coordinates on this side to the partner side


class TranslationSurface:
    """A validated translation surface.  Build with ``build_surface``."""

    def __init__(self, polygons: Sequence[PolygonSpec], identifications: Sequence[Identification],
                 eps_angle: float = EPS_ANGLE):
        self.polygons = list(polygons)
        self.identifications = list(identifications)
        self.eps_angle = eps_angle
        self._poly = {p.polygon_id: p for p in self.polygons}
        self.partner: dict[SideId, Glue] = {}
        self._validate()
        self._vertex_classes()
        self._boxes = {p.polygon_id: bbox(p.vertices) for p in self.polygons}

    # ---------------------------------------------------------- validation
    def _validate(self):
        if not self.polygons:
            raise InvalidPolygon("no polygons given")
        if len(self._poly) != len(self.polygons):
            raise InvalidPolygon("duplicate polygon ids")
        for p in self.polygons:
            if len(p.vertices) < 3:
                raise InvalidPolygon(f"polygon {p.polygon_id} has fewer than 3 vertices")
            if not is_simple_polygon(p.vertices):
                raise InvalidPolygon(f"polygon {p.polygon_id} is not simple")
            if signed_area2(p.vertices) <= 0:
                raise InvalidPolygon(f"polygon {p.polygon_id} is not counterclockwise")
        for ident in self.identifications:
            a, b = SideId(*ident.side_a), SideId(*ident.side_b)
            for s in (a, b):
                if s.polygon_id not in self._poly or not 0 <= s.edge_index < len(self._poly[s.polygon_id].vertices):
                    raise UnmatchedSide(f"side {tuple(s)} does not exist")
                if s in self.partner:
                    raise DoubleIdentification(f"side {tuple(s)} identified twice")
            if a == b:
                raise DoubleIdentification(f"side {tuple(a)} identified with itself")
            va, vb = self.side_vector(a), self.side_vector(b)
            if va != -vb:
                raise NonTranslationGluing(
                    f"sides {tuple(a)} and {tuple(b)} are not opposite translates")
            pa0 = self.side_points(a)[0]
            pb1 = self.side_points(b)[1]
            pb0 = self.side_points(b)[0]
            pa1 = self.side_points(a)[1]
            self.partner[a] = Glue(b, pb1 - pa0)
            self.partner[b] = Glue(a, pa1 - pb0)
        for p in self.polygons:
            for i in range(len(p.vertices)):
                if SideId(p.polygon_id, i) not in self.partner:
                    raise UnmatchedSide(f"side {(p.polygon_id, i)} lacks an identification")
        # connectivity
        parent = {pid: pid for pid in self._poly}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for s, g in self.partner.items():
            parent[find(s.polygon_id)] = find(g.side.polygon_id)
        if len({find(x) for x in parent}) != 1:
            raise Disconnected("glued polygons do not form a connected surface")

    def _vertex_classes(self):
        seen: set[Corner] = set()
        self.vertex_classes: list[tuple[Corner, ...]] = []
        self.class_of: dict[Corner, int] = {}
        self.class_turns: list[int] = []
        self.class_angles: list[float] = []
        for p in self.polygons:
            for i in range(len(p.vertices)):
                c = Corner(p.polygon_id, i)
                if c in seen:
                    continue
                cls = []
                cur = c
                while cur not in seen:
                    seen.add(cur)
                    cls.append(cur)
                    cur = self.next_corner(cur)
                if cur != c:
                    raise NonTranslationGluing("corner walk did not close up")
                idx = len(self.vertex_classes)
                for x in cls:
                    self.class_of[x] = idx
                self.vertex_classes.append(tuple(cls))
                turns = sum(sweep_crosses_zero(*self.corner_directions(x)) for x in cls)
                angle = sum(ccw_angle(*self.corner_directions(x)) for x in cls)
                if abs(angle - 2 * math.pi * turns) > self.eps_angle * max(1, len(cls)):
                    raise AngleNotMultiple(
                        f"vertex class {idx}: angle {angle} disagrees with {turns} full turns")
                self.class_turns.append(turns)
                self.class_angles.append(angle)
        self.cone_points = [ConePoint(cls, t - 1) for cls, t in zip(self.vertex_classes, self.class_turns)
                            if t > 1]
        self.euler_characteristic = len(self.vertex_classes) - len(self.identifications) + len(self.polygons)
        if self.euler_characteristic % 2:
            raise NonTranslationGluing("odd Euler characteristic")
        self.genus = (2 - self.euler_characteristic) // 2

    # -------------------------------------------------------------- access
    def polygon(self, pid: int) -> PolygonSpec:
        return self._poly[pid]

    @property
    def polygon_ids(self) -> list[int]:
        return [p.polygon_id for p in self.polygons]

    def vertex(self, c: Corner) -> QPoint:
        return self._poly[c[0]].vertices[c[1]]

    def side_points(self, s) -> tuple[QPoint, QPoint]:
        vs = self._poly[s[0]].vertices
        return vs[s[1]], vs[(s[1] + 1) % len(vs)]

    def side_vector(self, s) -> QPoint:
        a, b = self.side_points(s)
        return b - a

    def next_corner(self, c: Corner) -> Corner:
        """The corner met next when turning counterclockwise about the vertex."""
        n = len(self._poly[c[0]].vertices)
        g = self.partner[SideId(c[0], (c[1] - 1) % n)]
        return Corner(g.side.polygon_id, g.side.edge_index)

    def corner_directions(self, c: Corner) -> tuple[QPoint, QPoint]:
        vs = self._poly[c[0]].vertices
        n = len(vs)
        v = vs[c[1]]
        return vs[(c[1] + 1) % n] - v, vs[(c[1] - 1) % n] - v

    def corner_contains(self, c: Corner, d) -> bool:
        """Whether direction d leaves the vertex into corner c (half-open sector [u, w))."""
        u, w = self.corner_directions(c)
        if same_direction(d, u):
            return True
        if same_direction(d, w):
            return False
        return ccw_less(u, d, w)

    def is_cone_corner(self, c: Corner) -> bool:
        return self.class_turns[self.class_of[Corner(*c)]] > 1

    @property
    def stratum(self) -> tuple[int, ...]:
        return stratum(self)

    # -------------------------------------------------------------- points
    def locate(self, pid: int, pt) -> tuple[str, int | None]:
        """("interior", None), ("side", i) or ("vertex", i) for a point of polygon pid."""
        if pid not in self._poly:
            raise PointOutsidePolygons(f"no polygon {pid}")
        vs = self._poly[pid].vertices
        pt = QPoint(*pt)
        where = point_in_polygon(pt, vs)
        if where == "outside":
            raise PointOutsidePolygons(f"{pt} is not in polygon {pid}")
        if where == "inside":
            return "interior", None
        for i, v in enumerate(vs):
            if v == pt:
                return "vertex", i
        n = len(vs)
        for i in range(n):
            if on_segment(pt, Segment(vs[i], vs[(i + 1) % n])):
                return "side", i
        raise AssertionError("boundary point not on any side")

    def representatives(self, p: SurfacePoint) -> list[SurfacePoint]:
        """All (polygon, point) pairs identified with p, i.e. the set I(x)."""
        pid, pt = p
        kind, i = self.locate(pid, pt)
        if kind == "interior":
            return [SurfacePoint(pid, QPoint(*pt))]
        if kind == "vertex":
            cls = self.vertex_classes[self.class_of[Corner(pid, i)]]
            out = {SurfacePoint(c[0], self.vertex(c)) for c in cls}
            return sorted(out)
        g = self.partner[SideId(pid, i)]
        return sorted({SurfacePoint(pid, QPoint(*pt)), SurfacePoint(g.side.polygon_id, QPoint(*pt) + g.translation)})

    def canonical(self, p: SurfacePoint) -> SurfacePoint:
        return min(self.representatives(p))

    def vertex_class_of_point(self, p: SurfacePoint) -> int | None:
        kind, i = self.locate(*p)
        if kind != "vertex":
            return None
        return self.class_of[Corner(p[0], i)]

    def find_point(self, pt, sheet: int | None = None) -> SurfacePoint:
        """Canonical surface point for planar coordinates, searching all polygons (of a sheet)."""
        pt = QPoint(*pt)
        for poly in self.polygons:
            if sheet is not None and poly.sheet != sheet:
                continue
            if point_in_polygon(pt, poly.vertices) != "outside":
                return self.canonical(SurfacePoint(poly.polygon_id, pt))
        raise PointOutsidePolygons(f"{pt} lies in no polygon")

    # ------------------------------------------------------- straight walks
    def walk(self, start: SurfacePoint, displacement) -> SurfacePoint | None:
        """Follow the straight path start + t*displacement, 0 <= t <= 1, across gluings.

        Returns the canonical endpoint, or None when the path runs into a cone
        point before its end (the flow is undefined there).
        """
        disp = QPoint(*displacement)
        if disp == QPoint(Rat(0), Rat(0)):
            return self.canonical(start)
        best = None
        for rep in self.representatives(start):
            iv = _interval_from_zero(rep.point, rep.point + disp, self._poly[rep.polygon_id].vertices)
            if iv is not None and iv > 0:
                best = (rep, iv)
                break
        if best is None:
            return None
        pid, x = best[0]
        remaining = disp
        for _ in range(100000):
            vs = self._poly[pid].vertices
            h = _interval_from_zero(x, x + remaining, vs)
            if h is None or h == 0:
                return None
            if h >= 1:
                return self.canonical(SurfacePoint(pid, x + remaining))
            e = x + remaining.scale(h)
            remaining = remaining.scale(1 - h)
            kind, i = self.locate(pid, e)
            if kind == "vertex":
                if self.is_cone_corner(Corner(pid, i)):
                    return None
                cls = self.vertex_classes[self.class_of[Corner(pid, i)]]
                nxt = [c for c in cls if self.corner_contains(c, remaining)]
                c = nxt[0]
                pid, x = c[0], self.vertex(c)
            elif kind == "side":
                g = self.partner[SideId(pid, i)]
                pid, x = g.side.polygon_id, e + g.translation
            else:  # pragma: no cover - interval ended inside the polygon
                raise AssertionError("walk stopped in an interior point")
        raise AssertionError("walk did not terminate")

    # ----------------------------------------------------------- unfolding
    def develop(self, start: SurfacePoint, depth: int, bound_sq: Rat | None = None
                ) -> Iterator["_Copy"]:
        """Enumerate developed polygon copies reachable from start by straight lines.

        Yields copies along crossing sequences of length <= depth whose angular
        window (directions from start passing through every crossed side) is
        nonempty and whose nearest point is closer than bound_sq.
        """
        x0 = QPoint(*start.point)
        first = _Copy(start.polygon_id, QPoint(Rat(0), Rat(0)), (), None, None)
        stack = [first]
        while stack:
            cp = stack.pop()
            yield cp
            if len(cp.chain) >= depth:
                continue
            vs = self._poly[cp.polygon_id].vertices
            n = len(vs)
            for i in range(n):
                sid = SideId(cp.polygon_id, i)
                if cp.entered == sid:
                    continue
                a = vs[i] + cp.offset
                b = vs[(i + 1) % n] + cp.offset
                da, db = a - x0, b - x0
                c = cross(da, db)
                if c == 0:
                    continue   # start lies on this side's line
                if c > 0:
                    win = (da, db)
                else:
                    win = (db, da)
                if bound_sq is not None and _segment_distance_sq(x0, a, b) >= bound_sq:
                    continue
                w = _intersect_windows(cp.window, win)
                if w is None:
                    continue
                g = self.partner[sid]
                stack.append(_Copy(g.side.polygon_id, cp.offset - g.translation, cp.chain + (sid,),
                                   w, g.side))

    def check_chain(self, start_pid: int, x0, target, chain: Sequence[SideId]) -> bool:
        """Exact check that the segment x0 -> target (developed) runs through the chain."""
        seg = Segment(x0, target) if x0 != target else None
        if seg is None:
            return not chain
        offset = QPoint(Rat(0), Rat(0))
        params = [Rat(0)]
        copies = []
        cur_pid = start_pid
        for sid in chain:
            copies.append((cur_pid, offset))
            a, b = self.side_points(sid)
            hit = segments_intersect(seg, Segment(a + offset, b + offset))
            if not isinstance(hit, PointHit):
                return False
            t = _param(seg, hit.point)
            if t < params[-1]:
                return False
            params.append(t)
            g = self.partner[sid]
            offset = offset - g.translation
            cur_pid = g.side.polygon_id
        copies.append((cur_pid, offset))
        params.append(Rat(1))
        for (pid, off), lo, hi in zip(copies, params, params[1:]):
            vs = [v + off for v in self._poly[pid].vertices]
            ok = False
            for s, t in segment_polygon_intervals(seg.a, seg.b, vs):
                if s <= lo and hi <= t:
                    ok = True
                    break
            if not ok:
                return False
        return True


@dataclass(frozen=True)
class _Copy:
    polygon_id: int
    offset: QPoint          # developed position = polygon coordinates + offset
    chain: tuple
    window: tuple | None
    entered: SideId | None  # side of this copy we came in through


def _param(seg: Segment, p) -> Rat:
    d = seg.direction
    return dot(p - seg.a, d) / dot(d, d)


def _interval_from_zero(a, b, vertices) -> Rat | None:
    for s, t in segment_polygon_intervals(a, b, vertices):
        if s == 0:
            return t
    return None


def _in_window(w, d) -> bool:
    # windows always span an angle < pi; a degenerate window is a single ray
    lo, hi = w
    if cross(lo, hi) > 0:
        return cross(lo, d) >= 0 and cross(d, hi) >= 0
    return same_direction(lo, d)


def _intersect_windows(w1, w2):
    if w1 is None:
        return w2
    lo = w2[0] if _in_window(w1, w2[0]) else (w1[0] if _in_window(w2, w1[0]) else None)
    hi = w2[1] if _in_window(w1, w2[1]) else (w1[1] if _in_window(w2, w1[1]) else None)
    if lo is None or hi is None:
        return None
    if cross(lo, hi) < 0 or (cross(lo, hi) == 0 and not same_direction(lo, hi)):
        return None
    return (lo, hi)


def _segment_distance_sq(p, a, b) -> Rat:
    d = b - a
    t = dot(p - a, d) / dot(d, d)
    t = min(Rat(1), max(Rat(0), t))
    return squared_distance(p, a + d.scale(t))


# ------------------------------------------------------------------ operations

def build_surface(polygons: Sequence[PolygonSpec], identifications: Sequence[Identification],
                  eps_angle: float = EPS_ANGLE) -> TranslationSurface:
    return TranslationSurface(polygons, identifications, eps_angle)


def cone_points(s: TranslationSurface) -> list[ConePoint]:
    return list(s.cone_points)


def stratum(s: TranslationSurface) -> tuple[int, ...]:
    if s.genus < 2:
        raise GenusTooSmall(f"genus {s.genus} surfaces do not belong to a stratum of this kind")
    degrees = tuple(sorted((c.degree for c in s.cone_points), reverse=True))
    assert sum(degrees) == 2 * s.genus - 2
    return degrees


def unfold_distance(s: TranslationSurface, p: SurfacePoint, q: SurfacePoint, depth: int = 6,
                    bound_sq: Rat | None = None) -> tuple[float, UnfoldedPath | None]:
    """Shortest developed straight segment from p to q over crossing sequences of length <= depth.

    ``bound_sq`` restricts the search to paths strictly shorter than the bound;
    when nothing shorter exists the result is (inf, None).
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    starts = s.representatives(p)
    targets = s.representatives(q)
    by_poly: dict[int, list[QPoint]] = {}
    for t in targets:
        by_poly.setdefault(t.polygon_id, []).append(t.point)
    best = bound_sq
    witness = None
    for st in starts:
        if st in targets:
            return 0.0, UnfoldedPath((), None, Rat(0), st, st)
    for st in starts:
        for cp in s.develop(st, depth, best):
            for y in by_poly.get(cp.polygon_id, ()):
                Y = y + cp.offset
                d = Y - st.point
                L = dot(d, d)
                if best is not None and L >= best:
                    continue
                if cp.window is not None and not _in_window(cp.window, d):
                    continue
                if not s.check_chain(st.polygon_id, st.point, Y, cp.chain):
                    continue
                best = L
                witness = UnfoldedPath(cp.chain, Segment(st.point, Y), L, st,
                                       SurfacePoint(cp.polygon_id, y))
    if witness is None:
        return math.inf, None
    return math.sqrt(witness.length_sq), witness


def unfold_within(s: TranslationSurface, p: SurfacePoint, targets: Sequence[SurfacePoint], depth: int,
                  bound_sq: Rat) -> dict[int, UnfoldedPath]:
    """Developed straight segments from p shorter than the bound, for many targets at once.

    Returns {target index: shortest such path}; targets not reached are absent.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    bound_sq = Rat(bound_sq)
    starts = s.representatives(p)
    by_poly: dict[int, list[tuple[int, QPoint]]] = {}
    for k, q in enumerate(targets):
        for t in s.representatives(q):
            if t in starts:
                return {k: UnfoldedPath((), None, Rat(0), t, t)} if bound_sq > 0 else {}
            by_poly.setdefault(t.polygon_id, []).append((k, t.point))
    found: dict[int, UnfoldedPath] = {}
    for st in starts:
        for cp in s.develop(st, depth, bound_sq):
            for k, y in by_poly.get(cp.polygon_id, ()):
                Y = y + cp.offset
                d = Y - st.point
                L = dot(d, d)
                if L >= bound_sq or (k in found and L >= found[k].length_sq):
                    continue
                if cp.window is not None and not _in_window(cp.window, d):
                    continue
                if not s.check_chain(st.polygon_id, st.point, Y, cp.chain):
                    continue
                found[k] = UnfoldedPath(cp.chain, Segment(st.point, Y), L, st, SurfacePoint(cp.polygon_id, y))
    return found


def saddle_connections(s: TranslationSurface, length_sq_bound: Rat, depth: int = 6
                       ) -> list[UnfoldedPath]:
    """Straight segments between cone points with squared length <= bound.

    Each connection is reported once (the two traversal directions are merged).
    """
    if not s.cone_points:
        raise NoSingularities("surface has no cone points")
    bound = Rat(length_sq_bound)
    found: dict[tuple, UnfoldedPath] = {}
    for cone in s.cone_points:
        for corner in cone.vertex_class:
            x0 = s.vertex(corner)
            start = SurfacePoint(corner[0], x0)
            for cp in s.develop(start, depth, bound + 1):
                vs = s.polygon(cp.polygon_id).vertices
                for j, y in enumerate(vs):
                    end_corner = Corner(cp.polygon_id, j)
                    if not s.is_cone_corner(end_corner):
                        continue
                    Y = y + cp.offset
                    d = Y - x0
                    L = dot(d, d)
                    if L == 0 or L > bound:
                        continue
                    if not s.corner_contains(corner, d):
                        continue
                    if cp.window is not None and not _in_window(cp.window, d):
                        continue
                    if not s.check_chain(corner[0], x0, Y, cp.chain):
                        continue
                    if _passes_cone_point(s, corner[0], x0, Y, cp):
                        continue
                    arrive = _arrival_corner(s, end_corner, -d)
                    if arrive is None:
                        continue   # the copy only touches the segment at its end
                    key = (_dir_key(s, corner, d), _dir_key(s, arrive, -d), L)
                    key = min(key, (key[1], key[0], L))
                    if key not in found:
                        found[key] = UnfoldedPath(cp.chain, Segment(x0, Y), L,
                                                  SurfacePoint(corner[0], x0),
                                                  SurfacePoint(cp.polygon_id, y))
    return [found[k] for k in sorted(found)]


def _unit(d) -> tuple:
    m = max(abs(d[0]), abs(d[1]))
    return (d[0] / m, d[1] / m)


def _dir_key(s, corner, d) -> tuple:
    return (tuple(corner), _unit(d))


def _arrival_corner(s: TranslationSurface, c: Corner, d) -> Corner | None:
    # a path entering corner c from inside its polygon arrives with d in the
    # closed sector of c; the closing side belongs to the next corner
    if s.corner_contains(c, d):
        return c
    if same_direction(d, s.corner_directions(c)[1]):
        return s.next_corner(c)
    return None


def _passes_cone_point(s: TranslationSurface, pid: int, x0, Y, cp: _Copy) -> bool:
    seg = Segment(x0, Y)
    offset = QPoint(Rat(0), Rat(0))
    copies = [(pid, offset)]
    for sid in cp.chain:
        g = s.partner[sid]
        offset = offset - g.translation
        copies.append((g.side.polygon_id, offset))
    for pid, off in copies:
        for j, v in enumerate(s.polygon(pid).vertices):
            if not s.is_cone_corner(Corner(pid, j)):
                continue
            w = v + off
            if w != x0 and w != Y and on_segment(w, seg):
                return True
    return False

"""Constructors for tori, slitted surfaces, circle packings and the figure fixtures."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cmp_to_key
from math import prod
from typing import Sequence

from .errors import (ChainDoesNotFit, DegenerateSlit, FlatpackError, SlitOverlap, UnmatchedSide,
                     WrongSlitCount)
from .geom import (Rat, Disjoint, Overlap, PointHit, QPoint, Segment, angle_key_less, cross, dot,
                   on_segment, point_in_polygon, segment_polygon_intervals, segments_intersect,
                   signed_area2)
from .surface import Identification, PolygonSpec, SideId, TranslationSurface
from .topomap import CombinatorialMap, make_bigon, map_from_faces

F = Rat
UNIT_LATTICE = (QPoint(F(1), F(0)), QPoint(F(0), F(1)))
UNIT_SQUARE = ((0, 0), (1, 0), (1, 1), (0, 1))


def _q(p) -> QPoint:
    return QPoint(F(p[0]), F(p[1]))


# ------------------------------------------------------ polygon splitting

def split_polygon(vertices: Sequence, cuts: Sequence[Segment]) -> list[tuple[QPoint, ...]]:
    """Subdivide a simple CCW polygon by cut segments into simple CCW faces.

    Cuts are clipped to the polygon; cut pieces along the boundary are
    ignored.  Every cut piece must separate (no dangling ends).
    """
    vs = [_q(v) for v in vertices]
    n = len(vs)
    segs = [Segment(vs[i], vs[(i + 1) % n]) for i in range(n)]
    marks = []    # endpoints of cut pieces running along the boundary become vertices
    for cut in cuts:
        for s, t in segment_polygon_intervals(cut.a, cut.b, vs):
            if s == t:
                continue
            piece = Segment(cut.point_at(s), cut.point_at(t))
            mid = piece.point_at(F(1, 2))
            if point_in_polygon(mid, vs) == "boundary":
                marks += [piece.a, piece.b]
                continue
            segs.append(piece)
    cuts_on: list[set] = [{sg.a, sg.b} for sg in segs]
    for i in range(n):
        cuts_on[i].update(p for p in marks if on_segment(p, segs[i]))
    if len(segs) == n:
        out = []
        for i in range(n):
            d = segs[i].b - segs[i].a
            out += sorted(cuts_on[i] - {segs[i].b}, key=lambda p: dot(p - segs[i].a, d))
        return [tuple(out)]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            hit = segments_intersect(segs[i], segs[j])
            if isinstance(hit, PointHit):
                cuts_on[i].add(hit.point)
                cuts_on[j].add(hit.point)
            elif isinstance(hit, Overlap):
                for p in (hit.segment.a, hit.segment.b):
                    cuts_on[i].add(p)
                    cuts_on[j].add(p)
    edges = set()
    for sg, pts in zip(segs, cuts_on):
        d = sg.b - sg.a
        order = sorted(pts, key=lambda p: dot(p - sg.a, d))
        for a, b in zip(order, order[1:]):
            if a != b:
                edges.add(frozenset((a, b)))
    adj: dict[QPoint, list[QPoint]] = {}
    for e in edges:
        a, b = tuple(e)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v, nb in adj.items():
        nb.sort(key=cmp_to_key(lambda p, q, v=v: -1 if angle_key_less(p - v, q - v) else
                               (1 if angle_key_less(q - v, p - v) else 0)))
    used = set()
    faces = []
    for a in adj:
        for b in adj[a]:
            if (a, b) in used:
                continue
            face = []
            u, v = a, b
            while (u, v) not in used:
                used.add((u, v))
                face.append(u)
                nb = adj[v]
                k = nb.index(u)
                u, v = v, nb[k - 1]
            if signed_area2(face) > 0:
                if len(set(face)) != len(face):
                    raise DegenerateSlit("a cut ends inside a polygon without separating it")
                faces.append(tuple(face))
    return faces


# ------------------------------------------------------------ auto-gluing

def _lattice_shifts(lattice, reach: int = 1) -> list[QPoint]:
    l1, l2 = lattice
    out = [l1.scale(i) + l2.scale(j) for i in range(-reach, reach + 1) for j in range(-reach, reach + 1)]
    out.sort(key=lambda t: (t.x * t.x + t.y * t.y, t.x, t.y))
    return out


def _line_key(a: QPoint, b: QPoint):
    d = b - a
    m = max(abs(d.x), abs(d.y))
    d = QPoint(d.x / m, d.y / m)
    if d.x < 0 or (d.x == 0 and d.y < 0):
        d = -d
    return (d, cross(d, a))


@dataclass(frozen=True)
class SlitGluing:
    segment: Segment
    sheet_a: int
    sheet_b: int


def glue_pieces(pieces: Sequence[tuple[int, Sequence]], lattice=UNIT_LATTICE,
                slits: Sequence[SlitGluing] = (), eps_angle: float | None = None) -> TranslationSurface:
    """Glue polygons tiling fundamental domains of a lattice, one tiling per sheet.

    Each side is glued to the opposite collinear side found at the same
    position up to a lattice translation.  Sides on a slit are glued to the
    other sheet of that slit instead.  Sides are refined at each other's
    endpoints until the gluing is one-to-one.
    """
    lattice = (_q(lattice[0]), _q(lattice[1]))
    polys = [(sheet, [_q(v) for v in vs]) for sheet, vs in pieces]
    shifts = _lattice_shifts(lattice)

    def slit_target(sheet, a, b):
        for sl in slits:
            if sheet not in (sl.sheet_a, sl.sheet_b):
                continue
            for t in shifts:
                if on_segment(a + t, sl.segment) and on_segment(b + t, sl.segment):
                    return sl.sheet_b if sheet == sl.sheet_a else sl.sheet_a
        return None

    for _ in range(50):
        index: dict = {}
        for pi, (sheet, vs) in enumerate(polys):
            for i in range(len(vs)):
                a, b = vs[i], vs[(i + 1) % len(vs)]
                index.setdefault((sheet,) + _line_key(a, b), []).append((pi, i))
        splits: dict[tuple[int, int], set] = {}
        for pi, (sheet, vs) in enumerate(polys):
            for i in range(len(vs)):
                a, b = vs[i], vs[(i + 1) % len(vs)]
                target = slit_target(sheet, a, b)
                tsheet = sheet if target is None else target
                d = b - a
                for t in shifts:
                    for qj, j in index.get((tsheet,) + _line_key(a + t, b + t), ()):
                        if (qj, j) == (pi, i) and t == shifts[0]:
                            continue
                        ws = polys[qj][1]
                        c, e = ws[j] - t, ws[(j + 1) % len(ws)] - t
                        if dot(e - c, d) >= 0:
                            continue
                        for p in (c, e):
                            u = dot(p - a, d) / dot(d, d)
                            if 0 < u < 1:
                                splits.setdefault((pi, i), set()).add(u)
        if not splits:
            break
        for pi, (sheet, vs) in enumerate(polys):
            new = []
            for i in range(len(vs)):
                a, b = vs[i], vs[(i + 1) % len(vs)]
                new.append(a)
                for u in sorted(splits.get((pi, i), ())):
                    new.append(a + (b - a).scale(u))
            polys[pi] = (sheet, new)
    else:  # pragma: no cover
        raise FlatpackError("side refinement did not stabilise")

    where: dict = {}
    for pi, (sheet, vs) in enumerate(polys):
        for i in range(len(vs)):
            where[(sheet, vs[i], vs[(i + 1) % len(vs)])] = (pi, i)
    idents = []
    done = set()
    for pi, (sheet, vs) in enumerate(polys):
        for i in range(len(vs)):
            if (pi, i) in done:
                continue
            a, b = vs[i], vs[(i + 1) % len(vs)]
            target = slit_target(sheet, a, b)
            tsheet = sheet if target is None else target
            match = None
            for t in shifts:
                hit = where.get((tsheet, b + t, a + t))
                if hit is not None and hit != (pi, i):
                    match = hit
                    break
            if match is None:
                raise UnmatchedSide(f"side {a}-{b} on sheet {sheet} has no partner")
            if match in done:
                raise UnmatchedSide(f"side {a}-{b} on sheet {sheet} would be glued twice")
            done.add((pi, i))
            done.add(match)
            idents.append(Identification(SideId(pi, i), SideId(*match)))
    specs = [PolygonSpec(tuple(vs), pi, sheet) for pi, (sheet, vs) in enumerate(polys)]
    if eps_angle is None:
        return TranslationSurface(specs, idents)
    return TranslationSurface(specs, idents, eps_angle)


# ---------------------------------------------------------------- tori

def make_torus() -> TranslationSurface:
    return glue_pieces([(0, UNIT_SQUARE)])


@dataclass(frozen=True)
class SlitSpec:
    torus_index: int       # the slit joins torus i and torus i + 1
    segment: Segment


def _as_segment(slit) -> Segment:
    if isinstance(slit, Segment):
        return slit
    a, b = slit
    if _q(a) == _q(b):
        raise DegenerateSlit("slit has zero length")
    return Segment(_q(a), _q(b))


def _trapezoid_cuts(slit: Segment, tiles: Sequence) -> list[Segment]:
    """The slit plus vertical lines through its endpoints across the tiles."""
    ys = [F(v[1]) for t in tiles for v in t]
    lo, hi = min(ys), max(ys)
    out = [slit]
    for p in (slit.a, slit.b):
        out.append(Segment(QPoint(p.x, lo), QPoint(p.x, hi)))
    return out


def _check_slit_inside(seg: Segment, tiles: Sequence) -> None:
    for p in (seg.a, seg.b, seg.point_at(F(1, 2))):
        if not any(point_in_polygon(p, [_q(v) for v in t]) != "outside" for t in tiles):
            raise DegenerateSlit(f"slit point {p} lies outside the fundamental domain")


def make_doubled_slit_torus(slit) -> TranslationSurface:
    """Two unit-square tori cut along the same slit and cross-glued."""
    return make_slitted_surface(2, [SlitSpec(0, _as_segment(slit))])


def make_slitted_surface(g: int, slits: Sequence) -> TranslationSurface:
    """A chain of g unit-square tori, torus i glued to torus i + 1 along slit i."""
    if g < 2:
        raise WrongSlitCount("a slitted surface needs at least two tori")
    if len(slits) != g - 1:
        raise WrongSlitCount(f"genus {g} needs {g - 1} slits, got {len(slits)}")
    specs = []
    for i, s in enumerate(slits):
        if isinstance(s, SlitSpec):
            specs.append(SlitSpec(s.torus_index, _as_segment(s.segment)))
        else:
            specs.append(SlitSpec(i, _as_segment(s)))
    specs.sort(key=lambda s: s.torus_index)
    if [s.torus_index for s in specs] != list(range(g - 1)):
        raise WrongSlitCount("slits must join consecutive tori 0-1, 1-2, ...")
    for s in specs:
        _check_slit_inside(s.segment, [UNIT_SQUARE])
        d = s.segment.b - s.segment.a
        if d.x.denominator == 1 and d.y.denominator == 1:
            raise DegenerateSlit("slit endpoints coincide on the torus")
    for i in range(1, g - 1):
        if not isinstance(segments_intersect(specs[i - 1].segment, specs[i].segment), Disjoint):
            raise SlitOverlap(f"slits {i - 1} and {i} meet on torus {i}")
    pieces = []
    for t in range(g):
        cuts = []
        for s in specs:
            if t in (s.torus_index, s.torus_index + 1):
                cuts += _trapezoid_cuts(s.segment, [UNIT_SQUARE])
        for face in split_polygon(UNIT_SQUARE, cuts):
            pieces.append((t, face))
    gl = [SlitGluing(s.segment, s.torus_index, s.torus_index + 1) for s in specs]
    return glue_pieces(pieces, UNIT_LATTICE, gl)


# -------------------------------------------------------------- packings

@dataclass
class TorusPacking:
    """Disks on a flat torus given by a lattice and polygons tiling a fundamental domain."""
    lattice: tuple
    tiles: list
    disks: list            # (label, center, radius_sq)
    name: str = ""

    def __post_init__(self):
        self.lattice = (_q(self.lattice[0]), _q(self.lattice[1]))
        self.tiles = [tuple(_q(v) for v in t) for t in self.tiles]
        self.disks = [(lab, _q(c), F(r)) for lab, c, r in self.disks]


@dataclass
class SheetSpec:
    packing: TorusPacking
    cuts: list = field(default_factory=list)     # extra polylines splitting tiles, as Segments


def polyline(*points) -> list[Segment]:
    pts = [_q(p) for p in points]
    return [Segment(a, b) for a, b in zip(pts, pts[1:])]


def packing_configuration(sheets: Sequence[SheetSpec], slits: Sequence[SlitGluing] = (), source=None):
    """Glue the sheets' tiles (cut along slits and extra cuts) and clip the disks."""
    from .packing import build_configuration, sectors_from_disks
    lattice = sheets[0].packing.lattice
    pieces = []
    for k, sh in enumerate(sheets):
        cuts = list(sh.cuts)
        for sl in slits:
            if k in (sl.sheet_a, sl.sheet_b):
                cuts.append(sl.segment)
        shifted = [Segment(g.a + t, g.b + t) for g in cuts for t in _lattice_shifts(lattice)]
        for tile in sh.packing.tiles:
            for face in split_polygon(tile, shifted):
                pieces.append((k, face))
    surface = glue_pieces(pieces, lattice, slits)
    disks = [(f"{lab}@{k}", k, c, r) for k, sh in enumerate(sheets) for lab, c, r in sh.packing.disks]
    shifts = [(t.x, t.y) for t in _lattice_shifts(lattice, 2)]
    sectors = sectors_from_disks(surface, disks, shifts)
    return build_configuration(surface, sectors, [(sl.segment, sl.sheet_a, sl.sheet_b) for sl in slits],
                               source, disks, shifts)


def torus_configuration(p: TorusPacking):
    return packing_configuration([SheetSpec(p)], source=p)


def doubled_configuration(p: TorusPacking, q: TorusPacking, slit, cuts_p=(), cuts_q=()):
    """Doubled slit torus carrying packing p on sheet 0 and q on sheet 1."""
    seg = _as_segment(slit)
    return packing_configuration([SheetSpec(p, list(cuts_p)), SheetSpec(q, list(cuts_q))],
                                 [SlitGluing(seg, 0, 1)], source=(p, q, seg))


# the two-circle square torus: circles about the lattice points and the square centers,
# tiled by the two diamonds whose vertices are the circle centers
DIAMONDS = [((0, 0), (F(1, 2), F(-1, 2)), (1, 0), (F(1, 2), F(1, 2))),
            ((0, 0), (F(1, 2), F(1, 2)), (0, 1), (F(-1, 2), F(1, 2)))]


def two_circle_torus(alpha: Rat = F(1, 4)) -> TorusPacking:
    """Circles about (0,0) and (1/2,1/2), tangent along the diagonals at (alpha, alpha)."""
    alpha = F(alpha)
    return TorusPacking(UNIT_LATTICE, DIAMONDS,
                        [("A", (0, 0), 2 * alpha * alpha),
                         ("B", (F(1, 2), F(1, 2)), 2 * (F(1, 2) - alpha) ** 2)],
                        name=f"two-circle torus alpha={alpha}")


FIGURES = ("Fig6", "Fig7", "Fig8", "Fig9", "Fig10", "Fig11")


@dataclass(frozen=True)
class FigureFixture:
    name: str
    slit: Segment | None
    caption_check: str


def make_figure_configuration(fid: str):
    """(surface, configuration) realizing one of the figure configurations.

    Coordinates are hand-made so that every circle meets every cut at
    rational points; each connector leg either avoids all disks or runs
    along a common tangent line into a tangency point.
    """
    t = two_circle_torus()
    if fid == "Fig6":
        c = torus_configuration(t)
    elif fid == "Fig7":
        # slit across the circle about the origin; both ends in interstices
        p, q = (F(21, 50), F(-3, 25)), (F(-3, 25), F(21, 50))
        m = (F(3, 20), F(3, 20))
        cuts = polyline(m, p, (F(1, 2), 0), (F(3, 4), F(1, 4))) + \
            polyline(m, q, (0, F(1, 2)), (F(1, 4), F(3, 4)))
        c = doubled_configuration(t, t, (p, q), cuts, cuts)
    elif fid == "Fig8":
        # slit from the center of the circle about (1/2,1/2) into an interstice
        e = (F(14, 25), F(2, 25))
        cuts = polyline(e, (F(1, 2), 0), (F(1, 4), F(-1, 4)))
        c = doubled_configuration(t, t, ((F(1, 2), F(1, 2)), e), cuts, cuts)
    elif fid == "Fig9":
        # slit between the two centers along the diagonal
        c = doubled_configuration(t, t, ((0, 0), (F(1, 2), F(1, 2))))
    elif fid == "Fig10":
        # slit from a corner into an adjacent interstice
        e = (F(21, 50), F(3, 50))
        cuts = polyline(e, (F(1, 2), 0), (F(3, 4), F(1, 4)))
        c = doubled_configuration(t, t, ((0, 0), e), cuts, cuts)
    elif fid == "Fig11":
        # slit from a corner through the circle about (1/2,1/2) into the opposite interstice
        t = two_circle_torus(F(7, 40))
        e = (F(749, 1000), F(107, 1000))
        cuts = polyline(e, (F(13, 20), 0), (F(33, 40), F(7, 40))) + \
            polyline((F(14, 25), F(2, 25)), (F(1, 2), F(1, 2)))
        c = doubled_configuration(t, t, ((0, 0), e), cuts, cuts)
    else:
        raise ValueError(f"unknown figure {fid!r}")
    return c.surface, c


def make_forbidden_configuration(variant: str = "endpoint-inside"):
    """Configurations the slit-relation trichotomy excludes.

    "endpoint-inside": a slit ending inside a circle away from its center.
    "past-center": the diagonal slit from a corner through the center of the
    circle about (1/2,1/2), ending inside that circle beyond its center.
    """
    t = two_circle_torus()
    e = (F(14, 25), F(2, 25))
    conn = polyline(e, (F(1, 2), 0), (F(1, 4), F(-1, 4)))
    if variant == "endpoint-inside":
        p = (F(53, 100), F(29, 100))
        cuts = conn + polyline(p, (F(1, 2), F(1, 2)))
    elif variant == "past-center":
        c = doubled_configuration(t, t, ((0, 0), (F(5, 8), F(5, 8))))
        return c.surface, c
    else:
        raise ValueError(f"unknown variant {variant!r}")
    c = doubled_configuration(t, t, (e, p), cuts, cuts)
    return c.surface, c


# ----------------------------------------------------------- chain packings

# one 8x6 cell: circles about (0,0), (4,0), (4,3) of radii 3, 1, 2, pairwise tangent
# along the sides of six triangles whose vertices are the centers
_CELL_TRIANGLES = [((0, 0), (4, 0), (4, 3)), ((4, 0), (8, 0), (4, 3)), ((0, 0), (4, 3), (0, 6)),
                   ((8, 0), (8, 6), (4, 3)), ((0, 6), (4, 3), (4, 6)), ((4, 3), (8, 6), (4, 6))]
_CELL_DISKS = [("A", (0, 0), 9), ("C", (4, 0), 1), ("B", (4, 3), 4)]


def triangulated_torus_packing(m: int = 2, n: int = 3) -> TorusPacking:
    """Packing of the (8m x 6n) torus whose contacts graph triangulates it."""
    tiles, disks = [], []
    for i in range(m):
        for j in range(n):
            dx, dy = 8 * i, 6 * j
            tiles += [tuple((x + dx, y + dy) for x, y in t) for t in _CELL_TRIANGLES]
            disks += [(f"{lab}{i}{j}", (x + dx, y + dy), r) for lab, (x, y), r in _CELL_DISKS]
    return TorusPacking(((8 * m, 0), (0, 6 * n)), tiles, disks, name=f"triangulated torus {m}x{n}")


def chain_slit(k: int, m: int = 3) -> Segment:
    # the chain spans 4k units; it must stay clear of its own translate, whose
    # first circle would otherwise touch the last one
    if k < 1:
        raise ValueError("chain length must be positive")
    if 4 * k > 8 * m - 4:
        raise ChainDoesNotFit(f"{k} chain circles need {4 * k + 4} units of a {8 * m}-unit torus")
    return Segment(QPoint(F(0), F(0)), QPoint(F(4 * (k - 1)), F(0)))


def make_chain_packing(k: int, m: int = 3, n: int = 3):
    """Doubled slit torus whose slit joins the centers of k collinear tangent double circles."""
    if k < 2:
        raise ValueError("a chain needs at least two circles")
    slit = chain_slit(k, m)
    t = triangulated_torus_packing(m, n)
    c = doubled_configuration(t, t, slit)
    return c.surface, c


def torus_pair(k: int, m: int = 3, n: int = 3):
    """The two single-torus configurations underlying make_chain_packing(k), with the slit."""
    slit = chain_slit(k, m)
    t = triangulated_torus_packing(m, n)
    return (torus_configuration(t), torus_configuration(t)), slit


# ----------------------------------------------------- combinatorial fixtures

def seven_vertex_torus() -> list[tuple[int, int, int]]:
    """The 7-vertex triangulation of the torus, consistently oriented."""
    out = []
    for i in range(7):
        out.append((i, (i + 1) % 7, (i + 3) % 7))
        out.append((i, (i + 3) % 7, (i + 2) % 7))
    return out


def tetrahedron() -> list[tuple[int, int, int]]:
    return [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]


def _edges_of(tris) -> set[frozenset]:
    return {frozenset((t[i], t[(i + 1) % 3])) for t in tris for i in range(3)}


def _degree(tris, v) -> int:
    return sum(1 for t in tris if v in t)


def grow_triangulation(tris, rng: random.Random, steps: int) -> list[tuple[int, int, int]]:
    """Random face subdivisions and edge flips that keep the triangulation simplicial."""
    tris = [tuple(t) for t in tris]
    nxt = max(v for t in tris for v in t) + 1
    for _ in range(steps):
        if rng.random() < 0.5:
            k = rng.randrange(len(tris))
            a, b, c = tris.pop(k)
            tris += [(a, b, nxt), (b, c, nxt), (c, a, nxt)]
            nxt += 1
            continue
        t1 = rng.choice(tris)
        i = rng.randrange(3)
        a, b, c = t1[i], t1[(i + 1) % 3], t1[(i + 2) % 3]
        t2 = next(t for t in tris if t != t1 and any((t[j], t[(j + 1) % 3]) == (b, a) for j in range(3)))
        j = next(j for j in range(3) if (t2[j], t2[(j + 1) % 3]) == (b, a))
        d = t2[(j + 2) % 3]
        if c == d or frozenset((c, d)) in _edges_of(tris) or _degree(tris, a) <= 3 or _degree(tris, b) <= 3:
            continue
        tris.remove(t1)
        tris.remove(t2)
        tris += [(a, d, c), (b, c, d)]
    return tris


@dataclass
class _Piece:
    faces: list          # list of [(vertex name, edge name)] per face
    holes: list          # (u, v, edge u->v, edge v->u) per opened edge
    genus: int


def _open_piece(tris, tag, opened: Sequence[tuple[int, int]], genus: int) -> _Piece:
    def name(u, v):
        return ("e", tag, min(u, v), max(u, v))
    faces = [[((tag, t[i]), name(t[i], t[(i + 1) % 3])) for i in range(3)] for t in tris]
    holes = []
    for u, v in opened:
        # the side running u -> v gets a fresh edge, leaving a two-sided hole
        fresh = ("o", tag, u, v)
        for face in faces:
            for i, (x, e) in enumerate(face):
                y = face[(i + 1) % 3][0]
                if (x, y) == ((tag, u), (tag, v)):
                    face[i] = (x, fresh)
        holes.append(((tag, u), (tag, v), fresh, name(u, v)))
    return _Piece(faces, holes, genus)


def _pick_edges(tris, rng: random.Random, count: int, share: bool = False) -> list[tuple[int, int]]:
    edges = sorted(tuple(sorted(e)) for e in _edges_of(tris))
    for _ in range(1000):
        pick = rng.sample(edges, count)
        verts = [v for e in pick for v in e]
        if count == 2 and share:
            if len(set(verts)) == 3:
                return pick
        elif len(set(verts)) == 2 * count:
            return pick
    raise FlatpackError("could not choose edges to open")


def _glue_pieces_combinatorially(pieces: Sequence[_Piece], joins: Sequence[tuple[int, int, int, int]]):
    """Identify hole (p, i) of one piece with hole (q, j) of another, reversing orientation."""
    vparent: dict = {}
    eparent: dict = {}

    def find(par, x):
        while par.get(x, x) != x:
            x = par[x]
        return x
    for p, i, q, j in joins:
        u, v, euv, evu = pieces[p].holes[i]
        x, y, exy, eyx = pieces[q].holes[j]
        vparent[find(vparent, x)] = find(vparent, v)
        vparent[find(vparent, y)] = find(vparent, u)
        eparent[find(eparent, exy)] = find(eparent, euv)
        eparent[find(eparent, eyx)] = find(eparent, evu)
    faces = [[(find(vparent, v), find(eparent, e)) for v, e in face] for pc in pieces for face in pc.faces]
    return faces, [(find(vparent, pieces[p].holes[i][0]), find(vparent, pieces[p].holes[i][1]),
                    find(eparent, pieces[p].holes[i][2]), find(eparent, pieces[p].holes[i][3]))
                   for p, i, _, _ in joins]


@dataclass
class Necklace:
    """A triangulated genus-g surface assembled from tori and annuli along bigons."""
    map: CombinatorialMap
    groups: list            # groups[j]: splitting bigons between torus j and torus j+1, in order
    marked: list            # the bigon each slit's circles occupy
    red_vertex: int
    genus: int

    @property
    def ks(self) -> list[int]:
        return [len(gr) for gr in self.groups]

    @property
    def bound(self) -> int:
        return 2 * prod(self.ks) - 1


def make_necklace(ks: Sequence[int], seed: int = 0, growth: int = 6, shared: bool = False,
                  symmetric: bool = False, marked: Sequence[int] | None = None) -> Necklace:
    """Genus len(ks)+1 necklace with ks[j] splitting bigons between consecutive tori.

    ``growth`` random moves enlarge every piece; ``shared`` opens annuli along
    edges with a common vertex; ``symmetric`` uses one torus shape for every
    torus (with ks == [1] the two sides of the bigon are then isomorphic).
    ``marked[j]`` selects which bigon of group j is the slit bigon.
    """
    rng = random.Random(seed)
    g = len(ks) + 1
    if g < 2 or any(k < 1 for k in ks):
        raise ValueError("need at least one group and at least one bigon per group")
    base_torus = grow_triangulation(seven_vertex_torus(), rng, growth)
    pieces: list[_Piece] = []
    layout = []          # (piece index, hole index) pairs per join, in order along the necklace
    open_prev = None
    for t in range(g):
        n_holes = (t > 0) + (t < g - 1)
        if symmetric:
            # same torus and same opened edges every time
            torus = base_torus
            opened = _pick_edges(torus, random.Random(seed), n_holes)
        else:
            torus = grow_triangulation(seven_vertex_torus(), rng, growth)
            opened = _pick_edges(torus, rng, n_holes)
        pieces.append(_open_piece(torus, ("T", t), opened, 1))
        tp = len(pieces) - 1
        if open_prev is not None:
            layout.append((open_prev, (tp, 0)))
        if t == g - 1:
            break
        prev = (tp, n_holes - 1)
        for a in range(ks[t] - 1):
            sphere = grow_triangulation(tetrahedron(), rng, growth)
            pieces.append(_open_piece(sphere, ("S", t, a), _pick_edges(sphere, rng, 2, shared), 0))
            sp = len(pieces) - 1
            layout.append((prev, (sp, 0)))
            prev = (sp, 1)
        open_prev = prev
    joins = [(p, i, q, j) for (p, i), (q, j) in layout]
    faces, seams = _glue_pieces_combinatorially(pieces, joins)
    m = map_from_faces(faces)
    first_side: dict = {}
    h = 0
    for face in faces:
        for _, e in face:
            first_side.setdefault(e, h)
            h += 1
    vertex_of_name = {m.label(v): v for v in range(m.V)}
    bigons = []
    for u, v, e1, e2 in seams:
        bigons.append(make_bigon(m, vertex_of_name[u], vertex_of_name[v],
                                 m.edge_of[first_side[e1]], m.edge_of[first_side[e2]]))
    groups, pos = [], 0
    for k in ks:
        groups.append(bigons[pos:pos + k])
        pos += k
    on_bigon = {b.v1 for b in bigons} | {b.v2 for b in bigons}
    red = min(vertex_of_name[(("T", 0), v)] for v in range(100)
              if (("T", 0), v) in vertex_of_name and vertex_of_name[(("T", 0), v)] not in on_bigon)
    choice = list(marked) if marked is not None else [0] * len(ks)
    return Necklace(m, groups, [gr[c] for gr, c in zip(groups, choice)], red, g)


def random_necklace(rng: random.Random, g: int = 2, max_k: int = 5) -> Necklace:
    ks = [rng.randint(1, max_k) for _ in range(g - 1)]
    marked = [rng.randrange(k) for k in ks]
    return make_necklace(ks, seed=rng.randrange(1 << 30), growth=rng.randint(0, 8),
                         shared=rng.random() < 0.3, marked=marked)


# ----------------------------------------------------- random slitted surfaces

def random_slit(rng: random.Random, max_den: int = 32, avoid: Sequence[Segment] = ()) -> Segment:
    """A random slit with coordinates of denominator <= max_den strictly inside the unit square."""
    for _ in range(10000):
        d = rng.randint(2, max_den)
        a = QPoint(F(rng.randint(1, d - 1), d), F(rng.randint(1, d - 1), d))
        d2 = rng.randint(2, max_den)
        b = QPoint(F(rng.randint(1, d2 - 1), d2), F(rng.randint(1, d2 - 1), d2))
        if a == b:
            continue
        seg = Segment(a, b)
        if any(not isinstance(segments_intersect(seg, o), Disjoint) for o in avoid):
            continue
        return seg
    raise FlatpackError("could not place a random slit")


def random_slitted_surface(rng: random.Random, g: int, max_den: int = 32) -> TranslationSurface:
    """Genus-g slitted surface with random slits (two disjoint slits on every middle torus)."""
    slits = []
    prev = None
    for i in range(g - 1):
        seg = random_slit(rng, max_den, avoid=[prev] if prev is not None else [])
        slits.append(SlitSpec(i, seg))
        prev = seg
    return make_slitted_surface(g, slits)


# -------------------------------------------------------- classic surfaces

def make_square_tiled(r: Sequence[int], u: Sequence[int]) -> TranslationSurface:
    """Origami: square i has square r[i] to its right and square u[i] above it."""
    n = len(r)
    if sorted(r) != list(range(n)) or sorted(u) != list(range(n)):
        raise ValueError("r and u must be permutations of 0..n-1")
    polys = [PolygonSpec(tuple(QPoint(F(x + 2 * i), F(y)) for x, y in UNIT_SQUARE), i) for i in range(n)]
    ids = []
    for i in range(n):
        ids.append(Identification(SideId(i, 1), SideId(r[i], 3)))
        ids.append(Identification(SideId(i, 2), SideId(u[i], 0)))
    return TranslationSurface(polys, ids)


# four squares forming one horizontal cylinder; vertically squares 0 and 1 and
# squares 2 and 3 stack into two cylinders: genus 2, two cone points of angle 4 pi
FIG3_ORIGAMI = ((1, 2, 3, 0), (1, 0, 3, 2))


def make_origami() -> TranslationSurface:
    return make_square_tiled(*FIG3_ORIGAMI)


RATIONAL_OCTAGON = ((0, 0), (2, 0), (3, 1), (3, 3), (2, 4), (0, 4), (-1, 3), (-1, 1))


def make_octagon() -> TranslationSurface:
    """Centrally symmetric octagon with opposite sides glued: one cone point of angle 6 pi."""
    poly = PolygonSpec(tuple(_q(v) for v in RATIONAL_OCTAGON), 0)
    return TranslationSurface([poly], [Identification(SideId(0, i), SideId(0, i + 4)) for i in range(4)])

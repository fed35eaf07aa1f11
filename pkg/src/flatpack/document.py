"""JSON documents describing surfaces, configurations and maps.

Coordinates and squared radii are exact rationals written as "p/q" strings
(integers may also be plain JSON integers).  Binary floats are rejected.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import DocumentSyntaxError, SchemaError
from .geom import QPoint, Rat, Segment
from .surface import Identification, PolygonSpec, SideId, TranslationSurface, build_surface

VERSION = 1
_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Disk:
    label: str
    sheet: int
    center: QPoint
    radius_sq: Rat


@dataclass(frozen=True)
class SlitMark:
    segment: Segment
    sheet_a: int = 0
    sheet_b: int = 1


@dataclass(frozen=True)
class Marks:
    slits: tuple = ()
    red_vertex: int | None = None
    marked: tuple = ()          # (v1, v2, e1, e2) per marked bigon


@dataclass(frozen=True)
class Document:
    version: int = VERSION
    name: str | None = None
    polygons: tuple = ()            # PolygonSpec
    identifications: tuple = ()     # Identification
    disks: tuple = ()               # Disk; empty means no configuration block
    translations: tuple = ()        # QPoint shifts every disk is tried at
    marks: Marks = field(default_factory=Marks)
    sigma: tuple | None = None      # map block
    rho: tuple | None = None

    @property
    def has_surface(self) -> bool:
        return bool(self.polygons)

    @property
    def has_configuration(self) -> bool:
        return bool(self.disks)

    @property
    def has_map(self) -> bool:
        return self.sigma is not None


# ---------------------------------------------------------------- parsing

def _fail(path: str, msg: str):
    raise SchemaError(f"{path}: {msg}")


def parse_rational(value, path: str = "$") -> Rat:
    if isinstance(value, bool):
        _fail(path, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Rat(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            num, den = int(m.group(1)), int(m.group(2) or 1)
            if den == 0:
                _fail(path, f"zero denominator in {value!r}")
            return Rat(num, den)
        _fail(path, f"not a rational 'p/q': {value!r}")
    if isinstance(value, float):
        _fail(path, f"binary float {value!r} not allowed; write it as 'p/q'")
    _fail(path, f"expected a rational, got {type(value).__name__}")


def _point(value, path: str) -> QPoint:
    if not isinstance(value, list) or len(value) != 2:
        _fail(path, "expected a point [x, y]")
    return QPoint(parse_rational(value[0], f"{path}[0]"), parse_rational(value[1], f"{path}[1]"))


def _int(value, path: str, lo: int | None = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    if lo is not None and value < lo:
        _fail(path, f"expected an integer >= {lo}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, "expected a list")
    return value


def _obj(value, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        _fail(path, "expected an object")
    extra = sorted(set(value) - allowed)
    if extra:
        _fail(path, f"unknown key {extra[0]!r}")
    return value


def _parse_surface(block, path: str):
    block = _obj(block, path, {"polygons", "identifications"})
    polys = []
    seen_ids = set()
    for i, p in enumerate(_list(block.get("polygons", []), f"{path}.polygons")):
        pp = f"{path}.polygons[{i}]"
        p = _obj(p, pp, {"id", "sheet", "vertices"})
        pid = _int(p.get("id", i), f"{pp}.id")
        if pid in seen_ids:
            _fail(f"{pp}.id", f"duplicate polygon id {pid}")
        seen_ids.add(pid)
        verts = [_point(v, f"{pp}.vertices[{j}]") for j, v in enumerate(_list(p.get("vertices"), f"{pp}.vertices"))]
        if len(verts) < 3:
            _fail(f"{pp}.vertices", "a polygon needs at least 3 vertices")
        polys.append(PolygonSpec(tuple(verts), pid, _int(p.get("sheet", 0), f"{pp}.sheet")))
    if not polys:
        _fail(f"{path}.polygons", "no polygons")
    n_sides = {p.polygon_id: len(p.vertices) for p in polys}
    used: dict[SideId, str] = {}
    idents = []
    for i, pair in enumerate(_list(block.get("identifications", []), f"{path}.identifications")):
        ip = f"{path}.identifications[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            _fail(ip, "expected a pair of sides [[polygon, side], [polygon, side]]")
        sides = []
        for j, side in enumerate(pair):
            sp = f"{ip}[{j}]"
            if not isinstance(side, list) or len(side) != 2:
                _fail(sp, "expected a side [polygon, side index]")
            pid, k = _int(side[0], f"{sp}[0]"), _int(side[1], f"{sp}[1]")
            if pid not in n_sides:
                _fail(sp, f"unknown polygon {pid}")
            if k >= n_sides[pid]:
                _fail(sp, f"polygon {pid} has no side {k}")
            sid = SideId(pid, k)
            if sid in used:
                _fail(sp, f"side {list(sid)} already identified at {used[sid]}")
            used[sid] = sp
            sides.append(sid)
        idents.append(Identification(sides[0], sides[1]))
    return tuple(polys), tuple(idents)


def _parse_configuration(block, path: str, sheets: set[int]):
    block = _obj(block, path, {"disks", "translations"})
    disks = []
    for i, d in enumerate(_list(block.get("disks", []), f"{path}.disks")):
        dp = f"{path}.disks[{i}]"
        d = _obj(d, dp, {"label", "sheet", "center", "radius_sq"})
        label = d.get("label", str(i))
        if not isinstance(label, str):
            _fail(f"{dp}.label", "expected a string")
        sheet = _int(d.get("sheet", 0), f"{dp}.sheet")
        if sheet not in sheets:
            _fail(f"{dp}.sheet", f"no polygon lies on sheet {sheet}")
        rsq = parse_rational(d.get("radius_sq"), f"{dp}.radius_sq")
        if rsq <= 0:
            _fail(f"{dp}.radius_sq", "squared radius must be positive")
        disks.append(Disk(label, sheet, _point(d.get("center"), f"{dp}.center"), rsq))
    if not disks:
        _fail(f"{path}.disks", "no disks")
    shifts = tuple(_point(t, f"{path}.translations[{i}]")
                   for i, t in enumerate(_list(block.get("translations", [[0, 0]]), f"{path}.translations")))
    return tuple(disks), shifts


def _parse_map(block, path: str):
    block = _obj(block, path, {"sigma", "rho"})
    sigma = tuple(_int(x, f"{path}.sigma[{i}]") for i, x in enumerate(_list(block.get("sigma"), f"{path}.sigma")))
    rho = tuple(_int(x, f"{path}.rho[{i}]") for i, x in enumerate(_list(block.get("rho"), f"{path}.rho")))
    n = len(sigma)
    if len(rho) != n or sorted(sigma) != list(range(n)) or sorted(rho) != list(range(n)):
        _fail(path, "sigma and rho must be permutations of the same half-edges 0..n-1")
    if any(sigma[h] == h or sigma[sigma[h]] != h for h in range(n)):
        _fail(f"{path}.sigma", "sigma must be a fixed-point-free involution")
    return sigma, rho


def _n_rho_orbits(rho) -> int:
    seen, count = set(), 0
    for h in range(len(rho)):
        if h in seen:
            continue
        count += 1
        while h not in seen:
            seen.add(h)
            h = rho[h]
    return count


def _parse_marks(block, path: str, sigma, rho):
    block = _obj(block, path, {"slits", "red_vertex", "marked"})
    slits = []
    for i, s in enumerate(_list(block.get("slits", []), f"{path}.slits")):
        sp = f"{path}.slits[{i}]"
        s = _obj(s, sp, {"a", "b", "sheets"})
        a, b = _point(s.get("a"), f"{sp}.a"), _point(s.get("b"), f"{sp}.b")
        if a == b:
            _fail(sp, "slit endpoints coincide")
        sheets = _list(s.get("sheets", [0, 1]), f"{sp}.sheets")
        if len(sheets) != 2:
            _fail(f"{sp}.sheets", "expected two sheets")
        slits.append(SlitMark(Segment(a, b), _int(sheets[0], f"{sp}.sheets[0]"), _int(sheets[1], f"{sp}.sheets[1]")))
    red = block.get("red_vertex")
    marked = []
    if red is not None or block.get("marked"):
        if sigma is None:
            _fail(path, "red_vertex and marked refer to a map block, which is missing")
    n_vertices = _n_rho_orbits(rho) if rho is not None else 0
    n_edges = len(sigma) // 2 if sigma is not None else 0
    if red is not None:
        red = _int(red, f"{path}.red_vertex")
        if red >= n_vertices:
            _fail(f"{path}.red_vertex", f"map has only {n_vertices} vertices")
    for i, b in enumerate(_list(block.get("marked", []), f"{path}.marked")):
        bp = f"{path}.marked[{i}]"
        if not isinstance(b, list) or len(b) != 4:
            _fail(bp, "expected a bigon [v1, v2, e1, e2]")
        v1, v2, e1, e2 = (_int(x, f"{bp}[{j}]") for j, x in enumerate(b))
        if max(v1, v2) >= n_vertices or max(e1, e2) >= n_edges:
            _fail(bp, "bigon refers to a vertex or edge outside the map")
        marked.append((v1, v2, e1, e2))
    return Marks(tuple(slits), red, tuple(marked))


def document_from_obj(obj) -> Document:
    obj = _obj(obj, "$", {"version", "name", "surface", "configuration", "marks", "map"})
    if "version" not in obj:
        _fail("$", "missing 'version'")
    if obj["version"] != VERSION:
        _fail("$.version", f"unsupported version {obj['version']!r}; expected {VERSION}")
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        _fail("$.name", "expected a string")
    polys, idents = ((), ())
    if "surface" in obj:
        polys, idents = _parse_surface(obj["surface"], "$.surface")
    disks, shifts = ((), ())
    if "configuration" in obj:
        if not polys:
            _fail("$.configuration", "a configuration needs a surface block")
        disks, shifts = _parse_configuration(obj["configuration"], "$.configuration", {p.sheet for p in polys})
    sigma = rho = None
    if "map" in obj:
        sigma, rho = _parse_map(obj["map"], "$.map")
    if not polys and sigma is None:
        _fail("$", "a document needs a surface or a map block")
    marks = _parse_marks(obj.get("marks", {}), "$.marks", sigma, rho)
    return Document(VERSION, name, polys, idents, disks, shifts, marks, sigma, rho)


def parse_document(text: str | bytes) -> Document:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(f"not UTF-8 text (byte {exc.start})") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return document_from_obj(obj)


# ----------------------------------------------------------- serializing

def _rat(q) -> str:
    return str(Rat(q))


def _pt(p) -> list:
    return [_rat(p[0]), _rat(p[1])]


def document_to_obj(doc: Document) -> dict:
    out: dict = {"version": doc.version}
    if doc.name is not None:
        out["name"] = doc.name
    if doc.polygons:
        out["surface"] = {
            "polygons": [{"id": p.polygon_id, "sheet": p.sheet, "vertices": [_pt(v) for v in p.vertices]}
                         for p in doc.polygons],
            "identifications": [[list(i.side_a), list(i.side_b)] for i in doc.identifications],
        }
    if doc.disks:
        out["configuration"] = {
            "disks": [{"label": d.label, "sheet": d.sheet, "center": _pt(d.center), "radius_sq": _rat(d.radius_sq)}
                      for d in doc.disks],
            "translations": [_pt(t) for t in doc.translations],
        }
    marks: dict = {}
    if doc.marks.slits:
        marks["slits"] = [{"a": _pt(s.segment.a), "b": _pt(s.segment.b), "sheets": [s.sheet_a, s.sheet_b]}
                          for s in doc.marks.slits]
    if doc.marks.red_vertex is not None:
        marks["red_vertex"] = doc.marks.red_vertex
    if doc.marks.marked:
        marks["marked"] = [list(b) for b in doc.marks.marked]
    if marks:
        out["marks"] = marks
    if doc.sigma is not None:
        out["map"] = {"sigma": list(doc.sigma), "rho": list(doc.rho)}
    return out


def serialize_document(doc: Document) -> str:
    return json.dumps(document_to_obj(doc), indent=1) + "\n"


# ------------------------------------------------------------ conversion

def document_surface(doc: Document, eps_angle: float | None = None) -> TranslationSurface:
    if not doc.has_surface:
        raise SchemaError("$: document has no surface block")
    if eps_angle is None:
        return build_surface(doc.polygons, doc.identifications)
    return build_surface(doc.polygons, doc.identifications, eps_angle)


def document_configuration(doc: Document, surface: TranslationSurface | None = None):
    from .packing import build_configuration, sectors_from_disks
    s = surface if surface is not None else document_surface(doc)
    disks = [(d.label, d.sheet, d.center, d.radius_sq) for d in doc.disks]
    shifts = [tuple(t) for t in doc.translations]
    sectors = sectors_from_disks(s, disks, shifts)
    slits = [(m.segment, m.sheet_a, m.sheet_b) for m in doc.marks.slits]
    return build_configuration(s, sectors, slits, doc.name, disks, shifts)


def document_map(doc: Document):
    from .topomap import CombinatorialMap
    if not doc.has_map:
        raise SchemaError("$: document has no map block")
    marks = {"red_vertex": doc.marks.red_vertex} if doc.marks.red_vertex is not None else None
    return CombinatorialMap(doc.sigma, doc.rho, marks)


def surface_document(s: TranslationSurface, name: str | None = None) -> Document:
    return Document(VERSION, name, tuple(s.polygons), tuple(s.identifications))


def configuration_document(c, name: str | None = None) -> Document:
    disks = tuple(Disk(str(lab), sheet, QPoint(*center), Rat(rsq)) for lab, sheet, center, rsq in c.disks)
    shifts = tuple(QPoint(Rat(x), Rat(y)) for x, y in c.translations)
    slits = tuple(SlitMark(seg, a, b) for seg, a, b in c.slits)
    return Document(VERSION, name, tuple(c.surface.polygons), tuple(c.surface.identifications),
                    disks, shifts, Marks(slits))


def map_document(m, name: str | None = None, marked=(), red_vertex: int | None = None) -> Document:
    bigons = tuple((b.v1, b.v2, b.e1, b.e2) for b in marked)
    return Document(VERSION, name, marks=Marks((), red_vertex, bigons), sigma=tuple(m.sigma), rho=tuple(m.rho))


# -------------------------------------------------------------- fixtures

def _necklace_doc(name: str, ks, **kw) -> Document:
    from .builders import make_necklace
    n = make_necklace(ks, **kw)
    return map_document(n.map, name, n.marked, n.red_vertex)


def _fixture_table() -> dict:
    from . import builders as b

    table = {
        "square-torus": lambda: surface_document(b.make_torus(), "square-torus"),
        "origami": lambda: surface_document(b.make_origami(), "origami"),
        "octagon": lambda: surface_document(b.make_octagon(), "octagon"),
        "torus-packing": lambda: configuration_document(b.torus_configuration(b.triangulated_torus_packing()),
                                                        "torus-packing"),
        "symmetric-1": lambda: _necklace_doc("symmetric-1", [1], symmetric=True),
        "necklace-3": lambda: _necklace_doc("necklace-3", [3], seed=1),
        "necklace-2-1": lambda: _necklace_doc("necklace-2-1", [2, 1], seed=2),
    }
    for fid in b.FIGURES:
        table[fid] = lambda fid=fid: configuration_document(b.make_figure_configuration(fid)[1], fid)
    for variant in ("endpoint-inside", "past-center"):
        name = f"forbidden-{variant}"
        table[name] = lambda v=variant, n=name: configuration_document(b.make_forbidden_configuration(v)[1], n)
    for k in range(2, 6):
        table[f"chain-packing-{k}"] = lambda k=k: configuration_document(b.make_chain_packing(k)[1],
                                                                         f"chain-packing-{k}")
        table[f"chain-{k}"] = lambda k=k: _necklace_doc(f"chain-{k}", [k - 1])
    return table


def fixture_names() -> list[str]:
    return sorted(_fixture_table())


def fixture_document(name: str) -> Document:
    table = _fixture_table()
    if name not in table:
        raise SchemaError(f"unknown fixture {name!r}; known: {', '.join(sorted(table))}")
    return table[name]()

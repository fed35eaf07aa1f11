"""Combinatorial maps, surgery along cycles, and splitting bigons.

A map is a pair of permutations on half-edges ``0..2m-1``: ``sigma`` (a
fixed-point-free involution pairing the two ends of each edge) and ``rho``
(the counterclockwise successor around each vertex).  Faces are the orbits of
``phi = sigma . rho``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import prod
from typing import Iterable, Sequence

from .errors import (DecompositionMismatch, InvalidPermutation, MarkedBigonNotSplitting,
                     NotAClosedWalk, OrderingImpossible, SigmaFixedPoint, StraddlingLoop)


def _orbits(perm: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        x = start
        while not seen[x]:
            seen[x] = True
            orbit.append(x)
            x = perm[x]
        out.append(tuple(orbit))
    return out


class CombinatorialMap:
    def __init__(self, sigma: Sequence[int], rho: Sequence[int], marks: dict | None = None,
                 holes: Iterable[frozenset] = (), vertex_labels: dict | None = None):
        n = len(sigma)
        if len(rho) != n:
            raise InvalidPermutation("sigma and rho act on different sets")
        if n % 2:
            raise InvalidPermutation("odd number of half-edges")
        for name, p in (("sigma", sigma), ("rho", rho)):
            if sorted(p) != list(range(n)):
                raise InvalidPermutation(f"{name} is not a permutation of 0..{n - 1}")
        for h in range(n):
            if sigma[h] == h:
                raise SigmaFixedPoint(f"sigma fixes half-edge {h}")
            if sigma[sigma[h]] != h:
                raise InvalidPermutation("sigma is not an involution")
        self.sigma = tuple(sigma)
        self.rho = tuple(rho)
        self.marks = dict(marks or {})
        self.holes = [frozenset(h) for h in holes]
        self.vertices = _orbits(self.rho)
        self.vertex_of = [0] * n
        for i, orb in enumerate(self.vertices):
            for h in orb:
                self.vertex_of[h] = i
        self.phi = tuple(self.sigma[self.rho[h]] for h in range(n))
        self.faces = _orbits(self.phi)
        self.face_of = [0] * n
        for i, orb in enumerate(self.faces):
            for h in orb:
                self.face_of[h] = i
        self.edges = [(h, self.sigma[h]) for h in range(n) if h < self.sigma[h]]
        self.edge_of = [0] * n
        for i, (a, b) in enumerate(self.edges):
            self.edge_of[a] = self.edge_of[b] = i
        self.vertex_labels = dict(vertex_labels or {})
        for hole in self.holes:
            fs = {self.face_of[h] for h in hole}
            if len(fs) != 1 or len(self.faces[fs.pop()]) != len(hole):
                raise InvalidPermutation("hole half-edges do not form a face")

    # ------------------------------------------------------------ counts
    @property
    def n_half_edges(self) -> int:
        return len(self.sigma)

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    def components(self) -> list[list[int]]:
        parent = list(range(self.n_half_edges))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for h in range(self.n_half_edges):
            for y in (self.sigma[h], self.rho[h]):
                a, b = find(h), find(y)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for h in range(self.n_half_edges):
            groups.setdefault(find(h), []).append(h)
        return [groups[k] for k in sorted(groups)]

    @property
    def connected(self) -> bool:
        return len(self.components()) <= 1

    @property
    def genus(self) -> int:
        if not self.connected:
            raise ValueError("genus of a disconnected map")
        return (2 - self.euler_characteristic) // 2

    @property
    def hole_faces(self) -> set[int]:
        return {self.face_of[next(iter(h))] for h in self.holes if h}

    def edge_ends(self, e: int) -> tuple[int, int]:
        a, b = self.edges[e]
        return self.vertex_of[a], self.vertex_of[b]

    def half_edges_at(self, v: int) -> tuple[int, ...]:
        return self.vertices[v]

    def face_vertices(self, f: int) -> list[int]:
        return [self.vertex_of[h] for h in self.faces[f]]

    def face_edges(self, f: int) -> list[int]:
        return [self.edge_of[h] for h in self.faces[f]]

    def label(self, v: int):
        return self.vertex_labels.get(v, v)

    def __repr__(self) -> str:
        return f"CombinatorialMap(V={self.V}, E={self.E}, F={self.F}, chi={self.euler_characteristic})"


def build_map(sigma: Sequence[int], rho: Sequence[int], marks: dict | None = None) -> CombinatorialMap:
    return CombinatorialMap(sigma, rho, marks)


def map_from_faces(faces: Sequence[Sequence[tuple]], marks: dict | None = None) -> CombinatorialMap:
    """Build a map from oriented faces given as lists of (vertex, edge) pairs.

    Side i of a face runs from its i-th vertex to the next one along the
    named edge.  Every edge name must occur on exactly two sides, traversed in
    opposite directions.  Vertex names become ``vertex_labels``.
    """
    index = {}
    sides = []
    for f, face in enumerate(faces):
        for i in range(len(face)):
            index[(f, i)] = len(sides)
            sides.append((f, i))
    by_edge: dict = {}
    for h, (f, i) in enumerate(sides):
        by_edge.setdefault(faces[f][i][1], []).append(h)
    sigma = [0] * len(sides)
    for e, hs in by_edge.items():
        if len(hs) != 2:
            raise InvalidPermutation(f"edge {e!r} occurs on {len(hs)} sides")
        a, b = hs
        sigma[a], sigma[b] = b, a
    rho = [0] * len(sides)
    for h, (f, i) in enumerate(sides):
        prev = index[(f, (i - 1) % len(faces[f]))]
        rho[h] = sigma[prev]
    m = CombinatorialMap(sigma, rho, marks)
    labels = {}
    for h, (f, i) in enumerate(sides):
        v = m.vertex_of[h]
        name = faces[f][i][0]
        if labels.setdefault(v, name) != name:
            raise InvalidPermutation(f"vertex names {labels[v]!r} and {name!r} meet at one vertex")
        f2, j = sides[sigma[h]]
        nxt = faces[f][(i + 1) % len(faces[f])][0]
        if faces[f2][j][0] != nxt:
            raise InvalidPermutation(f"edge {faces[f][i][1]!r} is glued inconsistently")
    return CombinatorialMap(sigma, rho, marks, vertex_labels=labels)


# ----------------------------------------------------------------- bigons

@dataclass(frozen=True)
class Bigon:
    v1: int
    v2: int
    e1: int
    e2: int
    associated_loop: tuple   # (half-edge of e1 at v1, half-edge of e2 at v2)

    @property
    def vertex_pair(self) -> tuple[int, int]:
        return (self.v1, self.v2)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset((self.v1, self.v2))


def _half_at(m: CombinatorialMap, e: int, v: int) -> int:
    a, b = m.edges[e]
    return a if m.vertex_of[a] == v else b


def make_bigon(m: CombinatorialMap, v1: int, v2: int, e1: int, e2: int) -> Bigon:
    for e in (e1, e2):
        if set(m.edge_ends(e)) != {v1, v2} or v1 == v2:
            raise NotAClosedWalk(f"edge {e} does not join vertices {v1} and {v2}")
    if e1 == e2:
        raise NotAClosedWalk("a bigon needs two distinct edges")
    return Bigon(v1, v2, e1, e2, (_half_at(m, e1, v1), _half_at(m, e2, v2)))


def find_bigons(m: CombinatorialMap) -> list[Bigon]:
    parallel: dict[tuple[int, int], list[int]] = {}
    for e in range(m.E):
        a, b = m.edge_ends(e)
        if a != b:
            parallel.setdefault((min(a, b), max(a, b)), []).append(e)
    out = []
    for (v1, v2), es in sorted(parallel.items()):
        for e1, e2 in combinations(es, 2):
            out.append(make_bigon(m, v1, v2, e1, e2))
    return out


# ---------------------------------------------------------------- surgery

@dataclass
class CutResult:
    map: CombinatorialMap
    left: dict          # original loop half-edge -> its copy on the left side
    right: dict         # original loop half-edge -> its copy on the right side
    origin: list = field(default_factory=list)   # cut half-edge -> original half-edge


def _check_loop(m: CombinatorialMap, loop: Sequence[int]) -> list[int]:
    loop = list(loop)
    if not loop:
        raise NotAClosedWalk("empty loop")
    for h in loop:
        if not 0 <= h < m.n_half_edges:
            raise NotAClosedWalk(f"unknown half-edge {h}")
    edges = [m.edge_of[h] for h in loop]
    if len(set(edges)) != len(edges):
        raise NotAClosedWalk("loop repeats an edge")
    verts = [m.vertex_of[h] for h in loop]
    if len(set(verts)) != len(verts):
        raise NotAClosedWalk("loop visits a vertex twice")
    for i, h in enumerate(loop):
        if m.vertex_of[m.sigma[h]] != m.vertex_of[loop[(i + 1) % len(loop)]]:
            raise NotAClosedWalk("consecutive half-edges do not meet")
    return loop


def cut_map(m: CombinatorialMap, loop: Sequence[int]) -> CutResult:
    """Cut a map along a simple closed walk given by its outgoing half-edges.

    Every loop edge is doubled.  The copies keeping the original ids lie on
    the left of the walk; new ids are appended for the right copies.  Both
    sides receive a new hole face, recorded in ``map.holes``.
    """
    loop = _check_loop(m, loop)
    n = m.n_half_edges
    k = len(loop)
    sigma = list(m.sigma)
    rho = list(m.rho)
    right = {}
    for i, h in enumerate(loop):
        right[h] = n + 2 * i
        right[m.sigma[h]] = n + 2 * i + 1
    sigma.extend([0] * (2 * k))
    rho.extend([0] * (2 * k))
    for h, r in right.items():
        sigma[r] = right[m.sigma[h]]
    for i, out in enumerate(loop):
        inc = m.sigma[loop[i - 1]]
        # rotation at the vertex, starting from the outgoing half-edge
        cyc = [out]
        x = m.rho[out]
        while x != out:
            cyc.append(x)
            x = m.rho[x]
        j = cyc.index(inc)
        left_part = cyc[:j + 1]          # out, a..., inc
        right_part = cyc[j:] + [out]     # inc, b..., out
        for a, b in zip(left_part, left_part[1:]):
            rho[a] = b
        rho[left_part[-1]] = left_part[0]
        rp = [right[inc]] + right_part[1:-1] + [right[out]]
        for a, b in zip(rp, rp[1:]):
            rho[a] = b
        rho[rp[-1]] = rp[0]
    left_hole = frozenset(m.sigma[h] for h in loop)
    right_hole = frozenset(right[h] for h in loop)
    holes = list(m.holes) + [left_hole, right_hole]
    cut = CombinatorialMap(sigma, rho, m.marks, holes)
    origin = list(range(n)) + [0] * (2 * k)
    for h, r in right.items():
        origin[r] = h
    return CutResult(cut, {h: h for h in right}, right, origin)


@dataclass
class BoundedPiece:
    map: CombinatorialMap
    half_edges: tuple          # half-edge ids in the cut map (before relabelling)
    boundary_count: int
    genus: int
    hole_ids: tuple            # indices into the cut map's hole list

    @property
    def euler_characteristic(self) -> int:
        # characteristic of the bounded surface, holes not capped
        return self.map.euler_characteristic - self.boundary_count


def pieces_of(cut: CombinatorialMap) -> list[BoundedPiece]:
    out = []
    for comp in cut.components():
        relabel = {h: i for i, h in enumerate(comp)}
        sigma = [relabel[cut.sigma[h]] for h in comp]
        rho = [relabel[cut.rho[h]] for h in comp]
        hole_ids = tuple(i for i, hole in enumerate(cut.holes) if next(iter(hole)) in relabel)
        holes = [frozenset(relabel[h] for h in cut.holes[i]) for i in hole_ids]
        sub = CombinatorialMap(sigma, rho, None, holes)
        b = len(hole_ids)
        chi = sub.euler_characteristic
        if chi % 2:
            raise AssertionError("piece with odd Euler characteristic")
        genus = (2 - chi) // 2
        out.append(BoundedPiece(sub, tuple(comp), b, genus, hole_ids))
    return out


def cut_along_cycle(m: CombinatorialMap, loop: Sequence[int]) -> list[BoundedPiece]:
    return pieces_of(cut_map(m, loop).map)


# ------------------------------------------------------- splitting bigons

def _cut_pieces(m: CombinatorialMap, b: Bigon) -> tuple[CutResult, list[BoundedPiece]]:
    res = cut_map(m, b.associated_loop)
    return res, pieces_of(res.map)


def is_splitting(m: CombinatorialMap, b: Bigon) -> bool:
    _, pieces = _cut_pieces(m, b)
    return len(pieces) == 2 and all(p.genus >= 1 for p in pieces)


def removal_components(m: CombinatorialMap, b: Bigon) -> int:
    removed = {b.v1, b.v2}
    keep = [v for v in range(m.V) if v not in removed]
    parent = {v: v for v in keep}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for e in range(m.E):
        a, c = m.edge_ends(e)
        if a in removed or c in removed:
            continue
        parent[find(a)] = find(c)
    return len({find(v) for v in keep})


def splitting_bigons(m: CombinatorialMap) -> list[Bigon]:
    """Splitting bigons, one per vertex pair (bigons on the same pair are not distinct)."""
    out = []
    seen = set()
    for b in find_bigons(m):
        if b.vertex_set in seen:
            continue
        if is_splitting(m, b):
            seen.add(b.vertex_set)
            out.append(b)
    return out


def _loop_edges(b: Bigon) -> tuple[int, int]:
    return (b.e1, b.e2)


def _piece_of_half_edge(pieces: list[BoundedPiece]) -> dict[int, int]:
    where = {}
    for i, p in enumerate(pieces):
        for h in p.half_edges:
            where[h] = i
    return where


def _pieces_of_vertex(m: CombinatorialMap, where: dict[int, int], v: int) -> set[int]:
    return {where[h] for h in m.vertices[v]}


def _other_side(m: CombinatorialMap, where: dict[int, int], other: Bigon) -> int:
    sides = set()
    for e in _loop_edges(other):
        for h in m.edges[e]:
            sides.add(where[h])
    if len(sides) != 1:
        raise StraddlingLoop("loop meets both sides of the cut")
    return sides.pop()


def _red_piece(m: CombinatorialMap, where: dict[int, int], red_vertex: int) -> int:
    sides = _pieces_of_vertex(m, where, red_vertex)
    if len(sides) != 1:
        raise OrderingImpossible("red mark lies on the cutting loop")
    return sides.pop()


def bigon_side(m: CombinatorialMap, splitting: Bigon, other: Bigon, red_vertex: int | None = None) -> str:
    """"Side1" when other's loop lies on the red side of the cut, else "Side2".

    Without a red mark, Side1 is the piece holding the smallest original half-edge.
    """
    res, pieces = _cut_pieces(m, splitting)
    if len(pieces) != 2:
        raise StraddlingLoop("the cutting bigon does not separate")
    where = _piece_of_half_edge(pieces)
    side = _other_side(m, where, other)
    if red_vertex is None:
        red_vertex = m.marks.get("red_vertex")
    if red_vertex is not None:
        first = _red_piece(m, where, red_vertex)
    else:
        first = where[min(h for h in range(m.n_half_edges))]
    return "Side1" if side == first else "Side2"


def cut_many_tracked(m: CombinatorialMap, bigons: Sequence[Bigon]):
    """Cut successively along several bigon loops.

    Returns the cut map, for each bigon the indices of its two hole faces in
    ``map.holes``, and the original half-edge behind every cut half-edge.
    Edges of later loops keep their ids because only loop edges are duplicated.
    """
    cur = m
    hole_groups = []
    origin = list(range(m.n_half_edges))
    for b in bigons:
        res = cut_map(cur, b.associated_loop)
        origin = [origin[h] for h in res.origin]
        cur = res.map
        hole_groups.append([len(cur.holes) - 2, len(cur.holes) - 1])
    return cur, hole_groups, origin


def cut_many(m: CombinatorialMap, bigons: Sequence[Bigon]) -> tuple[CombinatorialMap, list[list[int]]]:
    cur, groups, _ = cut_many_tracked(m, bigons)
    return cur, groups


def bounded_genus_between(m: CombinatorialMap, b1: Bigon, b2: Bigon) -> int:
    if b1 == b2:
        return 0
    cut, groups = cut_many(m, [b1, b2])
    pieces = pieces_of(cut)
    for p in pieces:
        holes = set(p.hole_ids)
        if holes & set(groups[0]) and holes & set(groups[1]):
            return p.genus
    raise StraddlingLoop("no piece is bounded by both loops")


def loops_cobound_sphere(m: CombinatorialMap, b1: Bigon, b2: Bigon) -> bool:
    if b1 == b2:
        return True
    try:
        return bounded_genus_between(m, b1, b2) == 0
    except StraddlingLoop:
        return False


@dataclass(frozen=True)
class OrderedBigon:
    x: int       # position within its slit group (1-based)
    y: int       # genus of the red side
    bigon: Bigon


def default_red_vertex(m: CombinatorialMap, bigons: Sequence[Bigon] | None = None) -> int | None:
    """Lowest vertex off every splitting bigon that lies in an end piece."""
    if bigons is None:
        bigons = splitting_bigons(m)
    if not bigons:
        return None
    on_bigon = {v for b in bigons for v in (b.v1, b.v2)}
    best = None
    for b in bigons:
        _, pieces = _cut_pieces(m, b)
        where = _piece_of_half_edge(pieces)
        contents = {0: 0, 1: 0}
        for o in bigons:
            if o is not b:
                contents[_other_side(m, where, o)] += 1
        for side in (0, 1):
            if contents[side]:
                continue
            verts = [v for v in range(m.V) if v not in on_bigon
                     and _pieces_of_vertex(m, where, v) == {side}]
            if verts and (best is None or min(verts) < best):
                best = min(verts)
    return best


def order_splitting_bigons(m: CombinatorialMap, red_vertex: int | None = None) -> list[OrderedBigon]:
    """Order splitting bigons by nesting relative to the red end piece.

    Each bigon B_{x,y} is verified: its red side has genus y and contains
    exactly the bigons that precede it in the order.
    """
    bigons = splitting_bigons(m)
    if not bigons:
        return []
    if red_vertex is None:
        red_vertex = m.marks.get("red_vertex")
    if red_vertex is None:
        red_vertex = default_red_vertex(m, bigons)
    if red_vertex is None:
        raise OrderingImpossible("no vertex available for the red mark")
    info = []
    for b in bigons:
        _, pieces = _cut_pieces(m, b)
        where = _piece_of_half_edge(pieces)
        red = _red_piece(m, where, red_vertex)
        inside = frozenset(i for i, o in enumerate(bigons) if o is not b and _other_side(m, where, o) == red)
        info.append((len(inside), pieces[red].genus, inside))
    order = sorted(range(len(bigons)), key=lambda i: info[i][0])
    if [info[i][0] for i in order] != list(range(len(bigons))):
        raise OrderingImpossible("red-side nesting counts are not 0, 1, ..., k-1")
    out = []
    counts: dict[int, int] = {}
    prev_genus = 0
    for rank, i in enumerate(order):
        _, genus, inside = info[i]
        if genus < prev_genus or genus < 1:
            raise OrderingImpossible("red-side genus decreases along the order")
        if inside != frozenset(order[:rank]):
            raise OrderingImpossible("red side does not hold exactly the earlier bigons")
        prev_genus = genus
        counts[genus] = counts.get(genus, 0) + 1
        out.append(OrderedBigon(counts[genus], genus, bigons[i]))
    return out


@dataclass
class SplitDecomposition:
    ordered_bigons: list
    pieces: list
    bounding: list        # for each piece, the indices (into ordered_bigons) of its bounding bigons

    @property
    def genus_pattern(self) -> list[int]:
        return [p.genus for p in self.pieces]


def decompose(m: CombinatorialMap, red_vertex: int | None = None) -> SplitDecomposition:
    order = order_splitting_bigons(m, red_vertex)
    if not order:
        raise DecompositionMismatch("no splitting bigons")
    bigons = [o.bigon for o in order]
    cut, groups = cut_many(m, bigons)
    pieces = pieces_of(cut)
    k = len(bigons)
    if len(pieces) != k + 1:
        raise DecompositionMismatch(f"expected {k + 1} pieces, found {len(pieces)}")
    hole_owner = {h: i for i, g in enumerate(groups) for h in g}
    bounding = []
    for p in pieces:
        bounding.append(sorted({hole_owner[h] for h in p.hole_ids if h in hole_owner}))
    idx = sorted(range(len(pieces)), key=lambda i: (min(bounding[i]) if bounding[i] else -1,
                                                     max(bounding[i]) if bounding[i] else -1))
    pieces = [pieces[i] for i in idx]
    bounding = [bounding[i] for i in idx]
    for j, bd in enumerate(bounding):
        expect = [x for x in (j - 1, j) if 0 <= x < k]
        if bd != expect:
            raise DecompositionMismatch(f"piece {j} is bounded by {bd}, expected {expect}")
        if len(bd) > 2:
            raise DecompositionMismatch("piece bounded by more than two bigons")
    for j, p in enumerate(pieces):
        if j == 0 or j == k:
            want = 1
        else:
            want = 1 if order[j - 1].y != order[j].y else 0
        if p.genus != want:
            raise DecompositionMismatch(f"piece {j} has genus {p.genus}, expected {want}")
    if sum(p.genus for p in pieces) != m.genus:
        raise DecompositionMismatch("piece genera do not add up to the surface genus")
    return SplitDecomposition(order, pieces, bounding)


# --------------------------------------------------------- sub-triangulations

@dataclass(frozen=True)
class Subgraph:
    vertices: frozenset
    edges: frozenset


def split_triangulation(m: CombinatorialMap, b: Bigon, red_vertex: int | None = None
                        ) -> tuple[Subgraph, Subgraph]:
    """Partition the map's vertices and edges by side of a splitting bigon.

    The bigon's vertices and edges belong to both parts.  The part on the
    red side (or holding the lowest half-edge) comes first.
    """
    res, pieces = _cut_pieces(m, b)
    if len(pieces) != 2:
        raise StraddlingLoop("bigon does not separate")
    where = _piece_of_half_edge(pieces)
    if red_vertex is None:
        red_vertex = m.marks.get("red_vertex")
    if red_vertex is not None and red_vertex not in (b.v1, b.v2):
        first = _red_piece(m, where, red_vertex)
    else:
        first = where[0]
    verts: list[set] = [set(), set()]
    edges: list[set] = [set(), set()]
    for v in range(m.V):
        if v in (b.v1, b.v2):
            continue
        (s,) = _pieces_of_vertex(m, where, v)
        verts[s].add(v)
    for e in range(m.E):
        if e in (b.e1, b.e2):
            continue
        sides = {where[h] for h in m.edges[e]}
        assert len(sides) == 1, "edge split by the cut"
        edges[sides.pop()].add(e)
    parts = []
    for s in (first, 1 - first):
        parts.append(Subgraph(frozenset(verts[s] | {b.v1, b.v2}), frozenset(edges[s] | {b.e1, b.e2})))
    assert parts[0].vertices | parts[1].vertices == set(range(m.V))
    assert parts[0].edges | parts[1].edges == set(range(m.E))
    return parts[0], parts[1]


# -------------------------------------------------------------- isomorphism

def canonical_code(m: CombinatorialMap, labels: Sequence | None = None, roots: Iterable[int] | None = None):
    """Orientation-preserving isomorphism invariant of a connected labelled map.

    Two connected maps are isomorphic (respecting half-edge labels) exactly
    when their codes agree.
    """
    n = m.n_half_edges
    if labels is None:
        labels = [0] * n
    best = None
    for r in (roots if roots is not None else range(n)):
        idx = {r: 0}
        order = [r]
        i = 0
        while i < len(order):
            x = order[i]
            for y in (m.sigma[x], m.rho[x]):
                if y not in idx:
                    idx[y] = len(order)
                    order.append(y)
            i += 1
        if len(order) != n:
            raise ValueError("canonical_code needs a connected map")
        code = tuple((idx[m.sigma[x]], idx[m.rho[x]], labels[x]) for x in order)
        if best is None or code < best:
            best = code
    return best


def relabel_map(m: CombinatorialMap, perm: Sequence[int]) -> CombinatorialMap:
    """The same map with half-edge h renamed perm[h]."""
    n = m.n_half_edges
    sigma = [0] * n
    rho = [0] * n
    for h in range(n):
        sigma[perm[h]] = perm[m.sigma[h]]
        rho[perm[h]] = perm[m.rho[h]]
    holes = [frozenset(perm[h] for h in hole) for hole in m.holes]
    return CombinatorialMap(sigma, rho, None, holes)


def map_bigon(old: CombinatorialMap, new: CombinatorialMap, perm: Sequence[int], b: Bigon) -> Bigon:
    h1, h2 = (perm[h] for h in b.associated_loop)
    return make_bigon(new, new.vertex_of[h1], new.vertex_of[h2], new.edge_of[h1], new.edge_of[h2])


# ------------------------------------------------------------- enumeration

@dataclass(frozen=True)
class RepackingCandidate:
    slit_assignment: tuple     # slit j -> Bigon
    orientation: str           # "Forward" or "Reversed"
    induced_subtriangulations: tuple
    signature: tuple
    is_original: bool = False


def _ordered_pieces(m: CombinatorialMap, along: Sequence[Bigon], red_vertex: int | None):
    """Cut along bigons listed from the red end; pieces in order along the surface."""
    cut, groups, origin = cut_many_tracked(m, along)
    pieces = pieces_of(cut)
    owner = {h: i for i, gr in enumerate(groups) for h in gr}

    def key(p):
        s = sorted({owner[h] for h in p.hole_ids})
        return (s[0], s[-1])
    pieces.sort(key=key)
    if len(along) == 1 and len(pieces) == 2 and red_vertex is not None:
        red_halves = set(m.vertices[red_vertex])
        if not any(origin[h] in red_halves for h in pieces[0].half_edges):
            pieces.reverse()
    return cut, pieces, origin


def _piece_code(cut: CombinatorialMap, p: BoundedPiece, origin: Sequence[int],
                tagged_halves: set[int]) -> tuple:
    holes = set()
    for hid in p.hole_ids:
        holes |= cut.holes[hid]
    labels = [(h in holes, origin[h] in tagged_halves) for h in p.half_edges]
    return canonical_code(p.map, labels)


def enumerate_repackings(m: CombinatorialMap, marked: Sequence[Bigon], g: int,
                         red_vertex: int | None = None) -> tuple[list[RepackingCandidate], int]:
    """Combinatorial alternatives to a packing whose slit circles sit on ``marked``.

    Every slit may move to any splitting bigon of its group, and the whole
    arrangement may be reversed.  Candidates are identified when their
    pieces agree up to isomorphism fixing holes and bigon vertices.  Returns
    the distinct candidates other than the original, and the bound
    ``2 * prod(k_i) - 1``.
    """
    if len(marked) != g - 1:
        raise MarkedBigonNotSplitting(f"expected {g - 1} marked bigons, got {len(marked)}")
    for b in marked:
        if not is_splitting(m, b):
            raise MarkedBigonNotSplitting(f"marked bigon {b.vertex_pair} is not splitting")
    if red_vertex is None:
        red_vertex = m.marks.get("red_vertex")
    if red_vertex is None:
        red_vertex = default_red_vertex(m)
    order = order_splitting_bigons(m, red_vertex)
    groups: dict[int, list[Bigon]] = {}
    for o in order:
        groups.setdefault(o.y, []).append(o.bigon)
    ks = [len(groups.get(y, [])) for y in range(1, g)]
    if any(k == 0 for k in ks):
        raise MarkedBigonNotSplitting("some slit has no splitting bigon")
    bound = 2 * prod(ks) - 1

    original = []
    for j, b in enumerate(marked, start=1):
        match = [x for x in groups[j] if x.vertex_set == b.vertex_set]
        if not match:
            raise MarkedBigonNotSplitting("marked bigons are not in slit order")
        original.append(match[0])
    original = tuple(original)

    candidates = []
    for choice in product(*[groups[y] for y in range(1, g)]):
        candidates.append((tuple(choice), "Forward"))
    for choice in product(*[groups[y] for y in range(g - 1, 0, -1)]):
        candidates.append((tuple(choice), "Reversed"))

    seen: dict[tuple, RepackingCandidate] = {}
    orig_sig = None
    for assignment, orient in candidates:
        along = list(assignment) if orient == "Forward" else list(reversed(assignment))
        cut, pieces, origin = _ordered_pieces(m, along, red_vertex)
        if orient == "Reversed":
            pieces = pieces[::-1]
        tagged = {h for b in assignment for v in (b.v1, b.v2) for h in m.vertices[v]}
        sig = tuple(_piece_code(cut, p, origin, tagged) for p in pieces)
        parts = tuple(_piece_subgraph(m, p, origin) for p in pieces)
        is_orig = orient == "Forward" and assignment == original
        cand = RepackingCandidate(assignment, orient, parts, sig, is_orig)
        if is_orig:
            orig_sig = sig
        seen.setdefault(sig, cand)
    distinct = [c for s, c in seen.items() if s != orig_sig]
    return distinct, bound


def _piece_subgraph(m: CombinatorialMap, p: BoundedPiece, origin: Sequence[int]) -> Subgraph:
    verts = {m.vertex_of[origin[h]] for h in p.half_edges}
    edges = {m.edge_of[origin[h]] for h in p.half_edges}
    return Subgraph(frozenset(verts), frozenset(edges))

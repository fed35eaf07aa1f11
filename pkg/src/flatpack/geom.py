"""Exact rational plane geometry.

Coordinates are exact rationals (gmpy2 ``mpq``).  Only angles are ever
converted to floating point, and every decision that matters (incidence,
tangency, orientation, turn counting) is taken with exact predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from math import isqrt
from typing import NamedTuple, Sequence, Union

from .errors import FlatpackError, IrrationalIntersection

Rat = gmpy2.mpq
EPS_ANGLE = 1e-9
CCW = "ccw"
CW = "cw"


def rat(value) -> Rat:
    """Parse an int, rational or ``"p/q"`` string into an exact rational."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, (int, Fraction)):
        return Rat(value)
    if isinstance(value, str):
        return Rat(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class QPoint(NamedTuple):
    x: Rat
    y: Rat

    @classmethod
    def of(cls, x, y) -> "QPoint":
        return cls(rat(x), rat(y))

    def __add__(self, other):  # type: ignore[override]
        return QPoint(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return QPoint(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return QPoint(-self.x, -self.y)

    def scale(self, t) -> "QPoint":
        return QPoint(self.x * t, self.y * t)

    def __repr__(self) -> str:
        return f"({self.x}, {self.y})"


ORIGIN = QPoint(Rat(0), Rat(0))


def cross(u, v) -> Rat:
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v) -> Rat:
    return u[0] * v[0] + u[1] * v[1]


def orient(a, b, c) -> int:
    """Sign of the turn a -> b -> c (+1 left, -1 right, 0 collinear)."""
    d = cross(QPoint(b[0] - a[0], b[1] - a[1]), QPoint(c[0] - a[0], c[1] - a[1]))
    return (d > 0) - (d < 0)


def squared_distance(p, q) -> Rat:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def rational_sqrt(q: Rat) -> Rat | None:
    """Exact square root of a nonnegative rational, or None when irrational."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Rat(rn, rd)
    return None


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_root_sum(a, b, m, c=0, n=0) -> int:
    """Exact sign of a + b*sqrt(m) + c*sqrt(n) for rationals a, b, c and m, n >= 0."""
    su = _sign_one_root(a, b, m)
    sc = _sign(c) if n > 0 else 0
    if sc == 0 or su == sc:
        return su if su != 0 else sc
    if su == 0:
        return sc
    # opposite signs: compare |a + b sqrt m| with |c| sqrt n by squaring
    bigger = _sign_one_root(a * a + b * b * m - c * c * n, 2 * a * b, m)
    return su if bigger > 0 else (sc if bigger < 0 else 0)


def _sign_one_root(a, b, m) -> int:
    sa, sb = _sign(a), (_sign(b) if m > 0 else 0)
    if sb == 0 or sa == sb:
        return sa if sa != 0 else sb
    if sa == 0:
        return sb
    return sa * _sign(a * a - b * b * m)


class QuadraticRoot(NamedTuple):
    """The real number p + q*sqrt(d) with rational p, q and d >= 0."""
    p: Rat
    q: Rat
    d: Rat

    def compare(self, other: "QuadraticRoot") -> int:
        return sign_root_sum(self.p - other.p, self.q, self.d, -other.q, other.d)

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(float(self.d))


def segment_disk_params(a, b, center, radius_sq):
    """Exact parameter interval (lo, hi) of the segment a->b inside a closed disk, or None."""
    d = QPoint(b[0] - a[0], b[1] - a[1])
    w = QPoint(a[0] - center[0], a[1] - center[1])
    A = dot(d, d)
    B = dot(d, w)
    C = dot(w, w) - radius_sq
    disc = B * B - A * C
    if disc < 0:
        return None
    lo = QuadraticRoot(-B / A, Rat(-1) / A, disc)
    hi = QuadraticRoot(-B / A, Rat(1) / A, disc)
    zero = QuadraticRoot(Rat(0), Rat(0), Rat(0))
    one = QuadraticRoot(Rat(1), Rat(0), Rat(0))
    if hi.compare(zero) < 0 or lo.compare(one) > 0:
        return None
    return (lo if lo.compare(zero) > 0 else zero), (hi if hi.compare(one) < 0 else one)


@dataclass(frozen=True)
class Segment:
    a: QPoint
    b: QPoint

    def __post_init__(self):
        if self.a == self.b:
            raise FlatpackError("segment endpoints coincide")

    def point_at(self, t) -> QPoint:
        return QPoint(self.a.x + (self.b.x - self.a.x) * t, self.a.y + (self.b.y - self.a.y) * t)

    @property
    def direction(self) -> QPoint:
        return self.b - self.a

    def length_sq(self) -> Rat:
        return squared_distance(self.a, self.b)

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Disjoint:
    pass


@dataclass(frozen=True)
class PointHit:
    point: QPoint


@dataclass(frozen=True)
class Overlap:
    segment: Segment


Intersection = Union[Disjoint, PointHit, Overlap]


def on_segment(p, s: Segment) -> bool:
    """True when p lies on the closed segment s."""
    if orient(s.a, s.b, p) != 0:
        return False
    return dot(QPoint(p[0] - s.a.x, p[1] - s.a.y), QPoint(p[0] - s.b.x, p[1] - s.b.y)) <= 0


def segments_intersect(s: Segment, t: Segment) -> Intersection:
    d1 = s.direction
    d2 = t.direction
    denom = cross(d1, d2)
    w = t.a - s.a
    if denom != 0:
        u = cross(w, d2) / denom
        v = cross(w, d1) / denom
        if 0 <= u <= 1 and 0 <= v <= 1:
            return PointHit(s.point_at(u))
        return Disjoint()
    if cross(w, d1) != 0:
        return Disjoint()
    # collinear: project t onto s's parameter
    ll = dot(d1, d1)
    t0 = dot(t.a - s.a, d1) / ll
    t1 = dot(t.b - s.a, d1) / ll
    lo = max(Rat(0), min(t0, t1))
    hi = min(Rat(1), max(t0, t1))
    if lo > hi:
        return Disjoint()
    if lo == hi:
        return PointHit(s.point_at(lo))
    return Overlap(Segment(s.point_at(lo), s.point_at(hi)))


# ---------------------------------------------------------------- directions

def _half(v) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_key_less(u, v) -> bool:
    """Strict comparison of the polar angles of u and v, both taken in [0, 2pi)."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu < hv
    return cross(u, v) > 0


def same_direction(u, v) -> bool:
    return cross(u, v) == 0 and dot(u, v) > 0


def ccw_less(ref, u, v) -> bool:
    """Compare the CCW angles from ref to u and to v, angles taken in [0, 2pi)."""
    return angle_key_less(_rotate_into(ref, u), _rotate_into(ref, v))


def _rotate_into(ref, v) -> QPoint:
    # coordinates of v in the frame whose x-axis is ref (unnormalised rotation)
    return QPoint(dot(ref, v), cross(ref, v))


def sweep_crosses_zero(u, w) -> int:
    """1 if the CCW sweep from direction u to w passes the +x direction.

    The sweep covers the half-open range (angle(u), angle(u) + theta] with
    theta in (0, 2pi]; equal directions mean a full turn.  Summing this over
    a closed chain of sweeps counts its full turns exactly.
    """
    return 0 if angle_key_less(u, w) else 1


def direction_angle(v) -> float:
    a = math.atan2(float(v[1]), float(v[0]))
    return a if a >= 0 else a + 2 * math.pi


def ccw_angle(u, w) -> float:
    """Float CCW angle from u to w in (0, 2pi]; equal directions give 2pi."""
    if same_direction(u, w):
        return 2 * math.pi
    a = direction_angle(w) - direction_angle(u)
    while a <= 0:
        a += 2 * math.pi
    return a


# ---------------------------------------------------------------------- arcs

@dataclass(frozen=True)
class Arc:
    center: QPoint
    radius_sq: Rat
    start: QPoint
    end: QPoint
    orientation: str = CCW

    def __post_init__(self):
        if self.radius_sq <= 0:
            raise FlatpackError("arc radius must be positive")
        if self.orientation not in (CCW, CW):
            raise FlatpackError(f"unknown orientation {self.orientation!r}")
        for p in (self.start, self.end):
            if squared_distance(self.center, p) != self.radius_sq:
                raise FlatpackError(f"arc endpoint {p} is not on the circle")

    @property
    def full(self) -> bool:
        return self.start == self.end

    def as_ccw(self) -> "Arc":
        if self.orientation == CCW:
            return self
        return Arc(self.center, self.radius_sq, self.end, self.start, CCW)

    def start_dir(self) -> QPoint:
        return self.as_ccw().start - self.center

    def end_dir(self) -> QPoint:
        return self.as_ccw().end - self.center

    def contains_direction(self, d) -> bool:
        """Whether direction d (from the center) lies on the closed arc."""
        a = self.as_ccw()
        if a.full:
            return True
        u = a.start - a.center
        w = a.end - a.center
        if same_direction(d, u) or same_direction(d, w):
            return True
        return ccw_less(u, d, w)

    def turns(self) -> int:
        return sweep_crosses_zero(self.start_dir(), self.end_dir())


def arc_angle(a: Arc) -> float:
    c = a.as_ccw()
    return ccw_angle(c.start - c.center, c.end - c.center)


def circle_point_between(center, radius_sq, p, q) -> QPoint:
    """A rational point strictly inside the CCW arc from p to q.

    p and q are rational points on the circle; p == q means the full circle.
    The point is the second intersection of the circle with a line through p
    whose direction lies strictly between the tangent at p and the chord pq.
    """
    rp = p - center
    if p == q:
        return center - rp
    tangent = QPoint(-rp.y, rp.x)
    # the chord always turns left of the tangent by less than pi, so any
    # positive combination of the two points strictly into the arc
    d = tangent + (q - p)
    s = -2 * dot(rp, d) / dot(d, d)
    pt = p + d.scale(s)
    return pt


def circle_line_params(a, b, center, radius_sq) -> list[Rat]:
    """Parameters t (along a + t(b-a), any real t) where the line meets the circle.

    Raises IrrationalIntersection when the intersection points are irrational.
    """
    d = QPoint(b[0] - a[0], b[1] - a[1])
    w = QPoint(a[0] - center[0], a[1] - center[1])
    A = dot(d, d)
    B = 2 * dot(w, d)
    C = dot(w, w) - radius_sq
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    root = rational_sqrt(disc)
    if root is None:
        raise IrrationalIntersection(
            f"circle about {center} with radius^2 {radius_sq} meets line {a}-{b} irrationally")
    if root == 0:
        return [-B / (2 * A)]
    return sorted([(-B - root) / (2 * A), (-B + root) / (2 * A)])


# ------------------------------------------------------------------ polygons

def signed_area2(vertices: Sequence) -> Rat:
    n = len(vertices)
    return sum((cross(vertices[i], vertices[(i + 1) % n]) for i in range(n)), Rat(0))


def polygon_sides(vertices: Sequence) -> list[tuple[QPoint, QPoint]]:
    n = len(vertices)
    return [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]


def point_in_polygon(p, vertices: Sequence) -> str:
    """Return "inside", "boundary" or "outside" (exact)."""
    inside = False
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        if orient(a, b, p) == 0 and dot(QPoint(p[0] - a[0], p[1] - a[1]),
                                         QPoint(p[0] - b[0], p[1] - b[1])) <= 0:
            return "boundary"
        if (a[1] > p[1]) != (b[1] > p[1]):
            t = (p[1] - a[1]) / (b[1] - a[1])
            x = a[0] + t * (b[0] - a[0])
            if x > p[0]:
                inside = not inside
    return "inside" if inside else "outside"


def is_simple_polygon(vertices: Sequence) -> bool:
    n = len(vertices)
    if n < 3 or len(set(vertices)) != n:
        return False
    sides = [Segment(QPoint(*vertices[i]), QPoint(*vertices[(i + 1) % n])) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            hit = segments_intersect(sides[i], sides[j])
            if isinstance(hit, Disjoint):
                continue
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if not adjacent or isinstance(hit, Overlap):
                return False
            shared = sides[i].b if j == i + 1 else sides[i].a
            if hit.point != shared:
                return False
    return True


def segment_polygon_intervals(a, b, vertices: Sequence) -> list[tuple[Rat, Rat]]:
    """Maximal parameter intervals [s, t] of a + u(b-a), 0 <= u <= 1, inside the closed polygon."""
    cuts = {Rat(0), Rat(1)}
    d = QPoint(b[0] - a[0], b[1] - a[1])
    n = len(vertices)
    for i in range(n):
        p = vertices[i]
        q = vertices[(i + 1) % n]
        e = QPoint(q[0] - p[0], q[1] - p[1])
        denom = cross(d, e)
        w = QPoint(p[0] - a[0], p[1] - a[1])
        if denom != 0:
            u = cross(w, e) / denom
            v = cross(w, d) / denom
            if 0 <= u <= 1 and 0 <= v <= 1:
                cuts.add(u)
        elif cross(w, d) == 0:
            ll = dot(d, d)
            for r in (p, q):
                u = dot(QPoint(r[0] - a[0], r[1] - a[1]), d) / ll
                if 0 <= u <= 1:
                    cuts.add(u)
    pts = sorted(cuts)

    def inside(u) -> bool:
        return point_in_polygon(QPoint(a[0] + d.x * u, a[1] + d.y * u), vertices) != "outside"

    intervals: list[tuple[Rat, Rat]] = []
    current = None
    for i, u in enumerate(pts):
        if i > 0 and current is not None and not inside((pts[i - 1] + u) / 2):
            intervals.append(current)
            current = None
        if inside(u):
            current = (current[0], u) if current is not None else (u, u)
        elif current is not None:
            intervals.append(current)
            current = None
    if current is not None:
        intervals.append(current)
    return intervals


def bbox(vertices: Sequence) -> tuple[Rat, Rat, Rat, Rat]:
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return min(xs), min(ys), max(xs), max(ys)


def bbox_distance_sq(p, box) -> Rat:
    x0, y0, x1, y1 = box
    dx = max(x0 - p[0], Rat(0), p[0] - x1)
    dy = max(y0 - p[1], Rat(0), p[1] - y1)
    return dx * dx + dy * dy

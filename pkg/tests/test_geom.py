import math
import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from flatpack.errors import FlatpackError
from flatpack.geom import (Arc, Disjoint, Overlap, PointHit, QPoint, QuadraticRoot, Rat, Segment, arc_angle,
                           circle_point_between, on_segment, orient, rat, segment_disk_params, sign_root_sum,
                           squared_distance, segments_intersect)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50).map(Rat)
points = st.builds(QPoint, rationals, rationals)


def P(x, y):
    return QPoint.of(x, y)


def S(a, b, c, d):
    return Segment(P(a, b), P(c, d))


# ------------------------------------------------------------ rationals

def test_rat_parses_strings_fractions_and_ints():
    assert rat("3/4") == Rat(3, 4)
    assert rat(Fraction(-2, 6)) == Rat(-1, 3)
    assert rat(5) == 5
    with pytest.raises(TypeError):
        rat(0.5)


@given(rationals, rationals)
def test_rational_arithmetic_is_exact(a, b):
    assert (a + b) - b == a
    assert Rat(a).denominator > 0


# ------------------------------------------------------- squared distance

def test_squared_distance_examples():
    assert squared_distance(P(0, 0), P(0, 0)) == 0
    assert squared_distance(P(0, 0), P(3, 4)) == 25
    assert squared_distance(P("1/2", 0), P(0, "1/2")) == Rat(1, 2)


@given(points, points)
def test_squared_distance_symmetric(p, q):
    assert squared_distance(p, q) == squared_distance(q, p)
    assert squared_distance(p, q) >= 0


@given(points, points, points)
def test_squared_triangle_inequality(p, q, r):
    # |pr| <= |pq| + |qr| compared on squares: |pr|^2 - |pq|^2 - |qr|^2 <= 2|pq||qr|
    lhs = squared_distance(p, r) - squared_distance(p, q) - squared_distance(q, r)
    assert lhs <= 0 or lhs * lhs <= 4 * squared_distance(p, q) * squared_distance(q, r)


# ------------------------------------------------------ segment intersection

def test_segments_intersect_examples():
    assert segments_intersect(S(0, 0, 1, 0), S(0, 1, 1, 1)) == Disjoint()
    assert segments_intersect(S(0, 0, 1, 1), S(1, 0, 0, 1)) == PointHit(P("1/2", "1/2"))
    assert segments_intersect(S(0, 0, 2, 0), S(1, 0, 3, 0)) == Overlap(S(1, 0, 2, 0))


def test_degenerate_segment_rejected():
    with pytest.raises(FlatpackError):
        S(1, 1, 1, 1)


def _sympy_kind(s: Segment, t: Segment):
    sa = sympy.Segment(*(sympy.Point(sympy.Rational(str(v.x)), sympy.Rational(str(v.y))) for v in (s.a, s.b)))
    ta = sympy.Segment(*(sympy.Point(sympy.Rational(str(v.x)), sympy.Rational(str(v.y))) for v in (t.a, t.b)))
    hits = sa.intersection(ta)
    if not hits:
        return ("disjoint",)
    h = hits[0]
    if isinstance(h, sympy.Point):
        return ("point", Rat(str(h.x)), Rat(str(h.y)))
    return ("overlap",) + tuple(sorted((Rat(str(p.x)), Rat(str(p.y))) for p in (h.p1, h.p2)))


def _our_kind(s: Segment, t: Segment):
    r = segments_intersect(s, t)
    if isinstance(r, Disjoint):
        return ("disjoint",)
    if isinstance(r, PointHit):
        return ("point", r.point.x, r.point.y)
    return ("overlap",) + tuple(sorted((p.x, p.y) for p in (r.segment.a, r.segment.b)))


def _raster(s: Segment, n: int = 1000) -> set:
    # cells of an n x n grid on [0,1]^2 met by the segment, sampled finely plus a one-cell halo
    cells = set()
    ax, ay, bx, by = (float(v) for v in (s.a.x, s.a.y, s.b.x, s.b.y))
    steps = 4 * n
    for i in range(steps + 1):
        t = i / steps
        cx, cy = int((ax + t * (bx - ax)) * n), int((ay + t * (by - ay)) * n)
        cells.update((cx + dx, cy + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1))
    return cells


def test_segments_intersect_matches_oracles():
    rng = random.Random(11)
    dens = [2, 3, 4, 5, 6]

    def coord():
        d = rng.choice(dens)
        return Rat(rng.randint(0, d), d)

    def seg():
        while True:
            a, b = QPoint(coord(), coord()), QPoint(coord(), coord())
            if a != b:
                return Segment(a, b)

    kinds = set()
    for _ in range(1000):
        s, t = seg(), seg()
        if rng.random() < 0.15:
            # force collinear pairs now and then
            t = Segment(s.a + (s.b - s.a).scale(Rat(rng.randint(-2, 3), 4)),
                        s.a + (s.b - s.a).scale(Rat(rng.randint(4, 8), 4)))
        ours = _our_kind(s, t)
        assert ours == _sympy_kind(s, t), (s, t)
        kinds.add(ours[0])
        if ours[0] != "disjoint":
            assert _raster(s) & _raster(t), (s, t)
    assert kinds == {"disjoint", "point", "overlap"}


@given(points, points, points)
def test_orient_antisymmetric(a, b, c):
    assert orient(a, b, c) == -orient(b, a, c)
    assert orient(a, b, c) == orient(b, c, a)


# ----------------------------------------------------------------- arcs

def test_arc_angle_examples():
    o = P(0, 0)
    assert arc_angle(Arc(o, Rat(1), P(1, 0), P(1, 0))) == pytest.approx(2 * math.pi)
    assert arc_angle(Arc(o, Rat(1), P(1, 0), P(0, 1))) == pytest.approx(math.pi / 2, abs=1e-12)
    assert arc_angle(Arc(o, Rat(1), P(1, 0), P(-1, 0))) == pytest.approx(math.pi, abs=1e-12)


def test_arc_endpoints_must_lie_on_circle():
    with pytest.raises(FlatpackError):
        Arc(P(0, 0), Rat(1), P(1, 0), P(1, 1))
    with pytest.raises(FlatpackError):
        Arc(P(0, 0), Rat(0), P(0, 0), P(0, 0))


def test_circle_point_between_is_on_arc():
    c, r = P(0, 0), Rat(25)
    p = circle_point_between(c, r, P(5, 0), P(0, 5))
    assert squared_distance(c, p) == r
    assert p.x > 0 and p.y > 0


# ----------------------------------------------------- quadratic surds

def test_sign_root_sum_against_high_precision():
    rng = random.Random(5)
    mpmath.mp.dps = 80
    checked = 0
    for _ in range(3000):
        a, b, c = (Rat(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(3))
        m, n = Rat(rng.randint(0, 30), rng.randint(1, 5)), Rat(rng.randint(0, 30), rng.randint(1, 5))
        val = (mpmath.mpf(a.numerator) / a.denominator
               + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(mpmath.mpf(m.numerator) / m.denominator)
               + mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(mpmath.mpf(n.numerator) / n.denominator))
        if abs(val) < mpmath.mpf(10) ** -60:
            continue
        assert sign_root_sum(a, b, m, c, n) == (1 if val > 0 else -1)
        checked += 1
    assert checked > 2500


def test_sign_root_sum_exact_zeros():
    # 3 - sqrt 9, sqrt 8 - 2 sqrt 2 and 1/2 + sqrt(1/4) - 1 all vanish
    assert sign_root_sum(3, -1, 9) == 0
    assert sign_root_sum(0, 1, 8, -2, 2) == 0
    assert sign_root_sum(Rat(1, 2), 1, Rat(1, 4), -1, 1) == 0


def test_quadratic_root_compare():
    a = QuadraticRoot(Rat(0), Rat(1), Rat(2))      # sqrt 2
    b = QuadraticRoot(Rat(7, 5), Rat(0), Rat(0))   # 1.4
    assert a.compare(b) == 1 and b.compare(a) == -1 and a.compare(a) == 0
    assert float(a) == pytest.approx(math.sqrt(2))


def test_segment_disk_params():
    lo, hi = segment_disk_params(P(-2, 0), P(2, 0), P(0, 0), Rat(1))
    assert (float(lo), float(hi)) == (0.25, 0.75)
    assert segment_disk_params(P(-2, 2), P(2, 2), P(0, 0), Rat(1)) is None
    # irrational crossing parameters stay exact
    lo, hi = segment_disk_params(P(0, 0), P(2, 0), P(0, 0), Rat(2))
    assert float(lo) == 0 and float(hi) == pytest.approx(math.sqrt(2) / 2)


@settings(max_examples=200)
@given(points, points, points, st.fractions(min_value=Fraction(1, 10), max_value=20, max_denominator=20))
def test_segment_disk_params_bracket_the_chord(a, b, c, rsq):
    if a == b:
        return
    rsq = Rat(rsq)
    res = segment_disk_params(a, b, c, rsq)
    # sample the segment and check membership agrees with the interval
    for i in range(21):
        t = Rat(i, 20)
        p = a + (b - a).scale(t)
        inside = squared_distance(p, c) <= rsq
        tq = QuadraticRoot(t, Rat(0), Rat(0))
        in_interval = res is not None and res[0].compare(tq) <= 0 <= res[1].compare(tq)
        assert inside == in_interval


def test_on_segment():
    s = S(0, 0, 2, 2)
    assert on_segment(P(1, 1), s) and on_segment(P(2, 2), s)
    assert not on_segment(P(3, 3), s) and not on_segment(P(1, 0), s)

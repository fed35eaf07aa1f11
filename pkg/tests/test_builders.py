import math
import random

import pytest

from flatpack.builders import (SlitSpec, chain_slit, make_chain_packing, make_doubled_slit_torus,
                               make_figure_configuration, make_necklace, make_slitted_surface, make_square_tiled,
                               make_torus, random_necklace, random_slitted_surface, seven_vertex_torus,
                               tetrahedron)
from flatpack.errors import ChainDoesNotFit, DegenerateSlit, GenusTooSmall, SlitOverlap, WrongSlitCount
from flatpack.geom import QPoint, Rat, Segment
from flatpack.packing import contacts_graph, verify_configuration
from flatpack.surface import cone_points, stratum
from flatpack.topomap import find_bigons, is_splitting, map_from_faces


def seg(a, b, c, d):
    return Segment(QPoint(Rat(a), Rat(b)), QPoint(Rat(c), Rat(d)))


# ------------------------------------------------------------------ tori

def test_torus():
    s = make_torus()
    assert s.genus == 1 and cone_points(s) == []
    assert len(s.vertex_classes) == 1
    assert s.class_angles == [pytest.approx(2 * math.pi)]
    with pytest.raises(GenusTooSmall):
        stratum(s)


@pytest.mark.parametrize("slit", [seg(Rat(1, 4), Rat(1, 4), Rat(3, 4), Rat(3, 4)),
                                  seg(Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1, 2))])
def test_doubled_slit_torus(slit):
    s = make_doubled_slit_torus(slit)
    assert s.genus == 2 and stratum(s) == (1, 1)
    cps = cone_points(s)
    assert all(cp.angle == pytest.approx(4 * math.pi) for cp in cps)
    ends = {s.vertex_class_of_point(s.find_point(p, sheet=0)) for p in (slit.a, slit.b)}
    assert ends == {s.class_of[next(iter(cp.vertex_class))] for cp in cps}


def test_zero_length_slit():
    with pytest.raises(DegenerateSlit):
        make_doubled_slit_torus(((Rat(1, 2), Rat(1, 2)), (Rat(1, 2), Rat(1, 2))))


def test_slit_outside_square():
    with pytest.raises(DegenerateSlit):
        make_doubled_slit_torus(seg(Rat(1, 2), Rat(1, 2), Rat(3, 2), Rat(1, 2)))


# ------------------------------------------------------ slitted surfaces

def test_genus_two_matches_doubled_slit_torus():
    slit = seg(Rat(1, 4), Rat(1, 3), Rat(3, 4), Rat(1, 2))
    a, b = make_slitted_surface(2, [slit]), make_doubled_slit_torus(slit)
    assert (a.genus, stratum(a), len(a.polygons)) == (b.genus, stratum(b), len(b.polygons))


def test_genus_three_stratum():
    s = make_slitted_surface(3, [seg(Rat(1, 4), Rat(1, 4), Rat(1, 2), Rat(1, 4)),
                                 seg(Rat(1, 4), Rat(3, 4), Rat(3, 4), Rat(3, 4))])
    assert s.genus == 3 and stratum(s) == (1, 1, 1, 1)


def test_overlapping_slits():
    with pytest.raises(SlitOverlap):
        make_slitted_surface(3, [seg(Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1, 2)),
                                 seg(Rat(1, 2), Rat(1, 4), Rat(1, 2), Rat(3, 4))])


def test_wrong_slit_count():
    with pytest.raises(WrongSlitCount):
        make_slitted_surface(3, [seg(Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1, 2))])
    with pytest.raises(WrongSlitCount):
        make_slitted_surface(1, [])


def test_slit_spec_indices_must_chain():
    s1 = SlitSpec(0, seg(Rat(1, 4), Rat(1, 4), Rat(1, 2), Rat(1, 4)))
    s2 = SlitSpec(2, seg(Rat(1, 4), Rat(3, 4), Rat(3, 4), Rat(3, 4)))
    with pytest.raises(WrongSlitCount):
        make_slitted_surface(3, [s1, s2])


def test_random_slitted_surfaces_have_right_stratum():
    rng = random.Random(12)
    for _ in range(12):
        g = rng.choice([2, 3, 4])
        s = random_slitted_surface(rng, g)
        assert s.genus == g
        assert stratum(s) == (1,) * (2 * g - 2)


def test_square_tiled_rejects_non_permutations():
    with pytest.raises(ValueError):
        make_square_tiled([0, 0], [0, 1])


# ------------------------------------------------------------- figures

def test_fig6_caption():
    s, c = make_figure_configuration("Fig6")
    assert s.genus == 1 and len(c.circles) == 2
    assert set(contacts_graph(c).edge_pairs()) == {(0, 1)}


def test_fig8_caption():
    _, c = make_figure_configuration("Fig8")
    (yellow,) = [circ for circ in c.circles if circ.k == 2]
    g = contacts_graph(c)
    others = {circ.index for circ in c.circles if circ.k == 1}
    assert {b if a == yellow.index else a for a, b in g.edge_pairs() if yellow.index in (a, b)} == others


def test_fig9_caption():
    s, c = make_figure_configuration("Fig9")
    assert [circ.k for circ in c.circles] == [2, 2]
    g = contacts_graph(c)
    assert set(g.edge_pairs()) == {(0, 1)}
    # one slit end sits at the square corner
    seg0 = c.slits[0][0]
    assert QPoint(Rat(0), Rat(0)) in (seg0.a, seg0.b)


def test_fig10_other_endpoint_in_interstice():
    _, c = make_figure_configuration("Fig10")
    slit = c.slits[0][0]
    end = slit.b
    for circ in c.circles:
        for _, p in circ.planar_centers:
            d = (end.x - p.x) ** 2 + (end.y - p.y) ** 2
            assert d > circ.radius_sq


# -------------------------------------------------------------- chains

def test_chain_slit_bounds():
    assert chain_slit(5, 3) == seg(0, 0, 16, 0)
    with pytest.raises(ChainDoesNotFit):
        chain_slit(5, 2)
    with pytest.raises(ChainDoesNotFit):
        make_chain_packing(6, 3)
    with pytest.raises(ValueError):
        make_chain_packing(1)


def test_chain_packing_verifies():
    s, c = make_chain_packing(3)
    assert s.genus == 2 and stratum(s) == (1, 1)
    assert verify_configuration(c).passed


# -------------------------------------------------------- triangulations

@pytest.mark.parametrize("tris,genus", [(tetrahedron(), 0), (seven_vertex_torus(), 1)])
def test_base_triangulations(tris, genus):
    faces = [[(a, frozenset((a, b))), (b, frozenset((b, c))), (c, frozenset((c, a)))] for a, b, c in tris]
    m = map_from_faces(faces)
    assert m.genus == genus and find_bigons(m) == []


@pytest.mark.parametrize("ks", [[1], [4], [2, 3], [1, 1, 1]])
def test_necklace_shape(ks):
    n = make_necklace(ks, seed=3)
    assert n.genus == len(ks) + 1 == n.map.genus
    assert n.ks == ks
    assert n.bound == 2 * math.prod(ks) - 1
    assert all(is_splitting(n.map, b) for gr in n.groups for b in gr)
    assert n.marked == [gr[0] for gr in n.groups]


def test_necklace_marked_choice():
    n = make_necklace([3, 2], marked=[2, 1])
    assert n.marked == [n.groups[0][2], n.groups[1][1]]


def test_random_necklaces_are_triangulated_surfaces():
    rng = random.Random(4)
    for _ in range(20):
        n = random_necklace(rng, g=rng.choice([2, 3, 4]), max_k=3)
        assert n.map.connected and n.map.genus == n.genus
        assert all(len(f) == 3 for f in n.map.faces)

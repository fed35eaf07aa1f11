import math

import pytest

from flatpack.builders import (make_chain_packing, make_figure_configuration, make_forbidden_configuration,
                               torus_pair, triangulated_torus_packing, torus_configuration)
from flatpack.errors import ArcChainBroken, IllegalRelation, OverlappingCircles
from flatpack.geom import Arc, QPoint, Rat, Segment
from flatpack.packing import (PolygonalSector, assemble_generalized_circles, build_configuration, chain_bigons,
                              chain_groups, check_triangprop, classify_slit_relation, contacts_graph,
                              is_triangulation, sectors_from_disks, slit_covered, triangprop_report,
                              verify_configuration)
from flatpack.surface import Identification, PolygonSpec, SideId, build_surface
from flatpack.topomap import build_map

FIGURES = ["Fig6", "Fig7", "Fig8", "Fig9", "Fig10", "Fig11"]
H = Rat(1, 2)


def square_torus():
    return build_surface([PolygonSpec(((0, 0), (1, 0), (1, 1), (0, 1)), 0)],
                         [Identification(SideId(0, 0), SideId(0, 2)), Identification(SideId(0, 1), SideId(0, 3))])


def halved_torus():
    # the square torus cut into two rectangles along x = 1/2
    left = ((0, 0), (H, 0), (H, 1), (0, 1))
    right = ((H, 0), (1, 0), (1, 1), (H, 1))
    return build_surface([PolygonSpec(left, 0), PolygonSpec(right, 1)],
                         [Identification(SideId(0, 1), SideId(1, 3)), Identification(SideId(1, 1), SideId(0, 3)),
                          Identification(SideId(0, 0), SideId(0, 2)), Identification(SideId(1, 0), SideId(1, 2))])


def relations(c):
    out = []
    for circ in c.circles:
        for seg, a, b in c.slits:
            out.append(classify_slit_relation(circ, seg, (a, b)))
    return out


# -------------------------------------------------------------- assembly

def test_full_interior_disk_is_one_circle():
    s = square_torus()
    (circ,) = assemble_generalized_circles(s, sectors_from_disks(s, [("d", 0, (H, H), Rat(1, 16))]))
    assert circ.k == 1 and circ.angle_sum == pytest.approx(2 * math.pi)


def test_four_corner_quarters_make_one_circle():
    s = square_torus()
    sectors = sectors_from_disks(s, [("q", 0, (0, 0), Rat(1, 16))], [(a, b) for a in (0, 1) for b in (0, 1)])
    assert len(sectors) == 4
    (circ,) = assemble_generalized_circles(s, sectors)
    assert circ.k == 1 and len(circ.cycles) == 1 and len(circ.cycles[0]) == 4


def test_half_disks_across_slit_make_a_two_circle():
    # the circle centred at the slit endpoint in Fig. 8
    _, c = make_figure_configuration("Fig8")
    assert sorted(circ.k for circ in c.circles) == [1, 1, 2]


def _lone_half_disk(s):
    c0 = QPoint(H, H)
    a = Arc(c0, Rat(1, 16), QPoint(H, Rat(3, 4)), QPoint(H, Rat(1, 4)))
    return PolygonalSector(0, a, (a.end, a.start))


def test_broken_arc_chain_raises_when_strict():
    s = halved_torus()
    with pytest.raises(ArcChainBroken):
        build_configuration(s, [_lone_half_disk(s)])


def test_lone_half_disk_fails_condition_one():
    s = halved_torus()
    c = build_configuration(s, [_lone_half_disk(s)], strict=False)
    rep = verify_configuration(c)
    assert not rep.passed
    k, res = rep.first_failure()
    assert k == 1 and "no related sector" in res.witness


def test_split_disk_across_interior_cut_passes():
    s = halved_torus()
    sectors = sectors_from_disks(s, [("d", 0, (H, H), Rat(1, 16))])
    assert len(sectors) == 2
    c = build_configuration(s, sectors)
    assert len(c.circles) == 1 and verify_configuration(c).passed


# ------------------------------------------------------------ verification

@pytest.mark.parametrize("fid", FIGURES)
def test_figures_verify(fid):
    s, c = make_figure_configuration(fid)
    rep = verify_configuration(c, 6)
    assert rep.passed, rep.lines()
    assert rep.depth == 6
    assert s.genus == (1 if fid == "Fig6" else 2)


def test_fig7_singularities_outside_all_circles():
    s, c = make_figure_configuration("Fig7")
    assert [circ.k for circ in c.circles] == [1, 1, 1, 1]
    assert relations(c).count("TwoPointCrossing") == 2


@pytest.mark.parametrize("variant", ["endpoint-inside", "past-center"])
def test_forbidden_geometry_fails_condition_four(variant):
    _, c = make_forbidden_configuration(variant)
    rep = verify_configuration(c, 6)
    k, res = rep.first_failure()
    assert k == 4
    assert "not at the center" in res.witness


def test_forbidden_endpoint_raises_illegal_relation():
    _, c = make_forbidden_configuration("endpoint-inside")
    with pytest.raises(IllegalRelation):
        relations(c)


def test_overlapping_disks_fail_condition_two():
    s = halved_torus()
    sectors = sectors_from_disks(s, [("x", 0, (Rat(1, 4), H), Rat(1, 64)),
                                     ("y", 0, (Rat(1, 4), Rat(5, 8)), Rat(1, 64))])
    c = build_configuration(s, sectors)
    k, res = verify_configuration(c).first_failure()
    assert k == 2 and "overlap" in res.witness
    with pytest.raises(OverlappingCircles):
        contacts_graph(c)


def test_condition_four_arc_check_independent_of_depth():
    for fid in ("Fig8", "Fig11"):
        _, c = make_figure_configuration(fid)
        results = [verify_configuration(c, d).conditions[4].passed for d in range(0, 7)]
        # a pass can only turn into a fail as the depth grows
        assert all(a or not b for a, b in zip(results, results[1:]))


# ---------------------------------------------------------- slit relations

def test_slit_relations_on_figures():
    assert relations(make_figure_configuration("Fig9")[1]) == ["ThroughCenter", "ThroughCenter"]
    assert sorted(relations(make_figure_configuration("Fig7")[1])) == \
        ["Disjoint", "Disjoint", "TwoPointCrossing", "TwoPointCrossing"]
    assert sorted(relations(make_figure_configuration("Fig11")[1])) == \
        ["ThroughCenter", "TwoPointCrossing", "TwoPointCrossing"]


def test_slit_far_from_circle_is_disjoint():
    s = square_torus()
    (circ,) = assemble_generalized_circles(s, sectors_from_disks(s, [("d", 0, (H, H), Rat(1, 16))]))
    far = Segment(QPoint(Rat(1, 10), Rat(1, 10)), QPoint(Rat(1, 5), Rat(1, 10)))
    assert classify_slit_relation(circ, far) == "Disjoint"


# ---------------------------------------------------------- contacts graph

def test_fig6_contacts_graph_is_k2():
    _, c = make_figure_configuration("Fig6")
    g = contacts_graph(c)
    assert g.n_circles == 2
    assert set(g.edge_pairs()) == {(0, 1)}
    # two circles on the square torus touch at four points
    assert g.multiplicity(0, 1) == 4
    ok, why = is_triangulation(g)
    assert not ok and any("4 sides" in w for w in why)


def test_fig7_each_slit_circle_touches_both_others():
    _, c = make_figure_configuration("Fig7")
    g = contacts_graph(c)
    crossing = [circ.index for circ, r in zip(c.circles, relations(c)) if r == "TwoPointCrossing"]
    mult = g.group_multiplicities()
    for i in crossing:
        neighbours = {b if a == i else a for (a, b) in mult if i in (a, b)}
        assert len(neighbours) == 2 and not neighbours & set(crossing)


def test_far_apart_circles_have_no_contacts():
    s = square_torus()
    sectors = sectors_from_disks(s, [("a", 0, (Rat(1, 4), Rat(1, 4)), Rat(1, 100)),
                                     ("b", 0, (Rat(3, 4), Rat(3, 4)), Rat(1, 100))])
    c = build_configuration(s, sectors)
    assert verify_configuration(c).passed
    assert contacts_graph(c).tangencies == []


def test_contact_multiplicity_counts_tangency_points():
    _, c = make_figure_configuration("Fig9")
    g = contacts_graph(c)
    assert g.multiplicity(0, 1) == len(g.tangencies) == 8


# ----------------------------------------------------------- triangulations

def test_single_loop_on_torus_not_a_triangulation():
    ok, _ = is_triangulation(build_map([1, 0, 3, 2], [2, 3, 1, 0]))
    assert not ok


def test_triangulated_torus_packing():
    c = torus_configuration(triangulated_torus_packing(2, 3))
    assert verify_configuration(c).passed
    g = contacts_graph(c)
    assert g.map.genus == 1
    assert is_triangulation(g) == (True, [])


@pytest.mark.parametrize("k", [2, 3])
def test_chain_triangprop(k):
    pair, slit = torus_pair(k)
    r = triangprop_report(pair, slit)
    assert r.as_pair() == (True, True)
    g = contacts_graph(r.combined)
    assert len(chain_groups(r.combined, slit)) == k
    assert len(chain_bigons(r.combined, g)) == k - 1


def test_off_centre_slit_fails_hypotheses():
    pair, _ = torus_pair(2)
    off = Segment(QPoint(Rat(1), Rat(1)), QPoint(Rat(3), Rat(1)))
    r = triangprop_report(pair, off)
    assert not r.hypotheses["torus 0 slit ends at centers"]
    assert check_triangprop(pair, off) == (False, False)


def test_chain_slit_is_covered():
    pair, slit = torus_pair(3)
    assert slit_covered(pair[0], slit)
    gap = Segment(QPoint(Rat(1), Rat(1)), QPoint(Rat(3), Rat(1)))
    assert not slit_covered(pair[0], gap)


def test_chain_packing_is_genus_two():
    s, c = make_chain_packing(2)
    assert s.genus == 2 and verify_configuration(c).passed

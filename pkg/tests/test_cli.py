import dataclasses
import json
import re

import pytest

from flatpack.builders import make_figure_configuration
from flatpack.cli import run
from flatpack.document import (Marks, configuration_document, document_configuration, document_surface,
                               fixture_document, fixture_names, parse_document, parse_rational, serialize_document)
from flatpack.errors import DocumentSyntaxError, SchemaError
from flatpack.geom import Rat
from flatpack.packing import build_configuration, sectors_from_disks, verify_configuration
from flatpack.surface import Identification, PolygonSpec, SideId, build_surface

TORUS = {"version": 1, "name": "torus",
         "surface": {"polygons": [{"id": 0, "sheet": 0, "vertices": [["0", "0"], ["1", "0"], ["1", "1"], ["0", "1"]]}],
                     "identifications": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]]}}


def write(tmp_path, name, doc):
    p = tmp_path / f"{name}.json"
    p.write_text(doc if isinstance(doc, str) else serialize_document(doc))
    return str(p)


def run_json(capsys, *argv):
    code = run([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


# ------------------------------------------------------------- parsing

def test_minimal_torus_document():
    doc = parse_document(json.dumps(TORUS))
    assert len(doc.polygons) == 1 and len(doc.identifications) == 2
    assert document_surface(doc).genus == 1


def test_side_identified_twice():
    bad = json.loads(json.dumps(TORUS))
    bad["surface"]["identifications"].append([[0, 0], [0, 2]])
    with pytest.raises(SchemaError, match=r"identifications\[2\]"):
        parse_document(json.dumps(bad))


def test_floats_rejected():
    bad = json.loads(json.dumps(TORUS))
    bad["surface"]["polygons"][0]["vertices"][1][0] = 1.0
    with pytest.raises(SchemaError, match=r"vertices\[1\]\[0\]"):
        parse_document(json.dumps(bad))


def test_syntax_error_has_position():
    with pytest.raises(DocumentSyntaxError, match=r"line 2, column \d+"):
        parse_document('{"version": 1,\n "surface": [1,}')


def test_parse_rational():
    assert parse_rational("-3/6") == Rat(-1, 2)
    assert parse_rational("7") == 7
    assert parse_rational(4) == 4
    for bad in ("1/0", "x", 0.5, True):
        with pytest.raises(SchemaError):
            parse_rational(bad)


def test_huge_rationals_stay_exact():
    p = "123456789012345678901234567890123/987654321098765432109876543210987"
    assert str(parse_rational(p)) == str(Rat(123456789012345678901234567890123, 987654321098765432109876543210987))


def test_fig8_round_trip():
    doc = fixture_document("Fig8")
    text = serialize_document(doc)
    again = parse_document(text)
    assert again == doc
    assert serialize_document(again) == text


@pytest.mark.parametrize("name", fixture_names())
def test_every_fixture_round_trips(name):
    text = serialize_document(fixture_document(name))
    assert serialize_document(parse_document(text)) == text


def test_rebuilt_configuration_verifies_like_the_original():
    _, c = make_figure_configuration("Fig10")
    doc = parse_document(serialize_document(configuration_document(c, "Fig10")))
    c2 = document_configuration(doc)
    assert len(c2.sectors) == len(c.sectors)
    assert sorted(x.k for x in c2.circles) == sorted(x.k for x in c.circles)
    assert verify_configuration(c2).lines() == verify_configuration(c).lines()


# ------------------------------------------------------------ validate

def test_validate_origami(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "o", fixture_document("origami")))
    assert code == 0
    assert rep["counts"]["genus"] == 2 and rep["counts"]["stratum"] == [1, 1]
    assert [c["angle"] for c in rep["details"]["cone_points"]] == ["4pi", "4pi"]


def test_validate_octagon_text(tmp_path, capsys):
    code = run(["validate", write(tmp_path, "oct", fixture_document("octagon"))])
    out = capsys.readouterr().out
    assert code == 0 and "stratum: [2]" in out and "6pi" in out


def test_validate_square_torus(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "t", json.dumps(TORUS)))
    assert code == 0
    assert rep["counts"]["genus"] == 1 and rep["counts"]["stratum"] is None


def test_validate_overlapping_sectors(tmp_path, capsys):
    h = Rat(1, 2)
    s = build_surface([PolygonSpec(((0, 0), (1, 0), (1, 1), (0, 1)), 0)],
                      [Identification(SideId(0, 0), SideId(0, 2)), Identification(SideId(0, 1), SideId(0, 3))])
    disks = [("x", 0, (Rat(1, 4), h), Rat(1, 64)), ("y", 0, (Rat(1, 4), Rat(5, 8)), Rat(1, 64))]
    c = build_configuration(s, sectors_from_disks(s, disks), disks=disks, translations=[(0, 0)])
    code, rep = run_json(capsys, "validate", write(tmp_path, "ov", configuration_document(c, "overlap")))
    assert code == 1
    assert rep["checks"]["condition 2"] == "fail" and "overlap" in rep["witnesses"]["condition 2"]


def test_validate_forbidden_geometry(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "f", fixture_document("forbidden-endpoint-inside")))
    assert code == 1
    assert rep["checks"]["condition 4"] == "fail"
    assert "condition 4" in rep["witnesses"]


def test_validate_fig7(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "f7", fixture_document("Fig7")))
    assert code == 0 and rep["counts"]["circles"] == 4 and rep["counts"]["depth"] == 6


@pytest.mark.parametrize("content", ["{not json", '{"version": 2}', '{"version": 1, "surface": {"polygons": []}}'])
def test_malformed_input_exits_2(tmp_path, capsys, content):
    assert run(["validate", write(tmp_path, "bad", content)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    assert run(["validate", str(tmp_path / "nope.json")]) == 2


def test_bad_usage_exits_2(capsys):
    assert run(["frobnicate"]) == 2
    assert "invalid choice" in capsys.readouterr().err


# -------------------------------------------------------------- bigons

def test_bigons_chain_three(tmp_path, capsys):
    code, rep = run_json(capsys, "bigons", write(tmp_path, "c", fixture_document("chain-3")))
    assert code == 0
    assert rep["counts"]["splitting bigons"] == 2
    assert rep["counts"]["pieces"] == 3 and rep["counts"]["genus pattern"] == [1, 0, 1]
    assert rep["checks"]["ordering"] == "pass"


def test_bigons_k1(tmp_path, capsys):
    code, rep = run_json(capsys, "bigons", write(tmp_path, "s", fixture_document("symmetric-1")))
    assert code == 0
    assert rep["counts"]["splitting bigons"] == 1 and rep["counts"]["genus pattern"] == [1, 1]


def test_bigons_torus_packing(tmp_path, capsys):
    code, rep = run_json(capsys, "bigons", write(tmp_path, "t", fixture_document("torus-packing")))
    assert code == 0 and rep["counts"]["splitting bigons"] == 0


def test_bigons_needs_map_or_configuration(tmp_path, capsys):
    assert run(["bigons", write(tmp_path, "t", json.dumps(TORUS))]) == 2


# ------------------------------------------------------------ enumerate

@pytest.mark.parametrize("name,bound", [("symmetric-1", 1), ("necklace-3", 5), ("necklace-2-1", 3)])
def test_enumerate_bounds(tmp_path, capsys, name, bound):
    code, rep = run_json(capsys, "enumerate", write(tmp_path, name, fixture_document(name)))
    assert code == 0
    assert rep["counts"]["bound"] == bound
    assert rep["counts"]["candidates"] <= bound
    assert rep["checks"]["count within bound"] == "pass"
    if name == "symmetric-1":
        assert rep["counts"]["candidates"] == 0


def test_enumerate_without_marks_fails(tmp_path, capsys):
    doc = dataclasses.replace(fixture_document("chain-3"), marks=Marks())
    code, rep = run_json(capsys, "enumerate", write(tmp_path, "c", doc))
    assert code == 1 and rep["checks"]["marked bigons splitting"] == "fail"


# --------------------------------------------------------------- render

def test_render_fig7_four_circle_classes(tmp_path):
    out = tmp_path / "f7.svg"
    assert run(["render", write(tmp_path, "f7", fixture_document("Fig7")), "-o", str(out)]) == 0
    svg = out.read_text()
    assert svg.startswith("<?xml") and "<svg" in svg
    assert len(set(re.findall(r'class="circle" data-class="(\d+)"', svg))) == 4


def test_render_square_torus_two_colours(tmp_path):
    out = tmp_path / "t.svg"
    assert run(["render", write(tmp_path, "t", json.dumps(TORUS)), "-o", str(out)]) == 0
    colours = set(re.findall(r'class="side" [^>]*stroke="([^"]+)"', out.read_text()))
    assert len(colours) == 2


def test_render_is_deterministic(tmp_path):
    src = write(tmp_path, "f9", fixture_document("Fig9"))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(["render", src, "-o", str(a)])
    run(["render", src, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_reports_are_deterministic(tmp_path, capsys):
    src = write(tmp_path, "n", fixture_document("necklace-3"))
    run(["enumerate", src])
    first = capsys.readouterr().out
    run(["enumerate", src])
    assert capsys.readouterr().out == first


def test_fixture_command(capsys):
    assert run(["fixture"]) == 0
    names = capsys.readouterr().out.split()
    assert "Fig7" in names and "chain-3" in names
    assert run(["fixture", "origami"]) == 0
    assert parse_document(capsys.readouterr().out).name == "origami"
    assert run(["fixture", "no-such"]) == 2

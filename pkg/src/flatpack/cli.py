"""Command-line front end: ``flatpack validate|bigons|enumerate|render <file>``.

Exit codes: 0 success, 1 property violation, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

from .document import (Document, document_configuration, document_map, document_surface, fixture_document,
                       fixture_names, parse_document, serialize_document)
from .errors import DocumentSyntaxError, FlatpackError, SchemaError
from .geom import EPS_ANGLE

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Unreadable file or a document the command cannot work with."""


class Report:
    """Command outcome with a stable key order."""

    def __init__(self, command: str, document: str | None):
        self.command = command
        self.document = document
        self.checks: dict[str, bool] = {}
        self.witnesses: dict[str, str] = {}
        self.counts: dict = {}
        self.details: dict = {}
        self.timings: dict[str, float] = {}

    def check(self, name: str, ok: bool, witness=None):
        self.checks[name] = bool(ok)
        if not ok and witness is not None:
            self.witnesses[name] = str(witness)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @contextmanager
    def timed(self, name: str):
        t0 = time.perf_counter()
        yield
        self.timings[name] = round(time.perf_counter() - t0, 4)

    def as_dict(self, timings: bool = False) -> dict:
        out = {"command": self.command, "document": self.document,
               "status": "pass" if self.passed else "fail",
               "checks": {k: ("pass" if v else "fail") for k, v in self.checks.items()},
               "witnesses": dict(self.witnesses), "counts": dict(self.counts), "details": dict(self.details)}
        if timings:
            out["timings"] = dict(self.timings)
        return out

    def text(self, timings: bool = False) -> str:
        lines = [f"{self.command}: {'pass' if self.passed else 'FAIL'}"
                 + (f" ({self.document})" if self.document else "")]
        for k, v in self.checks.items():
            lines.append(f"  check {k}: {'pass' if v else 'FAIL'}")
            if k in self.witnesses:
                lines.append(f"    witness: {self.witnesses[k]}")
        for k, v in self.counts.items():
            lines.append(f"  {k}: {json.dumps(v)}")
        for k, v in self.details.items():
            if isinstance(v, list):
                lines.append(f"  {k}:")
                lines.extend(f"    {json.dumps(x)}" for x in v)
            else:
                lines.append(f"  {k}: {json.dumps(v)}")
        if timings:
            for k, v in self.timings.items():
                lines.append(f"  time {k}: {v}s")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------- commands

def _surface_or_fail(doc: Document, rep: Report, eps_angle: float):
    try:
        s = document_surface(doc, eps_angle)
    except FlatpackError as exc:
        rep.check("surface", False, f"{type(exc).__name__}: {exc}")
        return None
    rep.check("surface", True)
    return s


def _configuration_or_fail(doc: Document, s, rep: Report):
    try:
        c = document_configuration(doc, s)
    except FlatpackError as exc:
        rep.check("configuration", False, f"{type(exc).__name__}: {exc}")
        return None
    rep.check("configuration", True)
    return c


def cmd_validate(doc: Document, depth: int = 6, eps_angle: float = EPS_ANGLE) -> Report:
    from .packing import classify_slit_relation, verify_configuration

    rep = Report("validate", doc.name)
    if doc.has_surface:
        with rep.timed("surface"):
            s = _surface_or_fail(doc, rep, eps_angle)
        if s is not None:
            rep.counts["genus"] = s.genus
            # strata are only defined from genus 2 on
            rep.counts["stratum"] = list(s.stratum) if s.genus >= 2 else None
            rep.details["cone_points"] = [
                {"degree": cp.degree, "angle": f"{2 * (cp.degree + 1)}pi", "corners": len(cp.vertex_class)}
                for cp in s.cone_points]
        if s is not None and doc.has_configuration:
            with rep.timed("configuration"):
                c = _configuration_or_fail(doc, s, rep)
            if c is not None:
                rep.counts["sectors"] = len(c.sectors)
                rep.counts["circles"] = len(c.circles)
                rep.details["circles"] = [{"index": circ.index, "k": circ.k, "label": str(circ.label),
                                           "group": circ.group} for circ in c.circles]
                with rep.timed("conditions"):
                    vr = verify_configuration(c, depth)
                for k in sorted(vr.conditions):
                    r = vr.conditions[k]
                    rep.check(f"condition {k}", r.passed, r.witness)
                rep.counts["depth"] = depth
                for j, (seg, a, b) in enumerate(c.slits):
                    try:
                        rels = sorted({classify_slit_relation(circ, seg, (a, b)) for circ in c.circles})
                    except FlatpackError as exc:
                        rep.check(f"slit {j} relations", False, f"{type(exc).__name__}: {exc}")
                    else:
                        rep.check(f"slit {j} relations", True)
                        rep.details[f"slit {j} relations"] = rels
    if doc.has_map:
        try:
            m = document_map(doc)
        except FlatpackError as exc:
            rep.check("map", False, f"{type(exc).__name__}: {exc}")
        else:
            rep.check("map", m.connected)
            rep.counts.update({"map vertices": m.V, "map edges": m.E, "map faces": m.F, "map genus": m.genus})
    return rep


def _bigon_row(m, b, splitting: bool) -> dict:
    return {"vertices": [b.v1, b.v2], "edges": [b.e1, b.e2],
            "circles": [m.label(b.v1), m.label(b.v2)], "splitting": splitting}


def _analyse_map(m, red_vertex, rep: Report):
    from .topomap import decompose, find_bigons, is_splitting, order_splitting_bigons

    bigons = find_bigons(m)
    rows = [_bigon_row(m, b, is_splitting(m, b)) for b in bigons]
    rep.details["bigon list"] = rows
    rep.counts["bigons"] = len(rows)
    pairs = {tuple(r["vertices"]) for r in rows if r["splitting"]}
    rep.counts["splitting bigons"] = len(pairs)
    rep.counts["map genus"] = m.genus
    if not pairs:
        return
    try:
        order = order_splitting_bigons(m, red_vertex)
    except FlatpackError as exc:
        rep.check("ordering", False, f"{type(exc).__name__}: {exc}")
        return
    rep.check("ordering", True)
    rep.details["order"] = [{"x": o.x, "y": o.y, "vertices": [o.bigon.v1, o.bigon.v2]} for o in order]
    try:
        dec = decompose(m, red_vertex)
    except FlatpackError as exc:
        rep.check("decomposition", False, f"{type(exc).__name__}: {exc}")
        return
    rep.check("decomposition", True)
    rep.counts["pieces"] = len(dec.pieces)
    rep.counts["genus pattern"] = dec.genus_pattern
    rep.details["pieces"] = [{"piece": j, "genus": p.genus, "boundary bigons": bd}
                             for j, (p, bd) in enumerate(zip(dec.pieces, dec.bounding))]


def cmd_bigons(doc: Document, depth: int = 6, eps_angle: float = EPS_ANGLE) -> Report:
    from .packing import chain_bigons, contacts_graph, slit_cycle
    from .topomap import cut_along_cycle

    rep = Report("bigons", doc.name)
    if doc.has_map:
        m = document_map(doc)
        with rep.timed("analysis"):
            _analyse_map(m, doc.marks.red_vertex, rep)
        return rep
    if not doc.has_configuration:
        raise InputError("bigons needs a map block or a configuration block")
    s = _surface_or_fail(doc, rep, eps_angle)
    if s is None:
        return rep
    c = _configuration_or_fail(doc, s, rep)
    if c is None:
        return rep
    with rep.timed("contacts"):
        g = contacts_graph(c, depth)
    rep.counts["surface genus"] = s.genus
    rep.counts["tangencies"] = len(g.tangencies)
    if g.map is None:
        rep.counts["bigons"] = 0
        rep.counts["splitting bigons"] = 0
        return rep
    with rep.timed("analysis"):
        _analyse_map(g.map, doc.marks.red_vertex, rep)
    # double circles on a slit appear as pairs of circles; report their bigons per pair
    for j, (seg, _, _) in enumerate(c.slits):
        cb = chain_bigons(c, g, seg)
        rep.counts[f"slit {j} chain bigons"] = len(cb)
        rep.details[f"slit {j} chain bigons"] = [list(p) for p in cb]
        loop = slit_cycle(c, g, seg)
        if loop is not None:
            pieces = cut_along_cycle(g.map, loop)
            rep.check(f"slit {j} cycle splits", len(pieces) == 2,
                      f"cutting along the cycle leaves {len(pieces)} pieces")
            rep.details[f"slit {j} cycle pieces"] = [{"genus": p.genus, "boundaries": p.boundary_count}
                                                     for p in pieces]
    return rep


def cmd_enumerate(doc: Document) -> Report:
    from .topomap import enumerate_repackings, make_bigon

    rep = Report("enumerate", doc.name)
    if not doc.has_map:
        raise InputError("enumerate needs a map block with marked bigons")
    m = document_map(doc)
    try:
        marked = [make_bigon(m, *b) for b in doc.marks.marked]
        with rep.timed("enumeration"):
            cands, bound = enumerate_repackings(m, marked, m.genus, doc.marks.red_vertex)
    except FlatpackError as exc:
        rep.check("marked bigons splitting", False, f"{type(exc).__name__}: {exc}")
        return rep
    rep.check("marked bigons splitting", True)
    rep.counts["genus"] = m.genus
    rep.counts["candidates"] = len(cands)
    rep.counts["bound"] = bound
    rep.check("count within bound", len(cands) <= bound, f"{len(cands)} candidates exceed the bound {bound}")
    rep.details["candidates"] = [
        {"orientation": cand.orientation,
         "slits": [[b.v1, b.v2] for b in cand.slit_assignment],
         "pieces": [len(sub.vertices) for sub in cand.induced_subtriangulations]}
        for cand in cands]
    return rep


def cmd_render(doc: Document, out_path: str | None = None, eps_angle: float = EPS_ANGLE) -> str:
    from .render import render_svg

    if not doc.has_surface:
        raise InputError("render needs a surface block")
    s = document_surface(doc, eps_angle)
    c = document_configuration(doc, s) if doc.has_configuration else None
    slits = [(m.segment, m.sheet_a, m.sheet_b) for m in doc.marks.slits]
    svg = render_svg(s, c, slits, doc.name)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(svg)
    return svg


# ------------------------------------------------------------------ main

def _read(path: str) -> Document:
    try:
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as f:
                data = f.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_document(data)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=6, help="unfolding depth (default 6)")
    common.add_argument("--eps-angle", type=float, default=EPS_ANGLE, help="angle tolerance (default 1e-9)")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("-o", "--output", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="flatpack", description="Circle packings on translation surfaces.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("validate", "check a surface and its circle configuration"),
                        ("bigons", "list bigons, their order and the decomposition they induce"),
                        ("enumerate", "enumerate repackings along the marked bigons"),
                        ("render", "draw the document as SVG")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("file", help="document path, or - for stdin")
    fx = sub.add_parser("fixture", parents=[common], help="write a built-in fixture as a document")
    fx.add_argument("name", nargs="?", help="fixture name; omit to list them")
    return p


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.command == "fixture":
            if not args.name:
                _emit("\n".join(fixture_names()) + "\n", args.output)
                return EXIT_OK
            _emit(serialize_document(fixture_document(args.name)), args.output)
            return EXIT_OK
        doc = _read(args.file)
        if args.command == "render":
            svg = cmd_render(doc, args.output, args.eps_angle)
            if not args.output:
                sys.stdout.write(svg)
            return EXIT_OK
        if args.command == "validate":
            rep = cmd_validate(doc, args.depth, args.eps_angle)
        elif args.command == "bigons":
            rep = cmd_bigons(doc, args.depth, args.eps_angle)
        else:
            rep = cmd_enumerate(doc)
    except (InputError, DocumentSyntaxError, SchemaError) as exc:
        print(f"flatpack: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FlatpackError as exc:
        # the document parsed but describes something invalid
        print(f"flatpack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    if args.format == "json":
        text = json.dumps(rep.as_dict(args.timings), indent=1) + "\n"
    else:
        text = rep.text(args.timings)
    _emit(text, args.output)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def main(argv=None):
    sys.exit(run(argv))

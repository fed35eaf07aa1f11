"""Exact circle packings on translation surfaces and their combinatorics."""
from .builders import (make_chain_packing, make_figure_configuration, make_necklace, make_octagon, make_origami,
                       make_slitted_surface, make_torus, torus_pair)
from .document import Document, fixture_document, parse_document, serialize_document
from .errors import FlatpackError
from .geom import QPoint, Rat, Segment
from .packing import check_triangprop, contacts_graph, verify_configuration
from .surface import build_surface, cone_points, stratum, unfold_distance
from .topomap import CombinatorialMap, decompose, enumerate_repackings, find_bigons, order_splitting_bigons

__all__ = [
    "build_surface",
    "check_triangprop",
    "CombinatorialMap",
    "cone_points",
    "contacts_graph",
    "decompose",
    "Document",
    "enumerate_repackings",
    "find_bigons",
    "fixture_document",
    "FlatpackError",
    "make_chain_packing",
    "make_figure_configuration",
    "make_necklace",
    "make_octagon",
    "make_origami",
    "make_slitted_surface",
    "make_torus",
    "order_splitting_bigons",
    "parse_document",
    "QPoint",
    "Rat",
    "Segment",
    "serialize_document",
    "stratum",
    "torus_pair",
    "unfold_distance",
    "verify_configuration",
]

__version__ = "0.1.0"

"""Shared helpers for the experiment scripts."""
from boxlftj.query import normalize, parse
from boxlftj.relation_store import RelationCatalog, build_from_sorted

TRIANGLE = "T(x,y,z) <- E(x,y), E(x,z), E(y,z).\norder x,y,z."


def triangle_setup(edges):
    cat = RelationCatalog()
    cat.add("E", build_from_sorted(sorted(set(edges)), 2))
    return cat, normalize(parse(TRIANGLE, cat.arities()))

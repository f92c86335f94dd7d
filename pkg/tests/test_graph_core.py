import numpy as np
import pytest

from logicaltensor.errors import (IncompatibleUnion, SpecFileError,
                                  UniverseTooLarge, WellNamednessViolation)
from logicaltensor.graph_core import (EMPTY_GRAPH, Basis, System, Universe,
                                      enumerate_graphs, graph_union,
                                      make_graph, parse_token, support,
                                      try_union, universe_from_dict)
from logicaltensor.restrictions import by_vertex, fig5

from conftest import G


def test_parse_token_keeps_dotted_states():
    assert parse_token("w.u") == System("w", "u")
    assert parse_token("0.w.u") == System("0.w", "u")


@pytest.mark.parametrize("token", ["wu", ".u", "w."])
def test_parse_token_rejects_malformed(token):
    with pytest.raises(SpecFileError):
        parse_token(token)


def test_make_graph_is_canonical():
    g = make_graph([System("b", "v"), System("w", "u"), System("w", "u")])
    assert g.encode() == ("w.u", "b.v")
    assert g == G("b.v", "w.u")


def test_make_graph_rejects_two_states_on_one_vertex():
    with pytest.raises(WellNamednessViolation):
        make_graph([System("b", "u"), System("w", "u")])


def test_union():
    assert graph_union(G("w.u"), G("b.v")) == G("w.u", "b.v")
    assert graph_union(G("w.u"), G("w.u")) == G("w.u")
    assert try_union(G("w.u"), G("b.u")) is None
    with pytest.raises(IncompatibleUnion):
        graph_union(G("w.u"), G("b.u"))


def test_universe_is_sorted_and_deduplicated():
    u = Universe(("v", "u", "v"), ("w", "b"))
    assert u.vertices == ("u", "v")
    assert u.states == ("b", "w")
    assert u.graph_count == 9
    assert universe_from_dict(u.to_dict()) == u


@pytest.mark.parametrize("data", [{}, {"vertices": ["u"]}, {"vertices": ["a.b"], "states": ["w"]}])
def test_universe_from_bad_dict(data):
    with pytest.raises(SpecFileError):
        universe_from_dict(data)


def test_enumeration_starts_with_the_empty_graph(u2s2):
    graphs = enumerate_graphs(u2s2)
    assert len(graphs) == 9
    assert len(set(graphs)) == 9
    assert graphs[0] == EMPTY_GRAPH
    assert all(u2s2.contains(g) for g in graphs)


def test_enumeration_cap(u3s2):
    with pytest.raises(UniverseTooLarge):
        enumerate_graphs(u3s2, cap=26)
    with pytest.raises(UniverseTooLarge):
        Basis.of(u3s2, cap=10)


def test_basis_is_shared(u2s2):
    assert Basis.of(u2s2) is Basis.of(Universe(("u", "v"), ("b", "w")))


def test_position_of_foreign_graph(basis2):
    with pytest.raises(SpecFileError):
        basis2.position(G("w.x"))


def test_restriction_tables(basis2):
    t = basis2.tables(by_vertex("u"))
    g = basis2.index[G("w.u", "b.v")]
    assert basis2.graphs[t.part[g]] == G("w.u")
    assert basis2.graphs[t.rest[g]] == G("b.v")
    assert t.lookup(t.part[g], t.rest[g]) == g
    assert t.row(t.part[g])[t.rest[g]] == g
    assert t.column(t.rest[g])[t.part[g]] == g
    # ζ_u has ∅, b.u and w.u as its range
    assert len(t.range_indices) == 3


def test_tables_are_cached_per_restriction(basis2):
    chi = fig5()
    assert basis2.tables(chi) is basis2.tables(chi)


def test_lookup_marks_non_reconstituting_pairs(basis2):
    t = basis2.tables(fig5())
    # {b.u, w.v} restricts to {w.v}, so ({b.u}, {w.v}) is not a (part, rest) pair
    p = basis2.index[G("b.u")]
    r = basis2.index[G("w.v")]
    assert t.lookup(p, r) == -1
    assert t.row(p)[r] == -1
    assert len(t.cells) == basis2.dim
    assert np.count_nonzero(t.recon) == basis2.dim


def test_union_pairs(basis2):
    left, right, target = basis2.union_pairs()
    i, j = basis2.index[G("w.u")], basis2.index[G("b.v")]
    hit = (left == i) & (right == j)
    assert basis2.graphs[target[hit][0]] == G("w.u", "b.v")
    assert basis2.union_index(i, j) == target[hit][0]
    assert basis2.union_index(i, basis2.index[G("b.u")]) == -1
    assert not np.any((left == i) & (right == basis2.index[G("b.u")]))


def test_support():
    assert support(G("w.u", "b.v")) == frozenset({"u", "v"})
    assert support(EMPTY_GRAPH) == frozenset()

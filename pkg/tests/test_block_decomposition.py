import numpy as np
import pytest

from logicaltensor.block_decomposition import (block_decompose,
                                               causal_extension_check,
                                               causal_monotonicity_check,
                                               dense_toggle, extend_universe,
                                               tau_v, toggle_unitary,
                                               unitary_extension, xi_v)
from logicaltensor.dynamics_examples import (LineConfig, build_C, build_M,
                                             build_swap)
from logicaltensor.errors import (LogicalTensorError, NotNamePreserving,
                                  PrerequisiteViolation, UniverseTooLarge)
from logicaltensor.graph_core import EMPTY_GRAPH, Basis
from logicaltensor.locality_causality import is_local
from logicaltensor.restrictions import by_state, by_vertex, validate_restriction
from logicaltensor.state_algebra import (OperatorMatrix, identity, outer,
                                         scale, to_dense)

from conftest import G


def _neighbourhoods(line):
    return {v: line.neighborhood(v) for v in line.vertices}


def test_extended_universe(u2s2):
    eu = extend_universe(u2s2)
    assert eu.extended.states == ("0.b", "0.w", "1.b", "1.w")
    assert eu.embed(G("w.u", "b.v")) == G("0.w.u", "0.b.v")
    assert eu.strip(G("1.w.u")) == G("w.u")
    assert eu.unembed(G("0.w.u")) == G("w.u")
    with pytest.raises(LogicalTensorError):
        eu.unembed(G("1.w.u"))
    assert len(eu.sector_indices()) == u2s2.graph_count


def test_extended_universe_cap(u2s2):
    with pytest.raises(UniverseTooLarge):
        extend_universe(u2s2, cap=u2s2.graph_count)


def test_toggle_is_an_involution(u2s2):
    eu = extend_universe(u2s2)
    t = dense_toggle(eu)
    assert np.allclose(t @ t, np.eye(t.shape[0]))
    assert toggle_unitary(eu)[(G("1.w.u", "0.b.v"), G("0.w.u", "1.b.v"))] == 1.0


def test_single_vertex_toggles(u2s2):
    eu = extend_universe(u2s2)
    basis = Basis.of(eu.extended)
    tu = to_dense(tau_v(eu, "u"), basis)
    tv = to_dense(tau_v(eu, "v"), basis)
    assert np.allclose(tu @ tv, tv @ tu)
    assert np.allclose(tu @ tv, dense_toggle(eu))
    assert tau_v(eu, "u")[(G("1.w.u", "0.b.v"), G("0.w.u", "0.b.v"))] == 1.0
    assert is_local(tu, eu.lift_restriction(by_vertex("u")), eu.extended).strict


def test_xi_is_a_restriction(line2):
    eu = extend_universe(line2.universe)
    v = line2.vertices[0]
    xi = xi_v(eu.mu, eu.lift_restriction(line2.neighborhood(v)),
              eu.lift_restriction(line2.site(v)), eu.extended)
    assert validate_restriction(xi, eu.extended).passed
    # flag-0 systems follow χ_v, flag-1 systems follow ζ_v
    g = G("0.right.v1", "1.left.v2")
    assert xi(g) == G("0.right.v1")


@pytest.mark.parametrize("make", [
    lambda line: identity(line.universe),
    build_M,
    lambda line: build_C(line, np.pi / 4),
])
def test_decomposition_reproduces_the_operator(line2, make):
    u = make(line2)
    decomposition = block_decompose(u, _neighbourhoods(line2), None, line2.universe)
    report = decomposition.report
    assert report.passed()
    assert report.witness is None
    assert report.reconstruction_deviation <= 1e-10
    assert report.order_deviation <= 1e-10
    assert all(report.tau_strict.values()) and all(report.k_strict.values())
    assert set(decomposition.tau_gates) == set(line2.vertices)
    assert set(decomposition.k_gates) == set(line2.vertices)


def test_product_of_gates_acts_as_u_on_the_sector(line2):
    u = build_M(line2)
    decomposition = block_decompose(u, _neighbourhoods(line2), None, line2.universe)
    eu = decomposition.extended
    sector = eu.sector_indices()
    product = decomposition.product(list(reversed(line2.vertices)))
    expected = to_dense(u, Basis.of(line2.universe))
    assert np.allclose(product[np.ix_(sector, sector)], expected)


def _mc(line):
    basis = Basis.of(line.universe)
    return to_dense(build_M(line), basis) @ to_dense(build_C(line, np.pi / 4), basis)


@pytest.mark.parametrize("make", [build_M, _mc], ids=["M", "MC"])
def test_decomposition_on_three_vertices(line3, make):
    decomposition = block_decompose(make(line3), _neighbourhoods(line3), None, line3.universe)
    assert decomposition.u_ext.shape == (729, 729)
    report = decomposition.report
    assert report.passed()
    assert report.reconstruction_deviation <= 1e-10
    assert report.tau_product_deviation <= 1e-10
    assert report.tau_commutator <= 1e-10
    assert report.k_commutator <= 1e-10
    assert all(report.tau_strict.values()) and all(report.k_strict.values())
    assert set(report.k_strict) == set(line3.vertices)


def test_decomposition_refuses_a_four_vertex_line():
    line = LineConfig(4)
    with pytest.raises(UniverseTooLarge, match="6561"):
        block_decompose(identity(line.universe), _neighbourhoods(line), None, line.universe)


def test_end_swap_is_rejected(line3):
    with pytest.raises(PrerequisiteViolation) as info:
        block_decompose(build_swap(line3), _neighbourhoods(line3), None, line3.universe)
    assert any("causal" in f for f in info.value.failures)


def test_global_phase_on_the_empty_graph_is_rejected(line2):
    u = scale(identity(line2.universe), -1.0)
    with pytest.raises(PrerequisiteViolation, match="empty graph"):
        block_decompose(u, _neighbourhoods(line2), None, line2.universe)


def test_support_changing_unitary_is_rejected(u2s2):
    swap_vacuum = {(g, g): 1.0 for g in Basis.of(u2s2).graphs
                   if g not in (EMPTY_GRAPH, G("w.u"))}
    swap_vacuum[(EMPTY_GRAPH, G("w.u"))] = 1.0
    swap_vacuum[(G("w.u"), EMPTY_GRAPH)] = 1.0
    chis = {v: by_vertex(v) for v in u2s2.vertices}
    with pytest.raises(PrerequisiteViolation, match="name-preserving"):
        block_decompose(OperatorMatrix(swap_vacuum), chis, None, u2s2)


def test_unitary_extension_needs_name_preservation(u2s2):
    mixing = identity(u2s2)
    entries = dict(mixing.entries)
    del entries[(EMPTY_GRAPH, EMPTY_GRAPH)]
    del entries[(G("b.u"), G("b.u"))]
    entries[(EMPTY_GRAPH, G("b.u"))] = 1.0
    entries[(G("b.u"), EMPTY_GRAPH)] = 1.0
    with pytest.raises(NotNamePreserving):
        unitary_extension(OperatorMatrix(entries), by_state("b"), u2s2)


def test_extension_is_causal(line2):
    u = build_M(line2)
    chis = _neighbourhoods(line2)
    decomposition = block_decompose(u, chis, None, line2.universe)
    eu = decomposition.extended
    for v in line2.vertices:
        assert causal_extension_check(decomposition.u_ext, decomposition.xi_restrictions[v],
                                      line2.site(v), eu, u, chis[v])


def test_causal_monotonicity(line3):
    u = build_M(line3)
    v = line3.vertices[0]
    assert causal_monotonicity_check(u, line3.neighborhood(v), line3.neighborhood(v, 2),
                                     line3.site(v), line3.site(v), line3.universe)
    with pytest.raises(PrerequisiteViolation):
        causal_monotonicity_check(u, line3.neighborhood(v, 2), line3.neighborhood(v),
                                  line3.site(v), line3.site(v), line3.universe)


def test_rank_one_is_not_unitary(u2s2):
    with pytest.raises(PrerequisiteViolation, match="not unitary"):
        block_decompose(outer(G("w.u"), G("b.u")), {v: by_vertex(v) for v in u2s2.vertices},
                        None, u2s2)

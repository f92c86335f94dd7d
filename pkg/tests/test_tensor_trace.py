import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logicaltensor.errors import NotNormalized
from logicaltensor.graph_core import EMPTY_GRAPH, Basis, Universe
from logicaltensor.restrictions import (by_vertex, by_vertices, empty, fig5,
                                        full)
from logicaltensor.state_algebra import (Ket, OperatorMatrix, basis_ket,
                                         from_dense, full_trace, outer,
                                         to_dense)
from logicaltensor.tensor_trace import (DEFAULT_KERNELS, TraceChannelSpec,
                                        channel_is_trace_preserving,
                                        channel_kraus_operators,
                                        dense_lifted_channel,
                                        dense_tensor_ops, entanglement_entropy,
                                        is_consistency_preserving,
                                        is_consistent_kets, is_consistent_ops,
                                        lifted_trace_channel, reconstitute,
                                        tensor_kets, tensor_ops, traceout)
from logicaltensor.utils.parse_spec_files import load_ket, load_restriction

from conftest import G, random_density


def test_traceout_of_a_basis_projector():
    rho = outer(G("w.u", "b.v"), G("w.u", "b.v"))
    assert traceout(rho, by_vertex("u")).entries == {(G("w.u"), G("w.u")): 1.0}


def test_traceout_kills_coherence_between_different_rests():
    rho = outer(G("w.u", "b.v"), G("b.u", "w.v"))
    assert len(traceout(rho, by_vertex("u"))) == 0
    rho = outer(G("w.u", "b.v"), G("b.u", "b.v"))
    assert traceout(rho, by_vertex("u")).entries == {(G("w.u"), G("b.u")): 1.0}


def test_empty_restriction_gives_the_trace(basis2):
    rho = from_dense(random_density(np.random.default_rng(0), basis2.dim), basis2)
    out = traceout(rho, empty())
    assert list(out.entries) == [(EMPTY_GRAPH, EMPTY_GRAPH)]
    assert out[(EMPTY_GRAPH, EMPTY_GRAPH)] == pytest.approx(1.0)


def test_full_restriction_is_the_identity_map(basis2):
    rho = from_dense(random_density(np.random.default_rng(1), basis2.dim), basis2)
    assert np.allclose(to_dense(traceout(rho, full()), basis2), to_dense(rho, basis2))


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_traceout_preserves_trace_and_matches_dense(seed):
    basis2 = Basis.of(Universe(("u", "v"), ("b", "w")))
    rng = np.random.default_rng(seed)
    dense = random_density(rng, basis2.dim)
    rho = from_dense(dense, basis2)
    for chi in (by_vertex("u"), fig5()):
        reduced = traceout(rho, chi)
        assert full_trace(reduced) == pytest.approx(1.0)
        expected = DEFAULT_KERNELS.traceout(dense, basis2.tables(chi))
        assert np.allclose(to_dense(reduced, basis2), expected)


def test_reconstitute():
    chi = fig5()
    assert reconstitute(G("w.u"), G("b.v"), chi) == G("w.u", "b.v")
    assert reconstitute(G("b.u"), G("w.v"), chi) is None
    assert reconstitute(G("w.u"), G("b.u"), chi) is None


def test_tensor_of_kets():
    chi = by_vertex("u")
    phi = Ket({G("w.u"): 1.0, G("b.u"): 1.0})
    psi = basis_ket(G("b.v"))
    assert tensor_kets(phi, psi, chi).amplitudes == {G("w.u", "b.v"): 1.0,
                                                      G("b.u", "b.v"): 1.0}
    assert is_consistent_kets(phi, psi, chi)


def test_tensor_is_zero_when_nothing_reconstitutes():
    phi = basis_ket(G("w.v"))
    psi = basis_ket(G("b.u"))
    assert tensor_kets(phi, psi, by_vertex("u")).is_zero()
    assert not is_consistent_kets(phi, psi, by_vertex("u"))


def test_tensor_of_operators_matches_dense(basis2):
    rng = np.random.default_rng(5)
    chi = by_vertex("u")
    a = rng.standard_normal((9, 9))
    b = rng.standard_normal((9, 9))
    t = basis2.tables(chi)
    # keep only entries within the range of χ and of its complement
    rng_part = np.zeros(9, dtype=bool)
    rng_part[t.range_indices] = True
    rng_rest = np.zeros(9, dtype=bool)
    rng_rest[np.unique(t.rest)] = True
    a = np.where(np.outer(rng_part, rng_part), a, 0.0)
    b = np.where(np.outer(rng_rest, rng_rest), b, 0.0)
    sparse = tensor_ops(from_dense(a, basis2), from_dense(b, basis2), chi)
    assert np.allclose(to_dense(sparse, basis2), dense_tensor_ops(a, b, t))


def test_traceout_undoes_the_tensor():
    chi = by_vertex("u")
    a = outer(G("w.u"), G("b.u"))
    b = outer(G("b.v"), G("b.v"))
    assert traceout(tensor_ops(a, b, chi), chi).entries == a.entries


def test_entropy(data_dir, u2s2):
    bell, _ = load_ket(data_dir / "bell-like.json")
    product, _ = load_ket(data_dir / "product.json")
    zeta_u = load_restriction(data_dir / "zeta_u.json", u2s2)
    assert entanglement_entropy(bell, zeta_u) == pytest.approx(1.0)
    assert entanglement_entropy(product, zeta_u) == pytest.approx(0.0, abs=1e-9)
    # the same ket is entangled across the fig5 cut
    assert entanglement_entropy(product, fig5()) == pytest.approx(1.0)


def test_entropy_of_a_pure_basis_state_is_zero():
    assert entanglement_entropy(basis_ket(G("w.u")), by_vertex("u")) == 0.0


def test_entropy_rejects_unnormalised_kets():
    with pytest.raises(NotNormalized):
        entanglement_entropy(Ket({G("w.u"): 2.0}), by_vertex("u"))


def test_lifted_channel_without_outer_is_the_traceout(basis2):
    rho = from_dense(random_density(np.random.default_rng(2), 9), basis2)
    spec = TraceChannelSpec(by_vertex("u"))
    assert lifted_trace_channel(rho, spec).entries.keys() == traceout(rho, by_vertex("u")).entries.keys()


def test_lifted_channel_kraus_form(u3s2):
    basis = Basis.of(u3s2)
    spec = TraceChannelSpec(by_vertex("u"), by_vertices(["u", "v"]))
    assert channel_is_trace_preserving(spec, u3s2)
    kraus = channel_kraus_operators(spec, basis)
    total = sum(k.conj().T @ k for k in kraus)
    assert np.allclose(total, np.eye(basis.dim))

    dense = random_density(np.random.default_rng(4), basis.dim)
    sparse = lifted_trace_channel(from_dense(dense, basis), spec)
    assert np.allclose(to_dense(sparse, basis), dense_lifted_channel(dense, spec, basis))


def test_lifted_channel_that_loses_trace(u2s2):
    # {w.u, b.v}: the fig5 part {w.u} restricted to v is ∅, and ∅ ⊗fig5 {b.v} is zero
    spec = TraceChannelSpec(by_vertex("v"), fig5())
    assert not channel_is_trace_preserving(spec, u2s2)


def test_consistency_preservation(u2s2):
    zeta_u = by_vertex("u")
    flip_u = OperatorMatrix({(G("b.u"), G("w.u")): 1.0, (G("w.u"), G("b.u")): 1.0,
                             (EMPTY_GRAPH, EMPTY_GRAPH): 1.0})
    assert is_consistency_preserving(flip_u, zeta_u, u2s2)
    moves = outer(G("w.v"), G("w.u"))
    assert not is_consistency_preserving(moves, zeta_u, u2s2)


def test_consistent_operators():
    chi = by_vertex("u")
    rho = outer(G("w.u"), G("b.u"))
    assert is_consistent_ops(rho, outer(G("b.v"), G("w.v")), chi)
    assert not is_consistent_ops(rho, outer(G("b.v"), G("w.u")), chi)

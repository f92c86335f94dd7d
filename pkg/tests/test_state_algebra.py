import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logicaltensor.config import ZERO_TOL
from logicaltensor.errors import SpecFileError
from logicaltensor.graph_core import Basis, Universe
from logicaltensor.state_algebra import (Ket, OperatorMatrix, add, adjoint,
                                         apply, basis_ket, compose,
                                         from_dense, full_trace, identity,
                                         inner_product, is_name_preserving,
                                         is_unitary, ket_from_dense,
                                         ket_outer, ket_to_dense,
                                         max_entry_distance, outer,
                                         to_dense, to_records)

from conftest import G


def test_tiny_amplitudes_are_dropped():
    psi = Ket({G("w.u"): 1.0, G("b.u"): ZERO_TOL / 2})
    assert len(psi) == 1
    assert psi[G("b.u")] == 0j


def test_outer_and_apply():
    a = outer(G("b.u"), G("w.u"))
    assert apply(a, basis_ket(G("w.u"))).amplitudes == {G("b.u"): 1.0}
    assert apply(a, basis_ket(G("b.u"))).is_zero()


def test_compose_is_matrix_product(basis2):
    rng = np.random.default_rng(3)
    x = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    y = rng.standard_normal((9, 9))
    a, b = from_dense(x, basis2), from_dense(y, basis2)
    assert np.allclose(to_dense(compose(a, b), basis2), x @ y)
    assert np.allclose(to_dense(adjoint(a), basis2), x.conj().T)
    assert np.allclose(to_dense(add(a, b), basis2), x + y)


def test_inner_product_is_conjugate_linear_on_the_left():
    phi = Ket({G("w.u"): 1j})
    psi = Ket({G("w.u"): 1.0, G("b.u"): 2.0})
    assert inner_product(phi, psi) == -1j
    assert inner_product(psi, phi) == 1j


def test_trace_of_projector():
    psi = Ket({G("w.u"): 0.6, G("b.v"): 0.8j})
    assert full_trace(ket_outer(psi, psi)) == pytest.approx(1.0)


def test_identity_is_unitary(u2s2):
    assert is_unitary(identity(u2s2), u2s2)
    assert not is_unitary(outer(G("b.u"), G("w.u")), u2s2)


def test_name_preservation():
    assert is_name_preserving(outer(G("b.u"), G("w.u")))
    assert not is_name_preserving(outer(G("b.u"), G("w.v")))


def test_dense_of_foreign_graph(basis2):
    with pytest.raises(SpecFileError):
        to_dense(outer(G("w.x"), G("w.x")), basis2)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_apply_matches_the_dense_product(seed):
    basis = Basis.of(Universe(("u", "v"), ("b", "w")))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    out = apply(from_dense(x, basis), ket_from_dense(v, basis))
    assert np.allclose(ket_to_dense(out, basis), x @ v)


def test_records_are_sorted():
    a = OperatorMatrix({(G("w.u"), G("b.u")): 1.0, (G("b.u"), G("w.u")): 2.0})
    records = to_records(a)
    assert [r["bra"] for r in records] == [["b.u"], ["w.u"]]
    assert max_entry_distance(a, a) == 0.0

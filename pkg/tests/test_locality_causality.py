import numpy as np
import pytest

from logicaltensor.dynamics_examples import build_C, build_flip, build_M, build_swap
from logicaltensor.errors import NotUnitary, PrerequisiteViolation
from logicaltensor.graph_core import EMPTY_GRAPH
from logicaltensor.locality_causality import (causal_compose_check, is_causal,
                                              is_local, is_strictly_local,
                                              localize, tomography_equal,
                                              tomography_operators,
                                              tomography_witness)
from logicaltensor.restrictions import by_vertex, fig5, full
from logicaltensor.state_algebra import Ket, OperatorMatrix, identity, ket_outer
from logicaltensor.utils.parse_spec_files import load_operator

from conftest import G


def test_flip_is_fig5_local_but_not_strictly(data_dir, u2s2):
    flip, universe = load_operator(data_dir / "flip.json")
    assert universe == u2s2
    assert flip.entries == build_flip(u2s2).entries
    verdict = is_local(flip, fig5(), u2s2)
    assert verdict.local
    assert verdict.operational and verdict.heisenberg
    assert not verdict.strict
    assert str(verdict) == "local: yes, strict: no"


def test_flip_is_not_local_on_one_vertex(u2s2):
    verdict = is_local(build_flip(u2s2), by_vertex("u"), u2s2)
    assert not verdict.local
    assert verdict.counterexample is not None
    assert verdict.max_deviation == pytest.approx(1.0)


def test_localized_operators_are_local(u2s2):
    b = OperatorMatrix({(G("b.u"), G("w.u")): 1.0, (G("w.u"), G("b.u")): 1.0,
                        (EMPTY_GRAPH, EMPTY_GRAPH): 1.0})
    a = localize(b, by_vertex("u"), u2s2)
    verdict = is_local(a, by_vertex("u"), u2s2)
    assert verdict.local and verdict.strict
    assert is_strictly_local(a, by_vertex("u"), u2s2)


def test_identity_is_strictly_local_everywhere(u2s2):
    for chi in (by_vertex("u"), fig5(), full()):
        assert is_local(identity(u2s2), chi, u2s2).strict


@pytest.mark.parametrize("make", [build_M, lambda line: build_C(line, np.pi / 4)])
def test_line_dynamics_is_neighbourhood_causal(line3, make):
    u = make(line3)
    for v in line3.vertices:
        verdict = is_causal(u, line3.neighborhood(v), line3.site(v), line3.universe)
        assert verdict.causal
        assert verdict.dual and verdict.dual_name_preserving
        assert verdict.strict_transfer
        assert str(verdict) == "causal: yes"


def test_end_swap_is_not_causal(line3):
    v1 = line3.vertices[0]
    verdict = is_causal(build_swap(line3), line3.neighborhood(v1), line3.site(v1),
                        line3.universe)
    assert not verdict.causal
    assert not verdict.dual
    assert verdict.strict_transfer is None
    assert verdict.counterexample is not None


def test_causality_needs_a_unitary(u2s2):
    with pytest.raises(NotUnitary):
        is_causal(build_flip(u2s2), fig5(), fig5(), u2s2)


def test_causal_composition(line3):
    v = line3.vertices[1]
    chi, zeta = line3.neighborhood(v), line3.site(v)
    m = build_M(line3)
    assert causal_compose_check(m, identity(line3.universe), chi, zeta, zeta, line3.universe)


def test_causal_composition_prerequisites(line3):
    v1 = line3.vertices[0]
    chi, zeta = line3.neighborhood(v1), line3.site(v1)
    with pytest.raises(PrerequisiteViolation) as info:
        causal_compose_check(build_swap(line3), build_M(line3), chi, zeta, zeta, line3.universe)
    assert len(info.value.failures) == 2


def test_tomography_family_size(u2s2):
    ops = tomography_operators(by_vertex("u"), u2s2)
    # three range graphs ∅, b.u, w.u
    assert len(ops) == 9
    assert len(tomography_operators(by_vertex("u"), u2s2, name_preserving_only=True)) == 5
    for _, _, e in ops:
        assert is_local(e, by_vertex("u"), u2s2).local


def test_tomography_misses_remote_coherence(u2s2):
    psi = Ket({G("w.u", "b.v"): 2 ** -0.5, G("w.u", "w.v"): 2 ** -0.5})
    pure = ket_outer(psi, psi)
    mixed = OperatorMatrix({(G("w.u", "b.v"), G("w.u", "b.v")): 0.5,
                            (G("w.u", "w.v"), G("w.u", "w.v")): 0.5})
    assert tomography_equal(pure, mixed, by_vertex("u"), u2s2)
    assert tomography_witness(pure, mixed, by_vertex("v"), u2s2) is not None


def test_name_preserving_tomography_is_blind_to_vacuum_coherence(u2s2):
    psi = Ket({EMPTY_GRAPH: 2 ** -0.5, G("w.u"): 2 ** -0.5})
    pure = ket_outer(psi, psi)
    mixed = OperatorMatrix({(EMPTY_GRAPH, EMPTY_GRAPH): 0.5, (G("w.u"), G("w.u")): 0.5})
    zeta_u = by_vertex("u")
    assert not tomography_equal(pure, mixed, zeta_u, u2s2)
    assert tomography_equal(pure, mixed, zeta_u, u2s2, name_preserving_only=True)

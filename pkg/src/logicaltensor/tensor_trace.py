'''
Generalised traceout ρ|χ and tensor ⊗χ.

The sparse functions act on :class:`OperatorMatrix` and :class:`Ket` values
and follow the basis rules literally:

    (|G⟩⟨H|)|χ = |G_χ⟩⟨H_χ| ⟨H_χ̄|G_χ̄⟩
    |H⟩ ⊗χ |H'⟩ = |G⟩ if H = G_χ and H' = G_χ̄ for some G, 0 otherwise

The dense kernels do the same on numpy arrays indexed by an enumerated
basis, through the part/rest tables of the restriction. They are gathered in
a :class:`Kernels` value so that the verification suites can swap them.
'''
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import EQ_TOL, UNIVERSE_CAP
from .errors import NotNormalized
from .graph_core import Basis, Graph, RestrictionTables, Universe, try_union
from .restrictions import Restriction
from .state_algebra import (Ket, OperatorMatrix, Role, graphs_of, ket_outer,
                            to_dense)

logger = logging.getLogger(__name__)


def reconstitute(h: Graph, h_rest: Graph, chi: Restriction) -> Optional[Graph]:
    '''
    The graph G with G_χ = ``h`` and G_χ̄ = ``h_rest``, or ``None``.

    Any such G equals h ∪ h_rest, so the union is formed and both
    equations are checked on it.
    '''
    g = try_union(h, h_rest)
    if g is None:
        return None
    part = chi.restrict(g)
    if part != h or g.difference(part) != h_rest:
        return None
    return g


def traceout(rho: OperatorMatrix, chi: Restriction) -> OperatorMatrix:
    '''
    ρ|χ, the linear extension of (|G⟩⟨H|)|χ = |G_χ⟩⟨H_χ| ⟨H_χ̄|G_χ̄⟩.

    With the empty restriction the result is Tr(ρ) stored on (∅, ∅).
    '''
    out: Dict[Tuple[Graph, Graph], complex] = defaultdict(complex)
    for (g, h), x in rho.entries.items():
        g_part, h_part = chi.restrict(g), chi.restrict(h)
        if g.difference(g_part) == h.difference(h_part):
            out[(g_part, h_part)] += x
    return OperatorMatrix(out, Role.TRACE_CLASS)


def tensor_kets(phi: Ket, psi: Ket, chi: Restriction) -> Ket:
    '''φ ⊗χ ψ, bilinear in both arguments; the zero ket when nothing reconstitutes.'''
    out: Dict[Graph, complex] = defaultdict(complex)
    for h, x in phi.items():
        for h_rest, y in psi.items():
            g = reconstitute(h, h_rest, chi)
            if g is not None:
                out[g] += x * y
    return Ket(out)


def tensor_ops(a: OperatorMatrix, b: OperatorMatrix, chi: Restriction) -> OperatorMatrix:
    '''
    A ⊗χ B from the rank-one rule
    |G⟩⟨H| ⊗χ |G'⟩⟨H'| = (|G⟩ ⊗χ |G'⟩)(⟨H| ⊗χ ⟨H'|).
    '''
    out: Dict[Tuple[Graph, Graph], complex] = defaultdict(complex)
    for (g, h), x in a.entries.items():
        for (g2, h2), y in b.entries.items():
            ket = reconstitute(g, g2, chi)
            if ket is None:
                continue
            bra = reconstitute(h, h2, chi)
            if bra is not None:
                out[(ket, bra)] += x * y
    return OperatorMatrix(out, a.role)


@dataclass(frozen=True, eq=False)
class TraceChannelSpec:
    '''The map ρ ↦ ((.)|χ ⊗ζ I)(ρ); without ``outer`` it is plain ρ|χ.'''
    inner: Restriction
    outer: Optional[Restriction] = None


def _channel_targets(g: Graph, spec: TraceChannelSpec) -> Tuple[Optional[Graph], Graph]:
    # (|G_ζχ⟩ ⊗ζ |G_ζ̄⟩, G_ζχ̄) for one basis graph
    if spec.outer is None:
        g_part = spec.inner.restrict(g)
        return g_part, g.difference(g_part)
    g_zeta = spec.outer.restrict(g)
    g_zeta_chi = spec.inner.restrict(g_zeta)
    target = reconstitute(g_zeta_chi, g.difference(g_zeta), spec.outer)
    return target, g_zeta.difference(g_zeta_chi)


def lifted_trace_channel(rho: OperatorMatrix, spec: TraceChannelSpec) -> OperatorMatrix:
    '''
    Linear extension of
    ((.)|χ ⊗ζ I)|G⟩⟨H| = |G_ζχ⟩⟨H_ζχ| ⟨H_ζχ̄|G_ζχ̄⟩ ⊗ζ |G_ζ̄⟩⟨H_ζ̄|.
    '''
    out: Dict[Tuple[Graph, Graph], complex] = defaultdict(complex)
    memo: Dict[Graph, Tuple[Optional[Graph], Graph]] = {}
    for (g, h), x in rho.entries.items():
        for k in (g, h):
            if k not in memo:
                memo[k] = _channel_targets(k, spec)
        tg, th = memo[g], memo[h]
        if tg[0] is None or th[0] is None or tg[1] != th[1]:
            continue
        out[(tg[0], th[0])] += x
    return OperatorMatrix(out, Role.TRACE_CLASS)


def channel_kraus_operators(spec: TraceChannelSpec, basis: Basis) -> List[np.ndarray]:
    '''
    Kraus operators K_c = Σ_{G : G_ζχ̄ = c} |G_ζχ ∪ G_ζ̄⟩⟨G| of the lifted channel,
    one per class c; the channel is ρ ↦ Σ_c K_c ρ K_c†.
    '''
    groups: Dict[Graph, List[Tuple[int, int]]] = defaultdict(list)
    for j, g in enumerate(basis.graphs):
        target, cls = _channel_targets(g, spec)
        if target is not None:
            groups[cls].append((basis.index[target], j))
    ops = []
    for cls in sorted(groups, key=lambda c: basis.index[c]):
        k = np.zeros((basis.dim, basis.dim), dtype=complex)
        rows, cols = zip(*groups[cls])
        k[list(rows), list(cols)] = 1.0
        ops.append(k)
    return ops


def channel_is_trace_preserving(spec: TraceChannelSpec, universe: Universe,
                                cap: int = UNIVERSE_CAP) -> bool:
    '''True iff |G_ζχ⟩ ⊗ζ |G_ζ̄⟩ ≠ 0 for every basis graph G.'''
    return all(_channel_targets(g, spec)[0] is not None
               for g in Basis.of(universe, cap).graphs)


def is_consistent_kets(phi: Ket, psi: Ket, chi: Restriction) -> bool:
    '''⟨G|φ⟩⟨G'|ψ⟩ ≠ 0 implies |G⟩ ⊗χ |G'⟩ ≠ 0.'''
    return all(reconstitute(g, g2, chi) is not None
               for g in phi.amplitudes for g2 in psi.amplitudes)


def is_consistent_ops(rho: OperatorMatrix, sigma: OperatorMatrix, chi: Restriction) -> bool:
    '''ρ_{GH} σ_{G'H'} ≠ 0 implies |G⟩ ⊗χ |G'⟩ ≠ 0 ≠ |H⟩ ⊗χ |H'⟩.'''
    for (g, h) in rho.entries:
        for (g2, h2) in sigma.entries:
            if reconstitute(g, g2, chi) is None or reconstitute(h, h2, chi) is None:
                return False
    return True


def is_consistency_preserving(a: OperatorMatrix, chi: Restriction, universe: Universe,
                              tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> bool:
    '''
    ⟨H|A|G_χ⟩ ≠ 0 entails |H⟩ ⊗χ |G_χ̄⟩ ≠ 0, and the same for A†, for every G.
    '''
    basis = Basis.of(universe, cap)
    return dense_consistency_preserving(to_dense(a, basis), basis.tables(chi), tol)


def dense_consistency_preserving(a: np.ndarray, tables: RestrictionTables,
                                 tol: float = EQ_TOL) -> bool:
    # column G of a[:, part] is A|G_χ⟩; recon[:, rest] tells which H reconstitute with G_χ̄
    allowed = tables.recon[:, tables.rest]
    for m in (a, a.conj().T):
        if np.any((np.abs(m[:, tables.part]) > tol) & ~allowed):
            return False
    return True


def entanglement_entropy(psi: Ket, chi: Restriction, tol: float = EQ_TOL) -> float:
    '''
    Von Neumann entropy, in bits, of traceout(|ψ⟩⟨ψ|, χ).

    Raises
    ------
    NotNormalized
        If |‖ψ‖ − 1| > ``tol``.
    '''
    norm = psi.norm()
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f'ket has norm {norm:.12g}')
    reduced = traceout(ket_outer(psi, psi), chi)
    graphs = graphs_of(reduced.entries)
    if not graphs:
        return 0.0
    pos = {g: i for i, g in enumerate(graphs)}
    m = np.zeros((len(graphs), len(graphs)), dtype=complex)
    for (g, h), x in reduced.items():
        m[pos[g], pos[h]] = x
    eigvals = np.linalg.eigvalsh(m)
    eigvals = eigvals[eigvals > tol]
    entropy = float(-np.sum(eigvals * np.log2(eigvals)))
    # pure reduced states come out as ±1e-16
    return entropy if entropy > tol else 0.0


# Dense kernels over an enumerated basis.

def dense_overlap(tables: RestrictionTables) -> np.ndarray:
    '''``w[g, h] = ⟨H_χ̄|G_χ̄⟩`` for every pair of basis graphs.'''
    return (tables.rest[:, None] == tables.rest[None, :]).astype(float)


def dense_traceout(rho: np.ndarray, tables: RestrictionTables,
                   overlap: Callable[[RestrictionTables], np.ndarray] = dense_overlap) -> np.ndarray:
    '''ρ|χ with ρ indexed by the basis, weighted by ``overlap``.'''
    n = rho.shape[0]
    weights = overlap(tables)
    keep = weights != 0
    out = np.zeros((n, n), dtype=complex)
    rows = np.broadcast_to(tables.part[:, None], (n, n))
    cols = np.broadcast_to(tables.part[None, :], (n, n))
    np.add.at(out, (rows[keep], cols[keep]), (rho * weights)[keep])
    return out


def dense_tensor_kets(phi: np.ndarray, psi: np.ndarray, tables: RestrictionTables) -> np.ndarray:
    '''Coefficient of |G⟩ in φ ⊗χ ψ is φ(G_χ)ψ(G_χ̄).'''
    return phi[tables.part] * psi[tables.rest]


def dense_tensor_ops(a: np.ndarray, b: np.ndarray, tables: RestrictionTables) -> np.ndarray:
    '''A ⊗χ B = Σ_{G,H} A_{G_χ H_χ} B_{G_χ̄ H_χ̄} |G⟩⟨H|.'''
    part, rest = tables.part, tables.rest
    return a[np.ix_(part, part)] * b[np.ix_(rest, rest)]


@dataclass(frozen=True)
class Kernels:
    '''The dense traceout and tensor kernels the verification suites run on.'''
    overlap: Callable[[RestrictionTables], np.ndarray] = dense_overlap
    tensor_kets: Callable[[np.ndarray, np.ndarray, RestrictionTables], np.ndarray] = dense_tensor_kets
    tensor_ops: Callable[[np.ndarray, np.ndarray, RestrictionTables], np.ndarray] = dense_tensor_ops
    name: str = 'reference'

    def traceout(self, rho: np.ndarray, tables: RestrictionTables) -> np.ndarray:
        return dense_traceout(rho, tables, self.overlap)


DEFAULT_KERNELS = Kernels()


def dense_lifted_channel(rho: np.ndarray, spec: TraceChannelSpec, basis: Basis) -> np.ndarray:
    '''Dense ((.)|χ ⊗ζ I)(ρ) evaluated through its Kraus operators.'''
    out = np.zeros_like(rho, dtype=complex)
    for k in channel_kraus_operators(spec, basis):
        out += k @ rho @ k.conj().T
    return out

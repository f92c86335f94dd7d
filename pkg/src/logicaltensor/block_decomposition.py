'''
Block decomposition of a name-preserving causal unitary into commuting
strictly local gates.

The base states Σ are doubled into flagged states ``0.σ`` and ``1.σ``; the
base Hilbert space is identified with the span of all-flag-0 graphs (the
μ-sector). With U′ = U ⊗μ I, the toggle τ flipping every flag, τ_v = τ ⊗ζ_v I
and K_v = U′† τ_v U′, the product (∏ τ_v)(∏ K_v) acts as U on the μ-sector.
'''
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import DENSE_DIM_CAP, DEFAULT_SEED, EQ_TOL, UNIVERSE_CAP
from .errors import (InternalContractViolation, LogicalTensorError,
                     NotNamePreserving, NotPointwise, NotUnitaryOnRange,
                     PrerequisiteViolation, ReconstructionFailure,
                     UniverseTooLarge)
from .graph_core import Basis, Graph, System, Universe, make_graph
from .locality_causality import (Operand, _dense, dense_causality_verdict,
                                 dense_is_strictly_local, is_causal)
from .restrictions import (Restriction, by_vertex, commute, complement_then,
                           compose, comprehends, is_pointwise, mu,
                           union_restriction)
from .state_algebra import (OperatorMatrix, dense_is_name_preserving,
                            from_dense, to_dense, unitarity_deviation)
from .tensor_trace import dense_consistency_preserving, dense_tensor_ops

logger = logging.getLogger(__name__)


def flag_state(flag: int, state: str) -> str:
    return f'{flag}.{state}'


def split_flag(state: str) -> Tuple[int, str]:
    flag, _, base = state.partition('.')
    return int(flag), base


@dataclass(frozen=True, eq=False)
class ExtendedUniverse:
    '''
    A base universe and its flag-doubled copy with states {0,1} × Σ.

    Restrictions of the base universe are carried over with
    :meth:`lift_restriction`; the lifted objects are cached so that their
    index tables are computed once.
    '''
    base: Universe
    extended: Universe
    mu: Restriction = field(default_factory=mu)
    _lifted: Dict[Restriction, Restriction] = field(default_factory=dict, repr=False)

    def embed(self, graph: Graph) -> Graph:
        '''ι: every system gets flag 0.'''
        return make_graph(System(flag_state(0, s.state), s.vertex) for s in graph)

    def strip(self, graph: Graph) -> Graph:
        '''Drop the flags, whatever they are.'''
        return make_graph(System(split_flag(s.state)[1], s.vertex) for s in graph)

    def unembed(self, graph: Graph) -> Graph:
        if any(split_flag(s.state)[0] != 0 for s in graph):
            raise LogicalTensorError(f'{graph} lies outside the flag-0 sector')
        return self.strip(graph)

    def lift_restriction(self, chi: Restriction) -> Restriction:
        '''
        χ on extended graphs: the systems whose unflagged form χ selects
        from the unflagged graph.
        '''
        lifted = self._lifted.get(chi)
        if lifted is None:
            def select(g: Graph) -> Graph:
                keep = set(chi.restrict(self.strip(g)).systems)
                return g.select(lambda s: System(split_flag(s.state)[1], s.vertex) in keep)
            lifted = Restriction(select, chi.label, chi.pointwise_hint)
            self._lifted[chi] = lifted
        return lifted

    def sector_indices(self, cap: int = UNIVERSE_CAP) -> np.ndarray:
        '''Extended basis index of ι(G) for each base basis graph G, in base order.'''
        base, ext = Basis.of(self.base, cap), Basis.of(self.extended, cap)
        return np.array([ext.index[self.embed(g)] for g in base.graphs], dtype=np.intp)

    def embed_operator(self, a: OperatorMatrix) -> OperatorMatrix:
        return OperatorMatrix({(self.embed(g), self.embed(h)): x for (g, h), x in a.items()}, a.role)


def extend_universe(universe: Universe, cap: int = UNIVERSE_CAP) -> ExtendedUniverse:
    '''
    Raises
    ------
    UniverseTooLarge
        If the extended universe has more than ``cap`` graphs.
    '''
    states = tuple(flag_state(b, s) for b in (0, 1) for s in universe.states)
    extended = Universe(universe.vertices, states)
    if extended.graph_count > cap:
        raise UniverseTooLarge(f'extended universe has {extended.graph_count} graphs, cap is {cap}')
    return ExtendedUniverse(universe, extended)


def _toggle_graph(graph: Graph) -> Graph:
    return make_graph(System(flag_state(1 - f, s), sys.vertex)
                      for sys in graph for f, s in [split_flag(sys.state)])


def dense_toggle(eu: ExtendedUniverse, cap: int = UNIVERSE_CAP) -> np.ndarray:
    basis = Basis.of(eu.extended, cap)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, g in enumerate(basis.graphs):
        out[basis.index[_toggle_graph(g)], j] = 1.0
    return out


def toggle_unitary(eu: ExtendedUniverse, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''τ, flipping the flag of every system.'''
    basis = Basis.of(eu.extended, cap)
    return OperatorMatrix({(_toggle_graph(g), g): 1.0 for g in basis.graphs})


def dense_tau_v(eu: ExtendedUniverse, vertex: str, cap: int = UNIVERSE_CAP) -> np.ndarray:
    basis = Basis.of(eu.extended, cap)
    eye = np.eye(basis.dim, dtype=complex)
    return dense_tensor_ops(dense_toggle(eu, cap), eye, basis.tables(eu.lift_restriction(by_vertex(vertex))))


def tau_v(eu: ExtendedUniverse, vertex: str, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''τ_v = τ ⊗ζ_v I, flipping the flag on ``vertex`` only.'''
    return from_dense(dense_tau_v(eu, vertex, cap), Basis.of(eu.extended, cap))


def _check_extension_input(u: np.ndarray, mu_restriction: Restriction, universe: Universe,
                           tol: float, cap: int) -> None:
    basis = Basis.of(universe, cap)
    if not is_pointwise(mu_restriction, universe, cap):
        raise NotPointwise(f'{mu_restriction.label} is not pointwise')
    if not dense_is_name_preserving(u, basis, tol):
        raise NotNamePreserving('operator couples graphs of different supports')
    sector = basis.tables(mu_restriction).range_indices
    outside = np.ones(basis.dim, dtype=bool)
    outside[sector] = False
    leak = max(np.max(np.abs(u[outside, :]), initial=0.0), np.max(np.abs(u[:, outside]), initial=0.0))
    deviation = unitarity_deviation(u[np.ix_(sector, sector)])
    if leak > tol or deviation > tol:
        raise NotUnitaryOnRange(
            f'not a unitary over the range of {mu_restriction.label}: '
            f'leak {leak:.3e}, unitarity deviation {deviation:.3e}')


def dense_unitary_extension(u: np.ndarray, mu_restriction: Restriction, universe: Universe,
                            tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> np.ndarray:
    '''
    U′ = U ⊗μ I for U a name-preserving unitary over the range of μ.

    Raises
    ------
    NotPointwise, NotNamePreserving, NotUnitaryOnRange
        When the corresponding hypothesis fails.
    InternalContractViolation
        If U is not μ-consistency-preserving or U′ is not a unitary with
        U′† = U† ⊗μ I.
    '''
    _check_extension_input(u, mu_restriction, universe, tol, cap)
    basis = Basis.of(universe, cap)
    tables = basis.tables(mu_restriction)
    if not dense_consistency_preserving(u, tables, tol):
        raise InternalContractViolation('name-preserving operator over the range is not consistency-preserving')
    eye = np.eye(basis.dim, dtype=complex)
    extended = dense_tensor_ops(u, eye, tables)
    adjoint_gap = np.max(np.abs(extended.conj().T - dense_tensor_ops(u.conj().T, eye, tables)), initial=0.0)
    deviation = unitarity_deviation(extended)
    if deviation > tol or adjoint_gap > tol:
        raise InternalContractViolation(
            f'extension is off: unitarity {deviation:.3e}, adjoint {adjoint_gap:.3e}')
    return extended


def unitary_extension(uop: OperatorMatrix, mu_restriction: Restriction, universe: Universe,
                      tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''Sparse front end of :func:`dense_unitary_extension`.'''
    basis = Basis.of(universe, cap)
    return from_dense(dense_unitary_extension(to_dense(uop, basis), mu_restriction, universe, tol, cap), basis)


def xi_v(mu_restriction: Restriction, chi_v: Restriction, zeta_v: Restriction,
         universe: Optional[Universe] = None, cap: int = UNIVERSE_CAP) -> Restriction:
    '''
    ξ_v = μχ_v ∪ μ̄ζ_v, with μ̄ζ_v : G ↦ (G \\ G_μ)_ζ_v.

    Raises
    ------
    InternalContractViolation
        If ``universe`` is given and ξ_v fails the restriction axiom there.
    '''
    xi = union_restriction(compose(mu_restriction, chi_v),
                           complement_then(mu_restriction, zeta_v), universe, cap)
    return Restriction(xi.selector, f'xi[{chi_v.label}; {zeta_v.label}]', xi.pointwise_hint)


def causal_extension_check(u_ext: Operand, xi: Restriction, zeta: Restriction, eu: ExtendedUniverse,
                           base_op: Operand, chi: Restriction,
                           tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> bool:
    '''
    Decide whether the extension U′ is ξζ-causal, after confirming that μ is
    pointwise, that μ and ζ commute in all four ways, and that the base
    operator is a name-preserving χζ-causal unitary.

    ``zeta`` and ``chi`` are base restrictions; ``xi`` lives on the extended
    universe.

    Raises
    ------
    PrerequisiteViolation
        Listing every failed hypothesis.
    '''
    base_basis = Basis.of(eu.base, cap)
    base = _dense(base_op, base_basis)
    zeta_ext = eu.lift_restriction(zeta)
    failures = []
    if not is_pointwise(eu.mu, eu.extended, cap):
        failures.append('mu is not pointwise')
    if not commute(eu.mu, zeta_ext, eu.extended, cap).all:
        failures.append(f'mu and {zeta.label} do not commute')
    if not dense_is_name_preserving(base, base_basis, tol):
        failures.append('base operator is not name-preserving')
    if unitarity_deviation(base) > tol:
        failures.append('base operator is not unitary')
    elif not is_causal(base, chi, zeta, eu.base, tol, cap).primal:
        failures.append(f'base operator is not {chi.label}/{zeta.label}-causal')
    if failures:
        raise PrerequisiteViolation(failures)
    ext_basis = Basis.of(eu.extended, cap)
    verdict = dense_causality_verdict(_dense(u_ext, ext_basis), ext_basis.tables(xi),
                                      ext_basis.tables(zeta_ext), tol)
    return verdict.primal


def causal_monotonicity_check(uop: Operand, chi_prime: Restriction, chi: Restriction,
                              zeta: Restriction, zeta_prime: Restriction, universe: Universe,
                              tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> bool:
    '''
    With χ′ ⊑ χ, ζ ⊑ ζ′ and U χ′ζ′-causal, decide whether U is χζ-causal.

    Raises
    ------
    PrerequisiteViolation
        If a hypothesis fails.
    '''
    failures = []
    if not comprehends(chi_prime, chi, universe, cap):
        failures.append(f'{chi_prime.label} is not comprehended within {chi.label}')
    if not comprehends(zeta, zeta_prime, universe, cap):
        failures.append(f'{zeta.label} is not comprehended within {zeta_prime.label}')
    if not failures and not is_causal(uop, chi_prime, zeta_prime, universe, tol, cap).primal:
        failures.append(f'operator is not {chi_prime.label}/{zeta_prime.label}-causal')
    if failures:
        raise PrerequisiteViolation(failures)
    return is_causal(uop, chi, zeta, universe, tol, cap).primal


@dataclass(frozen=True)
class DecompositionReport:
    '''Deviations and verdicts gathered by :func:`verify_decomposition`.'''
    reconstruction_deviation: float
    witness: Optional[Graph]
    tau_product_deviation: float
    tau_commutator: float
    k_commutator: float
    order_deviation: float
    tau_strict: Mapping[str, bool]
    k_strict: Mapping[str, bool]

    def passed(self, tol: float = EQ_TOL) -> bool:
        return (max(self.reconstruction_deviation, self.tau_product_deviation,
                    self.tau_commutator, self.k_commutator, self.order_deviation) <= tol
                and all(self.tau_strict.values()) and all(self.k_strict.values()))


@dataclass
class BlockDecomposition:
    '''
    Gates of the decomposition, stored densely over the extended basis and
    keyed by vertex.
    '''
    extended: ExtendedUniverse
    vertices: Tuple[str, ...]
    tau_dense: Dict[str, np.ndarray]
    k_dense: Dict[str, np.ndarray]
    xi_restrictions: Dict[str, Restriction]
    zeta_restrictions: Dict[str, Restriction]
    u_ext: np.ndarray
    report: Optional[DecompositionReport] = None

    @property
    def basis(self) -> Basis:
        return Basis.of(self.extended.extended, self.u_ext.shape[0])

    @property
    def tau_gates(self) -> Dict[str, OperatorMatrix]:
        return {v: from_dense(m, self.basis) for v, m in self.tau_dense.items()}

    @property
    def k_gates(self) -> Dict[str, OperatorMatrix]:
        return {v: from_dense(m, self.basis) for v, m in self.k_dense.items()}

    def product(self, order: Optional[Sequence[str]] = None) -> np.ndarray:
        '''(∏ τ_v)(∏ K_v) with both products taken in ``order``.'''
        order = list(order or self.vertices)
        out = np.eye(self.u_ext.shape[0], dtype=complex)
        for v in order:
            out = out @ self.tau_dense[v]
        for v in order:
            out = out @ self.k_dense[v]
        return out


def _max_commutator(gates: List[np.ndarray]) -> float:
    worst = 0.0
    for i, a in enumerate(gates):
        for b in gates[i + 1:]:
            worst = max(worst, float(np.max(np.abs(a @ b - b @ a), initial=0.0)))
    return worst


def verify_decomposition(decomposition: BlockDecomposition, uop: Operand,
                         tol: float = EQ_TOL, seed: int = DEFAULT_SEED,
                         cap: int = UNIVERSE_CAP) -> DecompositionReport:
    '''
    Measure how well the gates reproduce ``uop`` on the μ-sector, how close
    ∏τ_v is to τ, the commutators within each family, the effect of a
    seeded reordering of the products, and the strict locality of each gate.
    '''
    eu = decomposition.extended
    base_basis = Basis.of(eu.base, cap)
    ext_basis = decomposition.basis
    u = _dense(uop, base_basis)
    sector = eu.sector_indices(cap)

    product = decomposition.product()
    target = np.zeros((ext_basis.dim, len(sector)), dtype=complex)
    target[sector, :] = u
    per_graph = np.max(np.abs(product[:, sector] - target), axis=0, initial=0.0)
    deviation = float(np.max(per_graph, initial=0.0))
    witness = base_basis.graphs[int(np.argmax(per_graph))] if deviation > tol else None

    taus = [decomposition.tau_dense[v] for v in decomposition.vertices]
    ks = [decomposition.k_dense[v] for v in decomposition.vertices]
    tau_product = np.eye(ext_basis.dim, dtype=complex)
    for t in taus:
        tau_product = tau_product @ t
    tau_dev = float(np.max(np.abs(tau_product - dense_toggle(eu, cap)), initial=0.0))

    rng = np.random.default_rng(seed)
    shuffled = list(rng.permutation(list(decomposition.vertices)))
    order_dev = float(np.max(np.abs(decomposition.product(shuffled) - product), initial=0.0))

    tau_strict = {v: dense_is_strictly_local(decomposition.tau_dense[v],
                                             ext_basis.tables(decomposition.zeta_restrictions[v]), tol)
                  for v in decomposition.vertices}
    k_strict = {v: dense_is_strictly_local(decomposition.k_dense[v],
                                           ext_basis.tables(decomposition.xi_restrictions[v]), tol)
                for v in decomposition.vertices}
    report = DecompositionReport(deviation, witness, tau_dev, _max_commutator(taus),
                                 _max_commutator(ks), order_dev, tau_strict, k_strict)
    logger.info('decomposition check: reconstruction %.3e, commutators %.3e / %.3e',
                deviation, report.tau_commutator, report.k_commutator)
    return report


def block_decompose(uop: Operand, chis: Mapping[str, Restriction],
                    zetas: Optional[Mapping[str, Restriction]], universe: Universe,
                    zeta_primes: Optional[Mapping[str, Restriction]] = None,
                    tol: float = EQ_TOL, seed: int = DEFAULT_SEED,
                    cap: int = UNIVERSE_CAP) -> BlockDecomposition:
    '''
    Decompose ``uop`` into toggles τ_v and kernels K_v = U′† τ_v U′.

    Parameters
    ----------
    uop : OperatorMatrix or np.ndarray
        Name-preserving unitary over ``universe``.
    chis : Mapping[str, Restriction]
        χ_v for every vertex.
    zetas : Mapping[str, Restriction], optional
        ζ_v for every vertex; ``None`` means the single-vertex restrictions.
    zeta_primes : Mapping[str, Restriction], optional
        ζ′_v with ζ_v ⊑ ζ′_v; defaults to ζ_v.

    Raises
    ------
    PrerequisiteViolation
        Listing every failed hypothesis.
    ReconstructionFailure
        If the gates do not reproduce ``uop`` on the μ-sector within ``tol``.
    UniverseTooLarge
        If the extended space has more than ``DENSE_DIM_CAP`` graphs.
    '''
    eu = extend_universe(universe, cap)
    if eu.extended.graph_count > DENSE_DIM_CAP:
        raise UniverseTooLarge(f'extended space has {eu.extended.graph_count} graphs; '
                               f'dense decomposition holds at most {DENSE_DIM_CAP}')
    base_basis = Basis.of(universe, cap)
    u = _dense(uop, base_basis)
    vertices = universe.vertices
    zetas = dict(zetas) if zetas is not None else {v: by_vertex(v) for v in vertices}
    zeta_primes = dict(zeta_primes) if zeta_primes is not None else dict(zetas)

    failures = []
    unitary = unitarity_deviation(u) <= tol
    if not unitary:
        failures.append('operator is not unitary')
    if not dense_is_name_preserving(u, base_basis, tol):
        failures.append('operator is not name-preserving')
    # the kernels telescope to U only up to the phase U carries on the empty graph
    elif abs(u[0, 0] - 1.0) > tol:
        failures.append('operator does not fix the empty graph')
    for v in vertices:
        if zeta_primes[v] is not zetas[v] and not comprehends(zetas[v], zeta_primes[v], universe, cap):
            failures.append(f'{zetas[v].label} is not comprehended within {zeta_primes[v].label}')
        if unitary and not is_causal(u, chis[v], zeta_primes[v], universe, tol, cap).primal:
            failures.append(f'operator is not {chis[v].label}/{zeta_primes[v].label}-causal')
    if failures:
        raise PrerequisiteViolation(failures)

    ext_basis = Basis.of(eu.extended, cap)
    sector = eu.sector_indices(cap)
    u_emb = np.zeros((ext_basis.dim, ext_basis.dim), dtype=complex)
    u_emb[np.ix_(sector, sector)] = u
    u_ext = dense_unitary_extension(u_emb, eu.mu, eu.extended, tol, cap)
    # the flag-0 sector is mapped to itself
    off_sector = np.ones(ext_basis.dim, dtype=bool)
    off_sector[sector] = False
    if np.max(np.abs(u_ext[np.ix_(off_sector, sector)]), initial=0.0) > tol:
        raise PrerequisiteViolation(['extension does not preserve the flag-0 sector'])

    toggle = dense_toggle(eu, cap)
    eye = np.eye(ext_basis.dim, dtype=complex)
    u_adj = u_ext.conj().T
    tau_dense, k_dense, xis, zetas_ext = {}, {}, {}, {}
    for v in vertices:
        zeta_ext = eu.lift_restriction(zetas[v])
        zetas_ext[v] = zeta_ext
        tau_dense[v] = dense_tensor_ops(toggle, eye, ext_basis.tables(zeta_ext))
        k_dense[v] = u_adj @ tau_dense[v] @ u_ext
        xis[v] = xi_v(eu.mu, eu.lift_restriction(chis[v]), zeta_ext, eu.extended, cap)
        logger.debug('gates built for %s', v)

    decomposition = BlockDecomposition(eu, vertices, tau_dense, k_dense, xis, zetas_ext, u_ext)
    report = verify_decomposition(decomposition, u, tol, seed, cap)
    decomposition.report = report
    if report.reconstruction_deviation > tol:
        raise ReconstructionFailure(report.reconstruction_deviation, report.witness)
    return decomposition

'''
Deciders for locality, strict locality, local tomography and causality.

Every decider evaluates the characterizations it knows independently and
raises :class:`EquivalenceViolation` when they disagree. Operators are
materialized densely over the enumerated basis of the universe; the
``dense_*`` functions work directly on such arrays and index tables.
'''
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import EQ_TOL, UNIVERSE_CAP
from .errors import EquivalenceViolation, NotUnitary, PrerequisiteViolation
from .graph_core import Basis, Graph, RestrictionTables, Universe, support
from .restrictions import Restriction
from .state_algebra import (OperatorMatrix, Role, from_dense, identity,
                            name_preservation_mask, to_dense,
                            unitarity_deviation)
from .tensor_trace import (DEFAULT_KERNELS, Kernels,
                           dense_consistency_preserving, dense_traceout,
                           tensor_ops)

logger = logging.getLogger(__name__)

Operand = Union[OperatorMatrix, np.ndarray]

# Budget of complex entries per block in the causality kernel.
_BLOCK_ENTRIES = 1 << 22


def _dense(a: Operand, basis: Basis) -> np.ndarray:
    return a if isinstance(a, np.ndarray) else to_dense(a, basis)


def _first_pair(bad: np.ndarray, basis: Basis) -> Optional[Tuple[Graph, Graph]]:
    hits = np.argwhere(bad)
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return basis.graphs[i], basis.graphs[j]


@dataclass(frozen=True)
class LocalityVerdict:
    '''
    χ-locality of one operator in the three pictures, plus strict locality.

    ``counterexample`` is the first (bra, ket) pair, in basis order, on which
    ⟨H|A|G⟩ differs from ⟨H_χ|A|G_χ⟩⟨H_χ̄|G_χ̄⟩.
    '''
    schrodinger: bool
    operational: bool
    heisenberg: bool
    strict: bool
    counterexample: Optional[Tuple[Graph, Graph]] = None
    max_deviation: float = 0.0

    @property
    def local(self) -> bool:
        return self.schrodinger

    def __str__(self) -> str:
        return f'local: {"yes" if self.local else "no"}, strict: {"yes" if self.strict else "no"}'


def schrodinger_deviation(a: np.ndarray, tables: RestrictionTables) -> np.ndarray:
    '''|⟨H|A|G⟩ − ⟨H_χ|A|G_χ⟩⟨H_χ̄|G_χ̄⟩| for every pair (H, G).'''
    part, rest = tables.part, tables.rest
    expected = a[np.ix_(part, part)] * (rest[:, None] == rest[None, :])
    return np.abs(a - expected)


def dense_is_local(a: np.ndarray, tables: RestrictionTables, tol: float = EQ_TOL) -> bool:
    return bool(np.all(schrodinger_deviation(a, tables) <= tol))


def _operational_deviation(a: np.ndarray, tables: RestrictionTables, kernels: Kernels) -> float:
    eye = np.eye(a.shape[0], dtype=complex)
    return float(np.max(np.abs(a - kernels.tensor_ops(a, eye, tables)), initial=0.0))


def _heisenberg_deviation(a: np.ndarray, tables: RestrictionTables, kernels: Kernels) -> float:
    # ρ = |G⟩⟨H|: Tr(Aρ) = ⟨H|A|G⟩ against Tr(A ρ|χ) = ⟨H_χ|A|G_χ⟩·w[G, H]
    part = tables.part
    weights = kernels.overlap(tables)
    lhs = a.T
    rhs = a[np.ix_(part, part)].T * weights
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def dense_is_strictly_local(a: np.ndarray, tables: RestrictionTables, tol: float = EQ_TOL,
                            local: Optional[bool] = None) -> bool:
    '''
    Strict χ-locality, decided as χ-local and χ-consistency-preserving, and
    as A, A†A and AA† all χ-local.

    Raises
    ------
    EquivalenceViolation
        If the two decisions differ.
    '''
    if local is None:
        local = dense_is_local(a, tables, tol)
    by_consistency = local and dense_consistency_preserving(a, tables, tol)
    by_products = (local
                   and dense_is_local(a.conj().T @ a, tables, tol)
                   and dense_is_local(a @ a.conj().T, tables, tol))
    if by_consistency != by_products:
        raise EquivalenceViolation(
            f'strict locality: consistency form says {by_consistency}, '
            f'product form says {by_products}')
    return by_consistency


def dense_locality_verdict(a: np.ndarray, tables: RestrictionTables, tol: float = EQ_TOL,
                           kernels: Kernels = DEFAULT_KERNELS) -> LocalityVerdict:
    deviation = schrodinger_deviation(a, tables)
    schrodinger = bool(np.all(deviation <= tol))
    operational = _operational_deviation(a, tables, kernels) <= tol
    heisenberg = _heisenberg_deviation(a, tables, kernels) <= tol
    if not schrodinger == operational == heisenberg:
        raise EquivalenceViolation(
            f'locality pictures disagree: schrodinger={schrodinger}, '
            f'operational={operational}, heisenberg={heisenberg}')
    strict = dense_is_strictly_local(a, tables, tol, local=schrodinger)
    return LocalityVerdict(schrodinger, operational, heisenberg, strict,
                           _first_pair(deviation > tol, tables.basis),
                           float(np.max(deviation, initial=0.0)))


def is_local(a: Operand, chi: Restriction, universe: Universe, tol: float = EQ_TOL,
             cap: int = UNIVERSE_CAP, kernels: Kernels = DEFAULT_KERNELS) -> LocalityVerdict:
    '''
    Decide χ-locality of ``a`` entrywise, as A = A ⊗χ I, and through
    expectations Tr(Aρ) = Tr(Aρ|χ) on the spanning set ρ = |G⟩⟨H|.

    Raises
    ------
    UniverseTooLarge
        If the basis cannot be enumerated under ``cap``.
    EquivalenceViolation
        If the pictures disagree.
    '''
    basis = Basis.of(universe, cap)
    verdict = dense_locality_verdict(_dense(a, basis), basis.tables(chi), tol, kernels)
    logger.debug('locality of operator under %s: %s', chi.label, verdict)
    return verdict


def localize(b: OperatorMatrix, chi: Restriction, universe: Universe,
             cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''B ⊗χ I, a χ-local operator.'''
    return tensor_ops(b, identity(universe, cap), chi).as_role(b.role)


def is_strictly_local(a: Operand, chi: Restriction, universe: Universe, tol: float = EQ_TOL,
                      cap: int = UNIVERSE_CAP) -> bool:
    basis = Basis.of(universe, cap)
    return dense_is_strictly_local(_dense(a, basis), basis.tables(chi), tol)


@dataclass(frozen=True)
class TomographyMember:
    '''E = localize(|bra⟩⟨ket|, χ) for two χ-range graphs; ``rows``/``cols`` index its unit entries.'''
    bra: Graph
    ket: Graph
    rows: np.ndarray
    cols: np.ndarray

    def operator(self, basis: Basis) -> OperatorMatrix:
        return OperatorMatrix({(basis.graphs[i], basis.graphs[j]): 1.0
                               for i, j in zip(self.rows, self.cols)})

    def expectation(self, rho: np.ndarray) -> complex:
        '''Tr(E ρ).'''
        return complex(np.sum(rho[self.cols, self.rows]))

    @property
    def name_preserving(self) -> bool:
        return support(self.bra) == support(self.ket)


def tomography_family(tables: RestrictionTables,
                      name_preserving_only: bool = False) -> List[TomographyMember]:
    basis = tables.basis
    members = []
    for p in tables.range_indices:
        for q in tables.range_indices:
            bra, ket = basis.graphs[p], basis.graphs[q]
            if name_preserving_only and support(bra) != support(ket):
                continue
            rows, cols = tables.row(p), tables.row(q)
            keep = (rows >= 0) & (cols >= 0)
            members.append(TomographyMember(bra, ket, rows[keep], cols[keep]))
    return members


def tomography_operators(chi: Restriction, universe: Universe,
                         name_preserving_only: bool = False,
                         cap: int = UNIVERSE_CAP) -> List[Tuple[Graph, Graph, OperatorMatrix]]:
    '''
    One χ-local operator E^{pq} = |p⟩⟨q| ⊗χ I per ordered pair of χ-range graphs.

    Tr(E^{pq} ρ) is the (q, p) entry of ρ|χ.
    '''
    basis = Basis.of(universe, cap)
    return [(m.bra, m.ket, m.operator(basis))
            for m in tomography_family(basis.tables(chi), name_preserving_only)]


def tomography_witness(rho: Operand, sigma: Operand, chi: Restriction, universe: Universe,
                       name_preserving_only: bool = False, tol: float = EQ_TOL,
                       cap: int = UNIVERSE_CAP) -> Optional[Tuple[Graph, Graph]]:
    '''First tomography member (bra, ket) telling ρ from σ, or ``None``.'''
    basis = Basis.of(universe, cap)
    r, s = _dense(rho, basis), _dense(sigma, basis)
    for m in tomography_family(basis.tables(chi), name_preserving_only):
        if abs(m.expectation(r) - m.expectation(s)) > tol:
            return m.bra, m.ket
    return None


def tomography_equal(rho: Operand, sigma: Operand, chi: Restriction, universe: Universe,
                     name_preserving_only: bool = False, tol: float = EQ_TOL,
                     cap: int = UNIVERSE_CAP) -> bool:
    '''
    True iff every tomography operator has the same expectation on ρ and σ.

    The verdict is cross-checked against ρ|χ = σ|χ. With
    ``name_preserving_only`` the family keeps only members between graphs of
    equal support, and the cross-check applies when ρ and σ are themselves
    name-preserving.

    Raises
    ------
    EquivalenceViolation
        If the tomographic verdict differs from the direct comparison.
    '''
    basis = Basis.of(universe, cap)
    r, s = _dense(rho, basis), _dense(sigma, basis)
    equal = tomography_witness(r, s, chi, universe, name_preserving_only, tol, cap) is None
    tables = basis.tables(chi)
    direct = bool(np.all(np.abs(dense_traceout(r, tables) - dense_traceout(s, tables)) <= tol))
    if name_preserving_only:
        mask = name_preservation_mask(basis)
        checkable = not np.any((np.abs(r) > tol) & ~mask) and not np.any((np.abs(s) > tol) & ~mask)
    else:
        checkable = True
    if checkable and equal != direct:
        raise EquivalenceViolation(
            f'tomography says {equal}, traceout comparison says {direct}')
    return equal


@dataclass(frozen=True)
class CausalityVerdict:
    '''
    χζ-causality of a unitary.

    ``primal`` is (UρU†)|ζ = (Uρ|χU†)|ζ on every ρ = |G⟩⟨H|; ``dual`` is
    "U†EU is χ-local for every member E of the ζ tomography family";
    ``dual_name_preserving`` is the same over the name-preserving members
    only. ``strict_transfer`` tells whether U†EU is strictly χ-local for
    every strictly ζ-local member, and is ``None`` when the primal verdict
    is false.
    '''
    primal: bool
    dual: bool
    dual_name_preserving: bool
    strict_transfer: Optional[bool]
    counterexample: Optional[Tuple[Graph, Graph]] = None
    max_deviation: float = 0.0

    @property
    def causal(self) -> bool:
        return self.primal

    def __str__(self) -> str:
        return f'causal: {"yes" if self.primal else "no"}'


def _reduced_frames(u: np.ndarray, zeta: RestrictionTables) -> np.ndarray:
    # Y[g, p, r] = ⟨k|U|g⟩ for the graph k with ζ-part p and complement r
    p_idx = np.unique(zeta.part)
    r_idx = np.unique(zeta.rest)
    p_pos = np.full(u.shape[0], -1, dtype=np.intp)
    r_pos = np.full(u.shape[0], -1, dtype=np.intp)
    p_pos[p_idx] = np.arange(len(p_idx))
    r_pos[r_idx] = np.arange(len(r_idx))
    frames = np.zeros((len(p_idx), u.shape[1], len(r_idx)), dtype=complex)
    frames[p_pos[zeta.part], :, r_pos[zeta.rest]] = u
    return frames.transpose(1, 0, 2)


def dense_primal_causality(u: np.ndarray, chi: RestrictionTables, zeta: RestrictionTables,
                           tol: float = EQ_TOL) -> Tuple[bool, Optional[Tuple[int, int]], float]:
    '''
    Check (U|G⟩⟨H|U†)|ζ = ⟨H_χ̄|G_χ̄⟩ (U|G_χ⟩⟨H_χ|U†)|ζ for every pair (G, H).

    Returns the verdict, the first failing index pair and the largest deviation.
    '''
    n = u.shape[1]
    frames = _reduced_frames(u, zeta)
    p_count, r_count = frames.shape[1], frames.shape[2]
    block = max(1, int(np.sqrt(_BLOCK_ENTRIES)) // p_count)
    part_frames = frames[chi.part]
    same_rest = chi.rest[:, None] == chi.rest[None, :]
    worst, first = 0.0, None
    for g0 in range(0, n, block):
        gs = slice(g0, min(n, g0 + block))
        left = frames[gs].reshape(-1, r_count)
        left_part = part_frames[gs].reshape(-1, r_count)
        for h0 in range(0, n, block):
            hs = slice(h0, min(n, h0 + block))
            right = frames[hs].reshape(-1, r_count).conj()
            right_part = part_frames[hs].reshape(-1, r_count).conj()
            lhs = (left @ right.T).reshape(gs.stop - gs.start, p_count, hs.stop - hs.start, p_count)
            rhs = (left_part @ right_part.T).reshape(lhs.shape)
            rhs = rhs * same_rest[gs, hs][:, None, :, None]
            dev = np.max(np.abs(lhs - rhs), axis=(1, 3))
            worst = max(worst, float(np.max(dev, initial=0.0)))
            bad = np.argwhere(dev > tol)
            if len(bad) and first is None:
                first = (gs.start + int(bad[0][0]), hs.start + int(bad[0][1]))
    return first is None, first, worst


def _dual_checks(u: np.ndarray, chi: RestrictionTables, zeta: RestrictionTables,
                 tol: float) -> Tuple[bool, bool, bool]:
    local_all, local_np, strict_ok = True, True, True
    u_adj = u.conj().T
    for m in tomography_family(zeta):
        pulled = u_adj[:, m.rows] @ u[m.cols, :]
        local = dense_is_local(pulled, chi, tol)
        if not local:
            local_all = False
            if m.name_preserving:
                local_np = False
            strict_ok = False
            continue
        member = np.zeros_like(u)
        member[m.rows, m.cols] = 1.0
        if dense_consistency_preserving(member, zeta, tol):
            if not dense_consistency_preserving(pulled, chi, tol):
                strict_ok = False
    return local_all, local_np, strict_ok


def dense_causality_verdict(u: np.ndarray, chi: RestrictionTables, zeta: RestrictionTables,
                            tol: float = EQ_TOL) -> CausalityVerdict:
    primal, first, worst = dense_primal_causality(u, chi, zeta, tol)
    dual, dual_np, strict_ok = _dual_checks(u, chi, zeta, tol)
    if primal != dual:
        raise EquivalenceViolation(
            f'causality: primal form says {primal}, dual form says {dual}')
    basis = chi.basis
    pair = None if first is None else (basis.graphs[first[0]], basis.graphs[first[1]])
    return CausalityVerdict(primal, dual, dual_np, strict_ok if primal else None, pair, worst)


def is_causal(uop: Operand, chi: Restriction, zeta: Restriction, universe: Universe,
              tol: float = EQ_TOL, cap: int = UNIVERSE_CAP) -> CausalityVerdict:
    '''
    Decide whether the unitary ``uop`` is χζ-causal.

    The primal form (UρU†)|ζ = (Uρ|χU†)|ζ is checked on the spanning set
    |G⟩⟨H|; the dual form pulls back every ζ tomography operator E and asks
    that U†EU be χ-local. Strictness transfer is recorded on the verdict.

    Raises
    ------
    NotUnitary
        If ``uop`` is not unitary within ``tol``.
    EquivalenceViolation
        If the primal and dual verdicts differ.
    '''
    basis = Basis.of(universe, cap)
    u = _dense(uop, basis)
    deviation = unitarity_deviation(u)
    if deviation > tol:
        raise NotUnitary(f'operator deviates from unitarity by {deviation:.3e}')
    verdict = dense_causality_verdict(u, basis.tables(chi), basis.tables(zeta), tol)
    logger.info('causality %s -> %s: %s', chi.label, zeta.label, verdict)
    return verdict


def causal_compose_check(uop: Operand, vop: Operand, chi: Restriction, zeta: Restriction,
                         eta: Restriction, universe: Universe, tol: float = EQ_TOL,
                         cap: int = UNIVERSE_CAP) -> bool:
    '''
    With U χζ-causal and V ζη-causal, decide whether VU is χη-causal.

    Raises
    ------
    PrerequisiteViolation
        If either input verdict is negative.
    '''
    basis = Basis.of(universe, cap)
    u, v = _dense(uop, basis), _dense(vop, basis)
    failures = []
    if not is_causal(u, chi, zeta, universe, tol, cap).primal:
        failures.append(f'U is not {chi.label}/{zeta.label}-causal')
    if not is_causal(v, zeta, eta, universe, tol, cap).primal:
        failures.append(f'V is not {zeta.label}/{eta.label}-causal')
    if failures:
        raise PrerequisiteViolation(failures)
    return is_causal(v @ u, chi, eta, universe, tol, cap).primal


def product_of(ops: Sequence[Operand], basis: Basis) -> np.ndarray:
    '''Dense product ops[0] @ ops[1] @ ...; the identity when empty.'''
    out = np.eye(basis.dim, dtype=complex)
    for op in ops:
        out = out @ _dense(op, basis)
    return out


def as_operator(matrix: np.ndarray, basis: Basis) -> OperatorMatrix:
    return from_dense(matrix, basis, Role.BOUNDED)

'''
One law per row of the traceout/tensor toolbox.

Exact laws run over every basis element or pair; operator laws run over
``samples`` seeded random operators. Laws with a hypothesis report how many
inputs met it in ``coverage``; a law whose hypothesis is never met is
reported as skipped.
'''
import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..config import DEFAULT_SAMPLES, DEFAULT_SEED, EQ_TOL, UNIVERSE_CAP
from ..graph_core import EMPTY_GRAPH, Universe, try_union
from ..restrictions import Restriction, empty
from ..state_algebra import from_dense, to_dense
from ..tensor_trace import (DEFAULT_KERNELS, Kernels,
                            dense_consistency_preserving, tensor_ops, traceout)
from .context import SuiteContext, default_restrictions
from .report import LawResult, SuiteReport, run_laws
from .sampling import (consistent_pair, consistent_rectangle,
                       random_consistency_preserving, random_diagonal,
                       random_matrix, random_name_preserving_on)

logger = logging.getLogger(__name__)

_EMPTY = empty()

# Samples per restriction cross-checked against the sparse rank-one tensor.
_RANK_ONE_SAMPLES = 5


def _dev(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b), initial=0.0))


class _Tracker:
    '''Running maximum deviation and first counterexample of one law.'''

    def __init__(self, tol: float):
        self.tol = tol
        self.worst = 0.0
        self.checked = 0
        self.coverage = 0
        self.counterexample: Optional[str] = None

    def record(self, deviation: float, where: Callable[[], str]) -> None:
        self.checked += 1
        self.worst = max(self.worst, deviation)
        if deviation > self.tol and self.counterexample is None:
            self.counterexample = where()

    def result(self, law: str, conditional: bool = False) -> LawResult:
        if conditional and self.coverage == 0:
            return LawResult.skipped(law, 'hypothesis never met on this universe')
        return LawResult.from_deviation(law, self.worst, self.tol, self.checked,
                                        self.coverage if conditional else None,
                                        self.counterexample)


def overlap_factorization(ctx: SuiteContext) -> LawResult:
    '''⟨H|G⟩ = ⟨H_χ|G_χ⟩⟨H_χ̄|G_χ̄⟩ on every basis pair.'''
    tr = _Tracker(ctx.tol)
    graphs = ctx.basis.graphs
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        rhs = (t.part[:, None] == t.part[None, :]) * ctx.kernels.overlap(t)
        bad = np.abs(np.eye(len(t.part)) - rhs)
        hits = np.argwhere(bad > ctx.tol)
        tr.record(float(np.max(bad, initial=0.0)),
                  lambda: f'{chi.label}: G={graphs[hits[0][0]]}, H={graphs[hits[0][1]]}')
        tr.checked += bad.size - 1
    return tr.result('overlap-factorization')


def idempotence(ctx: SuiteContext) -> LawResult:
    '''χχ = χ and χχ̄ = ∅ on every graph.'''
    tr = _Tracker(ctx.tol)
    graphs = ctx.basis.graphs
    empty_index = ctx.basis.index[EMPTY_GRAPH]
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        for g in range(len(graphs)):
            ok = t.part[t.part[g]] == t.part[g] and t.rest[t.part[g]] == empty_index
            tr.record(0.0 if ok else 1.0, lambda: f'{chi.label}: G={graphs[g]}')
    return tr.result('idempotence')


def trace_identities(ctx: SuiteContext) -> LawResult:
    '''(ρ|G⟩⟨H|)|∅ = ⟨H|ρ|G⟩, (ρA)|∅ = (Aρ)|∅ and (αρ)|χ = α ρ|χ.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('trace-identities')
    n = ctx.basis.dim
    k = ctx.kernels
    full = ctx.tables(_EMPTY)
    e0 = ctx.basis.index[EMPTY_GRAPH]
    for s in range(ctx.samples):
        rho, a = random_matrix(rng, n), random_matrix(rng, n)
        g, h = rng.integers(0, n, size=2)
        unit = np.zeros(n)
        unit[h] = 1.0
        traced = k.traceout(np.outer(rho[:, g], unit), full)[e0, e0]
        tr.record(abs(traced - rho[h, g]), lambda: f'sample {s}: G={ctx.basis.graphs[g]}, H={ctx.basis.graphs[h]}')
        lhs = k.traceout(rho @ a, full)[e0, e0]
        rhs = k.traceout(a @ rho, full)[e0, e0]
        tr.record(abs(lhs - rhs), lambda: f'sample {s}: cyclicity')
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        for chi in ctx.restrictions:
            t = ctx.tables(chi)
            tr.record(_dev(k.traceout(alpha * rho, t), alpha * k.traceout(rho, t)),
                      lambda: f'sample {s}: {chi.label} homogeneity')
    return tr.result('trace-identities')


def reconstitution(ctx: SuiteContext) -> LawResult:
    '''
    |G⟩ ⊗χ |G′⟩ ≠ 0 implies it is |G ∪ G′⟩ with (G ∪ G′)_χ = G, and it is
    nonzero exactly when such a graph exists.
    '''
    tr = _Tracker(ctx.tol)
    basis = ctx.basis
    graphs, n = basis.graphs, basis.dim
    eye = np.eye(n, dtype=complex)
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        for p in range(n):
            for r in range(n):
                out = ctx.kernels.tensor_kets(eye[p], eye[r], t)
                nz = np.flatnonzero(np.abs(out) > ctx.tol)
                expected = t.lookup(p, r)
                if len(nz) == 0:
                    ok = expected < 0
                else:
                    tr.coverage += 1
                    union = try_union(graphs[p], graphs[r])
                    ok = (len(nz) == 1 and union is not None and basis.index[union] == nz[0]
                          and t.part[nz[0]] == p and t.rest[nz[0]] == r
                          and abs(out[nz[0]] - 1.0) <= ctx.tol)
                tr.record(0.0 if ok else 1.0,
                          lambda: f'{chi.label}: G={graphs[p]}, G\'={graphs[r]}')
    return tr.result('reconstitution')


def traceout_sum_form(ctx: SuiteContext) -> LawResult:
    '''ρ|χ = Σ over G, H with G_χ̄ = H_χ̄ of ρ_{GH}|G_χ⟩⟨H_χ|, and the sparse rule agrees.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('traceout-sum-form')
    basis = ctx.basis
    n = basis.dim
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        groups = [np.flatnonzero(t.rest == r) for r in np.unique(t.rest)]
        for s in range(ctx.samples):
            rho = random_matrix(rng, n)
            expected = np.zeros((n, n), dtype=complex)
            for idx in groups:
                expected[np.ix_(t.part[idx], t.part[idx])] += rho[np.ix_(idx, idx)]
            computed = ctx.kernels.traceout(rho, t)
            tr.record(_dev(computed, expected), lambda: f'{chi.label}: sample {s}')
            if s < _RANK_ONE_SAMPLES:
                sparse = to_dense(traceout(from_dense(rho, basis), chi), basis)
                tr.record(_dev(computed, sparse), lambda: f'{chi.label}: sample {s} against the sparse rule')
    return tr.result('traceout-sum-form')


def tensor_closed_form(ctx: SuiteContext) -> LawResult:
    '''
    A ⊗χ B from the closed form equals the rank-one definition, and
    A ⊗χ I = A ⊗χ I_χ̄.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('tensor-closed-form')
    basis = ctx.basis
    n = basis.dim
    eye = np.eye(n, dtype=complex)
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        eye_rest = np.zeros((n, n), dtype=complex)
        complements = np.unique(t.rest)
        eye_rest[complements, complements] = 1.0
        for s in range(ctx.samples):
            a = random_matrix(rng, n)
            lhs = ctx.kernels.tensor_ops(a, eye, t)
            tr.record(_dev(lhs, ctx.kernels.tensor_ops(a, eye_rest, t)),
                      lambda: f'{chi.label}: sample {s}, identity on the complement range')
            if s < _RANK_ONE_SAMPLES:
                a, b = random_matrix(rng, n, 0.15), random_matrix(rng, n, 0.15)
                rank_one = to_dense(tensor_ops(from_dense(a, basis), from_dense(b, basis), chi), basis)
                tr.record(_dev(ctx.kernels.tensor_ops(a, b, t), rank_one),
                          lambda: f'{chi.label}: sample {s} against the rank-one rule')
    return tr.result('tensor-closed-form')


def interchange(ctx: SuiteContext) -> LawResult:
    '''(A ⊗ζ B) ⊗χ (C ⊗ζ D) = (A ⊗χ C) ⊗ζ (B ⊗χ D) for four-way commuting χ, ζ.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('interchange')
    n = ctx.basis.dim
    tensor = ctx.kernels.tensor_ops
    for chi, zeta in ctx.commuting_pairs():
        tc, tz = ctx.tables(chi), ctx.tables(zeta)
        tr.coverage += 1
        for s in range(ctx.samples):
            a, b, c, d = (random_matrix(rng, n) for _ in range(4))
            lhs = tensor(tensor(a, b, tz), tensor(c, d, tz), tc)
            rhs = tensor(tensor(a, c, tc), tensor(b, d, tc), tz)
            tr.record(_dev(lhs, rhs), lambda: f'{chi.label}, {zeta.label}: sample {s}')
    return tr.result('interchange', conditional=True)


def nested_traceout(ctx: SuiteContext) -> LawResult:
    '''ζ ⊑ χ implies (ρ|χ)|ζ = ρ|ζ, and every ζ-local operator is χ-local.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('nested-traceout')
    n = ctx.basis.dim
    k = ctx.kernels
    eye = np.eye(n, dtype=complex)
    for chi, zeta in ctx.nested_pairs():
        tc, tz = ctx.tables(chi), ctx.tables(zeta)
        tr.coverage += 1
        for s in range(ctx.samples):
            rho = random_matrix(rng, n)
            tr.record(_dev(k.traceout(k.traceout(rho, tc), tz), k.traceout(rho, tz)),
                      lambda: f'{zeta.label} in {chi.label}: sample {s}')
            local = k.tensor_ops(random_matrix(rng, n), eye, tz)
            expected = local[np.ix_(tc.part, tc.part)] * (tc.rest[:, None] == tc.rest[None, :])
            tr.record(_dev(local, expected),
                      lambda: f'{zeta.label}-local operator not {chi.label}-local, sample {s}')
    return tr.result('nested-traceout', conditional=True)


def tensor_then_trace(ctx: SuiteContext) -> LawResult:
    '''
    For χ-consistent ρ, σ: (ρ ⊗χ σ)|χ = ρ Tr(σ), and (ρ ⊗χ σ)|ζ = ρ|ζ Tr(σ)
    when ζ ⊑ χ.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('tensor-then-trace')
    k = ctx.kernels
    nested = {}
    for chi, zeta in ctx.nested_pairs():
        nested.setdefault(chi, []).append(zeta)
    for chi in ctx.restrictions:
        tc = ctx.tables(chi)
        for s in range(ctx.samples):
            rho, sigma = consistent_pair(rng, tc)
            joint = k.tensor_ops(rho, sigma, tc)
            trace = np.trace(sigma)
            tr.record(_dev(k.traceout(joint, tc), rho * trace), lambda: f'{chi.label}: sample {s}')
            for zeta in nested.get(chi, ()):
                tz = ctx.tables(zeta)
                tr.coverage += 1
                tr.record(_dev(k.traceout(joint, tz), k.traceout(rho, tz) * trace),
                          lambda: f'{zeta.label} in {chi.label}: sample {s}')
    return LawResult.from_deviation('tensor-then-trace', tr.worst, tr.tol, tr.checked,
                                    tr.coverage or None, tr.counterexample)


def trace_distributes(ctx: SuiteContext) -> LawResult:
    '''(ρ ⊗χ σ)|ζ = ρ|ζ ⊗χ σ|ζ for four-way commuting χ, ζ and χ-consistent ρ, σ.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('trace-distributes')
    k = ctx.kernels
    for chi, zeta in ctx.commuting_pairs():
        tc, tz = ctx.tables(chi), ctx.tables(zeta)
        tr.coverage += 1
        for s in range(ctx.samples):
            rho, sigma = consistent_pair(rng, tc)
            lhs = k.traceout(k.tensor_ops(rho, sigma, tc), tz)
            rhs = k.tensor_ops(k.traceout(rho, tz), k.traceout(sigma, tz), tc)
            tr.record(_dev(lhs, rhs), lambda: f'{chi.label}, {zeta.label}: sample {s}')
    return tr.result('trace-distributes', conditional=True)


def local_action(ctx: SuiteContext) -> LawResult:
    '''
    (A ⊗χ I)|G⟩ = A|G_χ⟩ ⊗χ |G_χ̄⟩ on every basis graph, and
    (A′ ⊗χ B′)(A ⊗χ B) = A′A ⊗χ B′B, drawn two ways: χ-consistency-preserving
    A, A′ with diagonal B, B′, and arbitrary name-preserving operators acting
    on a consistent block of range and complement graphs.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('local-action')
    basis = ctx.basis
    n = basis.dim
    k = ctx.kernels
    eye = np.eye(n, dtype=complex)

    def product_rule(a1, a2, b1, b2, t):
        return _dev(k.tensor_ops(a2, b2, t) @ k.tensor_ops(a1, b1, t),
                    k.tensor_ops(a2 @ a1, b2 @ b1, t))

    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        for s in range(ctx.samples):
            a = random_matrix(rng, n)
            lhs = k.tensor_ops(a, eye, t)
            rhs = np.stack([k.tensor_kets(a[:, t.part[g]], eye[t.rest[g]], t) for g in range(n)], axis=1)
            tr.record(_dev(lhs, rhs), lambda: f'{chi.label}: sample {s}, action on basis graphs')

            a1, a2 = (random_consistency_preserving(rng, t) for _ in range(2))
            if not (dense_consistency_preserving(a1, t, ctx.tol)
                    and dense_consistency_preserving(a2, t, ctx.tol)):
                tr.record(1.0, lambda: f'{chi.label}: sample {s}, drawn operator breaks consistency')
                continue
            tr.coverage += 1
            b1, b2 = random_diagonal(rng, n), random_diagonal(rng, n)
            tr.record(product_rule(a1, a2, b1, b2, t),
                      lambda: f'{chi.label}: sample {s}, product rule')

            parts, rests = consistent_rectangle(rng, t)
            a1, a2 = (random_name_preserving_on(rng, basis, parts) for _ in range(2))
            b1, b2 = (random_name_preserving_on(rng, basis, rests) for _ in range(2))
            tr.coverage += 1
            tr.record(product_rule(a1, a2, b1, b2, t),
                      lambda: f'{chi.label}: sample {s}, product rule on a block')
    return LawResult.from_deviation('local-action', tr.worst, tr.tol, tr.checked,
                                    tr.coverage, tr.counterexample)


TOOLBOX_LAWS: Dict[str, Callable[[SuiteContext], LawResult]] = {
    'overlap-factorization': overlap_factorization,
    'idempotence': idempotence,
    'trace-identities': trace_identities,
    'reconstitution': reconstitution,
    'traceout-sum-form': traceout_sum_form,
    'tensor-closed-form': tensor_closed_form,
    'interchange': interchange,
    'nested-traceout': nested_traceout,
    'tensor-then-trace': tensor_then_trace,
    'trace-distributes': trace_distributes,
    'local-action': local_action,
}


def run_toolbox_suite(universe: Universe, restrictions: Optional[Sequence[Restriction]] = None,
                      samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      tol: float = EQ_TOL, kernels: Kernels = DEFAULT_KERNELS,
                      threads: int = 1, cap: int = UNIVERSE_CAP,
                      laws: Optional[Sequence[str]] = None) -> SuiteReport:
    '''
    Check every toolbox law on ``universe``.

    Parameters
    ----------
    restrictions : Sequence[Restriction], optional
        Validated on entry; defaults to :func:`default_restrictions`.
    kernels : Kernels
        Dense kernels under test.
    laws : Sequence[str], optional
        Subset of :data:`TOOLBOX_LAWS` to run.

    Raises
    ------
    UniverseTooLarge
        If the basis cannot be enumerated under ``cap``.
    InvalidRestriction
        If a restriction fails the axiom.
    '''
    if restrictions is None:
        restrictions = default_restrictions(universe)
    ctx = SuiteContext(universe, restrictions, kernels, samples, seed, tol, cap, threads)
    ctx.warm()
    ctx.tables(_EMPTY)
    chosen = laws or list(TOOLBOX_LAWS)
    checks = {name: (lambda f=TOOLBOX_LAWS[name]: f(ctx)) for name in chosen}
    return run_laws('toolbox', universe, seed, checks, threads)

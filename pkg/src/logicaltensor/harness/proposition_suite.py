'''
Laws about the lifted trace channel, locality, tomography and causality.

The locality and causality deciders cross-check their own
characterizations; here they are run over seeded operator samples and the
worked examples, so that a disagreement shows up as a failing law.
'''
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import DEFAULT_SAMPLES, DEFAULT_SEED, EQ_TOL, UNIVERSE_CAP
from ..block_decomposition import dense_toggle, extend_universe
from ..dynamics_examples import (LineConfig, build_C, build_flip, build_M,
                                 build_swap)
from ..errors import UniverseTooLarge
from ..graph_core import Basis, Universe
from ..locality_causality import (causal_compose_check,
                                  dense_causality_verdict, dense_is_local,
                                  dense_is_strictly_local,
                                  dense_locality_verdict, tomography_equal,
                                  tomography_family, tomography_witness)
from ..restrictions import Restriction, by_vertex, full
from ..state_algebra import (from_dense, name_preservation_mask, to_dense,
                             unitarity_deviation)
from ..tensor_trace import (DEFAULT_KERNELS, Kernels, TraceChannelSpec,
                            channel_is_trace_preserving,
                            channel_kraus_operators, lifted_trace_channel)
from .context import SuiteContext, default_restrictions
from .report import PASS, LawResult, SuiteReport, run_laws
from .sampling import random_matrix, random_name_preserving_unitary, random_positive
from .toolbox_suite import _dev, _Tracker

logger = logging.getLogger(__name__)

_FULL = full()

# Extended universes larger than this are left out of the toggle examples.
_TOGGLE_DIM = 1024


def _apply_kraus(kraus: List[np.ndarray], rho: np.ndarray) -> np.ndarray:
    return sum((k @ rho @ k.conj().T for k in kraus), np.zeros_like(rho))


def channel_positivity(ctx: SuiteContext) -> LawResult:
    '''
    ((.)|χ ⊗ζ I) maps positive operators to positive operators; its Kraus
    form agrees with the basis rule, and with ζ absent it is the traceout.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('channel-positivity')
    basis = ctx.basis
    n = basis.dim
    specs = [TraceChannelSpec(chi, zeta) for chi, zeta in ctx.pairs()]
    specs += [TraceChannelSpec(chi) for chi in ctx.restrictions]
    for spec in specs:
        label = spec.inner.label + (f' in {spec.outer.label}' if spec.outer else '')
        kraus = channel_kraus_operators(spec, basis)
        for s in range(ctx.samples):
            rho = random_positive(rng, n)
            out = _apply_kraus(kraus, rho)
            lowest = float(np.min(np.linalg.eigvalsh((out + out.conj().T) / 2)))
            tr.record(max(0.0, -lowest), lambda: f'{label}: sample {s}, eigenvalue {lowest:.3e}')
            if s == 0:
                sparse = to_dense(lifted_trace_channel(from_dense(rho, basis), spec), basis)
                tr.record(_dev(out, sparse), lambda: f'{label}: Kraus form against the basis rule')
                if spec.outer is None:
                    tr.record(_dev(out, ctx.kernels.traceout(rho, ctx.tables(spec.inner))),
                              lambda: f'{label}: channel against the traceout kernel')
    return tr.result('channel-positivity')


def channel_trace(ctx: SuiteContext) -> LawResult:
    '''
    Where |G_ζχ⟩ ⊗ζ |G_ζ̄⟩ ≠ 0 for every G, the channel preserves the trace and
    its Kraus operators satisfy Σ K†K = I.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('channel-trace')
    basis = ctx.basis
    n = basis.dim
    for chi, zeta in ctx.pairs():
        spec = TraceChannelSpec(chi, zeta)
        if not channel_is_trace_preserving(spec, ctx.universe, ctx.cap):
            continue
        tr.coverage += 1
        kraus = channel_kraus_operators(spec, basis)
        completeness = sum((k.conj().T @ k for k in kraus), np.zeros((n, n), dtype=complex))
        tr.record(_dev(completeness, np.eye(n)), lambda: f'{chi.label} in {zeta.label}: Σ K†K')
        for s in range(ctx.samples):
            rho = random_positive(rng, n)
            out = _apply_kraus(kraus, rho)
            tr.record(abs(np.trace(out) - np.trace(rho)),
                      lambda: f'{chi.label} in {zeta.label}: sample {s}')
    return tr.result('channel-trace', conditional=True)


def _operator_sample(ctx: SuiteContext, chi: Restriction,
                     rng: np.random.Generator) -> List[Tuple[str, np.ndarray]]:
    basis = ctx.basis
    n = basis.dim
    eye = np.eye(n, dtype=complex)
    t = ctx.tables(chi)
    ops = [('identity', eye)]
    if {'w', 'b'} <= set(ctx.universe.states):
        ops.append(('flip', to_dense(build_flip(ctx.universe, cap=ctx.cap), basis)))
    for s in range(ctx.samples):
        ops.append((f'random {s}', random_matrix(rng, n, 0.2)))
        ops.append((f'localized {s}', ctx.kernels.tensor_ops(random_matrix(rng, n), eye, t)))
        unitary = random_name_preserving_unitary(rng, basis)
        ops.append((f'unitary {s}', unitary))
        ops.append((f'localized unitary {s}', ctx.kernels.tensor_ops(unitary, eye, t)))
    return ops


def localize_is_local(ctx: SuiteContext) -> LawResult:
    '''B ⊗χ I is χ-local, and localizing again changes nothing.'''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('localize-is-local')
    n = ctx.basis.dim
    eye = np.eye(n, dtype=complex)
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        for s in range(ctx.samples):
            local = ctx.kernels.tensor_ops(random_matrix(rng, n), eye, t)
            tr.record(0.0 if dense_is_local(local, t, ctx.tol) else 1.0,
                      lambda: f'{chi.label}: sample {s} not local')
            tr.record(_dev(ctx.kernels.tensor_ops(local, eye, t), local),
                      lambda: f'{chi.label}: sample {s} not idempotent')
    return tr.result('localize-is-local')


def locality_pictures(ctx: SuiteContext) -> LawResult:
    '''
    The entrywise, operational and expectation forms of locality agree on
    every sampled operator; a disagreement raises inside the decider.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('locality-pictures')
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        for name, a in _operator_sample(ctx, chi, rng):
            verdict = dense_locality_verdict(a, t, ctx.tol, ctx.kernels)
            tr.coverage += verdict.local
            tr.record(0.0, lambda: name)
    return LawResult(
        'locality-pictures', PASS, 0.0, tr.checked, tr.coverage)


def strict_locality(ctx: SuiteContext) -> LawResult:
    '''
    The two characterizations of strict locality agree; every χ-local
    unitary is strictly χ-local; products of strictly local operators stay
    strictly local; flip is local but not strict under fig5.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('strict-locality')
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        strict_ops = []
        for name, a in _operator_sample(ctx, chi, rng):
            local = dense_is_local(a, t, ctx.tol)
            strict = dense_is_strictly_local(a, t, ctx.tol, local=local)
            if strict:
                strict_ops.append(a)
            if local and unitarity_deviation(a) <= ctx.tol:
                tr.coverage += 1
                tr.record(0.0 if strict else 1.0, lambda: f'{chi.label}: local unitary {name} not strict')
            if name == 'flip' and chi.label == 'fig5':
                ok = local and not strict
                tr.record(0.0 if ok else 1.0, lambda: 'flip under fig5 should be local, not strict')
        for i in range(min(len(strict_ops) - 1, ctx.samples)):
            product = strict_ops[i] @ strict_ops[i + 1]
            ok = dense_is_strictly_local(product, t, ctx.tol)
            tr.record(0.0 if ok else 1.0, lambda: f'{chi.label}: product {i} not strict')
    return LawResult.from_deviation('strict-locality', tr.worst, tr.tol, tr.checked,
                                    tr.coverage, tr.counterexample)


def tomography(ctx: SuiteContext) -> LawResult:
    '''
    Tomography members read off the entries of ρ|χ; states with equal
    traceouts have equal expectations even when they differ; states with
    different traceouts are told apart, also by the name-preserving members
    when both states are name-preserving.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('tomography')
    basis = ctx.basis
    n = basis.dim
    mask = name_preservation_mask(basis)
    rounds = max(1, ctx.samples // 10)
    for chi in ctx.restrictions:
        t = ctx.tables(chi)
        family = tomography_family(t)
        for s in range(rounds):
            rho = random_positive(rng, n)
            reduced = ctx.kernels.traceout(rho, t)
            worst = max((abs(m.expectation(rho) - reduced[basis.index[m.ket], basis.index[m.bra]])
                         for m in family), default=0.0)
            tr.record(worst, lambda: f'{chi.label}: sample {s}, expectations against ρ|χ')

            hidden = np.argwhere(t.rest[:, None] != t.rest[None, :])
            if len(hidden):
                tr.coverage += 1
                g, h = hidden[rng.integers(len(hidden))]
                sigma = rho.copy()
                sigma[g, h] += 0.1
                sigma[h, g] += 0.1
                ok = tomography_equal(rho, sigma, chi, ctx.universe, tol=ctx.tol, cap=ctx.cap)
                tr.record(0.0 if ok else 1.0, lambda: f'{chi.label}: sample {s}, hidden coherence detected')

            other = random_positive(rng, n)
            differ = _dev(reduced, ctx.kernels.traceout(other, t)) > ctx.tol
            found = tomography_witness(rho, other, chi, ctx.universe, tol=ctx.tol, cap=ctx.cap)
            tr.record(0.0 if differ == (found is not None) else 1.0,
                      lambda: f'{chi.label}: sample {s}, witness search')

            rho_np, other_np = rho * mask, other * mask
            differ = _dev(ctx.kernels.traceout(rho_np, t), ctx.kernels.traceout(other_np, t)) > ctx.tol
            equal = tomography_equal(rho_np, other_np, chi, ctx.universe, True, ctx.tol, ctx.cap)
            tr.record(0.0 if differ != equal else 1.0,
                      lambda: f'{chi.label}: sample {s}, name-preserving family')
    return LawResult.from_deviation('tomography', tr.worst, tr.tol, tr.checked,
                                    tr.coverage, tr.counterexample)


def _causality_cases(ctx: SuiteContext, rng: np.random.Generator,
                     line: Optional[LineConfig]) -> List[Tuple[str, Basis, np.ndarray, Restriction, Restriction, bool]]:
    '''(name, basis, U, χ, ζ, expected verdict) for every worked example.'''
    basis = ctx.basis
    eye = np.eye(basis.dim, dtype=complex)
    cases = []
    for chi, zeta in ctx.nested_pairs():
        cases.append((f'identity {chi.label}/{zeta.label}', basis, eye, chi, zeta, True))
    for s in range(max(1, ctx.samples // 20)):
        u = random_name_preserving_unitary(rng, basis)
        for zeta in ctx.restrictions:
            cases.append((f'unitary {s} full/{zeta.label}', basis, u, _FULL, zeta, True))

    try:
        eu = extend_universe(ctx.universe, _TOGGLE_DIM)
    except UniverseTooLarge:
        eu = None
    if eu is not None:
        ext = Basis.of(eu.extended, ctx.cap)
        toggle = dense_toggle(eu, ctx.cap)
        for v in ctx.universe.vertices:
            zeta = eu.lift_restriction(by_vertex(v))
            cases.append((f'toggle {v}', ext, toggle, zeta, zeta, True))

    if line is not None:
        lb = Basis.of(line.universe, ctx.cap)
        m = to_dense(build_M(line, ctx.cap), lb)
        mc = m @ to_dense(build_C(line, math.pi / 4, ctx.cap), lb)
        swap = to_dense(build_swap(line, ctx.cap), lb)
        for v in line.vertices:
            chi, zeta = line.neighborhood(v), line.site(v)
            cases.append((f'M at {v}', lb, m, chi, zeta, True))
            cases.append((f'MC at {v}', lb, mc, chi, zeta, True))
        if line.length >= 3:
            v = line.vertices[0]
            cases.append((f'end swap at {v}', lb, swap, line.neighborhood(v), line.site(v), False))
    return cases


def causality(ctx: SuiteContext, line: Optional[LineConfig] = None) -> LawResult:
    '''
    Primal and dual causality agree on every example (the decider raises
    otherwise), each verdict is the expected one, and causal unitaries pull
    strictly local observables back to strictly local ones.
    '''
    tr = _Tracker(ctx.tol)
    rng = ctx.rng('causality')
    np_agree = 0
    cases = _causality_cases(ctx, rng, line)
    for name, basis, u, chi, zeta, expected in cases:
        verdict = dense_causality_verdict(u, basis.tables(chi), basis.tables(zeta), ctx.tol)
        tr.record(0.0 if verdict.primal == expected else 1.0,
                  lambda: f'{name}: causal={verdict.primal}, expected {expected}')
        if verdict.primal:
            tr.record(0.0 if verdict.strict_transfer else 1.0,
                      lambda: f'{name}: strictness not transferred')
        np_agree += verdict.dual_name_preserving == verdict.dual
    if line is not None:
        lb = Basis.of(line.universe, ctx.cap)
        m = to_dense(build_M(line, ctx.cap), lb)
        for v in line.vertices:
            ok = causal_compose_check(m, m, line.neighborhood(v, 2), line.neighborhood(v),
                                      line.site(v), line.universe, ctx.tol, ctx.cap)
            tr.record(0.0 if ok else 1.0, lambda: f'M twice at {v}: composition not causal')
    result = LawResult.from_deviation('causality', tr.worst, tr.tol, tr.checked, len(cases),
                                      tr.counterexample)
    note = f'name-preserving dual family agreed on {np_agree} of {len(cases)} verdicts'
    return LawResult(result.law, result.status, result.max_deviation, result.checked,
                     result.coverage, result.counterexample, note)


PROPOSITION_LAWS: Dict[str, Callable[[SuiteContext], LawResult]] = {
    'channel-positivity': channel_positivity,
    'channel-trace': channel_trace,
    'localize-is-local': localize_is_local,
    'locality-pictures': locality_pictures,
    'strict-locality': strict_locality,
    'tomography': tomography,
    'causality': causality,
}


def run_proposition_suite(universe: Universe, restrictions: Optional[Sequence[Restriction]] = None,
                          samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                          tol: float = EQ_TOL, kernels: Kernels = DEFAULT_KERNELS,
                          threads: int = 1, cap: int = UNIVERSE_CAP,
                          line: Optional[LineConfig] = None,
                          laws: Optional[Sequence[str]] = None) -> SuiteReport:
    '''
    Check the channel, locality, tomography and causality laws.

    ``line`` adds the propagation M, MC(π/4) and the end swap to the
    causality examples.

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
    chosen = laws or list(PROPOSITION_LAWS)
    checks = {}
    for name in chosen:
        if name == 'causality':
            checks[name] = lambda: causality(ctx, line)
        else:
            checks[name] = lambda f=PROPOSITION_LAWS[name]: f(ctx)
    return run_laws('proposition', universe, seed, checks, threads)

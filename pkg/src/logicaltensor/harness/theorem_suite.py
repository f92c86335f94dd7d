'''
End-to-end block decomposition of the line dynamics, with the rejection of
a non-causal unitary and the causality facts the construction relies on.
'''
import logging
import math
import threading
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..block_decomposition import (BlockDecomposition, block_decompose,
                                   causal_extension_check,
                                   causal_monotonicity_check)
from ..config import DEFAULT_SEED, EQ_TOL, UNIVERSE_CAP, format_number
from ..dynamics_examples import LineConfig, build_C, build_M, build_swap
from ..errors import PrerequisiteViolation, UniverseTooLarge
from ..graph_core import Basis
from ..state_algebra import to_dense
from .report import FAIL, PASS, LawResult, SuiteReport, run_laws

logger = logging.getLogger(__name__)

# (1 + 2|Σ|)^n extended graphs; n = 4 would need a 6561-dimensional dense space.
MAX_LINE_LENGTH = 3


class _Decompositions:
    '''Decompositions shared between laws, built once per operator name.'''

    def __init__(self, line: LineConfig, tol: float, seed: int, cap: int):
        self.line = line
        self.tol = tol
        self.seed = seed
        self.cap = cap
        self.basis = Basis.of(line.universe, cap)
        self._operators: Dict[str, np.ndarray] = {}
        self._built: Dict[str, BlockDecomposition] = {}
        self._lock = threading.Lock()

    def register(self, name: str, u: np.ndarray) -> None:
        self._operators[name] = u

    def operator(self, name: str) -> np.ndarray:
        return self._operators[name]

    def get(self, name: str) -> BlockDecomposition:
        with self._lock:
            if name not in self._built:
                chis = {v: self.line.neighborhood(v) for v in self.line.vertices}
                logger.info('decomposing %s on a line of %d', name, self.line.length)
                self._built[name] = block_decompose(self._operators[name], chis, None,
                                                    self.line.universe, tol=self.tol,
                                                    seed=self.seed, cap=self.cap)
            return self._built[name]


def _decomposition_law(law: str, name: str, store: _Decompositions) -> LawResult:
    decomposition = store.get(name)
    report = decomposition.report
    deviation = max(report.reconstruction_deviation, report.tau_product_deviation,
                    report.tau_commutator, report.k_commutator, report.order_deviation)
    not_strict = ([f'tau at {v}' for v, ok in report.tau_strict.items() if not ok]
                  + [f'K at {v}' for v, ok in report.k_strict.items() if not ok])
    if not_strict:
        deviation = max(deviation, 1.0)
    counterexample = None
    if not_strict:
        counterexample = 'not strictly local: ' + ', '.join(not_strict)
    elif report.witness is not None:
        counterexample = f'reconstruction fails on {report.witness}'
    checked = len(store.basis.graphs) + 2 * len(decomposition.vertices)
    return LawResult.from_deviation(law, deviation, store.tol, checked,
                                    counterexample=counterexample)


def _swap_rejected(store: _Decompositions) -> LawResult:
    law = 'swap-rejected'
    line = store.line
    if line.length < 3:
        return LawResult.skipped(law, 'the end swap is causal on lines shorter than 3')
    chis = {v: line.neighborhood(v) for v in line.vertices}
    swap = to_dense(build_swap(line, store.cap), store.basis)
    try:
        block_decompose(swap, chis, None, line.universe, tol=store.tol,
                        seed=store.seed, cap=store.cap)
    except PrerequisiteViolation as e:
        return LawResult(law, PASS, 0.0, 1, reason=f'rejected: {"; ".join(e.failures)}')
    # a ReconstructionFailure propagates and is reported as a failure by the runner
    return LawResult(law, FAIL, 1.0, 1, counterexample='end swap was decomposed')


def _extension_causal(store: _Decompositions) -> LawResult:
    '''U′ is ξ_v ζ_v-causal at every vertex, for U = M.'''
    law = 'extension-causal'
    decomposition = store.get('M')
    eu = decomposition.extended
    m = store.operator('M')
    failing = []
    for v in decomposition.vertices:
        ok = causal_extension_check(decomposition.u_ext, decomposition.xi_restrictions[v],
                                    store.line.site(v), eu, m, store.line.neighborhood(v),
                                    store.tol, store.cap)
        if not ok:
            failing.append(v)
    deviation = 1.0 if failing else 0.0
    counterexample = f'extension not causal at {failing[0]}' if failing else None
    return LawResult.from_deviation(law, deviation, store.tol, len(decomposition.vertices),
                                    counterexample=counterexample)


def _monotonicity(store: _Decompositions) -> LawResult:
    '''M is χ_v ζ_v-causal, hence causal for the wider input neighbourhood.'''
    law = 'monotonicity'
    line = store.line
    m = store.operator('M')
    failing = []
    for v in line.vertices:
        ok = causal_monotonicity_check(m, line.neighborhood(v), line.neighborhood(v, 2),
                                       line.site(v), line.site(v), line.universe,
                                       store.tol, store.cap)
        if not ok:
            failing.append(v)
    counterexample = f'not causal for the radius-2 neighbourhood of {failing[0]}' if failing else None
    return LawResult.from_deviation(law, 1.0 if failing else 0.0, store.tol, line.length,
                                    counterexample=counterexample)


def run_theorem_suite(line: LineConfig, thetas: Sequence[float] = (0.0, math.pi / 4),
                      tol: float = EQ_TOL, seed: int = DEFAULT_SEED, threads: int = 1,
                      cap: int = UNIVERSE_CAP,
                      laws: Optional[Sequence[str]] = None) -> SuiteReport:
    '''
    Decompose I, M and MC(θ) for every θ on ``line``, and check that the end
    swap is rejected before any gate is built.

    Parameters
    ----------
    line : LineConfig
        Line of at most ``MAX_LINE_LENGTH`` vertices.
    thetas : Sequence[float]
        Rotation angles of C.
    laws : Sequence[str], optional
        Subset of law names to run; all by default.

    Raises
    ------
    UniverseTooLarge
        If the line is longer than ``MAX_LINE_LENGTH`` or the extended basis
        exceeds ``cap``.
    '''
    if line.length > MAX_LINE_LENGTH:
        raise UniverseTooLarge(f'theorem suite supports lines of at most {MAX_LINE_LENGTH} '
                               f'vertices, got {line.length}')
    store = _Decompositions(line, tol, seed, cap)
    basis = store.basis
    m = to_dense(build_M(line, cap), basis)
    store.register('I', np.eye(basis.dim, dtype=complex))
    store.register('M', m)

    checks: Dict[str, Callable[[], LawResult]] = {
        'decompose-identity': lambda: _decomposition_law('decompose-identity', 'I', store),
        'decompose-M': lambda: _decomposition_law('decompose-M', 'M', store),
    }
    for theta in thetas:
        name = f'MC({format_number(theta)})'
        store.register(name, m @ to_dense(build_C(line, theta, cap), basis))
        law = f'decompose-{name}'
        checks[law] = lambda law=law, name=name: _decomposition_law(law, name, store)
    checks['swap-rejected'] = lambda: _swap_rejected(store)
    checks['extension-causal'] = lambda: _extension_causal(store)
    checks['monotonicity'] = lambda: _monotonicity(store)

    if laws is not None:
        checks = {k: v for k, v in checks.items() if k in set(laws)}
    return run_laws('theorem', line.universe, seed, checks, threads)

'''
Suite reports and the law runner.

A report lists one :class:`LawResult` per checked law. Its JSON form is
deterministic: keys are sorted, numbers are rounded to the report precision
and wall time is left out, so two runs with the same seed produce the same
bytes.
'''
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import pandas as pd

from ..config import REPORT_SCHEMA, format_number
from ..errors import LogicalTensorError
from ..graph_core import Universe

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
SKIPPED = 'skipped'


def _rounded(x: float) -> float:
    return float(format_number(x))


@dataclass(frozen=True)
class LawResult:
    '''
    Outcome of one law.

    Attributes
    ----------
    law : str
        Identifier of the law.
    status : str
        ``pass``, ``fail`` or ``skipped``.
    max_deviation : float
        Largest numerical deviation observed.
    checked : int
        Number of instances the law was evaluated on.
    coverage : int, optional
        Instances that met the law's hypothesis, for conditional laws.
    counterexample : str, optional
        First failing instance.
    reason : str, optional
        Why the law was skipped or failed outright.
    '''
    law: str
    status: str
    max_deviation: float = 0.0
    checked: int = 0
    coverage: Optional[int] = None
    counterexample: Optional[str] = None
    reason: Optional[str] = None

    @classmethod
    def from_deviation(cls, law: str, deviation: float, tol: float, checked: int,
                       coverage: Optional[int] = None,
                       counterexample: Optional[str] = None) -> 'LawResult':
        status = PASS if deviation <= tol else FAIL
        return cls(law, status, deviation, checked, coverage,
                   counterexample if status == FAIL else None)

    @classmethod
    def skipped(cls, law: str, reason: str) -> 'LawResult':
        return cls(law, SKIPPED, reason=reason)

    def to_dict(self) -> Dict:
        return {
            'law': self.law,
            'status': self.status,
            'max_deviation': _rounded(self.max_deviation),
            'checked': self.checked,
            'coverage': self.coverage,
            'counterexample': self.counterexample,
            'reason': self.reason,
        }


@dataclass
class SuiteReport:
    suite: str
    universe: Universe
    seed: int
    laws: List[LawResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        '''True iff no law failed; skipped laws do not count.'''
        return all(r.status != FAIL for r in self.laws)

    @property
    def max_deviation(self) -> float:
        return max((r.max_deviation for r in self.laws), default=0.0)

    def failures(self) -> List[LawResult]:
        return [r for r in self.laws if r.status == FAIL]

    def to_dict(self) -> Dict:
        return {
            'suite': self.suite,
            'universe': self.universe.to_dict(),
            'seed': self.seed,
            'passed': self.passed,
            'max_deviation': _rounded(self.max_deviation),
            'laws': [r.to_dict() for r in self.laws],
        }

    def to_json(self) -> str:
        return reports_to_json([self])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([r.to_dict() for r in self.laws],
                             columns=['law', 'status', 'max_deviation', 'checked',
                                      'coverage', 'counterexample', 'reason'])
        frame.insert(0, 'suite', self.suite)
        return frame

    def summary(self) -> str:
        '''Aligned human-readable table followed by the verdict line.'''
        frame = self.to_frame().drop(columns=['suite', 'reason'])
        frame['max_deviation'] = frame['max_deviation'].map(format_number)
        frame = frame.fillna('')
        verdict = 'PASS' if self.passed else 'FAIL'
        lines = [f'== {self.suite} suite (seed {self.seed}) ==',
                 frame.to_string(index=False),
                 f'{verdict}: {sum(r.status == PASS for r in self.laws)} passed, '
                 f'{len(self.failures())} failed, '
                 f'{sum(r.status == SKIPPED for r in self.laws)} skipped '
                 f'in {self.wall_time:.2f} s']
        return '\n'.join(lines)


def reports_to_json(reports: Sequence[SuiteReport]) -> str:
    payload = {'schema': REPORT_SCHEMA, 'reports': [r.to_dict() for r in reports]}
    return json.dumps(payload, sort_keys=True, indent=2)


def reports_to_frame(reports: Sequence[SuiteReport]) -> pd.DataFrame:
    return pd.concat([r.to_frame() for r in reports], ignore_index=True)


LawCheck = Callable[[], LawResult]


def _guarded(name: str, check: LawCheck) -> LawResult:
    try:
        result = check()
    except LogicalTensorError as e:
        # a decider's internal cross-check failing is a law failure, not a crash
        logger.warning('law %s raised %s: %s', name, type(e).__name__, e)
        return LawResult(name, FAIL, reason=f'{type(e).__name__}: {e}')
    logger.info('law %s: %s (max deviation %s)', name, result.status,
                format_number(result.max_deviation))
    return result


def run_laws(suite: str, universe: Universe, seed: int, checks: Mapping[str, LawCheck],
             threads: int = 1) -> SuiteReport:
    '''
    Run every check and collect the results in the order of ``checks``.

    Checks run on up to ``threads`` worker threads; each check owns its
    random generator, so the schedule does not affect the results.
    '''
    logger.info('%s suite: %d laws on %s', suite, len(checks), universe)
    start = time.perf_counter()
    names = list(checks)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda n: _guarded(n, checks[n]), names))
    else:
        results = [_guarded(n, checks[n]) for n in names]
    report = SuiteReport(suite, universe, seed, results, time.perf_counter() - start)
    logger.info('%s suite finished: %s', suite, 'pass' if report.passed else 'fail')
    return report

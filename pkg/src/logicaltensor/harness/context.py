'''
Shared inputs of the verification suites.
'''
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import DEFAULT_SAMPLES, DEFAULT_SEED, EQ_TOL, UNIVERSE_CAP
from ..graph_core import Basis, RestrictionTables, Universe
from ..restrictions import (Restriction, by_state, by_vertex, by_vertices,
                            commute, comprehends, fig5, require_restriction)
from ..tensor_trace import DEFAULT_KERNELS, Kernels
from .sampling import law_rng


def default_restrictions(universe: Universe) -> List[Restriction]:
    '''
    ζ_v for every vertex, the union of the first two, and, when the states
    include them, the fig5 restriction and the white-state selector.
    '''
    out = [by_vertex(v) for v in universe.vertices]
    if len(universe.vertices) >= 2:
        out.append(by_vertices(universe.vertices[:2]))
    if {'w', 'b'} <= set(universe.states):
        out.append(fig5())
        out.append(by_state('w'))
    return out


@dataclass
class SuiteContext:
    '''
    Universe, validated restrictions and knobs of one suite run.

    Raises
    ------
    InvalidRestriction
        On construction, if a restriction fails the axiom on ``universe``.
    '''
    universe: Universe
    restrictions: Sequence[Restriction]
    kernels: Kernels = DEFAULT_KERNELS
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol: float = EQ_TOL
    cap: int = UNIVERSE_CAP
    threads: int = 1
    _commuting: Optional[List[Tuple[Restriction, Restriction]]] = field(default=None, repr=False)
    _nested: Optional[List[Tuple[Restriction, Restriction]]] = field(default=None, repr=False)

    def __post_init__(self):
        self.restrictions = [require_restriction(r, self.universe, self.cap) for r in self.restrictions]

    @property
    def basis(self) -> Basis:
        return Basis.of(self.universe, self.cap)

    def tables(self, chi: Restriction) -> RestrictionTables:
        return self.basis.tables(chi)

    def rng(self, law: str) -> np.random.Generator:
        return law_rng(self.seed, law)

    def pairs(self) -> List[Tuple[Restriction, Restriction]]:
        return [(a, b) for a in self.restrictions for b in self.restrictions]

    def commuting_pairs(self) -> List[Tuple[Restriction, Restriction]]:
        '''Ordered pairs (χ, ζ) satisfying the four commutation conditions.'''
        if self._commuting is None:
            self._commuting = [(a, b) for a, b in self.pairs()
                               if commute(a, b, self.universe, self.cap).all]
        return self._commuting

    def nested_pairs(self) -> List[Tuple[Restriction, Restriction]]:
        '''Ordered pairs (χ, ζ) with ζ ⊑ χ.'''
        if self._nested is None:
            self._nested = [(a, b) for a, b in self.pairs()
                            if comprehends(b, a, self.universe, self.cap)]
        return self._nested

    def warm(self) -> None:
        '''Fill the shared caches before worker threads start.'''
        for chi in self.restrictions:
            self.tables(chi)
        self.commuting_pairs()
        self.nested_pairs()

'''
Worked dynamics on a line of vertices: the propagation M, the rotation C, the
flip counterexample and a non-causal end swap.

Every vertex of a line graph carries one of four states: ``empty``,
``right`` (a right-mover), ``left`` (a left-mover) or ``both``. A state is
a pair of bits (r, l). One step of M moves right-movers one vertex to the
right and left-movers one vertex to the left; a mover with no neighbour to
go to turns around in place. An absent vertex behaves as a wall, so M keeps
vertex sets unchanged on every graph.
'''
import logging
import math
from dataclasses import dataclass
from typing import Dict, Final, List, Optional, Sequence, Tuple

import numpy as np

from .config import UNIVERSE_CAP
from .errors import LogicalTensorError
from .graph_core import Basis, Graph, System, Universe, make_graph
from .restrictions import Restriction, by_vertex, line_neighborhood
from .state_algebra import Ket, OperatorMatrix, apply, compose

logger = logging.getLogger(__name__)

EMPTY: Final[str] = 'empty'
RIGHT: Final[str] = 'right'
LEFT: Final[str] = 'left'
BOTH: Final[str] = 'both'

LINE_STATES: Final[Tuple[str, ...]] = (EMPTY, RIGHT, LEFT, BOTH)

_BITS: Final[Dict[str, Tuple[int, int]]] = {
    EMPTY: (0, 0), RIGHT: (1, 0), LEFT: (0, 1), BOTH: (1, 1)}
_STATE_OF: Final[Dict[Tuple[int, int], str]] = {bits: s for s, bits in _BITS.items()}


@dataclass(frozen=True)
class LineConfig:
    '''
    A line of ``length`` vertices ``v1 < v2 < ...``.

    Vertex names are zero-padded so that their lexicographic order is the
    line order.
    '''
    length: int

    def __post_init__(self):
        if self.length < 2:
            raise LogicalTensorError(f'a line needs at least 2 vertices, got {self.length}')

    @property
    def vertices(self) -> Tuple[str, ...]:
        width = len(str(self.length))
        return tuple(f'v{i:0{width}d}' for i in range(1, self.length + 1))

    @property
    def universe(self) -> Universe:
        return Universe(self.vertices, LINE_STATES)

    def neighborhood(self, vertex: str, radius: int = 1) -> Restriction:
        '''χ_v: vertices within ``radius`` of ``vertex``.'''
        return line_neighborhood(self.vertices, vertex, radius)

    def site(self, vertex: str) -> Restriction:
        '''ζ_v.'''
        return by_vertex(vertex)

    def graph(self, states: Sequence[Optional[str]]) -> Graph:
        '''Graph with ``states[i]`` on the i-th vertex; ``None`` leaves it out.'''
        return make_graph(System(s, v) for v, s in zip(self.vertices, states) if s is not None)


def step_graph(graph: Graph, line: LineConfig) -> Graph:
    '''One synchronous hop of every mover, with bounces at walls.'''
    present = {s.vertex: _BITS[s.state] for s in graph}
    order = line.vertices
    out = []
    for i, v in enumerate(order):
        if v not in present:
            continue
        r, l = present[v]
        left = order[i - 1] if i > 0 else None
        right = order[i + 1] if i + 1 < len(order) else None
        new_r = present[left][0] if left in present else l
        new_l = present[right][1] if right in present else r
        out.append(System(_STATE_OF[(new_r, new_l)], v))
    return make_graph(out)


def build_M(line: LineConfig, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''The propagation M as a permutation of the basis graphs.'''
    basis = Basis.of(line.universe, cap)
    return OperatorMatrix({(step_graph(g, line), g): 1.0 for g in basis.graphs})


def _rotation(state: str, theta: float) -> List[Tuple[str, complex]]:
    c, s = math.cos(theta), math.sin(theta)
    if state == RIGHT:
        return [(RIGHT, c), (LEFT, s)]
    if state == LEFT:
        return [(LEFT, c), (RIGHT, -s)]
    return [(state, 1.0)]


def build_C_factor(line: LineConfig, vertex: str, theta: float,
                   cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''
    Rotation of the mover on ``vertex`` only:
    right ↦ cosθ right + sinθ left, left ↦ cosθ left − sinθ right.
    '''
    basis = Basis.of(line.universe, cap)
    entries: Dict[Tuple[Graph, Graph], complex] = {}
    for g in basis.graphs:
        state = g.state_at(vertex)
        if state is None:
            entries[(g, g)] = 1.0
            continue
        others = [s for s in g if s.vertex != vertex]
        for new_state, amp in _rotation(state, theta):
            entries[(make_graph(others + [System(new_state, vertex)]), g)] = amp
    return OperatorMatrix(entries)


def build_C(line: LineConfig, theta: float, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''Product over all vertices of the single-vertex rotations.'''
    factors = [build_C_factor(line, v, theta, cap) for v in line.vertices]
    out = factors[0]
    for f in factors[1:]:
        out = compose(out, f)
    return out


def build_flip(universe: Universe, white: str = 'w', black: str = 'b',
               cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''
    A|G⟩ = 0 if G has a black system, A|G⟩ = |G with every white made black⟩ otherwise.
    '''
    entries = {}
    for g in Basis.of(universe, cap).graphs:
        if any(s.state == black for s in g):
            continue
        flipped = make_graph(System(black if s.state == white else s.state, s.vertex) for s in g)
        entries[(flipped, g)] = 1.0
    return OperatorMatrix(entries)


def build_swap(line: LineConfig, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    '''
    Exchange the states of the two end vertices when both are present.

    A name-preserving permutation that is not causal for radius-1
    neighbourhoods once the line has 3 vertices or more.
    '''
    first, last = line.vertices[0], line.vertices[-1]
    entries = {}
    for g in Basis.of(line.universe, cap).graphs:
        a, b = g.state_at(first), g.state_at(last)
        if a is None or b is None:
            entries[(g, g)] = 1.0
            continue
        swapped = [s for s in g if s.vertex not in (first, last)]
        swapped += [System(b, first), System(a, last)]
        entries[(make_graph(swapped), g)] = 1.0
    return OperatorMatrix(entries)


def mirror_graph(graph: Graph, line: LineConfig) -> Graph:
    '''Reflect the line, v_i ↔ v_{n+1-i}, exchanging right- and left-movers.'''
    order = line.vertices
    swap = {RIGHT: LEFT, LEFT: RIGHT}
    return make_graph(System(swap.get(s.state, s.state), order[len(order) - 1 - order.index(s.vertex)])
                      for s in graph)


def build_mirror(line: LineConfig, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    return OperatorMatrix({(mirror_graph(g, line), g): 1.0
                           for g in Basis.of(line.universe, cap).graphs})


def evolve(psi: Ket, ops: Sequence[OperatorMatrix], steps: int) -> List[Ket]:
    '''
    Trajectory [ψ, Sψ, S²ψ, ...] of ``steps`` steps, where S is the
    product ops[0] ops[1] ... (the last operator acts first).
    '''
    trajectory = [psi]
    for _ in range(steps):
        for op in reversed(ops):
            psi = apply(op, psi)
        trajectory.append(psi)
        logger.debug('step %d: %d amplitudes, norm %.12g', len(trajectory) - 1, len(psi), psi.norm())
    return trajectory


def particle_number(graph: Graph) -> int:
    '''Number of movers, ``both`` counting two.'''
    return sum(sum(_BITS.get(s.state, (0, 0))) for s in graph)


def occupation_profile(psi: Ket, line: LineConfig) -> np.ndarray:
    '''Expected number of movers on each vertex, in line order.'''
    pos = {v: i for i, v in enumerate(line.vertices)}
    out = np.zeros(len(pos))
    for g, amp in psi.items():
        weight = abs(amp) ** 2
        for s in g:
            out[pos[s.vertex]] += weight * sum(_BITS.get(s.state, (0, 0)))
    return out

'''
Systems, graphs and universes: the labels of the canonical basis.

A system ``σ.v`` is an internal state attached to a vertex name. A graph is a
finite set of systems in which every vertex appears at most once. Graphs are
kept in canonical form (systems sorted by vertex), so equality of graphs is
equality of their encodings.
'''
import itertools
import logging
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import (Callable, Dict, Iterable, Iterator, List, Mapping,
                    Optional, Sequence, Tuple)

import numpy as np

from .config import UNIVERSE_CAP
from .errors import (IncompatibleUnion, SpecFileError, UniverseTooLarge,
                     WellNamednessViolation)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class System:
    '''An internal state ``state`` sitting on vertex ``vertex``.'''
    state: str
    vertex: str

    @property
    def token(self) -> str:
        return f'{self.state}.{self.vertex}'

    def __str__(self) -> str:
        return self.token


def parse_token(token: str) -> System:
    '''
    Parse a ``"state.vertex"`` token.

    The vertex is the part after the last dot, so flagged states such as
    ``0.w`` survive: ``"0.w.u"`` is the system ``0.w`` on ``u``.
    '''
    state, sep, vertex = token.rpartition('.')
    if not sep or not state or not vertex:
        raise SpecFileError(f'malformed system token {token!r}')
    return System(state, vertex)


@dataclass(frozen=True)
class Graph:
    '''
    Canonical finite set of systems with pairwise distinct vertices.

    Build graphs with :func:`make_graph`; the constructor trusts its input.
    '''
    systems: Tuple[System, ...] = ()

    def __iter__(self) -> Iterator[System]:
        return iter(self.systems)

    def __len__(self) -> int:
        return len(self.systems)

    def __bool__(self) -> bool:
        return bool(self.systems)

    def __str__(self) -> str:
        return '{' + ', '.join(s.token for s in self.systems) + '}'

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(s.vertex for s in self.systems)

    def state_at(self, vertex: str) -> Optional[str]:
        for s in self.systems:
            if s.vertex == vertex:
                return s.state
        return None

    def encode(self) -> Tuple[str, ...]:
        '''Sorted token list, the text form of the graph.'''
        return tuple(s.token for s in self.systems)

    def issubset(self, other: 'Graph') -> bool:
        return set(self.systems).issubset(other.systems)

    def difference(self, other: 'Graph') -> 'Graph':
        drop = set(other.systems)
        return Graph(tuple(s for s in self.systems if s not in drop))

    def select(self, keep: Callable[[System], bool]) -> 'Graph':
        '''Subgraph of the systems for which ``keep`` holds.'''
        return Graph(tuple(s for s in self.systems if keep(s)))


EMPTY_GRAPH = Graph()


def make_graph(systems: Iterable[System]) -> Graph:
    '''
    Canonical graph of a collection of systems.

    Parameters
    ----------
    systems : Iterable[System]
        Systems in any order. Identical duplicates are merged.

    Returns
    -------
    Graph
        Systems sorted by vertex.

    Raises
    ------
    WellNamednessViolation
        If one vertex carries two different states.
    '''
    by_vertex: Dict[str, System] = {}
    for s in systems:
        seen = by_vertex.get(s.vertex)
        if seen is not None and seen.state != s.state:
            raise WellNamednessViolation(
                f'vertex {s.vertex!r} appears in {seen.token} and {s.token}')
        by_vertex[s.vertex] = s
    return Graph(tuple(by_vertex[v] for v in sorted(by_vertex)))


def graph_from_tokens(tokens: Iterable[str]) -> Graph:
    return make_graph(parse_token(t) for t in tokens)


def support(graph: Graph) -> frozenset:
    '''Vertex set V(G).'''
    return frozenset(graph.vertices)


def graph_union(g: Graph, h: Graph) -> Graph:
    '''
    Union of two graphs.

    Raises
    ------
    IncompatibleUnion
        If some vertex carries different states in ``g`` and ``h``.
    '''
    union = try_union(g, h)
    if union is None:
        raise IncompatibleUnion(f'{g} and {h} disagree on a shared vertex')
    return union


def try_union(g: Graph, h: Graph) -> Optional[Graph]:
    '''Like :func:`graph_union` but returns ``None`` when undefined.'''
    states = {s.vertex: s.state for s in g.systems}
    for s in h.systems:
        seen = states.get(s.vertex)
        if seen is not None and seen != s.state:
            return None
    return make_graph(itertools.chain(g.systems, h.systems))


@dataclass(frozen=True)
class Universe:
    '''
    Finite vertex and state sets fixing the enumerable basis.

    Both tuples are stored sorted and deduplicated.
    '''
    vertices: Tuple[str, ...]
    states: Tuple[str, ...]

    def __post_init__(self):
        vertices = tuple(sorted(set(self.vertices)))
        states = tuple(sorted(set(self.states)))
        for v in vertices:
            if not v or '.' in v:
                raise SpecFileError(f'vertex names must be non-empty and dot-free: {v!r}')
        for s in states:
            if not s:
                raise SpecFileError('state symbols must be non-empty')
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'states', states)

    @property
    def graph_count(self) -> int:
        return (len(self.states) + 1) ** len(self.vertices)

    def contains(self, graph: Graph) -> bool:
        vs, ss = set(self.vertices), set(self.states)
        return all(s.vertex in vs and s.state in ss for s in graph)

    def to_dict(self) -> Dict[str, List[str]]:
        return {'vertices': list(self.vertices), 'states': list(self.states)}


def enumerate_graphs(universe: Universe, cap: int = UNIVERSE_CAP) -> List[Graph]:
    '''
    Every graph of the universe, each exactly once.

    The order is that of ``itertools.product`` over the vertices, each vertex
    being absent first and then carrying each state in order. The first
    graph is therefore ∅.

    Raises
    ------
    UniverseTooLarge
        If (|Σ|+1)^|V| exceeds ``cap``.
    '''
    count = universe.graph_count
    if count > cap:
        raise UniverseTooLarge(f'{count} graphs exceed the cap of {cap}')
    options = [(None,) + universe.states] * len(universe.vertices)
    graphs = []
    for choice in itertools.product(*options):
        graphs.append(Graph(tuple(
            System(s, v) for v, s in zip(universe.vertices, choice) if s is not None)))
    return graphs


@dataclass(frozen=True, eq=False)
class RestrictionTables:
    '''
    Index tables of one restriction over an enumerated basis.

    Attributes
    ----------
    part : np.ndarray
        ``part[i]`` is the basis index of the restricted graph of graph ``i``.
    rest : np.ndarray
        ``rest[i]`` is the basis index of its complement.
    cells : Dict[Tuple[int, int], int]
        ``cells[p, r]`` is the index of the graph with part ``p`` and
        complement ``r``. Pairs that reconstitute no graph are absent.
    '''
    basis: 'Basis'
    part: np.ndarray
    rest: np.ndarray
    cells: Dict[Tuple[int, int], int]

    def lookup(self, p: int, r: int) -> int:
        '''Index of the graph with part ``p`` and complement ``r``, or -1.'''
        return self.cells.get((int(p), int(r)), -1)

    def row(self, p: int) -> np.ndarray:
        '''``row(p)[r] == lookup(p, r)`` for every basis index ``r``.'''
        out = np.full(len(self.part), -1, dtype=np.intp)
        hit = np.flatnonzero(self.part == p)
        out[self.rest[hit]] = hit
        return out

    def column(self, r: int) -> np.ndarray:
        '''``column(r)[p] == lookup(p, r)`` for every basis index ``p``.'''
        out = np.full(len(self.rest), -1, dtype=np.intp)
        hit = np.flatnonzero(self.rest == r)
        out[self.part[hit]] = hit
        return out

    @property
    def recon(self) -> np.ndarray:
        '''Dense nonzero pattern of the tensor on basis kets.'''
        n = len(self.part)
        out = np.zeros((n, n), dtype=bool)
        out[self.part, self.rest] = True
        return out

    @property
    def range_indices(self) -> np.ndarray:
        return np.unique(self.part)


@dataclass(eq=False)
class Basis:
    '''
    Enumerated basis of a universe with an index lookup.

    Use :meth:`of` to share one instance per universe.
    '''
    universe: Universe
    graphs: List[Graph]
    index: Dict[Graph, int]
    _tables: Dict[object, RestrictionTables] = field(default_factory=dict, repr=False)
    _union: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @staticmethod
    def of(universe: Universe, cap: int = UNIVERSE_CAP) -> 'Basis':
        if universe.graph_count > cap:
            raise UniverseTooLarge(f'{universe.graph_count} graphs exceed the cap of {cap}')
        return _cached_basis(universe)

    @property
    def dim(self) -> int:
        return len(self.graphs)

    def position(self, graph: Graph) -> int:
        try:
            return self.index[graph]
        except KeyError:
            raise SpecFileError(f'{graph} is not a graph of {self.universe}') from None

    def tables(self, restriction) -> RestrictionTables:
        '''
        Index tables of ``restriction``, computed once per basis.

        ``restriction`` is anything exposing ``restrict(graph)``.
        '''
        with self._lock:
            cached = self._tables.get(restriction)
        if cached is not None:
            return cached
        n = self.dim
        part = np.empty(n, dtype=np.intp)
        rest = np.empty(n, dtype=np.intp)
        for i, g in enumerate(self.graphs):
            gc = restriction.restrict(g)
            part[i] = self.index[gc]
            rest[i] = self.index[g.difference(gc)]
        cells = {(int(p), int(r)): i for i, (p, r) in enumerate(zip(part, rest))}
        tables = RestrictionTables(self, part, rest, cells)
        with self._lock:
            self._tables[restriction] = tables
        logger.debug('tables of %s on %d graphs, range size %d',
                     getattr(restriction, 'label', restriction), n, len(np.unique(part)))
        return tables

    def union_pairs(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        '''
        Defined unions in coordinate form.

        Returns
        -------
        left, right, target : np.ndarray
            G_left[k] ∪ G_right[k] = G_target[k]; undefined unions are absent.
        '''
        if self._union is None:
            left, right, target = [], [], []
            for i, g in enumerate(self.graphs):
                for j, h in enumerate(self.graphs):
                    u = try_union(g, h)
                    if u is not None:
                        left.append(i)
                        right.append(j)
                        target.append(self.index[u])
            self._union = tuple(np.array(x, dtype=np.intp) for x in (left, right, target))
        return self._union

    def union_index(self, i: int, j: int) -> int:
        '''Index of G_i ∪ G_j, or -1 when undefined.'''
        u = try_union(self.graphs[i], self.graphs[j])
        return -1 if u is None else self.index[u]

    def supports(self) -> List[frozenset]:
        return [support(g) for g in self.graphs]


@lru_cache(maxsize=16)
def _cached_basis(universe: Universe) -> Basis:
    graphs = enumerate_graphs(universe, universe.graph_count)
    logger.info('enumerated %d graphs over %d vertices', len(graphs), len(universe.vertices))
    return Basis(universe, graphs, {g: i for i, g in enumerate(graphs)})


def universe_from_dict(data: Mapping) -> Universe:
    try:
        vertices: Sequence[str] = data['vertices']
        states: Sequence[str] = data['states']
    except (KeyError, TypeError):
        raise SpecFileError('a universe needs "vertices" and "states" lists') from None
    return Universe(tuple(str(v) for v in vertices), tuple(str(s) for s in states))

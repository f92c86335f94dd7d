'''
Restrictions χ : G ↦ G_χ ⊆ G and their algebra.

A selector is accepted as a restriction once :func:`validate_restriction`
confirmed the axiom G_χ ⊆ H ⊆ G ⇒ H_χ = G_χ on a universe. The complement
G_χ̄ = G \\ G_χ is only ever a graph-level operation, never a restriction.
'''
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import UNIVERSE_CAP
from .errors import (InternalContractViolation, InvalidRestriction,
                     SubsetViolation)
from .graph_core import EMPTY_GRAPH, Basis, Graph, Universe, make_graph

logger = logging.getLogger(__name__)

Selector = Callable[[Graph], Graph]


# Graphs memoized per Restriction object.
MEMO_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class Restriction:
    '''
    A selector with a label.

    Restrictions hash by identity, so index tables cached per basis stay
    attached to the object that produced them. Results are memoized in a
    bounded, thread-safe LRU cache.

    Attributes
    ----------
    selector : Callable[[Graph], Graph]
        Pure function returning a subgraph of its argument.
    label : str
        Identifier used in reports.
    pointwise_hint : bool, optional
        Known pointwise status, ``None`` when unknown.
    '''
    selector: Selector
    label: str
    pointwise_hint: Optional[bool] = None
    _cached: Callable[[Graph], Graph] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, '_cached', lru_cache(maxsize=MEMO_SIZE)(self._checked))

    def _checked(self, graph: Graph) -> Graph:
        out = self.selector(graph)
        if not out.issubset(graph):
            raise SubsetViolation(f'{self.label} maps {graph} to {out}, not a subgraph')
        return out

    def restrict(self, graph: Graph) -> Graph:
        return self._cached(graph)

    def cache_info(self):
        return self._cached.cache_info()

    def __call__(self, graph: Graph) -> Graph:
        return self.restrict(graph)

    def __str__(self) -> str:
        return self.label


def restrict(chi: Restriction, graph: Graph) -> Graph:
    '''G_χ.'''
    return chi.restrict(graph)


def complement_part(chi: Restriction, graph: Graph) -> Graph:
    '''G_χ̄ := G \\ G_χ.'''
    return graph.difference(chi.restrict(graph))


def _subgraphs_between(lower: Graph, upper: Graph):
    free = upper.difference(lower).systems
    for k in range(len(free) + 1):
        for extra in itertools.combinations(free, k):
            yield make_graph(lower.systems + extra)


@dataclass(frozen=True)
class ValidationReport:
    '''Outcome of the exhaustive axiom check; ``counterexample`` is the first failing (G, H).'''
    label: str
    passed: bool
    checked: int
    counterexample: Optional[Tuple[Graph, Graph]] = None

    def __str__(self) -> str:
        if self.passed:
            return f'{self.label}: restriction axiom holds on {self.checked} pairs'
        g, h = self.counterexample
        return f'{self.label}: axiom fails for G = {g}, H = {h}'


def validate_restriction(chi: Restriction, universe: Universe,
                         cap: int = UNIVERSE_CAP) -> ValidationReport:
    '''
    Check G_χ ⊆ H ⊆ G ⇒ H_χ = G_χ for every graph G and every H in between.

    Graphs are visited in basis order and the intermediate H by increasing
    size, so the counterexample reported is the first one in that order.

    Raises
    ------
    UniverseTooLarge
        If the basis cannot be enumerated under ``cap``.
    SubsetViolation
        If the selector is not even subgraph-valued.
    '''
    checked = 0
    for g in Basis.of(universe, cap).graphs:
        gc = chi.restrict(g)
        for h in _subgraphs_between(gc, g):
            checked += 1
            if chi.restrict(h) != gc:
                logger.info('restriction %s fails the axiom on %s / %s', chi.label, g, h)
                return ValidationReport(chi.label, False, checked, (g, h))
    return ValidationReport(chi.label, True, checked)


def require_restriction(chi: Restriction, universe: Universe,
                        cap: int = UNIVERSE_CAP) -> Restriction:
    '''Return ``chi`` unchanged, or raise :class:`InvalidRestriction` with the counterexample.'''
    report = validate_restriction(chi, universe, cap)
    if not report.passed:
        raise InvalidRestriction(str(report))
    return chi


def is_pointwise(chi: Restriction, universe: Universe, cap: int = UNIVERSE_CAP) -> bool:
    '''G_χ = ⋃_{σ.v ∈ G} {σ.v}_χ for every graph of the universe.'''
    for g in Basis.of(universe, cap).graphs:
        pieces = [s for single in g for s in chi.restrict(Graph((single,)))]
        if make_graph(pieces) != chi.restrict(g):
            return False
    return True


def compose(chi: Restriction, zeta: Restriction) -> Restriction:
    '''
    The candidate χζ : G ↦ (G_χ)_ζ, that is ζ ∘ χ.

    The result is not validated.
    '''
    pointwise = chi.pointwise_hint and zeta.pointwise_hint
    return Restriction(lambda g: zeta.restrict(chi.restrict(g)),
                       f'({chi.label} then {zeta.label})', pointwise or None)


def complement_then(chi: Restriction, zeta: Restriction) -> Restriction:
    '''The candidate χ̄ζ : G ↦ (G \\ G_χ)_ζ.'''
    pointwise = chi.pointwise_hint and zeta.pointwise_hint
    return Restriction(lambda g: zeta.restrict(complement_part(chi, g)),
                       f'(not {chi.label} then {zeta.label})', pointwise or None)


def union_restriction(chi: Restriction, zeta: Restriction,
                      universe: Optional[Universe] = None,
                      cap: int = UNIVERSE_CAP) -> Restriction:
    '''
    χ ∪ ζ : G ↦ G_χ ∪ G_ζ.

    When ``universe`` is given the union is validated there.

    Raises
    ------
    InternalContractViolation
        If the union fails the axiom, which only happens for invalid inputs.
    '''
    pointwise = chi.pointwise_hint and zeta.pointwise_hint
    union = Restriction(lambda g: make_graph(chi.restrict(g).systems + zeta.restrict(g).systems),
                        f'({chi.label} | {zeta.label})', pointwise or None)
    if universe is not None:
        report = validate_restriction(union, universe, cap)
        if not report.passed:
            raise InternalContractViolation(f'union of restrictions is not one: {report}')
    return union


@dataclass(frozen=True)
class CommutationReport:
    '''
    The four commutation conditions between χ and ζ.

    ``counterexamples`` maps each failing condition to the first graph on
    which it fails.
    '''
    plain: bool
    bar_left: bool
    bar_right: bool
    bar_both: bool
    counterexamples: Mapping[str, Graph] = field(default_factory=dict)

    @property
    def all(self) -> bool:
        return self.plain and self.bar_left and self.bar_right and self.bar_both

    def as_dict(self) -> Dict[str, bool]:
        return {'[chi,zeta]': self.plain, '[~chi,zeta]': self.bar_left,
                '[chi,~zeta]': self.bar_right, '[~chi,~zeta]': self.bar_both}


def commute(chi: Restriction, zeta: Restriction, universe: Universe,
            cap: int = UNIVERSE_CAP) -> CommutationReport:
    '''
    Check [χ,ζ] = [χ̄,ζ] = [χ,ζ̄] = [χ̄,ζ̄] = 0 pointwise on every graph.

    A barred factor acts through :func:`complement_part`; for instance
    [χ̄,ζ] compares (G_χ̄)_ζ with (G_ζ)_χ̄.
    '''
    def chi_(g): return chi.restrict(g)
    def zeta_(g): return zeta.restrict(g)
    def chib(g): return complement_part(chi, g)
    def zetab(g): return complement_part(zeta, g)

    pairs = {
        'plain': (chi_, zeta_),
        'bar_left': (chib, zeta_),
        'bar_right': (chi_, zetab),
        'bar_both': (chib, zetab),
    }
    found: Dict[str, Graph] = {}
    for g in Basis.of(universe, cap).graphs:
        for name, (first, second) in pairs.items():
            if name not in found and second(first(g)) != first(second(g)):
                found[name] = g
    return CommutationReport(
        'plain' not in found, 'bar_left' not in found,
        'bar_right' not in found, 'bar_both' not in found,
        found)


def comprehends(zeta: Restriction, chi: Restriction, universe: Universe,
                cap: int = UNIVERSE_CAP, chunk: int = 512) -> bool:
    '''
    ζ ⊑ χ.

    Both conditions are checked: G_χζ = G_ζ on every graph, and the overlap
    identity δ(H_ζ̄ = G_ζ̄) = δ(H_χζ̄ = G_χζ̄)·δ(H_χ̄ = G_χ̄) on every pair of
    basis graphs, where G_χζ̄ = G_χ \\ (G_χ)_ζ.

    Parameters
    ----------
    zeta : Restriction
        Candidate subsystem.
    chi : Restriction
        Wider system.
    universe : Universe
        Universe whose graphs are all visited.
    chunk : int, optional
        Rows of the pairwise overlap comparison held in memory at once.

    Returns
    -------
    bool
        ``False`` at the first graph or pair violating either condition.
    '''
    basis = Basis.of(universe, cap)
    graphs = basis.graphs
    zeta_bar = np.empty(basis.dim, dtype=np.intp)
    chi_zeta_bar = np.empty(basis.dim, dtype=np.intp)
    chi_bar = np.empty(basis.dim, dtype=np.intp)
    for i, g in enumerate(graphs):
        gc = chi.restrict(g)
        if zeta.restrict(gc) != zeta.restrict(g):
            return False
        zeta_bar[i] = basis.index[complement_part(zeta, g)]
        chi_zeta_bar[i] = basis.index[complement_part(zeta, gc)]
        chi_bar[i] = basis.index[g.difference(gc)]
    for start in range(0, basis.dim, chunk):
        rows = slice(start, start + chunk)
        lhs = zeta_bar[rows, None] == zeta_bar[None, :]
        rhs = ((chi_zeta_bar[rows, None] == chi_zeta_bar[None, :])
               & (chi_bar[rows, None] == chi_bar[None, :]))
        if np.any(lhs != rhs):
            return False
    return True


def restriction_range(chi: Restriction, universe: Universe,
                      cap: int = UNIVERSE_CAP) -> List[Graph]:
    '''The graphs G_χ, in basis order.'''
    basis = Basis.of(universe, cap)
    return [basis.graphs[i] for i in basis.tables(chi).range_indices]


# Built-in restrictions.

def by_vertex(vertex: str) -> Restriction:
    '''ζ_v: the system on ``vertex``, if any.'''
    return Restriction(lambda g: g.select(lambda s: s.vertex == vertex),
                       f'zeta_{vertex}', True)


def by_vertices(vertices: Sequence[str], label: Optional[str] = None) -> Restriction:
    '''Union of ζ_v over ``vertices``.'''
    keep = frozenset(vertices)
    return Restriction(lambda g: g.select(lambda s: s.vertex in keep),
                       label or 'zeta_{' + ','.join(sorted(keep)) + '}', True)


def by_state(state: str) -> Restriction:
    '''All systems in internal state ``state``.'''
    return Restriction(lambda g: g.select(lambda s: s.state == state),
                       f'state_{state}', True)


def fig5(white: str = 'w', black: str = 'b') -> Restriction:
    '''
    G itself when G has only black systems, otherwise its white systems.

    ∅ counts as all-black. Not pointwise.
    '''
    def select(g: Graph) -> Graph:
        whites = g.select(lambda s: s.state == white)
        return whites if whites else g

    return Restriction(select, 'fig5', False)


def mu() -> Restriction:
    '''Systems whose flagged state ``b.σ`` has flag ``b = 0``.'''
    return Restriction(lambda g: g.select(lambda s: s.state.startswith('0.')), 'mu', True)


def full() -> Restriction:
    return Restriction(lambda g: g, 'full', True)


def empty() -> Restriction:
    '''G_χ = ∅; the induced traceout is the full trace.'''
    return Restriction(lambda g: EMPTY_GRAPH, 'empty', True)


def table(mapping: Mapping[Graph, Graph], label: str = 'table') -> Restriction:
    '''
    Restriction given by an explicit G → G_χ table.

    Raises
    ------
    InvalidRestriction
        When asked for a graph the table does not list.
    '''
    frozen = dict(mapping)

    def select(g: Graph) -> Graph:
        try:
            return frozen[g]
        except KeyError:
            raise InvalidRestriction(f'{label} does not list {g}') from None

    return Restriction(select, label, None)


def line_neighborhood(vertices: Sequence[str], vertex: str, radius: int = 1) -> Restriction:
    '''
    Vertices within ``radius`` steps of ``vertex`` along the ordered line
    ``vertices``, clamped at the borders.
    '''
    i = list(vertices).index(vertex)
    near = vertices[max(0, i - radius): i + radius + 1]
    return by_vertices(near, f'chi_{vertex}^{radius}')

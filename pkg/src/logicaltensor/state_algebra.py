'''
Sparse kets and operators over the graph basis.

Operators are keyed by ``(bra, ket)`` pairs: the entry stored under ``(G, H)``
is ⟨G|A|H⟩, so the rank-one operator |G⟩⟨H| has a single entry at ``(G, H)``.
'''
import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np

from .config import EQ_TOL, UNIVERSE_CAP, ZERO_TOL
from .graph_core import Basis, Graph, Universe, support

logger = logging.getLogger(__name__)


class Role(enum.Enum):
    '''Documentation tag; both roles behave identically in finite dimension.'''
    TRACE_CLASS = 'trace-class'
    BOUNDED = 'bounded'


def _pruned(mapping: Mapping, tol: float) -> Dict:
    return {k: complex(v) for k, v in mapping.items() if abs(v) > tol}


@dataclass(frozen=True)
class Ket:
    '''Finite combination of basis graphs; amplitudes at or below ``ZERO_TOL`` are dropped.'''
    amplitudes: Mapping[Graph, complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'amplitudes', _pruned(self.amplitudes, ZERO_TOL))

    def __getitem__(self, graph: Graph) -> complex:
        return self.amplitudes.get(graph, 0j)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def items(self):
        return self.amplitudes.items()

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    def is_zero(self) -> bool:
        return not self.amplitudes


@dataclass(frozen=True)
class OperatorMatrix:
    '''Sparse matrix over the graph basis, entries keyed by ``(bra, ket)``.'''
    entries: Mapping[Tuple[Graph, Graph], complex] = field(default_factory=dict)
    role: Role = Role.BOUNDED

    def __post_init__(self):
        object.__setattr__(self, 'entries', _pruned(self.entries, ZERO_TOL))

    def __getitem__(self, key: Tuple[Graph, Graph]) -> complex:
        return self.entries.get(key, 0j)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def as_role(self, role: Role) -> 'OperatorMatrix':
        return OperatorMatrix(self.entries, role)


def basis_ket(graph: Graph) -> Ket:
    return Ket({graph: 1.0})


def outer(g: Graph, h: Graph, role: Role = Role.BOUNDED) -> OperatorMatrix:
    '''The rank-one operator |g⟩⟨h|.'''
    return OperatorMatrix({(g, h): 1.0}, role)


def identity(universe: Universe, cap: int = UNIVERSE_CAP) -> OperatorMatrix:
    return OperatorMatrix({(g, g): 1.0 for g in Basis.of(universe, cap).graphs})


def inner_product(phi: Ket, psi: Ket) -> complex:
    '''⟨φ|ψ⟩, conjugate-linear in ``phi``.'''
    small, large = (phi, psi) if len(phi) <= len(psi) else (psi, phi)
    total = 0j
    for g in small.amplitudes:
        if g in large.amplitudes:
            total += phi[g].conjugate() * psi[g]
    return total


def apply(a: OperatorMatrix, psi: Ket) -> Ket:
    '''(Aψ)(H) = Σ_G A_{HG} ψ(G).'''
    out: Dict[Graph, complex] = defaultdict(complex)
    for (h, g), x in a.entries.items():
        amp = psi.amplitudes.get(g)
        if amp is not None:
            out[h] += x * amp
    return Ket(out)


def compose(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    '''The product AB.'''
    rows: Dict[Graph, List[Tuple[Graph, complex]]] = defaultdict(list)
    for (h, k), y in b.entries.items():
        rows[h].append((k, y))
    out: Dict[Tuple[Graph, Graph], complex] = defaultdict(complex)
    for (g, h), x in a.entries.items():
        for k, y in rows.get(h, ()):
            out[(g, k)] += x * y
    return OperatorMatrix(out, a.role)


def adjoint(a: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix({(h, g): x.conjugate() for (g, h), x in a.entries.items()}, a.role)


def scale(a: OperatorMatrix, alpha: complex) -> OperatorMatrix:
    return OperatorMatrix({k: alpha * x for k, x in a.entries.items()}, a.role)


def add(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    out: Dict[Tuple[Graph, Graph], complex] = defaultdict(complex, a.entries)
    for k, y in b.entries.items():
        out[k] += y
    return OperatorMatrix(out, a.role)


def add_kets(phi: Ket, psi: Ket) -> Ket:
    out: Dict[Graph, complex] = defaultdict(complex, phi.amplitudes)
    for g, y in psi.amplitudes.items():
        out[g] += y
    return Ket(out)


def scale_ket(psi: Ket, alpha: complex) -> Ket:
    return Ket({g: alpha * x for g, x in psi.amplitudes.items()})


def ket_outer(phi: Ket, psi: Ket, role: Role = Role.TRACE_CLASS) -> OperatorMatrix:
    '''|φ⟩⟨ψ|.'''
    return OperatorMatrix({(g, h): x * y.conjugate()
                           for g, x in phi.items() for h, y in psi.items()}, role)


def full_trace(rho: OperatorMatrix) -> complex:
    '''Tr(ρ) = Σ_G ρ_{GG}.'''
    return sum((x for (g, h), x in rho.entries.items() if g == h), 0j)


def max_entry_distance(a: OperatorMatrix, b: OperatorMatrix) -> float:
    keys = set(a.entries) | set(b.entries)
    return max((abs(a[k] - b[k]) for k in keys), default=0.0)


def ket_distance(phi: Ket, psi: Ket) -> float:
    keys = set(phi.amplitudes) | set(psi.amplitudes)
    return max((abs(phi[g] - psi[g]) for g in keys), default=0.0)


def to_dense(a: OperatorMatrix, basis: Basis) -> np.ndarray:
    n = basis.dim
    out = np.zeros((n, n), dtype=complex)
    for (g, h), x in a.entries.items():
        out[basis.position(g), basis.position(h)] = x
    return out


def from_dense(matrix: np.ndarray, basis: Basis, role: Role = Role.BOUNDED,
               tol: float = ZERO_TOL) -> OperatorMatrix:
    rows, cols = np.nonzero(np.abs(matrix) > tol)
    graphs = basis.graphs
    return OperatorMatrix({(graphs[i], graphs[j]): complex(matrix[i, j])
                           for i, j in zip(rows, cols)}, role)


def ket_to_dense(psi: Ket, basis: Basis) -> np.ndarray:
    out = np.zeros(basis.dim, dtype=complex)
    for g, x in psi.items():
        out[basis.position(g)] = x
    return out


def ket_from_dense(vector: np.ndarray, basis: Basis, tol: float = ZERO_TOL) -> Ket:
    idx = np.nonzero(np.abs(vector) > tol)[0]
    return Ket({basis.graphs[i]: complex(vector[i]) for i in idx})


def unitarity_deviation(matrix: np.ndarray) -> float:
    '''max(‖A†A − I‖_max, ‖AA† − I‖_max).'''
    eye = np.eye(matrix.shape[0])
    left = np.max(np.abs(matrix.conj().T @ matrix - eye), initial=0.0)
    right = np.max(np.abs(matrix @ matrix.conj().T - eye), initial=0.0)
    return float(max(left, right))


def is_unitary(a: OperatorMatrix, universe: Universe, tol: float = EQ_TOL,
               cap: int = UNIVERSE_CAP) -> bool:
    '''
    Unitarity over the enumerated basis of ``universe``.

    Raises
    ------
    UniverseTooLarge
        If the basis cannot be enumerated under ``cap``.
    '''
    basis = Basis.of(universe, cap)
    return unitarity_deviation(to_dense(a, basis)) <= tol


def is_name_preserving(a: OperatorMatrix, tol: float = ZERO_TOL) -> bool:
    '''True iff no entry above ``tol`` links graphs of different supports.'''
    return all(abs(x) <= tol or support(g) == support(h)
               for (g, h), x in a.entries.items())


def name_preservation_mask(basis: Basis) -> np.ndarray:
    '''Boolean matrix, true where the two basis graphs share their support.'''
    keys = {}
    labels = np.array([keys.setdefault(s, len(keys)) for s in basis.supports()])
    return labels[:, None] == labels[None, :]


def dense_is_name_preserving(matrix: np.ndarray, basis: Basis, tol: float = ZERO_TOL) -> bool:
    return not np.any((np.abs(matrix) > tol) & ~name_preservation_mask(basis))


def graphs_of(items: Iterable[Tuple[Graph, Graph]]) -> List[Graph]:
    seen: Dict[Graph, None] = {}
    for g, h in items:
        seen.setdefault(g)
        seen.setdefault(h)
    return list(seen)


def to_records(obj) -> List[Dict]:
    '''JSON-ready list form of a ket or an operator.'''
    if isinstance(obj, Ket):
        return [{'re': x.real, 'im': x.imag, 'graph': list(g.encode())}
                for g, x in sorted(obj.items(), key=lambda kv: kv[0].encode())]
    return [{'re': x.real, 'im': x.imag, 'bra': list(g.encode()), 'ket': list(h.encode())}
            for (g, h), x in sorted(obj.items(), key=lambda kv: (kv[0][0].encode(), kv[0][1].encode()))]

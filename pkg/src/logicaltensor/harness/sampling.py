'''
Seeded random operators over an enumerated basis.
'''
import zlib
from typing import List, Optional, Tuple

import numpy as np

from ..graph_core import Basis, RestrictionTables


def law_rng(seed: int, law: str) -> np.random.Generator:
    '''Generator owned by one law, derived from the suite seed and the law name.'''
    return np.random.default_rng([seed, zlib.crc32(law.encode())])


def random_matrix(rng: np.random.Generator, n: int, density: float = 1.0) -> np.ndarray:
    '''Complex Gaussian matrix; with ``density`` < 1 each entry is kept with that probability.'''
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if density < 1.0:
        m = m * (rng.random((n, n)) < density)
    return m


def random_positive(rng: np.random.Generator, n: int, rank: Optional[int] = None) -> np.ndarray:
    '''B†B / Tr(B†B) for a complex Gaussian B of ``rank`` rows.'''
    rank = rank or n
    b = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
    rho = b.conj().T @ b
    return rho / np.trace(rho).real


def positive_on(rng: np.random.Generator, n: int, indices: np.ndarray) -> np.ndarray:
    '''Random density matrix supported on the basis ``indices``.'''
    out = np.zeros((n, n), dtype=complex)
    out[np.ix_(indices, indices)] = random_positive(rng, len(indices))
    return out


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    '''Haar-distributed unitary from the QR decomposition of a Gaussian matrix.'''
    q, r = np.linalg.qr(random_matrix(rng, n))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def support_blocks(basis: Basis) -> List[np.ndarray]:
    '''Basis indices grouped by vertex support, in order of first appearance.'''
    groups = {}
    for i, s in enumerate(basis.supports()):
        groups.setdefault(s, []).append(i)
    return [np.array(g, dtype=np.intp) for g in groups.values()]


def random_name_preserving_unitary(rng: np.random.Generator, basis: Basis) -> np.ndarray:
    '''Block-diagonal unitary, one Haar block per support; the empty graph is fixed.'''
    u = np.zeros((basis.dim, basis.dim), dtype=complex)
    for block in support_blocks(basis):
        u[np.ix_(block, block)] = 1.0 if len(block) == 1 else random_unitary(rng, len(block))
    return u


def random_name_preserving_on(rng: np.random.Generator, basis: Basis,
                              indices: np.ndarray) -> np.ndarray:
    '''
    Random operator acting within ``indices`` and coupling only graphs of
    equal support.
    '''
    keep = set(int(i) for i in indices)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for block in support_blocks(basis):
        block = np.array([i for i in block if int(i) in keep], dtype=np.intp)
        if len(block):
            out[np.ix_(block, block)] = random_matrix(rng, len(block))
    return out


def consistent_rectangle(rng: np.random.Generator,
                         tables: RestrictionTables) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Random χ-range indices ``parts`` and complement indices ``rests`` such
    that every part reconstitutes with every rest.
    '''
    r0 = rng.choice(np.unique(tables.rest))
    parts = np.flatnonzero(tables.column(r0) >= 0)
    parts = rng.choice(parts, size=rng.integers(1, len(parts) + 1), replace=False)
    candidates = np.flatnonzero(np.all([tables.row(p) >= 0 for p in parts], axis=0))
    rests = rng.choice(candidates, size=rng.integers(1, len(candidates) + 1), replace=False)
    return np.sort(parts), np.sort(rests)


def consistent_pair(rng: np.random.Generator,
                    tables: RestrictionTables) -> Tuple[np.ndarray, np.ndarray]:
    '''Random χ-consistent density matrices ρ (on range graphs) and σ (on complements).'''
    n = tables.basis.dim
    parts, rests = consistent_rectangle(rng, tables)
    return positive_on(rng, n, parts), positive_on(rng, n, rests)


def random_consistency_preserving(rng: np.random.Generator, tables: RestrictionTables,
                                  density: float = 0.5) -> np.ndarray:
    '''
    Random χ-consistency-preserving operator.

    Entry (H, G) may be nonzero only when H reconstitutes with every complement
    that G is paired with, and G with every complement of H. Columns and rows
    of graphs outside the χ-range are unconstrained.
    '''
    n = tables.basis.dim
    recon = tables.recon
    ok = np.ones((n, n), dtype=bool)
    for j in tables.range_indices:
        ok[:, j] = np.all(recon[:, tables.rest[tables.part == j]], axis=1)
    return random_matrix(rng, n, density) * (ok & ok.T)


def random_diagonal(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n))

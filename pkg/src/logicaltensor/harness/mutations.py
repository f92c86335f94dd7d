'''
Deliberately broken kernels, to show that the suites notice them.

``drop-overlap`` forgets the ⟨H_χ̄|G_χ̄⟩ factor of the traceout;
``drop-zeroing`` forms the tensor as the plain union of the two graphs
without checking that they reconstitute.
'''
from typing import Dict

import numpy as np

from ..errors import SpecFileError
from ..graph_core import RestrictionTables
from ..tensor_trace import DEFAULT_KERNELS, Kernels


def overlap_all_ones(tables: RestrictionTables) -> np.ndarray:
    n = tables.basis.dim
    return np.ones((n, n))


def union_tensor_kets(phi: np.ndarray, psi: np.ndarray, tables: RestrictionTables) -> np.ndarray:
    left, right, target = tables.basis.union_pairs()
    out = np.zeros(len(phi), dtype=complex)
    np.add.at(out, target, phi[left] * psi[right])
    return out


def union_tensor_ops(a: np.ndarray, b: np.ndarray, tables: RestrictionTables) -> np.ndarray:
    left, right, target = tables.basis.union_pairs()
    # same footprint as the dense operands
    union = np.full(a.shape, -1, dtype=np.intp)
    union[left, right] = target
    out = np.zeros(a.shape, dtype=complex)
    b_nz = np.argwhere(b != 0)
    for g, h in np.argwhere(a != 0):
        rows = union[g, b_nz[:, 0]]
        cols = union[h, b_nz[:, 1]]
        ok = (rows >= 0) & (cols >= 0)
        np.add.at(out, (rows[ok], cols[ok]), a[g, h] * b[b_nz[ok, 0], b_nz[ok, 1]])
    return out


MUTATIONS: Dict[str, Kernels] = {
    'none': DEFAULT_KERNELS,
    'drop-overlap': Kernels(overlap=overlap_all_ones, name='drop-overlap'),
    'drop-zeroing': Kernels(tensor_kets=union_tensor_kets, tensor_ops=union_tensor_ops,
                            name='drop-zeroing'),
}


def kernels_for(name: str) -> Kernels:
    try:
        return MUTATIONS[name]
    except KeyError:
        raise SpecFileError(f'unknown mutation {name!r}; choose from {", ".join(MUTATIONS)}') from None

'''
Readers and writers of the JSON input files.

    universe     {"vertices": [...], "states": [...]}
    restriction  {"kind": "by_vertex" | "by_vertices" | "by_state" | "fig5" | "mu"
                  | "full" | "empty" | "union" | "compose" | "table"
                  | "line_neighborhood", ...}
    ket          [{"re": x, "im": y, "graph": ["w.u", ...]}, ...]
    operator     [{"re": x, "im": y, "bra": [...], "ket": [...]}, ...]
    trajectory   [ket, ket, ...]

Ket and operator files may also be objects {"universe": {...}, "entries":
[...]} carrying their universe along.
'''
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..config import format_number
from ..errors import LogicalTensorError, SpecFileError
from ..graph_core import Basis, Graph, Universe, graph_from_tokens, universe_from_dict
from ..restrictions import (Restriction, by_state, by_vertex, by_vertices,
                            compose, empty, fig5, full, line_neighborhood, mu,
                            table, union_restriction)
from ..state_algebra import Ket, OperatorMatrix, to_records

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    '''
    Load a JSON file.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    SpecFileError
        If the content is not valid JSON.
    '''
    path = Path(path)
    with path.open(encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise SpecFileError(f'{path}: invalid JSON ({e})') from None


def write_json(data: Any, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')


def load_universe(path: PathLike) -> Universe:
    return universe_from_dict(read_json(path))


def dump_universe(universe: Universe, path: PathLike) -> None:
    write_json(universe.to_dict(), path)


def _tokens(value: Any, where: str) -> Graph:
    if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
        raise SpecFileError(f'{where}: a graph is a list of "state.vertex" tokens')
    try:
        return graph_from_tokens(value)
    except LogicalTensorError as e:
        raise SpecFileError(f'{where}: {e}') from None


def _amplitude(record: Mapping, where: str) -> complex:
    try:
        return complex(float(record.get('re', 0.0)), float(record.get('im', 0.0)))
    except (TypeError, ValueError):
        raise SpecFileError(f'{where}: "re" and "im" must be numbers') from None


def _split_entries(data: Any, where: str) -> Tuple[Optional[Universe], List[Mapping]]:
    if isinstance(data, Mapping):
        universe = universe_from_dict(data['universe']) if 'universe' in data else None
        entries = data.get('entries')
    else:
        universe, entries = None, data
    if not isinstance(entries, list) or not all(isinstance(r, Mapping) for r in entries):
        raise SpecFileError(f'{where}: expected a list of entry objects')
    return universe, entries


def ket_from_records(records: Sequence[Mapping], where: str = 'ket') -> Ket:
    amplitudes: Dict[Graph, complex] = {}
    for i, record in enumerate(records):
        g = _tokens(record.get('graph'), f'{where}[{i}]')
        amplitudes[g] = amplitudes.get(g, 0j) + _amplitude(record, f'{where}[{i}]')
    return Ket(amplitudes)


def operator_from_records(records: Sequence[Mapping], where: str = 'operator') -> OperatorMatrix:
    entries: Dict[Tuple[Graph, Graph], complex] = {}
    for i, record in enumerate(records):
        key = (_tokens(record.get('bra'), f'{where}[{i}].bra'),
               _tokens(record.get('ket'), f'{where}[{i}].ket'))
        entries[key] = entries.get(key, 0j) + _amplitude(record, f'{where}[{i}]')
    return OperatorMatrix(entries)


def load_ket(path: PathLike) -> Tuple[Ket, Optional[Universe]]:
    '''Ket stored in ``path`` and the universe it carries, if any.'''
    universe, entries = _split_entries(read_json(path), str(path))
    return ket_from_records(entries, str(path)), universe


def load_operator(path: PathLike) -> Tuple[OperatorMatrix, Optional[Universe]]:
    '''Operator stored in ``path`` and the universe it carries, if any.'''
    universe, entries = _split_entries(read_json(path), str(path))
    return operator_from_records(entries, str(path)), universe


def _rounded(records: List[Dict]) -> List[Dict]:
    # adding 0.0 turns -0.0 into 0.0
    return [{**r, 're': float(format_number(r['re'])) + 0.0,
             'im': float(format_number(r['im'])) + 0.0}
            for r in records]


def _with_universe(records: List[Dict], universe: Optional[Universe]) -> Any:
    records = _rounded(records)
    if universe is None:
        return records
    return {'universe': universe.to_dict(), 'entries': records}


def dump_ket(psi: Ket, path: PathLike, universe: Optional[Universe] = None) -> None:
    write_json(_with_universe(to_records(psi), universe), path)


def dump_operator(a: OperatorMatrix, path: PathLike, universe: Optional[Universe] = None) -> None:
    write_json(_with_universe(to_records(a), universe), path)


def dump_trajectory(trajectory: Sequence[Ket], path: PathLike) -> None:
    write_json([_rounded(to_records(psi)) for psi in trajectory], path)


def load_trajectory(path: PathLike) -> List[Ket]:
    data = read_json(path)
    if not isinstance(data, list):
        raise SpecFileError(f'{path}: a trajectory is a list of kets')
    return [ket_from_records(k, f'{path}[{i}]') for i, k in enumerate(data)]


def graphs_in(obj: Union[Ket, OperatorMatrix]) -> List[Graph]:
    if isinstance(obj, Ket):
        return list(obj.amplitudes)
    return [g for pair in obj.entries for g in pair]


def infer_universe(objs: Sequence[Union[Ket, OperatorMatrix]]) -> Universe:
    '''Smallest universe containing every graph of ``objs``.'''
    vertices, states = set(), set()
    for obj in objs:
        for g in graphs_in(obj):
            for s in g:
                vertices.add(s.vertex)
                states.add(s.state)
    if not vertices:
        raise SpecFileError('cannot infer a universe from empty inputs')
    return Universe(tuple(vertices), tuple(states))


def check_within(obj: Union[Ket, OperatorMatrix], universe: Universe, where: str) -> None:
    '''
    Raises
    ------
    SpecFileError
        If a graph of ``obj`` uses a vertex or state outside ``universe``.
    '''
    for g in graphs_in(obj):
        if not universe.contains(g):
            raise SpecFileError(f'{where}: graph {g} is not in the universe {universe.to_dict()}')


# Restrictions.

def _field(data: Mapping, key: str, kind: str) -> Any:
    try:
        return data[key]
    except KeyError:
        raise SpecFileError(f'restriction of kind {kind!r} needs a {key!r} field') from None


def _table_spec(data: Mapping, universe: Universe) -> Restriction:
    rows = _field(data, 'table', 'table')
    if not isinstance(rows, list):
        raise SpecFileError('"table" must be a list of {"graph", "part"} objects')
    mapping = {}
    for i, row in enumerate(rows):
        g = _tokens(row.get('graph'), f'table[{i}].graph')
        mapping[g] = _tokens(row.get('part'), f'table[{i}].part')
    missing = [g for g in Basis.of(universe).graphs if g not in mapping]
    if missing:
        raise SpecFileError(f'table restriction does not list {missing[0]} '
                            f'({len(missing)} graphs missing)')
    return table(mapping, str(data.get('label', 'table')))


_SIMPLE: Dict[str, Callable[[Mapping, Universe], Restriction]] = {
    'by_vertex': lambda d, u: by_vertex(str(_field(d, 'vertex', 'by_vertex'))),
    'by_vertices': lambda d, u: by_vertices([str(v) for v in _field(d, 'vertices', 'by_vertices')]),
    'by_state': lambda d, u: by_state(str(_field(d, 'state', 'by_state'))),
    'fig5': lambda d, u: fig5(str(d.get('white', 'w')), str(d.get('black', 'b'))),
    'mu': lambda d, u: mu(),
    'full': lambda d, u: full(),
    'empty': lambda d, u: empty(),
    'line_neighborhood': lambda d, u: line_neighborhood(
        u.vertices, str(_field(d, 'vertex', 'line_neighborhood')), int(d.get('radius', 1))),
    'table': _table_spec,
}


def restriction_from_spec(data: Mapping, universe: Universe) -> Restriction:
    '''
    Build the restriction described by ``data``; the result is not validated.

    Raises
    ------
    SpecFileError
        On an unknown kind or a missing field.
    '''
    if not isinstance(data, Mapping) or 'kind' not in data:
        raise SpecFileError('a restriction spec is an object with a "kind" field')
    kind = data['kind']
    if kind == 'union':
        chi = union_restriction(restriction_from_spec(_field(data, 'left', kind), universe),
                                restriction_from_spec(_field(data, 'right', kind), universe))
    elif kind == 'compose':
        chi = compose(restriction_from_spec(_field(data, 'first', kind), universe),
                      restriction_from_spec(_field(data, 'then', kind), universe))
    elif kind in _SIMPLE:
        try:
            chi = _SIMPLE[kind](data, universe)
        except ValueError as e:
            raise SpecFileError(f'restriction of kind {kind!r}: {e}') from None
    else:
        raise SpecFileError(f'unknown restriction kind {kind!r}; choose from '
                            f'{", ".join(sorted(list(_SIMPLE) + ["union", "compose"]))}')
    if 'label' in data and kind != 'table':
        chi = Restriction(chi.selector, str(data['label']), chi.pointwise_hint)
    return chi


def load_restriction(path: PathLike, universe: Universe) -> Restriction:
    return restriction_from_spec(read_json(path), universe)


def restriction_to_table_spec(chi: Restriction, universe: Universe) -> Dict[str, Any]:
    '''The ``table`` form of ``chi``, listing G → G_χ for every graph of ``universe``.'''
    rows = [{'graph': list(g.encode()), 'part': list(chi.restrict(g).encode())}
            for g in Basis.of(universe).graphs]
    return {'kind': 'table', 'label': chi.label, 'table': rows}

'''
Command-line entry point.

Exit codes: 0 on success or a positive verdict, 1 on a failing law or a
negative verdict, 2 on unusable input.
'''
import argparse
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from . import __version__
from .block_decomposition import block_decompose
from .config import (DEFAULT_SAMPLES, EQ_TOL, UNIVERSE_CAP, default_seed,
                     format_number)
from .dynamics_examples import (LineConfig, build_C, build_M, evolve,
                                occupation_profile)
from .errors import (EquivalenceViolation, LogicalTensorError,
                     PrerequisiteViolation, ReconstructionFailure,
                     SpecFileError)
from .graph_core import Basis, Universe
from .harness import (PROPOSITION_LAWS, TOOLBOX_LAWS, kernels_for,
                      reports_to_frame, reports_to_json, run_proposition_suite,
                      run_theorem_suite, run_toolbox_suite)
from .harness.mutations import MUTATIONS
from .locality_causality import is_causal, is_local
from .make_report import make_verification_pdf
from .restrictions import Restriction, require_restriction, validate_restriction
from .state_algebra import Ket, OperatorMatrix, basis_ket, from_dense, to_dense, to_records
from .tensor_trace import entanglement_entropy, tensor_kets, tensor_ops, traceout
from .utils.parse_spec_files import (check_within, dump_ket, dump_operator,
                                     dump_trajectory, infer_universe, load_ket,
                                     load_operator, load_restriction,
                                     load_universe, read_json,
                                     restriction_to_table_spec, write_json)
from .utils.plot_trajectory import plot_trajectory

logger = logging.getLogger(__name__)

SUITES = ('toolbox', 'proposition', 'theorem')
THEOREM_LAWS = ('decompose-identity', 'decompose-M', 'swap-rejected',
                'extension-causal', 'monotonicity')

Loaded = Union[Ket, OperatorMatrix]


def _yes(flag: bool) -> str:
    return 'yes' if flag else 'no'


def _resolve_universe(path: Optional[Path], loaded: Sequence[Tuple[str, Loaded, Optional[Universe]]]) -> Universe:
    '''
    The universe of one command: ``--universe`` if given, otherwise the first
    one carried by an input file, otherwise the smallest one containing
    every input graph. All inputs must live in it.
    '''
    if path is not None:
        universe = load_universe(path)
    else:
        carried = [u for _, _, u in loaded if u is not None]
        universe = carried[0] if carried else infer_universe([obj for _, obj, _ in loaded])
    for where, obj, own in loaded:
        if own is not None and own != universe:
            raise SpecFileError(f'{where} was written for another universe')
        check_within(obj, universe, where)
    return universe


def _restriction(path: Path, universe: Universe, cap: int) -> Restriction:
    return require_restriction(load_restriction(path, universe), universe, cap)


def _load_either(path: Path) -> Tuple[Loaded, Optional[Universe]]:
    '''A ket or an operator file, told apart by the fields of its first entry.'''
    data = read_json(path)
    entries = data.get('entries', []) if isinstance(data, dict) else data
    if entries and isinstance(entries[0], dict) and 'bra' in entries[0]:
        return load_operator(path)
    return load_ket(path)


def _print_records(obj: Loaded) -> None:
    records = [{**r, 're': float(format_number(r['re'])), 'im': float(format_number(r['im']))}
               for r in to_records(obj)]
    print(json.dumps(records, indent=2, sort_keys=True))


# Subcommands.

def cmd_verify(args: argparse.Namespace) -> int:
    universe = load_universe(args.universe) if args.universe else Universe(('u', 'v'), ('b', 'w'))
    restrictions = ([_restriction(p, universe, args.cap) for p in args.restriction]
                    if args.restriction else None)
    suites = list(SUITES) if args.all else (args.suite or ['toolbox'])
    known = set(TOOLBOX_LAWS) | set(PROPOSITION_LAWS) | set(THEOREM_LAWS)
    for law in args.law or []:
        if law not in known and not law.startswith('decompose-MC('):
            raise SpecFileError(f'unknown law {law!r}')

    def chosen(names) -> Optional[List[str]]:
        if not args.law:
            return None
        return [n for n in args.law if n in names]

    kernels = kernels_for(args.mutation)
    line = LineConfig(args.line_length)
    thetas = args.theta if args.theta else [0.0, math.pi / 4]
    reports = []
    if 'toolbox' in suites and chosen(TOOLBOX_LAWS) != []:
        reports.append(run_toolbox_suite(universe, restrictions, args.samples, args.seed, args.tol,
                                         kernels, args.threads, args.cap, chosen(TOOLBOX_LAWS)))
    if 'proposition' in suites and chosen(PROPOSITION_LAWS) != []:
        reports.append(run_proposition_suite(universe, restrictions, args.samples, args.seed,
                                             args.tol, kernels, args.threads, args.cap, line,
                                             chosen(PROPOSITION_LAWS)))
    theorem_laws = None if not args.law else [
        n for n in args.law if n in THEOREM_LAWS or n.startswith('decompose-MC(')]
    if 'theorem' in suites and theorem_laws != []:
        reports.append(run_theorem_suite(line, thetas, args.tol, args.seed, args.threads,
                                         args.cap, theorem_laws))

    for report in reports:
        print(report.summary())
    if args.json:
        Path(args.json).write_text(reports_to_json(reports) + '\n', encoding='utf-8')
    if args.table:
        reports_to_frame(reports).to_csv(args.table, index=False)
    if args.pdf:
        make_verification_pdf(reports, Path(args.pdf), args.tol)
        print(f'{args.pdf} generated.')
    return 0 if all(r.passed for r in reports) else 1


def cmd_check_local(args: argparse.Namespace) -> int:
    a, own = load_operator(args.op)
    universe = _resolve_universe(args.universe, [(str(args.op), a, own)])
    chi = _restriction(args.restriction, universe, args.cap)
    verdict = is_local(a, chi, universe, args.tol, args.cap, kernels_for(args.mutation))
    print(verdict)
    if verdict.counterexample is not None:
        bra, ket = verdict.counterexample
        print(f'counterexample: <{bra}|A|{ket}>')
    if args.json:
        write_json({'restriction': chi.label, 'local': verdict.local, 'strict': verdict.strict,
                    'schrodinger': verdict.schrodinger, 'operational': verdict.operational,
                    'heisenberg': verdict.heisenberg,
                    'max_deviation': float(format_number(verdict.max_deviation))}, args.json)
    return 0 if verdict.local else 1


def cmd_check_causal(args: argparse.Namespace) -> int:
    u, own = load_operator(args.op)
    universe = _resolve_universe(args.universe, [(str(args.op), u, own)])
    chi = _restriction(args.chi, universe, args.cap)
    zeta = _restriction(args.zeta, universe, args.cap)
    verdict = is_causal(u, chi, zeta, universe, args.tol, args.cap)
    print(verdict)
    print(f'dual: {_yes(verdict.dual)}, name-preserving dual: {_yes(verdict.dual_name_preserving)}')
    if verdict.strict_transfer is not None:
        print(f'strict locality transferred: {_yes(verdict.strict_transfer)}')
    if verdict.counterexample is not None:
        g, h = verdict.counterexample
        print(f'counterexample: |{g}><{h}|')
    if args.json:
        write_json({'chi': chi.label, 'zeta': zeta.label, 'causal': verdict.primal,
                    'dual': verdict.dual, 'dual_name_preserving': verdict.dual_name_preserving,
                    'strict_transfer': verdict.strict_transfer,
                    'max_deviation': float(format_number(verdict.max_deviation))}, args.json)
    return 0 if verdict.primal else 1


def cmd_trace(args: argparse.Namespace) -> int:
    rho, own = load_operator(args.op)
    universe = _resolve_universe(args.universe, [(str(args.op), rho, own)])
    chi = _restriction(args.restriction, universe, args.cap)
    reduced = traceout(rho, chi)
    if args.out:
        dump_operator(reduced, args.out, universe)
    else:
        _print_records(reduced)
    return 0


def cmd_tensor(args: argparse.Namespace) -> int:
    left, left_u = _load_either(args.left)
    right, right_u = _load_either(args.right)
    if type(left) is not type(right):
        raise SpecFileError('both factors must be kets or both operators')
    universe = _resolve_universe(args.universe, [(str(args.left), left, left_u),
                                                 (str(args.right), right, right_u)])
    chi = _restriction(args.restriction, universe, args.cap)
    if isinstance(left, Ket):
        out = tensor_kets(left, right, chi)
        if args.out:
            dump_ket(out, args.out, universe)
    else:
        out = tensor_ops(left, right, chi)
        if args.out:
            dump_operator(out, args.out, universe)
    if not args.out:
        _print_records(out)
    return 0


def cmd_entropy(args: argparse.Namespace) -> int:
    psi, own = load_ket(args.ket)
    universe = _resolve_universe(args.universe, [(str(args.ket), psi, own)])
    chi = _restriction(args.restriction, universe, args.cap)
    value = entanglement_entropy(psi, chi, args.tol)
    print(f'entropy: {format_number(value)} bits')
    return 0


def _per_vertex(items: Optional[List[str]], universe: Universe, cap: int) -> Dict[str, Restriction]:
    out = {}
    for item in items or []:
        vertex, sep, path = item.partition('=')
        if not sep or vertex not in universe.vertices:
            raise SpecFileError(f'expected VERTEX=PATH with a vertex of the universe, got {item!r}')
        out[vertex] = _restriction(Path(path), universe, cap)
    return out


def cmd_decompose(args: argparse.Namespace) -> int:
    if args.op:
        u, own = load_operator(args.op)
        universe = _resolve_universe(args.universe, [(str(args.op), u, own)])
        line = None
    else:
        line = LineConfig(args.line_length)
        universe = line.universe
        u = build_M(line, args.cap)
        if args.theta is not None:
            basis = Basis.of(universe, args.cap)
            u = from_dense(to_dense(u, basis) @ to_dense(build_C(line, args.theta, args.cap), basis), basis)

    chis = _per_vertex(args.chi, universe, args.cap)
    if line is not None:
        chis = {v: chis.get(v, line.neighborhood(v)) for v in line.vertices}
    missing = [v for v in universe.vertices if v not in chis]
    if missing:
        raise SpecFileError(f'no --chi given for vertex {missing[0]}')
    zetas = _per_vertex(args.zeta, universe, args.cap) or None
    if zetas is not None and set(zetas) != set(universe.vertices):
        raise SpecFileError('--zeta must be given for every vertex or for none')

    try:
        decomposition = block_decompose(u, chis, zetas, universe, tol=args.tol,
                                        seed=args.seed, cap=args.cap)
    except PrerequisiteViolation as e:
        print('not decomposable:')
        for failure in e.failures:
            print(f'  {failure}')
        return 1
    except ReconstructionFailure as e:
        print(f'reconstruction failed: deviation {format_number(e.deviation)} on {e.witness}')
        return 1

    report = decomposition.report
    print(f'reconstruction deviation: {format_number(report.reconstruction_deviation)}')
    print(f'product of toggles vs toggle: {format_number(report.tau_product_deviation)}')
    print(f'commutators: tau {format_number(report.tau_commutator)}, '
          f'K {format_number(report.k_commutator)}')
    print(f'reordered product deviation: {format_number(report.order_deviation)}')
    frame = pd.DataFrame({'vertex': list(decomposition.vertices),
                          'tau strict': [_yes(report.tau_strict[v]) for v in decomposition.vertices],
                          'K strict': [_yes(report.k_strict[v]) for v in decomposition.vertices]})
    print(frame.to_string(index=False))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        extended = decomposition.extended.extended
        for v, gate in decomposition.tau_gates.items():
            dump_operator(gate, out_dir / f'tau_{v}.json', extended)
        for v, gate in decomposition.k_gates.items():
            dump_operator(gate, out_dir / f'K_{v}.json', extended)
        write_json({'reconstruction_deviation': float(format_number(report.reconstruction_deviation)),
                    'tau_product_deviation': float(format_number(report.tau_product_deviation)),
                    'tau_commutator': float(format_number(report.tau_commutator)),
                    'k_commutator': float(format_number(report.k_commutator)),
                    'order_deviation': float(format_number(report.order_deviation)),
                    'tau_strict': dict(report.tau_strict), 'k_strict': dict(report.k_strict),
                    'passed': report.passed(args.tol)}, out_dir / 'report.json')
        print(f'gates written to {out_dir}')
    return 0 if report.passed(args.tol) else 1


def cmd_evolve(args: argparse.Namespace) -> int:
    line = LineConfig(args.line_length)
    universe = line.universe
    if args.ket:
        psi, own = load_ket(args.ket)
        if own is not None and own != universe:
            raise SpecFileError(f'{args.ket} was written for another universe')
        check_within(psi, universe, str(args.ket))
    else:
        # one right-mover on the first vertex, every other vertex empty
        psi = basis_ket(line.graph(['right'] + ['empty'] * (line.length - 1)))
    ops = [build_M(line, args.cap)]
    if args.theta is not None:
        ops.append(build_C(line, args.theta, args.cap))
    trajectory = evolve(psi, ops, args.steps)

    frame = pd.DataFrame([occupation_profile(p, line) for p in trajectory],
                         columns=list(line.vertices))
    frame.insert(0, 'norm', [p.norm() for p in trajectory])
    frame.index.name = 'step'
    print(frame.to_string(float_format=format_number))
    if args.emit_trajectory:
        dump_trajectory(trajectory, args.emit_trajectory)
    if args.plot:
        title = 'M' if args.theta is None else f'M C({format_number(args.theta)})'
        plot_trajectory(trajectory, line, Path(args.plot), title)
        print(f'{args.plot} generated.')
    return 0


def cmd_validate_restriction(args: argparse.Namespace) -> int:
    universe = load_universe(args.universe)
    chi = load_restriction(args.restriction, universe)
    report = validate_restriction(chi, universe, args.cap)
    print(report)
    if args.emit_table:
        write_json(restriction_to_table_spec(chi, universe), args.emit_table)
    return 0 if report.passed else 1


# Parser.

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=EQ_TOL,
                        help='Tolerance of equality assertions.')
    common.add_argument('--seed', type=int, default=None,
                        help='Seed of random operators (default: $LOGICALTENSOR_SEED or built-in).')
    common.add_argument('--samples', type=int, default=DEFAULT_SAMPLES,
                        help='Random operators per operator law.')
    common.add_argument('--threads', type=int, default=1, help='Worker threads of the suites.')
    common.add_argument('--cap', type=int, default=UNIVERSE_CAP,
                        help='Largest enumerable basis.')
    common.add_argument('--mutation', choices=list(MUTATIONS), default='none',
                        help='Substitute deliberately broken kernels.')
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='Log progress (repeat for debug output).')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog='logicaltensor',
        description='Traceouts, tensors, locality and causality over graph-labelled bases.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('verify', parents=[common], help='Run the law suites.')
    p.add_argument('--universe', type=Path, help='Universe file (default: 2 vertices, 2 states).')
    p.add_argument('--restriction', type=Path, action='append',
                   help='Restriction file; repeat for several (default: built-in set).')
    p.add_argument('--suite', choices=SUITES, action='append', help='Suite to run; repeatable.')
    p.add_argument('--all', action='store_true', help='Run every suite.')
    p.add_argument('--law', action='append', help='Only run this law; repeatable.')
    p.add_argument('--line-length', type=int, default=3, help='Line for the dynamics examples.')
    p.add_argument('--theta', type=float, action='append', help='Rotation angle; repeatable.')
    p.add_argument('--json', help='Write the machine-readable report here.')
    p.add_argument('--table', help='Write the per-law table as CSV here.')
    p.add_argument('--pdf', help='Write a PDF report here.')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('check-local', parents=[common], help='Decide χ-locality of an operator.')
    p.add_argument('--op', type=Path, required=True)
    p.add_argument('--restriction', type=Path, required=True)
    p.add_argument('--universe', type=Path)
    p.add_argument('--json', help='Write the verdict here.')
    p.set_defaults(func=cmd_check_local)

    p = sub.add_parser('check-causal', parents=[common], help='Decide χζ-causality of a unitary.')
    p.add_argument('--op', type=Path, required=True)
    p.add_argument('--chi', type=Path, required=True)
    p.add_argument('--zeta', type=Path, required=True)
    p.add_argument('--universe', type=Path)
    p.add_argument('--json', help='Write the verdict here.')
    p.set_defaults(func=cmd_check_causal)

    p = sub.add_parser('trace', parents=[common], help='Traceout ρ|χ of an operator.')
    p.add_argument('--op', type=Path, required=True)
    p.add_argument('--restriction', type=Path, required=True)
    p.add_argument('--universe', type=Path)
    p.add_argument('--out', type=Path)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser('tensor', parents=[common], help='Tensor ⊗χ of two kets or two operators.')
    p.add_argument('--left', type=Path, required=True)
    p.add_argument('--right', type=Path, required=True)
    p.add_argument('--restriction', type=Path, required=True)
    p.add_argument('--universe', type=Path)
    p.add_argument('--out', type=Path)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser('entropy', parents=[common], help='Entanglement entropy of a ket, in bits.')
    p.add_argument('--ket', type=Path, required=True)
    p.add_argument('--restriction', type=Path, required=True)
    p.add_argument('--universe', type=Path)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser('decompose', parents=[common],
                       help='Block-decompose a causal unitary (an operator file or the line dynamics).')
    p.add_argument('--op', type=Path, help='Operator file; without it M (or MC with --theta) is used.')
    p.add_argument('--universe', type=Path)
    p.add_argument('--chi', action='append', metavar='VERTEX=PATH')
    p.add_argument('--zeta', action='append', metavar='VERTEX=PATH')
    p.add_argument('--line-length', type=int, default=3)
    p.add_argument('--theta', type=float)
    p.add_argument('--out-dir', type=Path, help='Write the gates and the report here.')
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser('evolve', parents=[common], help='Run the line dynamics.')
    p.add_argument('--line-length', type=int, default=3)
    p.add_argument('--steps', type=int, default=6)
    p.add_argument('--theta', type=float, help='Apply MC(θ) instead of M.')
    p.add_argument('--ket', type=Path, help='Initial ket (default: one right-mover on the first vertex).')
    p.add_argument('--emit-trajectory', type=Path)
    p.add_argument('--plot', help='Write the occupation plot here.')
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser('validate-restriction', parents=[common],
                       help='Check the restriction axiom on a universe.')
    p.add_argument('--universe', type=Path, required=True)
    p.add_argument('--restriction', type=Path, required=True)
    p.add_argument('--emit-table', type=Path, help='Write the table form of the restriction here.')
    p.set_defaults(func=cmd_validate_restriction)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    '''CLI entry'''
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else logging.INFO,
                            format='%(levelname)s %(name)s: %(message)s')
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except (ReconstructionFailure, EquivalenceViolation) as e:
        # negative verdicts raised from inside a check
        print(f'Error: {e}')
        return 1
    except (LogicalTensorError, FileNotFoundError) as e:
        print(f'Error: {e}')
        return 2

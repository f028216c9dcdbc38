"""Command-line front end.

Subcommands: check (parse and elaborate a script), canon (canonical form
of a shape expression or imported JSON), iso (decide isomorphism of two
shape expressions), render (draw one cell of a script), bench (time
canonicalization on the scaling families).

Exit codes: 0 success, 1 domain failure (kernel rejection, negative iso),
2 usage or parse error. Error messages go to stderr as one line naming
the error class; NO_COLOR disables the colored prefix.
"""

import argparse
import os
import sys

from . import bench as bench_mod
from . import dsl
from .errors import KernelError, ParseError, UnknownName
from .molecule import canonicalize, is_isomorphic
from .ogposet import El, shape_from_json, shape_to_json
from .render import emit, hasse_layout, string_layout


def _error(message: str) -> None:
    prefix = 'error'
    if sys.stderr.isatty() and os.environ.get('NO_COLOR') is None:
        prefix = '\x1b[31merror\x1b[0m'
    print('{}: {}'.format(prefix, message), file=sys.stderr)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _run_check(args) -> int:
    ast = dsl.parse(_read(args.file))
    env = dsl.elaborate(ast)
    for stmt in ast.statements:
        if isinstance(stmt, dsl.Draw):
            print('draw {}'.format(stmt.name))
        else:
            kind = 'gen' if isinstance(stmt, dsl.Gen) else 'let'
            print('{} {} : dim {}'.format(
                kind, stmt.name, env.diagrams[stmt.name].dim))
    print('ok')
    return 0


def _run_canon(args) -> int:
    if args.expr is not None:
        molecule = dsl.eval_shape(dsl.parse_expr(args.expr))
    else:
        molecule, _ = canonicalize(shape_from_json(_read(args.json)))
    print(shape_to_json(molecule.underlying))
    return 0


def _run_iso(args) -> int:
    left = dsl.eval_shape(dsl.parse_expr(args.left))
    right = dsl.eval_shape(dsl.parse_expr(args.right))
    found = is_isomorphic(left, right)
    if found is None:
        print('not isomorphic')
        return 1
    poset = left.underlying
    for n in range(poset.dim + 1):
        images = (str(found[El(n, p)].pos) for p in range(poset.size(n)))
        print('dim {}: {}'.format(n, ' '.join(images)))
    return 0


def _run_render(args) -> int:
    env = dsl.elaborate(dsl.parse(_read(args.file)))
    if args.cell not in env.diagrams:
        raise UnknownName('nothing named {!r} is in scope'.format(args.cell))
    options = {}
    for stmt in env.draws:
        if stmt.name == args.cell:
            options = dict(stmt.options)
            break
    view = args.view or options.get('view', 'hasse')
    fmt = args.format or options.get('format', 'tikz')
    bg = args.bg or options.get('bg', 'white')
    if view not in ('hasse', 'string'):
        raise ParseError('unknown view {!r}'.format(view))
    if fmt not in ('tikz', 'svg'):
        raise ParseError('unknown format {!r}'.format(fmt))
    diagram = env.diagrams[args.cell]
    if view == 'hasse':
        layout = hasse_layout(diagram, input_color=args.input_color,
                              output_color=args.output_color, bg=bg)
    else:
        layout = string_layout(diagram, bg=bg)
    with open(args.out, 'w') as fh:
        fh.write(emit(layout, fmt, scale=args.scale))
    return 0


def _run_bench(args) -> int:
    rows = bench_mod.run(args.family, args.sizes, args.seed)
    with open(args.out, 'w') as fh:
        fh.write(bench_mod.format_csv(rows))
    if args.plot is not None:
        bench_mod.plot(rows, args.plot)
    return 0


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(
            'sizes must be comma-separated integers, got {!r}'.format(text))
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError('sizes must be positive')
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pastekit',
        description='Check, canonicalize, compare and draw pasting diagrams.')
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', help='parse and elaborate a script')
    check.add_argument('file')
    check.set_defaults(run=_run_check)

    canon = sub.add_parser('canon', help='print a canonical shape as JSON')
    source = canon.add_mutually_exclusive_group(required=True)
    source.add_argument('-e', '--expr', help='shape expression')
    source.add_argument('--json', help='face data JSON file')
    canon.set_defaults(run=_run_canon)

    iso = sub.add_parser('iso', help='decide isomorphism of two shapes')
    iso.add_argument('left')
    iso.add_argument('right')
    iso.set_defaults(run=_run_iso)

    render = sub.add_parser('render', help='draw one cell of a script')
    render.add_argument('file')
    render.add_argument('--cell', required=True)
    render.add_argument('--view', choices=('hasse', 'string'))
    render.add_argument('--format', choices=('tikz', 'svg'))
    render.add_argument('-o', '--out', required=True)
    render.add_argument('--bg')
    render.add_argument('--input-color', default='magenta')
    render.add_argument('--output-color', default='blue')
    render.add_argument('--scale', type=float)
    render.set_defaults(run=_run_render)

    bench = sub.add_parser('bench', help='time canonicalization families')
    bench.add_argument('--family', choices=bench_mod.FAMILIES, required=True)
    bench.add_argument('--sizes', type=_sizes, required=True)
    bench.add_argument('--seed', type=int, default=0)
    bench.add_argument('-o', '--out', required=True)
    bench.add_argument('--plot', help='also write a log-log PNG')
    bench.set_defaults(run=_run_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ParseError as err:
        _error('ParseError: {}'.format(err))
        return 2
    except KernelError as err:
        _error('{}: {}'.format(type(err).__name__, err))
        return 1
    except OSError as err:
        _error(str(err))
        return 2


if __name__ == '__main__':
    raise SystemExit(main())

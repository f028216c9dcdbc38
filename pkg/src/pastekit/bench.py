"""Scaling measurements for canonical-form computation.

Two families with closed-form shapes: chains of composable 1-cells and
square grids of 2-cells between stacked parallel edges. Instances are
generated directly, scrambled by a seeded permutation so the input order
carries no information, and timed through canonicalize. The fitted
log-log slope of time against element count is the scaling exponent.
"""

import math
import statistics
import time
from random import Random
from typing import NamedTuple

from .errors import OutOfRange
from .molecule import canonicalize
from .ogposet import OgPoset

FAMILIES = ('chain', 'grid')


class BenchRow(NamedTuple):
    family: str
    size: int
    elements: int
    edges: int
    millis: float


def chain(n: int) -> OgPoset:
    """A path of n composable 1-cells: 2n + 1 elements."""
    if n < 1:
        raise OutOfRange('chain size must be positive, got {}'.format(n))
    points = tuple(((), ()) for _ in range(n + 1))
    edges = tuple(((i,), (i + 1,)) for i in range(n))
    return OgPoset((points, edges))


def grid(g: int) -> OgPoset:
    """A g-by-g array of 2-cells: g columns of g cells stacked between
    parallel edges, 2g(g + 1) + 1 elements."""
    if g < 1:
        raise OutOfRange('grid size must be positive, got {}'.format(g))
    points = tuple(((), ()) for _ in range(g + 1))
    edges = tuple(((col,), (col + 1,))
                  for col in range(g) for _ in range(g + 1))
    cells = []
    for col in range(g):
        base = col * (g + 1)
        cells.extend(((base + row,), (base + row + 1,)) for row in range(g))
    return OgPoset((points, edges, tuple(cells)))


def build(family: str, size: int) -> OgPoset:
    if family == 'chain':
        return chain(size)
    if family == 'grid':
        return grid(size)
    raise OutOfRange('unknown family {!r}'.format(family))


def scramble(poset: OgPoset, rng: Random) -> OgPoset:
    """Relabel every stratum by a uniform permutation."""
    perms = []
    for n in range(poset.dim + 1):
        perm = list(range(poset.size(n)))
        rng.shuffle(perm)
        perms.append(perm)
    face_data = []
    for n in range(poset.dim + 1):
        stratum = [None] * poset.size(n)
        for old in range(poset.size(n)):
            ins, outs = poset.face_data[n][old]
            if n > 0:
                ins = sorted(perms[n - 1][j] for j in ins)
                outs = sorted(perms[n - 1][j] for j in outs)
            stratum[perms[n][old]] = (tuple(ins), tuple(outs))
        face_data.append(stratum)
    return OgPoset(face_data)


def covering_pairs(poset: OgPoset) -> int:
    return sum(len(ins) + len(outs)
               for stratum in poset.face_data
               for ins, outs in stratum)


def measure(family: str, size: int, seed: int) -> BenchRow:
    """Build, scramble and canonicalize one instance, timing only the
    canonicalization."""
    poset = scramble(build(family, size), Random(seed * 1000003 + size))
    started = time.perf_counter_ns()
    canonicalize(poset)
    elapsed = time.perf_counter_ns() - started
    return BenchRow(family, size, len(poset), covering_pairs(poset),
                    elapsed / 1e6)


def run(family: str, sizes, seed: int) -> list[BenchRow]:
    return [measure(family, size, seed) for size in sizes]


def format_csv(rows) -> str:
    lines = ['family,size,elements,edges,millis']
    for row in rows:
        lines.append('{},{},{},{},{:.3f}'.format(*row))
    return '\n'.join(lines) + '\n'


def parse_csv(text: str) -> list[BenchRow]:
    rows = []
    for line in text.splitlines()[1:]:
        family, size, elements, edges, millis = line.split(',')
        rows.append(BenchRow(family, int(size), int(elements), int(edges),
                             float(millis)))
    return rows


def _fit(rows):
    xs = [math.log(row.elements) for row in rows]
    ys = [math.log(max(row.millis, 1e-3)) for row in rows]
    return statistics.linear_regression(xs, ys)


def fitted_exponent(rows) -> float:
    """Least-squares slope of log(time) against log(element count)."""
    return _fit(rows).slope


def plot(rows, path: str) -> None:
    """Log-log scatter of the measurements with one fitted line per family."""
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for family in FAMILIES:
        mine = [row for row in rows if row.family == family]
        if len(mine) < 2:
            continue
        xs = [row.elements for row in mine]
        ys = [max(row.millis, 1e-3) for row in mine]
        fit = _fit(mine)
        line = [math.exp(fit.intercept + fit.slope * math.log(x))
                for x in xs]
        ax.plot(xs, ys, 'o',
                label='{} (slope {:.2f})'.format(family, fit.slope))
        ax.plot(xs, line, '--')
    ax.set_xscale('log')
    ax.set_yscale('log')
    ax.set_xlabel('elements')
    ax.set_ylabel('canonicalization time (ms)')
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

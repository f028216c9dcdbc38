"""Deterministic pictures of shapes and diagrams.

Two views: Hasse diagrams of the face structure in any dimension, and
string diagrams for inputs of dimension at most 2. Both produce a Layout
of unit-square geometry that emit() serializes to TikZ or SVG with fixed
6-decimal formatting, so equal inputs give byte-equal pictures.

Orientation is color-coded in the Hasse view: an arrow runs upward from
each input face and downward to each output face. In the string view,
elements carrying a label of strictly lower dimension are drawn at
reduced opacity, and such 2-dimensional elements get no dot at all; the
wires around them still converge on the point where the dot would be.
"""

from typing import NamedTuple, Optional, Union

from .diagset import Diagram
from .errors import DimensionTooHigh, MalformedData
from .molecule import Molecule, boundary_inclusion
from .ogposet import El

FADED = 0.1
SHORTEN = 0.1


class Node(NamedTuple):
    x: float
    y: float
    style: str


class Curve(NamedTuple):
    """Endpoints with control offsets; zero offsets mean a straight line."""

    x0: float
    y0: float
    x1: float
    y1: float
    dx0: float
    dy0: float
    dx1: float
    dy1: float
    style: str


class Label(NamedTuple):
    """Anchored text; the offset is in points, not unit coordinates."""

    x: float
    y: float
    dx: float
    dy: float
    text: str
    style: str


class Style(NamedTuple):
    color: str
    opacity: float = 1.0
    arrow: bool = False
    dot: bool = False


class Layout(NamedTuple):
    nodes: tuple[Node, ...]
    curves: tuple[Curve, ...]
    labels: tuple[Label, ...]
    styles: tuple[tuple[str, Style], ...]
    bg: str = 'white'
    aspect: float = 1.0


Drawable = Union[Diagram, Molecule]


def _parts(d: Drawable):
    if isinstance(d, Diagram):
        return d.shape, d
    if isinstance(d, Molecule):
        return d, None
    raise MalformedData('can only draw diagrams and shapes')


def _is_degenerate(term: Optional[Diagram], el: El) -> bool:
    if term is None:
        return False
    decl = term.ambient.generator(term[el])
    return decl.shape.dim < el.dim


def _text(term: Optional[Diagram], el: El, hasse: bool) -> str:
    if term is None:
        return str(el.pos)
    return '{},{}'.format(el.pos, term[el]) if hasse else term[el]


# --- Hasse view --------------------------------------------------------------

def hasse_layout(d: Drawable, input_color: str = 'magenta',
                 output_color: str = 'blue', bg: str = 'white') -> Layout:
    """Rows by dimension, arrows up from input faces, down to output faces."""
    shape, term = _parts(d)
    poset = shape.underlying
    styles = (
        ('input', Style(input_color, arrow=True)),
        ('output', Style(output_color, arrow=True)),
        ('text', Style('black')),
    )
    if len(poset) == 0:
        return Layout((), (), (), styles, bg, 1.0)
    rows = poset.dim + 1
    sizes = poset.strata_sizes

    def at(el: El) -> tuple[float, float]:
        return (el.pos + 0.5) / sizes[el.dim], (el.dim + 0.5) / rows

    def arrow_between(a: El, b: El, style: str) -> Curve:
        (xa, ya), (xb, yb) = at(a), at(b)
        dx, dy = xb - xa, yb - ya
        return Curve(xa + SHORTEN * dx, ya + SHORTEN * dy,
                     xb - SHORTEN * dx, yb - SHORTEN * dy,
                     0.0, 0.0, 0.0, 0.0, style)

    curves = []
    labels = []
    for el in poset.elements():
        n, p = el.dim, el.pos
        for q in poset.face_data[n][p][1]:
            curves.append(arrow_between(el, El(n - 1, q), 'output'))
        for q in poset.coface_data[n][p][0]:
            curves.append(arrow_between(el, El(n + 1, q), 'input'))
        x, y = at(el)
        labels.append(Label(x, y, 0.0, 0.0, _text(term, el, True), 'text'))
    aspect = max(1.0, (rows - 1) / 2)
    return Layout((), tuple(curves), tuple(labels), styles, bg, aspect)


# --- string view --------------------------------------------------------------

class _Wire:
    __slots__ = ('lane', 'start', 'end')

    def __init__(self, lane: float, start: tuple[float, float]):
        self.lane = lane
        self.start = start
        self.end: Optional[tuple[float, float]] = None


def _chain(edges, src, dst, start: int) -> list[int]:
    """Order a set of 1-dimensional elements along their path."""
    remaining = sorted(edges)
    ordered = []
    at_vertex = start
    while remaining:
        here = [e for e in remaining if src(e) == at_vertex]
        pick = here[0] if here else remaining[0]
        remaining.remove(pick)
        ordered.append(pick)
        at_vertex = dst(pick)
    return ordered


def string_layout(d: Drawable, bg: str = 'white') -> Layout:
    """Sweep the diagram bottom to top, one 2-cell per level."""
    shape, term = _parts(d)
    poset = shape.underlying
    if poset.dim > 2:
        raise DimensionTooHigh(
            'string diagrams need dimension at most 2, got {}'.format(
                poset.dim))
    text_color = 'black' if term is not None else 'magenta'
    styles = (
        ('wire', Style('black')),
        ('wire-faded', Style('black', FADED)),
        ('node', Style('black', dot=True)),
        ('text', Style(text_color)),
    )
    if poset.dim < 1:
        return Layout((), (), (), styles, bg, 1.0)

    def src(e: int) -> int:
        return poset.face_data[1][e][0][0]

    def dst(e: int) -> int:
        return poset.face_data[1][e][1][0]

    if poset.dim == 1:
        first = list(range(poset.size(1)))
        cells = []
    else:
        bnd, incl = boundary_inclusion(shape, '-')
        first = [incl[El(1, i)].pos for i in range(bnd.underlying.size(1))]
        cells = list(range(poset.size(2)))

    width = len(first)
    wires = {}
    for slot, e in enumerate(first):
        lane = (slot + 1) / (width + 1)
        wires[e] = _Wire(lane, (lane, 0.0))
    frontier = list(first)

    count = len(cells)
    nodes = []
    pending = list(cells)
    while pending:
        ready = [c for c in pending
                 if all(e in frontier for e in poset.face_data[2][c][0])]
        cell = ready[0] if ready else pending[0]
        pending.remove(cell)
        ins, outs = poset.face_data[2][cell]
        spots = sorted(frontier.index(e) for e in ins if e in frontier)
        block = spots[0] if spots else len(frontier)
        first_vertex = src(frontier[block]) if spots else src(min(ins))
        for e in ins:
            if e in frontier:
                frontier.remove(e)
        exit_ = _chain(outs, src, dst, first_vertex)
        frontier[block:block] = exit_
        width = len(frontier)
        for j, e in enumerate(exit_):
            wires[e] = _Wire((block + j + 1) / (width + 1), None)
        height = (cell + 0.5) / count
        centre = sum(wires[e].lane for e in exit_) / len(exit_)
        for e in ins:
            wires[e].end = (centre, height)
        for e in exit_:
            wires[e].start = (centre, height)
        if not _is_degenerate(term, El(2, cell)):
            nodes.append((El(2, cell), centre, height))
    for e in frontier:
        wires[e].end = (wires[e].lane, 1.0)

    curves = []
    labels = []
    for e in sorted(wires):
        wire = wires[e]
        (sx, sy), (ex, ey) = wire.start, wire.end
        rise = ey - sy
        faded = _is_degenerate(term, El(1, e))
        curves.append(Curve(
            sx, sy, ex, ey,
            wire.lane - sx, rise / 3, wire.lane - ex, -rise / 3,
            'wire-faded' if faded else 'wire'))
        labels.append(Label((sx + ex + 6 * wire.lane) / 8, (sy + ey) / 2,
                            4.0, 4.0, _text(term, El(1, e), False), 'text'))
    dots = []
    for el, x, y in nodes:
        dots.append(Node(x, y, 'node'))
        labels.append(Label(x, y, 4.0, 4.0, _text(term, el, False), 'text'))
    return Layout(tuple(dots), tuple(curves), tuple(labels), styles, bg, 1.0)


# --- serialization ------------------------------------------------------------

def _fmt(value: float) -> str:
    return '{:.6f}'.format(value)


def _tikz_text(text: str) -> str:
    return text.replace('_', r'\_')


def _tikz(layout: Layout, scale: float) -> str:
    styles = dict(layout.styles)
    lines = ['\\begin{{tikzpicture}}[xscale={:g}, yscale={:g}]'.format(
        scale, scale * layout.aspect)]
    lines.append('\\path[fill={}] ({}, {}) rectangle ({}, {});'.format(
        layout.bg, _fmt(0), _fmt(0), _fmt(1), _fmt(1)))
    for c in layout.curves:
        style = styles[c.style]
        if style.arrow:
            pen = '->, draw={}'.format(style.color)
        else:
            pen = 'color={}, opacity={:g}'.format(style.color, style.opacity)
        if c.dx0 == c.dy0 == c.dx1 == c.dy1 == 0.0:
            lines.append('\\draw[{}] ({}, {}) -- ({}, {});'.format(
                pen, _fmt(c.x0), _fmt(c.y0), _fmt(c.x1), _fmt(c.y1)))
        else:
            lines.append(
                '\\draw[{}] ({}, {}) .. controls ({}, {}) and ({}, {})'
                ' .. ({}, {});'.format(
                    pen, _fmt(c.x0), _fmt(c.y0),
                    _fmt(c.x0 + c.dx0), _fmt(c.y0 + c.dy0),
                    _fmt(c.x1 + c.dx1), _fmt(c.y1 + c.dy1),
                    _fmt(c.x1), _fmt(c.y1)))
    for n in layout.nodes:
        style = styles[n.style]
        lines.append('\\node[circle, fill={0}, draw={0}, inner sep=1pt]'
                     ' at ({1}, {2}) {{}};'.format(
                         style.color, _fmt(n.x), _fmt(n.y)))
    for lab in layout.labels:
        style = styles[lab.style]
        lines.append(
            '\\node[text={}, font={{\\scriptsize \\sffamily}}, '
            'xshift={:g}pt, yshift={:g}pt] at ({}, {}) {{{}}};'.format(
                style.color, lab.dx, lab.dy,
                _fmt(lab.x), _fmt(lab.y), _tikz_text(lab.text)))
    lines.append('\\end{tikzpicture}')
    return '\n'.join(lines) + '\n'


_SVG_COLORS = {'gray!10': '#e6e6e6'}


def _svg_color(color: str) -> str:
    return _SVG_COLORS.get(color, color)


def _svg_text(text: str) -> str:
    return text.replace('&', '&amp;').replace('<', '&lt;').replace(
        '>', '&gt;')


def _svg(layout: Layout, scale: float) -> str:
    styles = dict(layout.styles)
    width, height = scale, scale * layout.aspect

    def x(v: float) -> str:
        return _fmt(v * scale)

    def y(v: float) -> str:
        return _fmt((1 - v) * height)

    def label_x(lab: Label) -> str:
        return _fmt(lab.x * scale + lab.dx)

    def label_y(lab: Label) -> str:
        drop = 4.0 if lab.dx == 0.0 else 0.0
        return _fmt((1 - lab.y) * height - lab.dy + drop)

    lines = ['<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             'width="{0:g}" height="{1:g}" viewBox="0 0 {0:g} {1:g}">'
             .format(width, height)]
    arrow_styles = [(name, s) for name, s in layout.styles if s.arrow]
    if arrow_styles:
        lines.append('<defs>')
        for name, style in arrow_styles:
            lines.append(
                '<marker id="head-{}" viewBox="0 0 10 10" refX="9" refY="5" '
                'markerWidth="7" markerHeight="7" orient="auto">'
                '<path d="M 0 0 L 10 5 L 0 10 z" fill="{}"/>'
                '</marker>'.format(name, _svg_color(style.color)))
        lines.append('</defs>')
    lines.append('<rect x="0" y="0" width="{:g}" height="{:g}" fill="{}"/>'
                 .format(width, height, _svg_color(layout.bg)))
    for c in layout.curves:
        style = styles[c.style]
        extra = ''
        if style.opacity != 1.0:
            extra += ' stroke-opacity="{:g}"'.format(style.opacity)
        if style.arrow:
            extra += ' marker-end="url(#head-{})"'.format(c.style)
        if c.dx0 == c.dy0 == c.dx1 == c.dy1 == 0.0:
            lines.append(
                '<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}"{}/>'
                .format(x(c.x0), y(c.y0), x(c.x1), y(c.y1),
                        _svg_color(style.color), extra))
        else:
            lines.append(
                '<path d="M {} {} C {} {}, {} {}, {} {}" fill="none" '
                'stroke="{}"{}/>'.format(
                    x(c.x0), y(c.y0),
                    x(c.x0 + c.dx0), y(c.y0 + c.dy0),
                    x(c.x1 + c.dx1), y(c.y1 + c.dy1),
                    x(c.x1), y(c.y1), _svg_color(style.color), extra))
    for n in layout.nodes:
        style = styles[n.style]
        lines.append('<circle cx="{}" cy="{}" r="2.5" fill="{}"/>'.format(
            x(n.x), y(n.y), _svg_color(style.color)))
    for lab in layout.labels:
        style = styles[lab.style]
        anchor = 'middle' if lab.dx == 0.0 else 'start'
        lines.append(
            '<text x="{}" y="{}" font-family="sans-serif" font-size="10" '
            'text-anchor="{}" fill="{}">{}</text>'.format(
                label_x(lab), label_y(lab), anchor,
                _svg_color(style.color), _svg_text(lab.text)))
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def emit(layout: Layout, fmt: str, scale: Optional[float] = None) -> str:
    """Serialize a layout; fmt is 'tikz' or 'svg'."""
    if fmt == 'tikz':
        return _tikz(layout, 4.0 if scale is None else scale)
    if fmt == 'svg':
        return _svg(layout, 400.0 if scale is None else scale)
    raise MalformedData('unknown output format {!r}'.format(fmt))

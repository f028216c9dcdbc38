"""Molecules: the shapes of cells and pastings.

A molecule is an oriented graded poset built from the point by two moves:
glueing two molecules along a shared boundary (pasting) and capping two
round molecules of equal dimension with a single new greatest element (an
atom). Every molecule admits exactly one traversal, a deterministic linear
order on its elements; renumbering positions by traversal rank gives a
canonical representative, so comparing canonical forms decides isomorphism,
and the isomorphism found this way is the only one there is.

Molecules are immutable, always stored in canonical form, and carry a
record of the constructor expression that produced them. Maps between
shapes are tagged with their provenance: boundary inclusion, paste
inclusion, isomorphism, or collapse.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Union

from .errors import (
    BoundaryMismatch,
    DimensionError,
    DimensionMismatch,
    MalformedData,
    NotAMap,
    NotRound,
    NotTraversable,
    OutOfRange,
    ParseError,
    Unsupported,
)
from .ogposet import (
    El,
    OgMap,
    OgPoset,
    boundary,
    check_map,
    closure,
    is_round,
    maximal,
    pushout,
    shape_from_dict,
    shape_to_dict,
)


class Molecule:
    """A canonical-form molecule plus the expression that built it.

    Equality and hashing look at the underlying poset only; the construction
    string is provenance, not identity.
    """

    __slots__ = ('_poset', '_construction')

    def __init__(self, poset: OgPoset, construction: str = 'imported'):
        self._poset = poset
        self._construction = construction

    @property
    def underlying(self) -> OgPoset:
        return self._poset

    @property
    def construction(self) -> str:
        return self._construction

    @property
    def dim(self) -> int:
        return self._poset.dim

    @property
    def strata_sizes(self) -> tuple[int, ...]:
        return self._poset.strata_sizes

    def __len__(self) -> int:
        return len(self._poset)

    def __eq__(self, other) -> bool:
        return isinstance(other, Molecule) and self._poset == other._poset

    def __hash__(self) -> int:
        return hash(self._poset)

    def __repr__(self) -> str:
        return 'Molecule(strata={}, construction={!r})'.format(
            list(self.strata_sizes), self._construction)


class ShapeMap:
    """A validated map between shapes, tagged with how it arose."""

    KINDS = ('boundary-inclusion', 'paste-inclusion', 'isomorphism', 'collapse')

    __slots__ = ('_map', '_kind')

    def __init__(self, ogmap: OgMap, kind: str):
        if kind not in self.KINDS:
            raise MalformedData('unknown shape map kind {!r}'.format(kind))
        self._map = ogmap
        self._kind = kind

    @property
    def map(self) -> OgMap:
        return self._map

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def source(self) -> OgPoset:
        return self._map.source

    @property
    def target(self) -> OgPoset:
        return self._map.target

    def __getitem__(self, el: El) -> Optional[El]:
        return self._map[el]

    def __eq__(self, other) -> bool:
        return (isinstance(other, ShapeMap)
                and self._map == other._map
                and self._kind == other._kind)

    def __hash__(self) -> int:
        return hash((self._map, self._kind))

    def __repr__(self) -> str:
        return 'ShapeMap({!r}, kind={!r})'.format(self._map, self._kind)


# -- traversal ------------------------------------------------------------------


class _Focus:
    """One stack frame of the traversal: a closed region awaiting marking.

    Only the positions of the region's top stratum are stored. Frames of
    kind 'u' are input boundaries of the whole poset; their lower maximal
    elements are those of the poset itself and are accounted for globally,
    never per frame. Frames of kind 'x' are closures of pure sets of cells,
    so their top stratum is the full set of maximal elements.
    """

    __slots__ = ('kind', 'n', 'top', 'pending', 'cand', 'scan', 'bminus')

    def __init__(self, kind: str, n: int, top: tuple[int, ...], pending: int):
        self.kind = kind
        self.n = n
        self.top = top
        self.pending = pending
        self.cand: Optional[dict[int, int]] = None
        self.scan = 0
        self.bminus = False


def traverse(p: Union[OgPoset, Molecule],
             trace: Optional[list] = None) -> list[El]:
    """Visit every element exactly once, in the unique traversal order.

    The order threads each cell between its input and output sides: a region
    is popped once fully marked, a single cell is marked as soon as its
    input boundary is, and the next cell inside a larger region is the
    unique unmarked input coface of the earliest marked element one
    dimension down. Whenever no such unique choice exists the shape is not a
    molecule and NotTraversable is raised.

    A list passed as trace receives one (kind, level, positions) triple per
    region pushed.
    """
    poset = p.underlying if isinstance(p, Molecule) else p
    total = len(poset)
    if total == 0:
        return []
    dim = poset.dim
    face_data = poset.face_data
    coface_data = poset.coface_data

    # top strata of the input boundaries of the whole poset, per level
    usdelta = [
        tuple(k for k in range(poset.size(d)) if not coface_data[d][k][1])
        for d in range(dim + 1)
    ]
    maxima = maximal(poset)
    umax_below = [0] * (dim + 1)
    running = 0
    for d in range(dim + 1):
        umax_below[d] = running
        running += len(maxima.stratum(d))

    flags = [bytearray(poset.size(d)) for d in range(dim + 1)]
    grorder: list[list[int]] = [[] for _ in range(dim + 1)]
    order: list[El] = []
    stack: list[_Focus] = []

    def fresh(kind: str, n: int, top: tuple[int, ...]) -> _Focus:
        row = flags[n]
        return _Focus(kind, n, top, sum(1 for pos in top if not row[pos]))

    def push(entry: _Focus) -> None:
        stack.append(entry)
        if trace is not None:
            trace.append((entry.kind, entry.n, entry.top))

    push(fresh('u', dim, usdelta[dim]))
    budget = (total + 1) * (total + 4 * dim + 2) + 16
    steps = 0
    while stack:
        steps += 1
        if steps > budget:
            raise NotTraversable('no traversal within the step budget')
        entry = stack[-1]
        if entry.pending == 0:
            stack.pop()
            continue
        n = entry.n
        if n > 0 and not entry.bminus:
            # the input boundary must be fully marked before anything here is
            entry.bminus = True
            if entry.kind == 'u':
                child = fresh('u', n - 1, usdelta[n - 1])
            else:
                ins: set = set()
                outs: set = set()
                for pos in entry.top:
                    pair = face_data[n][pos]
                    ins.update(pair[0])
                    outs.update(pair[1])
                child = fresh('x', n - 1, tuple(sorted(ins - outs)))
            if child.pending:
                push(child)
                continue
        if len(entry.top) == 1 and (entry.kind == 'x' or umax_below[n] == 0):
            # the region is the closure of a single cell: mark it
            x = entry.top[0]
            stack.pop()
            flags[n][x] = 1
            grorder[n].append(x)
            order.append(El(n, x))
            i = len(stack) - 1
            while i >= 0 and stack[i].n == n:
                below = stack[i]
                j = bisect_left(below.top, x)
                if j < len(below.top) and below.top[j] == x:
                    below.pending -= 1
                i -= 1
            if n > 0:
                child = fresh('x', n - 1, face_data[n][x][1])
                if child.pending:
                    push(child)
            continue
        if n == 0:
            raise NotTraversable('several disconnected starting points')
        if entry.cand is None:
            # each element one level down may admit at most one next cell
            cand: dict[int, int] = {}
            row = flags[n]
            for pos in entry.top:
                if row[pos]:
                    continue
                for y in face_data[n][pos][0]:
                    if y in cand:
                        raise NotTraversable(
                            'two cells at level {} share the input face '
                            '({}, {})'.format(n, n - 1, y))
                    cand[y] = pos
            entry.cand = cand
        marked_below = grorder[n - 1]
        row = flags[n]
        found = -1
        i = entry.scan
        while i < len(marked_below):
            x = entry.cand.get(marked_below[i], -1)
            if x < 0:
                i += 1
                continue
            if row[x]:
                del entry.cand[marked_below[i]]
                i += 1
                continue
            found = x
            break
        entry.scan = i
        if found < 0:
            raise NotTraversable(
                'no marked element at level {} admits a next cell'.format(n - 1))
        push(fresh('x', n, (found,)))

    if len(order) != total:
        raise NotTraversable('marking stopped before exhausting the elements')
    return order


def _canonical_pair(poset: OgPoset) -> tuple[OgPoset, OgMap]:
    # renumber every stratum by traversal rank; returns poset and renumbering
    order = traverse(poset)
    dim = poset.dim
    rank = [[0] * poset.size(d) for d in range(dim + 1)]
    inverse = [[0] * poset.size(d) for d in range(dim + 1)]
    seen = [0] * (dim + 1)
    for el in order:
        r = seen[el.dim]
        seen[el.dim] = r + 1
        rank[el.dim][el.pos] = r
        inverse[el.dim][r] = el.pos
    face_data = []
    for d in range(dim + 1):
        stratum = []
        for r in range(poset.size(d)):
            ins, outs = poset.face_data[d][inverse[d][r]]
            if d:
                ins = tuple(sorted(rank[d - 1][j] for j in ins))
                outs = tuple(sorted(rank[d - 1][j] for j in outs))
            stratum.append((ins, outs))
        face_data.append(stratum)
    mapping = [[El(d, rank[d][k]) for k in range(poset.size(d))]
               for d in range(dim + 1)]
    q = OgPoset(face_data)
    return q, OgMap(poset, q, mapping, _checked=True)


def canonicalize(p: Union[OgPoset, Molecule],
                 construction: str = 'imported') -> tuple[Molecule, ShapeMap]:
    """Renumber by traversal rank; returns the molecule and the renumbering."""
    if isinstance(p, Molecule):
        return p, ShapeMap(OgMap.identity(p.underlying), 'isomorphism')
    q, r = _canonical_pair(p)
    return Molecule(q, construction), ShapeMap(r, 'isomorphism')


def _canonical_of(x: Union[OgPoset, Molecule]) -> tuple[OgPoset, OgMap]:
    if isinstance(x, Molecule):
        return x.underlying, OgMap.identity(x.underlying)
    return _canonical_pair(x)


def is_isomorphic(u: Union[OgPoset, Molecule],
                  v: Union[OgPoset, Molecule]) -> Optional[ShapeMap]:
    """The unique isomorphism between two shapes, or None.

    Both sides are renumbered canonically; they are isomorphic exactly when
    the renumberings coincide, and then one renumbering composed with the
    inverse of the other is the only isomorphism that exists.
    """
    cu, ru = _canonical_of(u)
    cv, rv = _canonical_of(v)
    if cu != cv:
        return None
    return ShapeMap(ru.then(rv.inverse()), 'isomorphism')


def _as_molecule(x: Union[OgPoset, Molecule]) -> Molecule:
    if isinstance(x, Molecule):
        return x
    if isinstance(x, OgPoset):
        return canonicalize(x)[0]
    raise TypeError('expected a Molecule or OgPoset, got {}'.format(
        type(x).__name__))


# -- boundaries -----------------------------------------------------------------


def boundary_inclusion(u: Union[OgPoset, Molecule], sign: str,
                       k: Optional[int] = None) -> tuple[Molecule, ShapeMap]:
    """The k-boundary on one side, as a molecule with its inclusion.

    k defaults to dim - 1. Below zero the boundary is the empty molecule; at
    or above the dimension it is the whole shape and the inclusion is the
    identity renumbering.
    """
    if sign not in ('-', '+'):
        raise MalformedData("sign must be '-' or '+'")
    poset = u.underlying if isinstance(u, Molecule) else u
    sub, incl = boundary(poset, sign, k).as_ogposet()
    q, r = _canonical_pair(sub)
    return (Molecule(q, 'derived'),
            ShapeMap(r.inverse().then(incl), 'boundary-inclusion'))


def _boundary_glue(u: Molecule, v: Molecule) -> dict[El, El]:
    # the unique identification of the two boundaries, one sign at a time;
    # on the shared lower boundary the two pieces must agree
    phi: dict[El, El] = {}
    for sign in ('-', '+'):
        bu, iu = boundary_inclusion(u, sign)
        bv, iv = boundary_inclusion(v, sign)
        if bu != bv:
            raise BoundaryMismatch('the {} boundaries do not agree'.format(
                'input' if sign == '-' else 'output'))
        for el in bu.underlying.elements():
            src, dst = iu[el], iv[el]
            if phi.setdefault(src, dst) != dst:
                raise BoundaryMismatch(
                    'boundary identifications disagree below the top level')
    return phi


# -- atom and paste ---------------------------------------------------------------


def _atom_parts(u: Molecule, v: Molecule) -> tuple[Molecule, OgMap, OgMap]:
    if u.dim != v.dim:
        raise DimensionMismatch('cannot cap shapes of dimensions {} and {}'
                                .format(u.dim, v.dim))
    for half in (u, v):
        if not is_round(half.underlying):
            raise NotRound('atom halves must be round, {!r} is not'.format(half))
    phi = _boundary_glue(u, v)
    psi: dict[El, El] = {}
    for src, dst in phi.items():
        if dst in psi:
            raise BoundaryMismatch('boundary identification is not injective')
        psi[dst] = src

    big, small = u.underlying, v.underlying
    n = big.dim
    counts = [big.size(d) for d in range(n + 1)]
    trans: list[list[El]] = [[El(0, 0)] * small.size(d) for d in range(n + 1)]
    face_data: list[list] = [list(big.face_data[d]) for d in range(n + 1)]
    for d in range(n + 1):
        for pos in range(small.size(d)):
            hit = psi.get(El(d, pos))
            if hit is None:
                hit = El(d, counts[d])
                counts[d] += 1
            trans[d][pos] = hit
        for pos in range(small.size(d)):
            if trans[d][pos].pos < big.size(d):
                continue
            ins, outs = small.face_data[d][pos]
            face_data[d].append((
                tuple(sorted(trans[d - 1][j].pos for j in ins)),
                tuple(sorted(trans[d - 1][j].pos for j in outs))))
    # the new greatest element: u on the input side, v on the output side
    face_data.append([(
        tuple(range(big.size(n))),
        tuple(sorted(trans[n][pos].pos for pos in range(small.size(n)))))])
    raw = OgPoset(face_data)
    q, r = _canonical_pair(raw)
    ju = OgMap(big, raw, [[El(d, pos) for pos in range(big.size(d))]
                          for d in range(n + 1)], _checked=True)
    jv = OgMap(small, raw, trans, _checked=True)
    name = 'atom({},{})'.format(u.construction, v.construction)
    return Molecule(q, name), ju.then(r), jv.then(r)


def atom(u: Union[OgPoset, Molecule], v: Union[OgPoset, Molecule]) -> Molecule:
    """Cap two round shapes of equal dimension with one new greatest cell."""
    return _atom_parts(_as_molecule(u), _as_molecule(v))[0]


class PasteResult(NamedTuple):
    """A pasting together with the inclusions of its two arguments."""

    molecule: Molecule
    left: ShapeMap
    right: ShapeMap


def paste(u: Union[OgPoset, Molecule], v: Union[OgPoset, Molecule],
          k: Optional[int] = None) -> PasteResult:
    """Glue the k-output boundary of u to the k-input boundary of v.

    k defaults to one below the smaller dimension, the deepest level at
    which the two shapes can meet.
    """
    u, v = _as_molecule(u), _as_molecule(v)
    low = min(u.dim, v.dim)
    if k is None:
        k = low - 1
    if not 0 <= k < low:
        raise DimensionError('no level {} between shapes of dimensions {} and {}'
                             .format(k, u.dim, v.dim))
    bu, iu = boundary_inclusion(u, '+', k)
    bv, iv = boundary_inclusion(v, '-', k)
    if bu != bv:
        raise BoundaryMismatch(
            'output and input boundaries at level {} do not match'.format(k))
    glued, ju, jv = pushout(iu.map, iv.map)
    q, r = _canonical_pair(glued)
    name = 'paste({},{},{})'.format(u.construction, v.construction, k)
    return PasteResult(Molecule(q, name),
                       ShapeMap(ju.then(r), 'paste-inclusion'),
                       ShapeMap(jv.then(r), 'paste-inclusion'))


def paste_along(t: Union[OgPoset, Molecule], positions: Sequence[int],
                s: Union[OgPoset, Molecule], side: str) -> Molecule:
    """Glue s onto a selected part of one boundary of t.

    positions index the top cells of the chosen boundary of t, in boundary
    order; the closure of the selection must be a round region matching the
    opposite boundary of s at the same level. Selecting every cell agrees
    with paste.
    """
    return _paste_along_parts(t, positions, s, side).molecule


def _paste_along_parts(t: Union[OgPoset, Molecule], positions: Sequence[int],
                       s: Union[OgPoset, Molecule], side: str) -> PasteResult:
    if side not in ('inputs', 'outputs'):
        raise MalformedData("side must be 'inputs' or 'outputs'")
    t, s = _as_molecule(t), _as_molecule(s)
    k = t.dim - 1
    if k < 0:
        raise OutOfRange('a shape of dimension {} has no boundary cells'
                         .format(t.dim))
    sign = '+' if side == 'outputs' else '-'
    cells = boundary(t.underlying, sign, k).support.stratum(k)
    if not positions:
        raise OutOfRange('no boundary cells selected')
    picked = []
    for pos in positions:
        if not isinstance(pos, int) or not 0 <= pos < len(cells):
            raise OutOfRange('{!r} does not index the {} top cells of the '
                             'boundary'.format(pos, len(cells)))
        picked.append(El(k, cells[pos]))
    region = closure(t.underlying, picked)
    if not is_round(region):
        raise NotRound('the selected region is not round')
    sub, incl = region.as_ogposet()
    try:
        seam, renumber = _canonical_pair(sub)
    except NotTraversable as err:
        raise NotRound('the selected region does not glue as one piece') from err
    if k >= s.dim:
        raise DimensionError(
            'the other shape has dimension {} but the seam sits at level {}'
            .format(s.dim, k))
    bs, js = boundary_inclusion(s, '-' if side == 'outputs' else '+', k)
    if bs.underlying != seam:
        raise BoundaryMismatch(
            'the selected region does not match the boundary of the other shape')
    into_t = renumber.inverse().then(incl)
    glued, jt, jother = pushout(into_t, js.map)
    q, r = _canonical_pair(glued)
    return PasteResult(Molecule(q, 'derived'),
                       ShapeMap(jt.then(r), 'paste-inclusion'),
                       ShapeMap(jother.then(r), 'paste-inclusion'))


# -- collapse maps ----------------------------------------------------------------


def unit_collapse(u: Union[OgPoset, Molecule]) -> ShapeMap:
    """Collapse the unit cell over an atom back onto the atom.

    The source is the atom capped with itself; both copies map identically
    and the new top cell lands on the greatest element.
    """
    u = _as_molecule(u)
    tops = list(maximal(u.underlying))
    if len(tops) != 1:
        raise Unsupported('unit collapse needs a shape with a greatest element')
    big, first, second = _atom_parts(u, u)
    mapping: dict[El, El] = {El(u.dim + 1, 0): tops[0]}
    for el in u.underlying.elements():
        mapping[first[el]] = el
        mapping[second[el]] = el
    return ShapeMap(check_map(big.underlying, u.underlying, mapping), 'collapse')


def unitor_map(u: Union[OgPoset, Molecule], side: str) -> ShapeMap:
    """Collapse a unit pasted onto one side of an atom back onto the atom.

    For side 'left' the unit sits on the input boundary, for 'right' on the
    output boundary; that boundary must itself be an atom. The result maps
    the unit through its collapse and both copies of u identically.
    """
    if side not in ('left', 'right'):
        raise MalformedData("side must be 'left' or 'right'")
    u = _as_molecule(u)
    tops = list(maximal(u.underlying))
    if len(tops) != 1 or u.dim < 1:
        raise Unsupported('unitors need an atom of dimension at least 1')
    n = u.dim
    sign = '-' if side == 'left' else '+'
    edge, into_u = boundary_inclusion(u, sign)
    if len(maximal(edge.underlying)) != 1:
        raise Unsupported('the {} boundary is not a single cell'.format(
            'input' if side == 'left' else 'output'))
    tau = unit_collapse(edge)
    unit = atom(edge, edge)
    if side == 'left':
        padded, j_unit, j_u = paste(unit, u, n - 1)
    else:
        padded, j_u, j_unit = paste(u, unit, n - 1)
    big, inc_padded, inc_u = _atom_parts(padded, u)

    mapping: dict[El, El] = {El(n + 1, 0): tops[0]}
    for el in unit.underlying.elements():
        key, val = inc_padded[j_unit[el]], into_u[tau[el]]
        if mapping.setdefault(key, val) != val:
            raise NotAMap('collapse pieces disagree on the seam')
    for el in u.underlying.elements():
        for key in (inc_padded[j_u[el]], inc_u[el]):
            if mapping.setdefault(key, el) != el:
                raise NotAMap('collapse pieces disagree on the seam')
    return ShapeMap(check_map(big.underlying, u.underlying, mapping), 'collapse')


# -- named shapes -----------------------------------------------------------------


def _named(m: Molecule, name: str) -> Molecule:
    return Molecule(m.underlying, name)


@lru_cache(maxsize=None)
def point() -> Molecule:
    """The unique 0-dimensional molecule."""
    return Molecule(OgPoset([[((), ())]]), 'point')


@lru_cache(maxsize=None)
def arrow() -> Molecule:
    """One 1-cell between two points."""
    return _named(atom(point(), point()), 'arrow')


@lru_cache(maxsize=None)
def globe() -> Molecule:
    """One 2-cell between parallel arrows."""
    return _named(atom(arrow(), arrow()), 'globe')


@lru_cache(maxsize=None)
def binary() -> Molecule:
    """A 2-cell from a chain of two arrows to a single arrow."""
    two = paste(arrow(), arrow(), 0).molecule
    return _named(atom(two, arrow()), 'binary')


@lru_cache(maxsize=None)
def cobinary() -> Molecule:
    """A 2-cell from a single arrow to a chain of two."""
    two = paste(arrow(), arrow(), 0).molecule
    return _named(atom(arrow(), two), 'cobinary')


@lru_cache(maxsize=None)
def whisker() -> Molecule:
    """A binary cell followed by an idle arrow."""
    return _named(paste(binary(), arrow(), 0).molecule, 'whisker')


@lru_cache(maxsize=None)
def frob() -> Molecule:
    """A cobinary cell feeding a binary one across two wires."""
    upper = paste(cobinary(), arrow(), 0).molecule
    lower = paste(arrow(), binary(), 0).molecule
    return _named(paste(upper, lower, 1).molecule, 'frob')


# -- serialization ----------------------------------------------------------------


def molecule_to_json(m: Molecule) -> str:
    data = shape_to_dict(m.underlying)
    data['construction'] = m.construction
    return json.dumps(data)


def molecule_from_json(text: str) -> Molecule:
    """Decode a molecule, canonicalizing whatever representation arrives."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError('invalid JSON: {}'.format(err)) from err
    poset = shape_from_dict(data)
    construction = data.get('construction', 'imported')
    if not isinstance(construction, str):
        raise MalformedData('construction must be a string')
    q, _ = _canonical_pair(poset)
    return Molecule(q, construction)

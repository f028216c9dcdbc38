"""Oriented graded posets and their maps.

An oriented graded poset is stored by face data: for every dimension n and
position k, a pair of strictly sorted tuples of positions one dimension down,
the input faces and the output faces of the element (n, k). Coface data is the
transpose and is derived, never stored independently.

Closed subsets carry their ambient poset; boundaries, maximality and roundness
are operations on closed subsets (a whole poset counts as one). Maps between
posets are position tables validated by boundary compatibility.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import (
    EmptySubset,
    LoopEdge,
    MalformedData,
    NotAMap,
    NotGraded,
    NotInclusion,
    OutOfRange,
    ParseError,
    SourceMismatch,
    SourceTargetMismatch,
)

Sign = Optional[str]
_SIGNS = ('-', '+')


class El(NamedTuple):
    """An element of an oriented graded poset: dimension and position."""

    dim: int
    pos: int


class GrSet:
    """A graded set of elements, one strictly sorted tuple per dimension."""

    __slots__ = ('_strata',)

    def __init__(self, strata: Iterable[Iterable[int]] = ()):
        data = [tuple(sorted(set(s))) for s in strata]
        while data and not data[-1]:
            data.pop()
        self._strata = tuple(data)

    @classmethod
    def from_elements(cls, els: Iterable[El]) -> 'GrSet':
        strata: list[set[int]] = []
        for el in els:
            while len(strata) <= el.dim:
                strata.append(set())
            strata[el.dim].add(el.pos)
        return cls(strata)

    @property
    def strata(self) -> tuple[tuple[int, ...], ...]:
        return self._strata

    @property
    def dim(self) -> int:
        return len(self._strata) - 1

    def stratum(self, n: int) -> tuple[int, ...]:
        if 0 <= n < len(self._strata):
            return self._strata[n]
        return ()

    def elements(self) -> Iterator[El]:
        for n, stratum in enumerate(self._strata):
            for pos in stratum:
                yield El(n, pos)

    def __iter__(self) -> Iterator[El]:
        return self.elements()

    def __len__(self) -> int:
        return sum(len(s) for s in self._strata)

    def __contains__(self, el: El) -> bool:
        stratum = self.stratum(el.dim)
        i = bisect_left(stratum, el.pos)
        return i < len(stratum) and stratum[i] == el.pos

    def union(self, other: 'GrSet') -> 'GrSet':
        size = max(len(self._strata), len(other._strata))
        return GrSet(set(self.stratum(n)) | set(other.stratum(n))
                     for n in range(size))

    def intersection(self, other: 'GrSet') -> 'GrSet':
        size = min(len(self._strata), len(other._strata))
        return GrSet(set(self.stratum(n)) & set(other.stratum(n))
                     for n in range(size))

    def difference(self, other: 'GrSet') -> 'GrSet':
        return GrSet(set(self.stratum(n)) - set(other.stratum(n))
                     for n in range(len(self._strata)))

    def is_subset(self, other: 'GrSet') -> bool:
        return all(set(self.stratum(n)) <= set(other.stratum(n))
                   for n in range(len(self._strata)))

    def __eq__(self, other) -> bool:
        return isinstance(other, GrSet) and self._strata == other._strata

    def __hash__(self) -> int:
        return hash(self._strata)

    def __repr__(self) -> str:
        return 'GrSet({})'.format(list(self.elements()))


class OgPoset:
    """An oriented graded poset, validated at construction."""

    __slots__ = ('_face_data', '_coface_data', '_hash')

    def __init__(self, face_data):
        self._face_data = _normalize_face_data(face_data)
        self._coface_data = _transpose(self._face_data)
        self._hash = hash(self._face_data)

    @property
    def face_data(self):
        return self._face_data

    @property
    def coface_data(self):
        return self._coface_data

    @property
    def dim(self) -> int:
        return len(self._face_data) - 1

    @property
    def strata_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self._face_data)

    def size(self, n: int) -> int:
        if 0 <= n < len(self._face_data):
            return len(self._face_data[n])
        return 0

    def __len__(self) -> int:
        return sum(len(s) for s in self._face_data)

    def elements(self) -> Iterator[El]:
        for n, stratum in enumerate(self._face_data):
            for pos in range(len(stratum)):
                yield El(n, pos)

    def __contains__(self, el: El) -> bool:
        return 0 <= el.dim and el.dim <= self.dim and 0 <= el.pos < self.size(el.dim)

    def faces(self, el: El, sign: Sign = None) -> tuple[El, ...]:
        ins, outs = self._face_data[el.dim][el.pos]
        positions = ins if sign == '-' else outs if sign == '+' else tuple(
            sorted(set(ins) | set(outs)))
        return tuple(El(el.dim - 1, p) for p in positions)

    def cofaces(self, el: El, sign: Sign = None) -> tuple[El, ...]:
        ins, outs = self._coface_data[el.dim][el.pos]
        positions = ins if sign == '-' else outs if sign == '+' else tuple(
            sorted(set(ins) | set(outs)))
        return tuple(El(el.dim + 1, p) for p in positions)

    def all_elements(self) -> 'ClosedSubset':
        return ClosedSubset(GrSet.from_elements(self.elements()), self,
                            _trusted=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, OgPoset) and self._face_data == other._face_data

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return 'OgPoset(strata={})'.format(list(self.strata_sizes))


def _normalize_face_data(face_data):
    if not isinstance(face_data, (list, tuple)):
        raise MalformedData('face data must be a sequence of strata')
    strata = []
    for n, stratum in enumerate(face_data):
        if not isinstance(stratum, (list, tuple)):
            raise MalformedData('stratum {} is not a sequence'.format(n))
        rows = []
        below = len(strata[-1]) if strata else 0
        for k, entry in enumerate(stratum):
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise MalformedData(
                    'face entry at ({}, {}) is not an input/output pair'.format(n, k))
            sides = []
            for side in entry:
                if not isinstance(side, (list, tuple)) or not all(
                        isinstance(p, int) and not isinstance(p, bool) for p in side):
                    raise MalformedData(
                        'face list at ({}, {}) must hold integers'.format(n, k))
                if any(side[i] >= side[i + 1] for i in range(len(side) - 1)):
                    raise MalformedData(
                        'face list at ({}, {}) is not strictly sorted'.format(n, k))
                sides.append(tuple(side))
            ins, outs = sides
            if set(ins) & set(outs):
                raise MalformedData(
                    'input and output faces overlap at ({}, {})'.format(n, k))
            if n == 0:
                if ins or outs:
                    raise NotGraded('element (0, {}) has faces'.format(k))
            else:
                if not ins and not outs:
                    raise NotGraded('element ({}, {}) has no faces'.format(n, k))
                for p in ins + outs:
                    if not 0 <= p < below:
                        raise NotGraded(
                            'face {} of ({}, {}) has no element one dimension down'
                            .format(p, n, k))
            rows.append((ins, outs))
        strata.append(tuple(rows))
    while strata and not strata[-1]:
        strata.pop()
    if strata and not strata[0]:
        raise NotGraded('stratum 0 is empty below a nonempty stratum')
    return tuple(strata)


def _transpose(face_data):
    coface = [[(set(), set()) for _ in stratum] for stratum in face_data]
    for n in range(1, len(face_data)):
        for k, (ins, outs) in enumerate(face_data[n]):
            for j in ins:
                coface[n - 1][j][0].add(k)
            for j in outs:
                coface[n - 1][j][1].add(k)
    return tuple(
        tuple((tuple(sorted(ins)), tuple(sorted(outs))) for ins, outs in stratum)
        for stratum in coface)


def build_ogposet(face_data) -> OgPoset:
    """Validate face data and build the poset (coface data is derived)."""
    return OgPoset(face_data)


class ClosedSubset:
    """A downward-closed graded set of elements of an ambient poset."""

    __slots__ = ('_support', '_ambient')

    def __init__(self, support: GrSet, ambient: OgPoset, _trusted: bool = False):
        if not _trusted:
            for el in support.elements():
                if el not in ambient:
                    raise OutOfRange('{} not in ambient poset'.format(el))
                for face in ambient.faces(el):
                    if face not in support:
                        raise MalformedData(
                            'subset not closed: missing {} below {}'.format(face, el))
        self._support = support
        self._ambient = ambient

    @property
    def support(self) -> GrSet:
        return self._support

    @property
    def ambient(self) -> OgPoset:
        return self._ambient

    @property
    def dim(self) -> int:
        return self._support.dim

    def elements(self) -> Iterator[El]:
        return self._support.elements()

    def __len__(self) -> int:
        return len(self._support)

    def __contains__(self, el: El) -> bool:
        return el in self._support

    def __eq__(self, other) -> bool:
        return (isinstance(other, ClosedSubset)
                and self._support == other._support
                and self._ambient == other._ambient)

    def __hash__(self) -> int:
        return hash((self._support, self._ambient))

    def __repr__(self) -> str:
        return 'ClosedSubset(strata={})'.format(
            [len(self._support.stratum(n)) for n in range(self.dim + 1)])

    def as_ogposet(self) -> tuple[OgPoset, 'OgMap']:
        """Restrict the ambient structure to this subset.

        Positions are renumbered by rank within each stratum; returns the new
        poset together with its inclusion into the ambient.
        """
        ambient = self._ambient
        rank = {}
        for n in range(self.dim + 1):
            for i, pos in enumerate(self._support.stratum(n)):
                rank[El(n, pos)] = i
        face_data = []
        for n in range(self.dim + 1):
            stratum = []
            for pos in self._support.stratum(n):
                ins, outs = ambient.face_data[n][pos]
                stratum.append((
                    tuple(sorted(rank[El(n - 1, j)] for j in ins)),
                    tuple(sorted(rank[El(n - 1, j)] for j in outs))))
            face_data.append(stratum)
        sub = OgPoset(face_data)
        mapping = [[None] * len(self._support.stratum(n))
                   for n in range(self.dim + 1)]
        for n in range(self.dim + 1):
            for i, pos in enumerate(self._support.stratum(n)):
                mapping[n][i] = El(n, pos)
        return sub, OgMap(sub, ambient, mapping, _checked=True)


def _as_subset(x: Union[OgPoset, ClosedSubset]) -> ClosedSubset:
    if isinstance(x, OgPoset):
        return x.all_elements()
    if isinstance(x, ClosedSubset):
        return x
    raise TypeError('expected an OgPoset or ClosedSubset, got {!r}'.format(x))


def closure(ambient: OgPoset, elements: Iterable[El]) -> ClosedSubset:
    """The downward closure of a set of elements."""
    strata: list[set[int]] = [set() for _ in range(ambient.dim + 1)]
    queue = []
    for el in elements:
        if el not in ambient:
            raise OutOfRange('{} not in ambient poset'.format(el))
        if el.pos not in strata[el.dim]:
            strata[el.dim].add(el.pos)
            queue.append(el)
    while queue:
        el = queue.pop()
        if el.dim == 0:
            continue
        ins, outs = ambient.face_data[el.dim][el.pos]
        for j in ins + outs:
            if j not in strata[el.dim - 1]:
                strata[el.dim - 1].add(j)
                queue.append(El(el.dim - 1, j))
    return ClosedSubset(GrSet(strata), ambient, _trusted=True)


def maximal(x: Union[OgPoset, ClosedSubset]) -> GrSet:
    """Elements of the subset with no coface inside it."""
    s = _as_subset(x)
    out = []
    for el in s.elements():
        if not any(c in s for c in s.ambient.cofaces(el)):
            out.append(el)
    return GrSet.from_elements(out)


def boundary(x: Union[OgPoset, ClosedSubset], sign: Sign = None,
             n: Optional[int] = None) -> ClosedSubset:
    """The n-boundary of a closed subset; n defaults to dim - 1.

    With sign None this is the union of the input and output boundaries.
    Below n = 0 the boundary is empty; at or above the dimension it is the
    whole subset.
    """
    s = _as_subset(x)
    ambient = s.ambient
    d = s.dim
    if n is None:
        n = d - 1
    if n < 0 or d < 0:
        return ClosedSubset(GrSet(), ambient, _trusted=True)
    if sign is None:
        return ClosedSubset(
            boundary(s, '-', n).support.union(boundary(s, '+', n).support),
            ambient, _trusted=True)
    other = 1 if sign == '-' else 0
    gens = []
    for pos in s.support.stratum(n):
        el = El(n, pos)
        wrong = s.ambient.coface_data[n][pos][other]
        if not any(El(n + 1, c) in s for c in wrong):
            gens.append(el)
    for k in range(min(n, d + 1)):
        for pos in s.support.stratum(k):
            el = El(k, pos)
            if not any(c in s for c in ambient.cofaces(el)):
                gens.append(el)
    return closure(ambient, gens)


def round_defect(x: Union[OgPoset, ClosedSubset]):
    """First failure of roundness, or None.

    Returns (k, intersection of the k-boundaries, (k-1)-boundary) for the
    smallest k where the two differ.
    """
    s = _as_subset(x)
    if len(s) == 0:
        raise EmptySubset('roundness is undefined for the empty subset')
    for k in range(s.dim):
        inter = boundary(s, '-', k).support.intersection(
            boundary(s, '+', k).support)
        lower = boundary(s, None, k - 1).support
        if inter != lower:
            return k, inter, lower
    return None


def is_round(x: Union[OgPoset, ClosedSubset]) -> bool:
    """Whether input and output boundaries meet exactly in lower boundaries."""
    return round_defect(x) is None


class OgMap:
    """A map of oriented graded posets: a position table per dimension.

    Entries may be None (partial map). Maps are produced by check_map or by
    operations that guarantee validity; composition does not re-check.
    """

    __slots__ = ('_source', '_target', '_mapping')

    def __init__(self, source: OgPoset, target: OgPoset, mapping,
                 _checked: bool = False):
        if not _checked:
            raise TypeError('use check_map to build maps from raw data')
        self._source = source
        self._target = target
        self._mapping = tuple(tuple(row) for row in mapping)

    @property
    def source(self) -> OgPoset:
        return self._source

    @property
    def target(self) -> OgPoset:
        return self._target

    @property
    def mapping(self):
        return self._mapping

    def __getitem__(self, el: El) -> Optional[El]:
        if el not in self._source:
            raise OutOfRange('{} not in source'.format(el))
        return self._mapping[el.dim][el.pos]

    @property
    def is_total(self) -> bool:
        return all(v is not None for row in self._mapping for v in row)

    @property
    def is_injective(self) -> bool:
        seen = set()
        for row in self._mapping:
            for v in row:
                if v is None:
                    continue
                if v in seen:
                    return False
                seen.add(v)
        return True

    @property
    def is_surjective(self) -> bool:
        image = {v for row in self._mapping for v in row if v is not None}
        return len(image) == len(self._target)

    def then(self, other: 'OgMap') -> 'OgMap':
        if self._target != other._source:
            raise SourceTargetMismatch('target of first is not source of second')
        mapping = [
            [None if v is None else other._mapping[v.dim][v.pos] for v in row]
            for row in self._mapping]
        return OgMap(self._source, other._target, mapping, _checked=True)

    @classmethod
    def identity(cls, poset: OgPoset) -> 'OgMap':
        mapping = [[El(n, k) for k in range(poset.size(n))]
                   for n in range(poset.dim + 1)]
        return cls(poset, poset, mapping, _checked=True)

    def inverse(self) -> 'OgMap':
        """Inverse of a bijective dimension-preserving map."""
        mapping = [[None] * self._target.size(n)
                   for n in range(self._target.dim + 1)]
        for n, row in enumerate(self._mapping):
            for k, v in enumerate(row):
                if v is None or mapping[v.dim][v.pos] is not None:
                    raise NotAMap('map is not invertible')
                mapping[v.dim][v.pos] = El(n, k)
        if any(v is None for row in mapping for v in row):
            raise NotAMap('map is not invertible')
        return OgMap(self._target, self._source, mapping, _checked=True)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OgMap)
                and self._source == other._source
                and self._target == other._target
                and self._mapping == other._mapping)

    def __hash__(self) -> int:
        return hash((self._source, self._target, self._mapping))

    def __repr__(self) -> str:
        return 'OgMap({!r} -> {!r})'.format(self._source, self._target)


def _normalize_mapping(source: OgPoset, target: OgPoset, mapping):
    table = [[None] * source.size(n) for n in range(source.dim + 1)]
    if isinstance(mapping, Mapping):
        items = mapping.items()
    else:
        items = []
        for n, row in enumerate(mapping):
            for k, v in enumerate(row):
                if v is not None:
                    items.append((El(n, k), El(*v)))
    for el, img in items:
        el, img = El(*el), El(*img)
        if el not in source:
            raise OutOfRange('{} not in source'.format(el))
        if img not in target:
            raise OutOfRange('{} not in target'.format(img))
        table[el.dim][el.pos] = img
    return table


def check_map(source: OgPoset, target: OgPoset, mapping) -> OgMap:
    """Validate boundary compatibility and return the map.

    For every defined element x and every n up to dim(x), the boundary of the
    image must equal the image of the boundary, for both signs. Raises NotAMap
    with (element, n, sign) as the witness on the first failure.
    """
    table = _normalize_mapping(source, target, mapping)
    for n in range(source.dim + 1):
        for k in range(source.size(n)):
            img = table[n][k]
            if img is None:
                continue
            el = El(n, k)
            cl = closure(source, [el])
            for level in range(n + 1):
                for sign in _SIGNS:
                    lhs = boundary(closure(target, [img]), sign, level).support
                    rhs = []
                    for y in boundary(cl, sign, level).support.elements():
                        v = table[y.dim][y.pos]
                        if v is None:
                            raise NotAMap(
                                'map undefined on the boundary of {}'.format(el),
                                (el, level, sign))
                        rhs.append(v)
                    if lhs != GrSet.from_elements(rhs):
                        raise NotAMap(
                            'boundary condition fails at {}'.format(el),
                            (el, level, sign))
    return OgMap(source, target, table, _checked=True)


def compose(f: OgMap, g: OgMap) -> OgMap:
    """The composite g after f; validity is preserved, not re-checked."""
    return f.then(g)


def pushout(m: OgMap, n: OgMap) -> tuple[OgPoset, OgMap, OgMap]:
    """Pushout of a span of inclusions m: S -> U, n: S -> V.

    The result keeps U's positions and appends the elements of V outside the
    image of n, stratum by stratum in V's order. Returns (W, U -> W, V -> W).
    """
    if m.source != n.source:
        raise SourceMismatch('span legs have different sources')
    for leg in (m, n):
        if not (leg.is_total and leg.is_injective):
            raise NotInclusion('pushout legs must be total and injective')
    u, v, s = m.target, n.target, m.source

    trans: list[list[Optional[El]]] = [
        [None] * v.size(d) for d in range(v.dim + 1)]
    for el in s.elements():
        hit = n[el]
        trans[hit.dim][hit.pos] = m[el]
    counts = [u.size(d) for d in range(max(u.dim, v.dim) + 1)]
    for d in range(v.dim + 1):
        for pos in range(v.size(d)):
            if trans[d][pos] is None:
                trans[d][pos] = El(d, counts[d])
                counts[d] += 1

    face_data = [list(u.face_data[d]) if d <= u.dim else []
                 for d in range(max(u.dim, v.dim) + 1)]
    for d in range(v.dim + 1):
        for pos in range(v.size(d)):
            dest = trans[d][pos]
            if dest.pos < u.size(d):
                continue
            ins, outs = v.face_data[d][pos]
            face_data[d].append((
                tuple(sorted(trans[d - 1][j].pos for j in ins)),
                tuple(sorted(trans[d - 1][j].pos for j in outs))))
    w = OgPoset(face_data)
    ju = OgMap(u, w, [[El(d, k) for k in range(u.size(d))]
                      for d in range(u.dim + 1)], _checked=True)
    jv = OgMap(v, w, trans, _checked=True)
    return w, ju, jv


def brute_force_iso(p: OgPoset, q: OgPoset) -> list[OgMap]:
    """All isomorphisms p -> q, by exhaustive stratum-wise search.

    An isomorphism is a dimension-preserving bijection that is a valid map in
    both directions; candidates are pruned by forcing translated face sets to
    match exactly. Every survivor is re-validated in both directions.
    """
    if p.strata_sizes != q.strata_sizes:
        return []
    top = p.dim
    found: list[list[list[int]]] = []
    perms: list[list[int]] = [[-1] * p.size(d) for d in range(top + 1)]

    target_index: list[dict] = []
    for d in range(top + 1):
        index: dict = {}
        for j in range(q.size(d)):
            ins, outs = q.face_data[d][j] if d > 0 else ((), ())
            cins, couts = q.coface_data[d][j]
            key = (ins, outs, len(cins), len(couts))
            index.setdefault(key, []).append(j)
        target_index.append(index)

    def candidates(d: int, k: int) -> list[int]:
        if d > 0:
            ins, outs = p.face_data[d][k]
            ins = tuple(sorted(perms[d - 1][i] for i in ins))
            outs = tuple(sorted(perms[d - 1][i] for i in outs))
        else:
            ins = outs = ()
        cins, couts = p.coface_data[d][k]
        return target_index[d].get((ins, outs, len(cins), len(couts)), [])

    used = [[False] * q.size(d) for d in range(top + 1)]

    def place(d: int, k: int) -> None:
        if d > top:
            found.append([list(row) for row in perms])
            return
        if k == p.size(d):
            place(d + 1, 0)
            return
        for j in candidates(d, k):
            if used[d][j]:
                continue
            used[d][j] = True
            perms[d][k] = j
            place(d, k + 1)
            used[d][j] = False
        perms[d][k] = -1

    place(0, 0)

    isos = []
    for perm in found:
        mapping = {El(d, k): El(d, perm[d][k])
                   for d in range(top + 1) for k in range(p.size(d))}
        f = check_map(p, q, mapping)
        check_map(q, p, {v: k for k, v in mapping.items()})
        isos.append(f)
    return isos


def digraph_incidence(num_vertices: int, edges: Sequence[tuple[int, int]]) -> OgPoset:
    """The oriented incidence poset of a simple digraph.

    Vertices become 0-dimensional elements, edges 1-dimensional ones with the
    source as input face and the target as output face.
    """
    if num_vertices < 0:
        raise OutOfRange('negative vertex count')
    stratum1 = []
    for s, t in edges:
        if not (0 <= s < num_vertices and 0 <= t < num_vertices):
            raise OutOfRange('edge ({}, {}) leaves the vertex range'.format(s, t))
        if s == t:
            raise LoopEdge('loop at vertex {}'.format(s))
        stratum1.append(((s,), (t,)))
    face_data = [[((), ())] * num_vertices]
    if stratum1:
        face_data.append(stratum1)
    return OgPoset(face_data)


# -- JSON shape format ----------------------------------------------------------


def shape_to_dict(poset: OgPoset) -> dict:
    return {'face_data': [[[list(ins), list(outs)] for ins, outs in stratum]
                          for stratum in poset.face_data]}


def shape_to_json(poset: OgPoset) -> str:
    return json.dumps(shape_to_dict(poset))


def shape_from_dict(data) -> OgPoset:
    if not isinstance(data, dict) or 'face_data' not in data:
        raise MalformedData('expected an object with a face_data field')
    return OgPoset(data['face_data'])


def shape_from_json(text: str) -> OgPoset:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError('invalid JSON: {}'.format(err)) from err
    return shape_from_dict(data)

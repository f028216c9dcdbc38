"""Diagrams labelled in a signature of generating cells.

A DiagSet is an ordered collection of named generators: points in dimension
zero, and higher cells declared by a parallel pair of round diagrams. A
Diagram is a canonical shape together with a total labelling of its elements
by generator names. Every operation here transports labels along the maps of
the shape layer, so the shape arithmetic is never repeated.
"""

import json
from typing import NamedTuple, Optional, Sequence

from .errors import (
    AmbientMismatch,
    DuplicateName,
    MalformedData,
    MissingAssignment,
    NotAMap,
    NotGraded,
    NotRound,
    NotTraversable,
    ParseError,
    ShapeMismatch,
    SourceTargetMismatch,
    TypeMismatch,
    UnknownName,
)
from .molecule import (
    Molecule,
    ShapeMap,
    _atom_parts,
    _paste_along_parts,
    boundary_inclusion,
    canonicalize,
    paste,
    point,
    unit_collapse,
    unitor_map,
)
from .ogposet import (
    El,
    check_map,
    closure,
    is_round,
    maximal,
    shape_from_dict,
    shape_to_dict,
)

Labels = tuple[tuple[str, ...], ...]


class Diagram:
    """A shape whose elements are labelled with generator names.

    Instances are produced by DiagSet declarations and by the operations in
    this module; the constructor trusts its arguments. Equality compares the
    shape and the labelling but not the owning signature.
    """

    __slots__ = ('_shape', '_labels', '_ambient')

    def __init__(self, shape: Molecule, labels: Labels, ambient: 'DiagSet'):
        self._shape = shape
        self._labels = labels
        self._ambient = ambient

    @property
    def shape(self) -> Molecule:
        return self._shape

    @property
    def labels(self) -> Labels:
        return self._labels

    @property
    def ambient(self) -> 'DiagSet':
        return self._ambient

    @property
    def dim(self) -> int:
        return self._shape.dim

    @property
    def input(self) -> 'Diagram':
        return boundary_diagram(self, '-')

    @property
    def output(self) -> 'Diagram':
        return boundary_diagram(self, '+')

    def __getitem__(self, el: El) -> str:
        return self._labels[el.dim][el.pos]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._shape == other._shape and self._labels == other._labels

    def __hash__(self) -> int:
        return hash((self._shape, self._labels))

    def __repr__(self) -> str:
        if self.dim < 0:
            return 'Diagram(empty)'
        return 'Diagram({}, dim={})'.format('/'.join(self._labels[-1]),
                                            self.dim)


class GeneratorDecl(NamedTuple):
    """One named generator: its cell together with the declared halves."""

    name: str
    shape: Molecule
    input: Optional[Diagram]
    output: Optional[Diagram]
    cell: Diagram


class DiagSet:
    """An ordered signature of named generating cells.

    Generators may only refer to earlier ones, so declaration order is a
    dependency order. Equality compares declarations dimension by dimension
    and ignores the interleaving of independent names.
    """

    __hash__ = None

    def __init__(self):
        self._decls: dict[str, GeneratorDecl] = {}

    def add_point(self, name: str) -> Diagram:
        """Declare a generator of dimension zero."""
        self._fresh(name)
        cell = Diagram(point(), ((name,),), self)
        self._decls[name] = GeneratorDecl(name, cell.shape, None, None, cell)
        return cell

    def add_gen(self, name: str, input: Diagram, output: Diagram) -> Diagram:
        """Declare a generator rewriting one round diagram into another.

        The halves must be parallel: same dimension, and equal boundary
        diagrams on both sides. The new cell is their shapes capped with one
        greatest element carrying the fresh name.
        """
        self._fresh(name)
        for half in (input, output):
            if not isinstance(half, Diagram):
                raise MalformedData('generator halves must be diagrams')
            if half.ambient is not self:
                raise AmbientMismatch(
                    'generator halves must live in this signature')
        if input.dim != output.dim:
            raise TypeMismatch('the halves of {} have dimensions {} and {}'
                               .format(name, input.dim, output.dim))
        if input.dim < 0:
            raise NotRound('generator halves cannot be empty')
        for half in (input, output):
            if not is_round(half.shape.underlying):
                raise NotRound('the halves of {} must be round'.format(name))
        parallel = 'the halves of {} are not parallel'.format(name)
        for sign in ('-', '+'):
            if boundary_diagram(input, sign) != boundary_diagram(output, sign):
                raise TypeMismatch(parallel)
        big, j_in, j_out = _atom_parts(input.shape, output.shape)
        labels = _merge_labels(big, ((j_in, input), (j_out, output)),
                               parallel, cap=name)
        cell = Diagram(big, labels, self)
        self._decls[name] = GeneratorDecl(name, big, input, output, cell)
        return cell

    def cell(self, name: str) -> Diagram:
        """The whole-atom diagram of one generator."""
        return self.generator(name).cell

    def generator(self, name: str) -> GeneratorDecl:
        decl = self._decls.get(name)
        if decl is None:
            raise UnknownName('{!r} is not declared'.format(name))
        return decl

    @property
    def names(self) -> tuple:
        return tuple(self._decls)

    @property
    def dim(self) -> int:
        return max((decl.shape.dim for decl in self._decls.values()),
                   default=-1)

    def __len__(self) -> int:
        return len(self._decls)

    def __contains__(self, name) -> bool:
        return name in self._decls

    def __iter__(self):
        return iter(self._decls)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagSet):
            return NotImplemented
        return self._signature() == other._signature()

    def _signature(self) -> dict:
        # order within a dimension is immaterial; dependencies fix the rest
        by_dim: dict[int, set] = {}
        for decl in self._decls.values():
            record = (decl.name, decl.shape.underlying.face_data,
                      None if decl.input is None else decl.input.labels,
                      None if decl.output is None else decl.output.labels)
            by_dim.setdefault(decl.shape.dim, set()).add(record)
        return {dim: frozenset(records) for dim, records in by_dim.items()}

    def _fresh(self, name) -> None:
        if not isinstance(name, str) or not name:
            raise MalformedData('generator names are nonempty strings')
        if name in self._decls:
            raise DuplicateName('{!r} is already declared'.format(name))

    def __repr__(self) -> str:
        return 'DiagSet({} generators, dim {})'.format(len(self), self.dim)


def _merge_labels(shape: Molecule, pieces, message: str,
                  cap: Optional[str] = None) -> Labels:
    # pieces are (map into shape, labelled diagram) pairs that jointly cover
    # it; overlaps must agree, and cap names a single uncovered top element
    labels: list[list[Optional[str]]] = [
        [None] * shape.underlying.size(d) for d in range(shape.dim + 1)]
    for leg, half in pieces:
        for el in half.shape.underlying.elements():
            img = leg[el]
            name = half[el]
            seen = labels[img.dim][img.pos]
            if seen is not None and seen != name:
                raise TypeMismatch(message)
            labels[img.dim][img.pos] = name
    if cap is not None:
        assert labels[shape.dim] == [None]
        labels[shape.dim][0] = cap
    assert all(name is not None for stratum in labels for name in stratum)
    return tuple(tuple(stratum) for stratum in labels)


def _common_ambient(t: Diagram, s: Diagram) -> None:
    for half in (t, s):
        if not isinstance(half, Diagram):
            raise MalformedData('expected diagrams')
    if t.ambient is not s.ambient:
        raise AmbientMismatch('the diagrams live in different signatures')


# -- transport along shape maps ----------------------------------------------------


def pullback(p: ShapeMap, t: Diagram) -> Diagram:
    """Relabel the source of a shape map with the labels of its target.

    The map must be total and land exactly in the shape of t; the result
    lives on the canonical form of the source.
    """
    if not isinstance(p, ShapeMap) or not isinstance(t, Diagram):
        raise MalformedData('pullback expects a shape map and a diagram')
    if p.target != t.shape.underlying:
        raise ShapeMismatch('the map does not land in the shape of the '
                            'diagram')
    if not p.map.is_total:
        raise ShapeMismatch('the map must be total')
    mol, renumber = canonicalize(p.source, 'derived')
    labels: list[list[Optional[str]]] = [
        [None] * mol.underlying.size(d) for d in range(mol.dim + 1)]
    for el in p.source.elements():
        img = renumber[el]
        labels[img.dim][img.pos] = t[p[el]]
    return Diagram(mol, tuple(tuple(s) for s in labels), t.ambient)


def boundary_diagram(t: Diagram, sign: str, k: Optional[int] = None
                     ) -> Diagram:
    """The k-boundary of a diagram on one side.

    k defaults to dim - 1; below zero the result is empty, at or above the
    dimension it is the whole diagram.
    """
    if not isinstance(t, Diagram):
        raise MalformedData('expected a diagram')
    _, incl = boundary_inclusion(t.shape, sign, k)
    return pullback(incl, t)


def unit(t: Diagram) -> Diagram:
    """The degenerate cell presenting t as a rewrite of itself."""
    if not isinstance(t, Diagram):
        raise MalformedData('expected a diagram')
    return pullback(unit_collapse(t.shape), t)


def lunitor(t: Diagram) -> Diagram:
    """The cell rewriting a unit pasted below the input of t back to t."""
    if not isinstance(t, Diagram):
        raise MalformedData('expected a diagram')
    return pullback(unitor_map(t.shape, 'left'), t)


def runitor(t: Diagram) -> Diagram:
    """The cell rewriting a unit pasted onto the output of t back to t."""
    if not isinstance(t, Diagram):
        raise MalformedData('expected a diagram')
    return pullback(unitor_map(t.shape, 'right'), t)


# -- pasting -----------------------------------------------------------------------


def paste_diagrams(t: Diagram, s: Diagram, k: Optional[int] = None
                   ) -> Diagram:
    """Glue the k-output boundary of t to the k-input boundary of s.

    The shapes are glued by the shape layer; on the seam the two labellings
    must agree.
    """
    _common_ambient(t, s)
    glued = paste(t.shape, s.shape, k)
    labels = _merge_labels(glued.molecule,
                           ((glued.left, t), (glued.right, s)),
                           'the glued boundaries carry different labels')
    return Diagram(glued.molecule, labels, t.ambient)


def paste_along_diagram(t: Diagram, positions: Sequence[int], s: Diagram,
                        side: str) -> Diagram:
    """Glue s onto selected cells of one boundary of t.

    positions pick top cells of the input or output boundary of t; the other
    diagram must have a matching boundary, labels included.
    """
    _common_ambient(t, s)
    glued = _paste_along_parts(t.shape, positions, s.shape, side)
    labels = _merge_labels(glued.molecule,
                           ((glued.left, t), (glued.right, s)),
                           'the glued region carries different labels')
    return Diagram(glued.molecule, labels, t.ambient)


# -- morphisms ---------------------------------------------------------------------


class Morphism:
    """A generator assignment from one signature into another.

    Built by make_morphism, which checks that every assigned diagram has the
    declared shape and boundaries; applying the morphism is then a pure
    relabelling.
    """

    __slots__ = ('_source', '_target', '_assignment', '_rename')

    __hash__ = None

    def __init__(self, source: DiagSet, target: DiagSet, assignment: dict,
                 rename: dict):
        self._source = source
        self._target = target
        self._assignment = assignment
        self._rename = rename

    @property
    def source(self) -> DiagSet:
        return self._source

    @property
    def target(self) -> DiagSet:
        return self._target

    @property
    def assignment(self) -> dict:
        return dict(self._assignment)

    @property
    def renaming(self) -> dict:
        """Greatest label of each generator's image, keyed by generator."""
        return dict(self._rename)

    def then(self, other: 'Morphism') -> 'Morphism':
        """This morphism followed by another."""
        if not isinstance(other, Morphism):
            raise MalformedData('can only compose with another morphism')
        if other._source is not self._target:
            raise SourceTargetMismatch(
                'the morphisms do not share a middle signature')
        composed = {name: apply_morphism(other, diagram)
                    for name, diagram in self._assignment.items()}
        return make_morphism(self._source, other._target, composed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self._source == other._source
                and self._target == other._target
                and self._assignment == other._assignment)

    def __repr__(self) -> str:
        return 'Morphism({} generators)'.format(len(self._assignment))


def make_morphism(source: DiagSet, target: DiagSet, assignment: dict
                  ) -> Morphism:
    """Check a generator assignment and package it as a morphism.

    Generators are validated in declaration order: each one must be assigned
    a diagram of its own shape whose boundaries are the images of the
    declared halves.
    """
    if not isinstance(source, DiagSet) or not isinstance(target, DiagSet):
        raise MalformedData('morphisms run between signatures')
    if not isinstance(assignment, dict):
        raise MalformedData('the assignment must map names to diagrams')
    for name in assignment:
        if name not in source:
            raise UnknownName('{!r} is not a generator of the source'
                              .format(name))
    for name in source.names:
        if name not in assignment:
            raise MissingAssignment('no diagram assigned to {!r}'
                                    .format(name))
    rename: dict = {}
    for name in source.names:
        decl = source.generator(name)
        image = assignment[name]
        if not isinstance(image, Diagram):
            raise MalformedData('the assignment must map names to diagrams')
        if image.ambient is not target:
            raise AmbientMismatch('{!r} is assigned a diagram from the '
                                  'wrong signature'.format(name))
        if image.shape != decl.shape:
            raise TypeMismatch('{!r} must be assigned a diagram of its own '
                               'shape'.format(name))
        if decl.input is not None:
            expected = (_relabel(decl.input, rename, target),
                        _relabel(decl.output, rename, target))
            if (boundary_diagram(image, '-') != expected[0]
                    or boundary_diagram(image, '+') != expected[1]):
                raise TypeMismatch('the image of {!r} has the wrong '
                                   'boundaries'.format(name))
        rename[name] = image.labels[image.dim][0]
    return Morphism(source, target, dict(assignment), rename)


def apply_morphism(f: Morphism, t: Diagram) -> Diagram:
    """Substitute the generators of a diagram along a morphism.

    Assigned diagrams have the declared shapes, so substitution keeps the
    shape and composes the labelling with the renaming of the morphism.
    """
    if not isinstance(f, Morphism) or not isinstance(t, Diagram):
        raise MalformedData('expected a morphism and a diagram')
    if t.ambient is not f.source:
        raise AmbientMismatch('the diagram lives outside the source '
                              'signature')
    return _relabel(t, f._rename, f.target)


def _relabel(t: Diagram, rename: dict, ambient: DiagSet) -> Diagram:
    labels = tuple(tuple(rename[name] for name in stratum)
                   for stratum in t.labels)
    return Diagram(t.shape, labels, ambient)


# -- serialization -----------------------------------------------------------------


def encode(ds: DiagSet) -> str:
    """Serialize a signature as JSON.

    Generators are listed by dimension and then declaration order, so the
    output is deterministic and every record refers only to earlier ones.
    """
    if not isinstance(ds, DiagSet):
        raise MalformedData('expected a signature')
    order = {name: i for i, name in enumerate(ds.names)}
    decls = sorted((ds.generator(name) for name in ds.names),
                   key=lambda decl: (decl.shape.dim, order[decl.name]))
    records = [{
        'name': decl.name,
        'dim': decl.shape.dim,
        'shape': shape_to_dict(decl.shape.underlying),
        'input_labels': _label_lists(decl.input),
        'output_labels': _label_lists(decl.output),
    } for decl in decls]
    return json.dumps({'generators': records}, indent=2) + '\n'


def _label_lists(half: Optional[Diagram]) -> Optional[list]:
    if half is None:
        return None
    return [list(stratum) for stratum in half.labels]


_RECORD_FIELDS = ('name', 'dim', 'shape', 'input_labels', 'output_labels')


def decode(text: str) -> DiagSet:
    """Rebuild a signature from its JSON form, re-running every rule.

    File order is declaration order, so labels may only mention generators
    from earlier records. Structural problems raise ParseError; declarations
    that parse but break a rule raise that rule's own error.
    """
    try:
        doc = json.loads(text)
    except ValueError as err:
        raise ParseError('not valid JSON: {}'.format(err)) from err
    if (not isinstance(doc, dict) or set(doc) != {'generators'}
            or not isinstance(doc['generators'], list)):
        raise ParseError("expected an object with a 'generators' list")
    ds = DiagSet()
    for index, record in enumerate(doc['generators']):
        _decode_record(ds, record, 'generator record {}'.format(index))
    return ds


def _decode_record(ds: DiagSet, record, where: str) -> None:
    if not isinstance(record, dict) or set(record) != set(_RECORD_FIELDS):
        raise ParseError('{}: expected exactly the fields {}'.format(
            where, ', '.join(_RECORD_FIELDS)))
    name, dim = record['name'], record['dim']
    if not isinstance(name, str):
        raise ParseError('{}: the name must be a string'.format(where))
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise ParseError('{}: the dimension must be a natural number'
                         .format(where))
    try:
        mol, _ = canonicalize(shape_from_dict(record['shape']))
    except (MalformedData, NotGraded, NotTraversable) as err:
        raise ParseError('{}: bad shape: {}'.format(where, err)) from err
    if mol.dim != dim:
        raise ParseError('{}: the shape has dimension {}, not {}'.format(
            where, mol.dim, dim))
    if dim == 0:
        if (record['input_labels'] is not None
                or record['output_labels'] is not None):
            raise ParseError('{}: points carry no boundary labels'
                             .format(where))
        cell = ds.add_point(name)
    else:
        low, _ = boundary_inclusion(mol, '-')
        high, _ = boundary_inclusion(mol, '+')
        input = _term(ds, low, record['input_labels'], where)
        output = _term(ds, high, record['output_labels'], where)
        cell = ds.add_gen(name, input, output)
    if cell.shape != mol:
        raise ParseError('{}: the shape disagrees with the declared '
                         'boundaries'.format(where))


def _term(ds: DiagSet, shape: Molecule, raw, where: str) -> Diagram:
    # labels arrive stratum by stratum, in canonical element order
    sizes = shape.strata_sizes
    if (not isinstance(raw, list) or len(raw) != len(sizes)
            or any(not isinstance(stratum, list) or len(stratum) != size
                   for stratum, size in zip(raw, sizes))):
        raise ParseError('{}: boundary labels do not fit the shape'
                         .format(where))
    for stratum in raw:
        for label in stratum:
            if not isinstance(label, str):
                raise ParseError('{}: labels must be strings'.format(where))
            if label not in ds:
                raise ParseError('{}: {!r} is not declared at this point'
                                 .format(where, label))
    diagram = Diagram(shape, tuple(tuple(s) for s in raw), ds)
    for el in maximal(shape.underlying):
        if not _occurrence_at(ds, diagram, el):
            raise ParseError('{}: the labels under {} do not mark an '
                             'occurrence of {!r}'.format(
                                 where, tuple(el), diagram[el]))
    return diagram


def _occurrence_at(ds: DiagSet, diagram: Diagram, el: El) -> bool:
    # search for a label-preserving surjection of the closure of el onto the
    # cell of its label, assigning images top-down and pruning by closure
    cell = ds.cell(diagram[el])
    target = cell.shape.underlying
    sub, incl = closure(diagram.shape.underlying, [el]).as_ogposet()
    order = sorted(sub.elements(), key=lambda e: (-e.dim, e.pos))
    wanted = {e: diagram[incl[e]] for e in order}
    below = {q: frozenset(closure(target, [q]).support)
             for q in target.elements()}
    candidates = {}
    covered = set()
    for e in order:
        options = [q for q in target.elements()
                   if q.dim <= e.dim and cell[q] == wanted[e]]
        if not options:
            return False
        candidates[e] = options
        covered.update(options)
    if len(covered) < len(target):
        return False

    hit: dict = {}

    def extend(i: int) -> bool:
        if i == len(order):
            if len(set(hit.values())) != len(target):
                return False
            try:
                check_map(sub, target, hit)
            except NotAMap:
                return False
            return True
        e = order[i]
        allowed = None
        for z in sub.cofaces(e):
            room = below[hit[z]]
            allowed = room if allowed is None else allowed & room
        for q in candidates[e]:
            if allowed is not None and q not in allowed:
                continue
            hit[e] = q
            if extend(i + 1):
                return True
        hit.pop(e, None)
        return False

    return extend(0)

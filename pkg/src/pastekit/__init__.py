"""Combinatorial pasting diagrams: shapes, rewriting kernel, DSL, renderers."""

from .diagset import Diagram, DiagSet, decode, encode, paste_diagrams, pullback
from .dsl import elaborate, eval_shape, parse, parse_expr, unparse
from .molecule import (
    Molecule,
    ShapeMap,
    arrow,
    atom,
    binary,
    boundary_inclusion,
    canonicalize,
    cobinary,
    frob,
    globe,
    is_isomorphic,
    molecule_from_json,
    molecule_to_json,
    paste,
    paste_along,
    point,
    whisker,
)
from .ogposet import (
    El,
    GrSet,
    OgMap,
    OgPoset,
    boundary,
    build_ogposet,
    closure,
    is_round,
    shape_from_json,
    shape_to_json,
)
from .render import Layout, emit, hasse_layout, string_layout

__version__ = '0.1.0'

__all__ = [
    'Diagram', 'DiagSet', 'decode', 'encode', 'paste_diagrams', 'pullback',
    'elaborate', 'eval_shape', 'parse', 'parse_expr', 'unparse',
    'Molecule', 'ShapeMap', 'arrow', 'atom', 'binary', 'boundary_inclusion',
    'canonicalize', 'cobinary', 'frob', 'globe', 'is_isomorphic',
    'molecule_from_json', 'molecule_to_json', 'paste', 'paste_along',
    'point', 'whisker',
    'El', 'GrSet', 'OgMap', 'OgPoset', 'boundary', 'build_ogposet',
    'closure', 'is_round', 'shape_from_json', 'shape_to_json',
    'Layout', 'emit', 'hasse_layout', 'string_layout',
]

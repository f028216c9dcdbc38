"""Surface-language tests: lexing, parsing, unparsing, elaboration.

Frozen expectations were worked out by hand from the declaration grammar
and checked against the labelled lunital complex before being recorded
here; the elaboration tests reuse the label tables that test_diagset.py
verifies independently.
"""

import random

import pytest

from pastekit.diagset import DiagSet, Diagram, paste_diagrams
from pastekit.dsl import (
    Ast,
    Draw,
    Gen,
    Let,
    Lunitor,
    Name,
    Paste,
    Runitor,
    Unit,
    elaborate,
    eval_shape,
    parse,
    parse_expr,
    unparse,
    unparse_expr,
)
from pastekit.errors import (
    BoundaryMismatch,
    DimensionError,
    DuplicateName,
    NotRound,
    ParseError,
    TypeMismatch,
    UnknownName,
    Unsupported,
)
from pastekit.molecule import arrow, binary, globe, point, whisker


LUNITAL_LINES = """gen x
gen a : x => x
gen m : a *0 a => a
gen u : unit(x) => a
gen lu : (u *0 a) *1 m => lunitor(a)
"""

LUNITAL_ONE_LINE = (
    'gen x; gen a : x => x; gen m : a *0 a => a; '
    'gen u : unit(x) => a; gen lu : (u *0 a) *1 m => lunitor(a)'
)

REDEX_LABELS = (('x', 'x', 'x'), ('x', 'a', 'a', 'a'), ('u', 'm'))
LUNITOR_LABELS = (('x', 'x', 'x'), ('x', 'a', 'a'), ('a',))


# --- parsing ---------------------------------------------------------------


def test_lunital_script_parses_to_five_statements():
    ast = parse(LUNITAL_LINES)
    assert len(ast.statements) == 5
    kinds = [type(s) for s in ast.statements]
    assert kinds == [Gen] * 5
    assert [s.name for s in ast.statements] == ['x', 'a', 'm', 'u', 'lu']
    assert ast.statements[0].halves is None
    assert ast.statements[1].halves == (Name('x'), Name('x'))


def test_semicolons_separate_like_newlines():
    assert parse(LUNITAL_ONE_LINE) == parse(LUNITAL_LINES)


def test_parsed_expression_trees():
    ast = parse(LUNITAL_LINES)
    m_in, m_out = ast.statements[2].halves
    assert m_in == Paste(Name('a'), Name('a'), 0)
    assert m_out == Name('a')
    u_in, _ = ast.statements[3].halves
    assert u_in == Unit(Name('x'))
    lu_in, lu_out = ast.statements[4].halves
    assert lu_in == Paste(Paste(Name('u'), Name('a'), 0), Name('m'), 1)
    assert lu_out == Lunitor(Name('a'))


def test_star_without_index_keeps_k_unresolved():
    ast = parse('let c = a * a')
    stmt = ast.statements[0]
    assert isinstance(stmt, Let)
    assert stmt.expr == Paste(Name('a'), Name('a'), None)


def test_same_index_chain_folds_left():
    ast = parse('let c = a *0 b *0 c')
    assert ast.statements[0].expr == Paste(
        Paste(Name('a'), Name('b'), 0), Name('c'), 0)
    bare = parse('let c = a * b * c').statements[0].expr
    assert bare == Paste(Paste(Name('a'), Name('b'), None), Name('c'), None)


def test_mixed_index_chain_needs_parentheses():
    with pytest.raises(ParseError, match='parenthes'):
        parse('let c = a *0 b *1 c')
    with pytest.raises(ParseError, match='parenthes'):
        parse('let c = a * b *0 c')
    # explicit grouping is fine either way round
    parse('let c = (a *0 b) *1 c')
    parse('let c = a *0 (b *1 c)')


def test_paste_call_form_is_an_input_alias():
    assert parse_expr('paste(binary, arrow, 0)') == Paste(
        Name('binary'), Name('arrow'), 0)
    assert parse_expr('paste(a, b)') == Paste(Name('a'), Name('b'), None)
    ast = parse('let w = paste(f, g, 1)')
    assert ast.statements[0].expr == Paste(Name('f'), Name('g'), 1)


def test_unitor_call_forms():
    assert parse_expr('runitor(a)') == Runitor(Name('a'))
    assert parse_expr('lunitor(unit(a))') == Lunitor(Unit(Name('a')))


def test_comments_and_blank_lines_are_ignored():
    src = """
# a one-object theory
gen x   # the object

gen a : x => x  ; gen b : x => x
"""
    ast = parse(src)
    assert [s.name for s in ast.statements] == ['x', 'a', 'b']


def test_draw_statement_with_options():
    ast = parse('draw lu view=string format=tikz bg=gray!10')
    stmt = ast.statements[0]
    assert isinstance(stmt, Draw)
    assert stmt.name == 'lu'
    assert stmt.options == (
        ('view', 'string'), ('format', 'tikz'), ('bg', 'gray!10'))
    assert parse('draw lu').statements[0].options == ()


def test_statement_lines_are_recorded():
    ast = parse(LUNITAL_LINES)
    assert [s.line for s in ast.statements] == [1, 2, 3, 4, 5]
    one = parse(LUNITAL_ONE_LINE)
    assert [s.line for s in one.statements] == [1] * 5


def test_missing_expression_is_a_parse_error():
    with pytest.raises(ParseError, match='line 1'):
        parse('gen a : x =>')


def test_parse_errors_carry_position():
    with pytest.raises(ParseError, match='line 2'):
        parse('gen x\nlet = a')
    with pytest.raises(ParseError, match='column'):
        parse('gen a : x => )')
    with pytest.raises(ParseError):
        parse('let c = a *0')
    with pytest.raises(ParseError):
        parse('let c = (a *0 b')
    with pytest.raises(ParseError):
        parse('gen 7up')
    with pytest.raises(ParseError):
        parse('frob a')
    with pytest.raises(ParseError):
        parse('let c = a ** b')


def test_keywords_are_reserved():
    with pytest.raises(ParseError):
        parse('gen unit')
    with pytest.raises(ParseError):
        parse('let paste = a')


def test_expression_must_fit_one_statement():
    with pytest.raises(ParseError):
        parse('let c = (a *0\nb)')
    with pytest.raises(ParseError):
        parse_expr('a; b')


# --- unparsing -------------------------------------------------------------


def test_unparse_lunital_is_exact():
    assert unparse(parse(LUNITAL_LINES)) == LUNITAL_LINES


def test_unparse_normalizes_whitespace_and_separators():
    assert unparse(parse(LUNITAL_ONE_LINE)) == LUNITAL_LINES
    assert unparse(parse('let   c =  a   *  a')) == 'let c = a * a\n'


def test_unparse_parenthesizes_only_where_needed():
    assert unparse_expr(Paste(Paste(Name('a'), Name('b'), 0), Name('c'), 0)) \
        == 'a *0 b *0 c'
    assert unparse_expr(Paste(Paste(Name('a'), Name('b'), 0), Name('c'), 1)) \
        == '(a *0 b) *1 c'
    assert unparse_expr(Paste(Name('a'), Paste(Name('b'), Name('c'), 0), 0)) \
        == 'a *0 (b *0 c)'
    assert unparse_expr(Paste(Name('a'), Name('b'), None)) == 'a * b'
    assert unparse_expr(Lunitor(Paste(Name('a'), Name('b'), 2))) \
        == 'lunitor(a *2 b)'


def test_unparse_never_emits_the_call_alias():
    src = 'let w = paste(f, g, 1)'
    assert unparse(parse(src)) == 'let w = f *1 g\n'


def random_expr(rng: random.Random, names: list[str], depth: int):
    if depth == 0 or rng.random() < 0.3:
        return Name(rng.choice(names))
    roll = rng.random()
    if roll < 0.55:
        return Paste(random_expr(rng, names, depth - 1),
                      random_expr(rng, names, depth - 1),
                      rng.choice([None, 0, 0, 1, 2]))
    if roll < 0.7:
        return Unit(random_expr(rng, names, depth - 1))
    if roll < 0.85:
        return Lunitor(random_expr(rng, names, depth - 1))
    return Runitor(random_expr(rng, names, depth - 1))


def random_ast(rng: random.Random) -> Ast:
    names = ['a', 'b', 'c', 'd', 'e']
    statements = []
    for _ in range(rng.randrange(1, 7)):
        roll = rng.random()
        if roll < 0.3:
            statements.append(Gen(rng.choice(names), None))
        elif roll < 0.6:
            statements.append(Gen(rng.choice(names),
                                  (random_expr(rng, names, 3),
                                   random_expr(rng, names, 3))))
        elif roll < 0.9:
            statements.append(Let(rng.choice(names),
                                  random_expr(rng, names, 3)))
        else:
            opts = [('view', rng.choice(['hasse', 'string'])),
                    ('format', rng.choice(['tikz', 'svg'])),
                    ('bg', rng.choice(['gray!10', 'white']))]
            statements.append(Draw(rng.choice(names),
                                   tuple(opts[:rng.randrange(4)])))
    return Ast(tuple(statements))


def test_parse_after_unparse_is_identity_on_asts():
    rng = random.Random(1105)
    for _ in range(200):
        ast = random_ast(rng)
        assert parse(unparse(ast)) == ast


def test_unparse_after_parse_is_identity_on_canonical_sources():
    rng = random.Random(1106)
    for _ in range(100):
        src = unparse(random_ast(rng))
        assert unparse(parse(src)) == src


# --- elaboration -----------------------------------------------------------


def test_lunital_script_elaborates_to_the_expected_shapes():
    result = elaborate(parse(LUNITAL_LINES))
    ds = result.diagset
    assert ds.names == ('x', 'a', 'm', 'u', 'lu')
    table = result.diagrams
    assert set(table) == {'x', 'a', 'm', 'u', 'lu'}
    assert table['x'].shape == point()
    assert table['a'].shape == arrow()
    assert table['m'].shape == binary()
    assert table['u'].shape == globe()
    lu = table['lu']
    assert lu.dim == 3
    assert lu.shape.strata_sizes == (3, 4, 3, 1)
    assert lu.labels[3] == ('lu',)
    assert lu.input.labels == REDEX_LABELS
    assert lu.output.labels == LUNITOR_LABELS


def test_let_bindings_enter_the_table_but_not_the_diagset():
    result = elaborate(parse(
        'gen x\ngen a : x => x\nlet c = a *0 a\ngen m : c => a'))
    assert result.diagset.names == ('x', 'a', 'm')
    assert result.diagrams['c'] == paste_diagrams(
        result.diagrams['a'], result.diagrams['a'], 0)
    assert result.diagrams['m'].input.labels == (('x', 'x', 'x'), ('a', 'a'))


def test_default_index_matches_the_explicit_one():
    explicit = elaborate(parse('gen x\ngen a : x => x\nlet c = a *0 a'))
    defaulted = elaborate(parse('gen x\ngen a : x => x\nlet c = a * a'))
    assert explicit.diagrams['c'] == defaulted.diagrams['c']


def test_draw_statements_are_collected_in_order():
    result = elaborate(parse(
        'gen x\ngen a : x => x\ndraw a view=hasse\ndraw x'))
    assert [d.name for d in result.draws] == ['a', 'x']
    assert result.draws[0].options == (('view', 'hasse'),)


def test_use_before_declaration_is_unknown():
    with pytest.raises(UnknownName, match='line 2'):
        elaborate(parse('gen x\ngen m : a *0 a => a\ngen a : x => x'))
    with pytest.raises(UnknownName):
        elaborate(parse('draw lu'))


def test_boundary_dimension_mismatch_is_a_type_error():
    src = ('gen x\ngen a : x => x\ngen m : a *0 a => a\n'
           'gen bad : a *0 a => m')
    with pytest.raises(TypeMismatch, match='line 4'):
        elaborate(parse(src))


def test_duplicate_names_are_rejected_across_statement_kinds():
    with pytest.raises(DuplicateName):
        elaborate(parse('gen x\ngen x'))
    with pytest.raises(DuplicateName, match='line 3'):
        elaborate(parse('gen x\nlet c = x\nlet c = x'))
    with pytest.raises(DuplicateName):
        elaborate(parse('gen x\nlet x = x'))


# one script per error class the command line can surface
FAULTY_SCRIPTS = {
    ParseError: 'gen a : x =>',
    UnknownName: 'gen x\nlet c = y',
    DuplicateName: 'gen x\ngen x',
    TypeMismatch: 'gen x\ngen a : x => x\ngen m : a *0 a => a\n'
                  'gen bad : a *0 a => m',
    NotRound: 'gen x\ngen a : x => x\ngen f : a *0 a => a\n'
              'gen w : f *0 a => f *0 a',
    DimensionError: 'gen x\ngen a : x => x\nlet c = a *1 a',
    BoundaryMismatch: 'gen x\ngen a : x => x\ngen m : a *0 a => a\n'
                      'let c = m *1 m',
    Unsupported: 'gen x\nlet c = lunitor(x)',
}


@pytest.mark.parametrize('err', list(FAULTY_SCRIPTS), ids=lambda e: e.__name__)
def test_error_coverage_matrix(err):
    with pytest.raises(err):
        elaborate(parse(FAULTY_SCRIPTS[err]))


def test_label_mismatch_surfaces_with_location():
    src = ('gen x\ngen a : x => x\ngen b : x => x\n'
           'gen f : a => a\ngen g : b => b\nlet c = f *1 g')
    with pytest.raises(TypeMismatch, match='line 6'):
        elaborate(parse(src))


def test_elaboration_is_reproducible():
    first = elaborate(parse(LUNITAL_LINES))
    second = elaborate(parse(LUNITAL_ONE_LINE))
    assert first.diagset == second.diagset
    assert first.diagrams['lu'] == second.diagrams['lu']


# --- shape expressions -----------------------------------------------------


def test_builtin_shape_names_evaluate():
    assert eval_shape(parse_expr('point')) == point()
    assert eval_shape(parse_expr('arrow')) == arrow()
    assert eval_shape(parse_expr('paste(binary, arrow, 0)')) == whisker()
    assert eval_shape(parse_expr('binary *0 arrow')).strata_sizes == (4, 4, 1)


def test_interchange_shapes_coincide():
    left = eval_shape(parse_expr('(globe *0 arrow) *1 (arrow *0 globe)'))
    right = eval_shape(parse_expr('globe *0 globe'))
    assert left == right
    assert left.underlying.face_data == right.underlying.face_data


def test_shape_units_and_unitors():
    assert eval_shape(parse_expr('unit(point)')) == arrow()
    assert eval_shape(parse_expr('unit(arrow)')) == globe()
    assert eval_shape(parse_expr('lunitor(arrow)')) == binary()
    runit = eval_shape(parse_expr('runitor(globe)'))
    assert runit.dim == 3
    assert runit.strata_sizes == (2, 3, 3, 1)
    with pytest.raises(Unsupported):
        eval_shape(parse_expr('lunitor(point)'))


def test_unknown_shape_name_is_rejected():
    with pytest.raises(UnknownName):
        eval_shape(parse_expr('pentagon'))
    with pytest.raises(UnknownName):
        eval_shape(parse_expr('lu'))


def test_shape_paste_errors_propagate():
    with pytest.raises(DimensionError):
        eval_shape(parse_expr('arrow *1 arrow'))
    with pytest.raises(BoundaryMismatch):
        eval_shape(parse_expr('binary *1 binary'))

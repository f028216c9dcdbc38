"""Declaration language for complexes: lexer, parser, unparser, elaborator.

A script is a sequence of statements separated by newlines or semicolons,
with ``#`` comments. ``gen`` declares a generating cell (a point when no
type is given), ``let`` names a composite diagram, ``draw`` requests a
picture of a named cell or binding. Expressions are built from names with
``e1 *k e2`` pasting, ``unit``, ``lunitor`` and ``runitor``; a bare ``*``
defaults the index to one below the lower of the two dimensions.

``paste(e1, e2, k)`` is accepted on input as a spelling of ``e1 *k e2``
but the unparser always emits the infix form, so round-trips normalize it
away. Chains that mix different paste indices must be parenthesized.
"""

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

from . import diagset
from .diagset import DiagSet, Diagram
from .errors import DuplicateName, KernelError, ParseError, UnknownName
from .molecule import (
    Molecule,
    arrow,
    binary,
    canonicalize,
    cobinary,
    globe,
    paste,
    point,
    unit_collapse,
    unitor_map,
)

KEYWORDS = frozenset(
    {'gen', 'let', 'draw', 'unit', 'lunitor', 'runitor', 'paste'})

_WORD = re.compile(r'[A-Za-z0-9_][A-Za-z0-9_!./-]*')
_IDENT = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')


# --- syntax trees ----------------------------------------------------------

@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Paste:
    """A pasting ``left *k right``; ``k`` is None until elaboration."""

    left: 'Expr'
    right: 'Expr'
    k: Optional[int]


@dataclass(frozen=True)
class Unit:
    arg: 'Expr'


@dataclass(frozen=True)
class Lunitor:
    arg: 'Expr'


@dataclass(frozen=True)
class Runitor:
    arg: 'Expr'


Expr = Union[Name, Paste, Unit, Lunitor, Runitor]


@dataclass(frozen=True)
class Gen:
    """A generator declaration; ``halves`` is None for a point."""

    name: str
    halves: Optional[tuple[Expr, Expr]]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Let:
    name: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Draw:
    name: str
    options: tuple[tuple[str, str], ...] = ()
    line: int = field(default=0, compare=False)


Statement = Union[Gen, Let, Draw]


@dataclass(frozen=True)
class Ast:
    statements: tuple[Statement, ...]


# --- lexer -----------------------------------------------------------------

class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[Token]:
    tokens = []
    lineno = 0
    for lineno, raw in enumerate(source.split('\n'), start=1):
        line = raw.split('#', 1)[0]
        i = 0
        while i < len(line):
            ch = line[i]
            if ch in ' \t\r':
                i += 1
                continue
            col = i + 1
            if ch == ';':
                tokens.append(Token('break', ';', lineno, col))
                i += 1
            elif ch == '*':
                tokens.append(Token('star', '*', lineno, col))
                i += 1
            elif line.startswith('=>', i):
                tokens.append(Token('punct', '=>', lineno, col))
                i += 2
            elif ch in '():,=':
                tokens.append(Token('punct', ch, lineno, col))
                i += 1
            else:
                hit = _WORD.match(line, i)
                if hit is None:
                    raise ParseError(
                        'line {}, column {}: stray character {!r}'.format(
                            lineno, col, ch))
                text = hit.group()
                kind = 'nat' if text.isdigit() else 'word'
                tokens.append(Token(kind, text, lineno, col))
                i = hit.end()
        tokens.append(Token('break', '', lineno, len(line) + 1))
    tokens.append(Token('end', '', max(lineno, 1), 1))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != 'end':
            self.i += 1
        return tok

    def fail(self, tok: Token, what: str) -> None:
        raise ParseError(
            'line {}, column {}: {}'.format(tok.line, tok.col, what))

    def expect(self, text: str) -> Token:
        tok = self.advance()
        if tok.text != text:
            self.fail(tok, 'expected {!r}'.format(text))
        return tok

    def skip_breaks(self) -> None:
        while self.peek().kind == 'break':
            self.advance()

    def at_break(self) -> bool:
        return self.peek().kind in ('break', 'end')

    def fresh_name(self) -> str:
        tok = self.advance()
        if tok.kind != 'word' or not _IDENT.fullmatch(tok.text):
            self.fail(tok, 'expected a name')
        if tok.text in KEYWORDS:
            self.fail(tok, '{!r} is a reserved word'.format(tok.text))
        return tok.text

    def file(self) -> Ast:
        statements = []
        self.skip_breaks()
        while self.peek().kind != 'end':
            statements.append(self.statement())
            if not self.at_break():
                self.fail(self.peek(), 'expected end of statement')
            self.skip_breaks()
        return Ast(tuple(statements))

    def statement(self) -> Statement:
        tok = self.peek()
        if tok.kind != 'word' or tok.text not in ('gen', 'let', 'draw'):
            self.fail(tok, 'expected gen, let or draw')
        self.advance()
        if tok.text == 'gen':
            name = self.fresh_name()
            halves = None
            if self.peek().text == ':':
                self.advance()
                lhs = self.expression()
                self.expect('=>')
                halves = (lhs, self.expression())
            return Gen(name, halves, line=tok.line)
        if tok.text == 'let':
            name = self.fresh_name()
            self.expect('=')
            return Let(name, self.expression(), line=tok.line)
        name = self.fresh_name()
        options = []
        while not self.at_break():
            key = self.fresh_name()
            self.expect('=')
            value = self.advance()
            if value.kind not in ('word', 'nat'):
                self.fail(value, 'expected an option value')
            options.append((key, value.text))
        return Draw(name, tuple(options), line=tok.line)

    def expression(self) -> Expr:
        left = self.atomic()
        chain_k: Optional[int] = None
        first = True
        while self.peek().kind == 'star':
            star = self.advance()
            k = None
            if self.peek().kind == 'nat':
                k = int(self.advance().text)
            if first:
                chain_k = k
                first = False
            elif k != chain_k:
                self.fail(star, 'chains mixing paste indices '
                                'need parentheses')
            left = Paste(left, self.atomic(), k)
        return left

    def atomic(self) -> Expr:
        tok = self.peek()
        if tok.text == '(':
            self.advance()
            inner = self.expression()
            self.expect(')')
            return inner
        if tok.kind == 'word':
            if tok.text in ('unit', 'lunitor', 'runitor'):
                self.advance()
                self.expect('(')
                inner = self.expression()
                self.expect(')')
                wrap = {'unit': Unit, 'lunitor': Lunitor,
                        'runitor': Runitor}[tok.text]
                return wrap(inner)
            if tok.text == 'paste':
                self.advance()
                self.expect('(')
                lhs = self.expression()
                self.expect(',')
                rhs = self.expression()
                k = None
                if self.peek().text == ',':
                    self.advance()
                    index = self.advance()
                    if index.kind != 'nat':
                        self.fail(index, 'expected a paste index')
                    k = int(index.text)
                self.expect(')')
                return Paste(lhs, rhs, k)
            if _IDENT.fullmatch(tok.text) and tok.text not in KEYWORDS:
                self.advance()
                return Name(tok.text)
        self.fail(tok, 'expected an expression')


def parse(source: str) -> Ast:
    """Parse a script; raises ParseError at the first offending token."""
    return _Parser(_tokenize(source)).file()


def parse_expr(source: str) -> Expr:
    """Parse a single expression, as used by command-line arguments."""
    parser = _Parser(_tokenize(source))
    parser.skip_breaks()
    expr = parser.expression()
    parser.skip_breaks()
    tail = parser.peek()
    if tail.kind != 'end':
        parser.fail(tail, 'expected end of input')
    return expr


# --- unparser --------------------------------------------------------------

def unparse_expr(expr: Expr) -> str:
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, Unit):
        return 'unit({})'.format(unparse_expr(expr.arg))
    if isinstance(expr, Lunitor):
        return 'lunitor({})'.format(unparse_expr(expr.arg))
    if isinstance(expr, Runitor):
        return 'runitor({})'.format(unparse_expr(expr.arg))
    star = '*' if expr.k is None else '*{}'.format(expr.k)
    left = unparse_expr(expr.left)
    if isinstance(expr.left, Paste) and expr.left.k != expr.k:
        left = '({})'.format(left)
    right = unparse_expr(expr.right)
    if isinstance(expr.right, Paste):
        right = '({})'.format(right)
    return '{} {} {}'.format(left, star, right)


def unparse(ast: Ast) -> str:
    """Render an Ast back to source, one statement per line.

    Inverse to parse up to whitespace, separators and the call alias.
    """
    lines = []
    for stmt in ast.statements:
        if isinstance(stmt, Gen):
            if stmt.halves is None:
                lines.append('gen {}'.format(stmt.name))
            else:
                lines.append('gen {} : {} => {}'.format(
                    stmt.name,
                    unparse_expr(stmt.halves[0]),
                    unparse_expr(stmt.halves[1])))
        elif isinstance(stmt, Let):
            lines.append('let {} = {}'.format(
                stmt.name, unparse_expr(stmt.expr)))
        else:
            parts = ['draw {}'.format(stmt.name)]
            parts += ['{}={}'.format(key, value)
                      for key, value in stmt.options]
            lines.append(' '.join(parts))
    return ''.join(line + '\n' for line in lines)


# --- elaboration -----------------------------------------------------------

class Elaboration(NamedTuple):
    diagset: DiagSet
    diagrams: dict[str, Diagram]
    draws: tuple[Draw, ...]


def _eval(expr: Expr, table: dict[str, Diagram]) -> Diagram:
    if isinstance(expr, Name):
        try:
            return table[expr.ident]
        except KeyError:
            raise UnknownName(
                'nothing named {!r} is in scope'.format(expr.ident)) from None
    if isinstance(expr, Paste):
        return diagset.paste_diagrams(
            _eval(expr.left, table), _eval(expr.right, table), expr.k)
    if isinstance(expr, Unit):
        return diagset.unit(_eval(expr.arg, table))
    if isinstance(expr, Lunitor):
        return diagset.lunitor(_eval(expr.arg, table))
    return diagset.runitor(_eval(expr.arg, table))


def elaborate(ast: Ast) -> Elaboration:
    """Run a parsed script through the kernel, statement by statement.

    Kernel errors are re-raised with the offending line prefixed.
    """
    ds = DiagSet()
    table: dict[str, Diagram] = {}
    draws: list[Draw] = []
    for stmt in ast.statements:
        try:
            if isinstance(stmt, Gen):
                if stmt.name in table:
                    raise DuplicateName(
                        '{!r} is already defined'.format(stmt.name))
                if stmt.halves is None:
                    ds.add_point(stmt.name)
                else:
                    lhs = _eval(stmt.halves[0], table)
                    rhs = _eval(stmt.halves[1], table)
                    ds.add_gen(stmt.name, lhs, rhs)
                table[stmt.name] = ds.cell(stmt.name)
            elif isinstance(stmt, Let):
                if stmt.name in table:
                    raise DuplicateName(
                        '{!r} is already defined'.format(stmt.name))
                table[stmt.name] = _eval(stmt.expr, table)
            else:
                if stmt.name not in table:
                    raise UnknownName(
                        'nothing named {!r} is in scope'.format(stmt.name))
                draws.append(stmt)
        except KernelError as err:
            raise type(err)('line {}: {}'.format(stmt.line, err)) from err
    return Elaboration(ds, table, tuple(draws))


# --- shape expressions -----------------------------------------------------

_BUILTIN_SHAPES = {
    'point': point,
    'arrow': arrow,
    'globe': globe,
    'binary': binary,
    'cobinary': cobinary,
}


def eval_shape(expr: Expr) -> Molecule:
    """Evaluate an expression over bare shapes, names bound to built-ins."""
    if isinstance(expr, Name):
        try:
            build = _BUILTIN_SHAPES[expr.ident]
        except KeyError:
            raise UnknownName(
                '{!r} is not a built-in shape'.format(expr.ident)) from None
        return build()
    if isinstance(expr, Paste):
        return paste(eval_shape(expr.left), eval_shape(expr.right),
                     expr.k).molecule
    if isinstance(expr, Unit):
        collapse = unit_collapse(eval_shape(expr.arg))
        return canonicalize(collapse.source, 'derived')[0]
    side = 'left' if isinstance(expr, Lunitor) else 'right'
    collapse = unitor_map(eval_shape(expr.arg), side)
    return canonicalize(collapse.source, 'derived')[0]

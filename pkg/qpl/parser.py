# Tokenizer, recursive-descent parser, scope checker and printer for .qpl programs

import cmath
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from qpl.ast import (ApplyUnitary, Assign, CallRec, DefRec, Discard, InputDecl, Measure, Merge,
                     NewBit, NewQbit, Position, Program, Repeat, Statement, UnitaryRef, VarKind,
                     While)
from qpl.unitaries import GATES, PARAMETRIZED, RESERVED
from utils.errors import QplSyntaxError, ScopeError

KEYWORDS = frozenset({"input", "bit", "qbit", "new", "measure", "else", "merge", "discard",
                      "repeat", "while", "rec", "call", "sqrt"})

_TOKEN_RE = re.compile(r"""
    (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<space>[ \t\r]+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?P<imag>i(?![A-Za-z0-9_]))?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<symbol>:=|\*=|[{}()\[\],;+\-*/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, keyword, symbol, newline, eof
    text: str
    line: int
    col: int
    value: Union[int, float, complex, None] = None

    @property
    def pos(self) -> Position:
        return (self.line, self.col)


def tokenize(text: str) -> List[Token]:
    """
    Split program text into tokens.

    Raises:
        QplSyntaxError: On a character that starts no token
    """
    tokens: List[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        col = i - line_start + 1
        if m is None:
            raise QplSyntaxError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup if m.lastgroup != "imag" else "number"
        lexeme = m.group(0)
        if kind == "newline":
            tokens.append(Token("newline", "\\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "number":
            digits = lexeme[:-1] if m.group("imag") else lexeme
            number: Union[int, float] = int(digits) if digits.isdigit() else float(digits)
            value = complex(0, number) if m.group("imag") else number
            tokens.append(Token("number", lexeme, line, col, value))
        elif kind == "ident":
            tokens.append(Token("keyword" if lexeme in KEYWORDS else "ident", lexeme, line, col))
        elif kind == "symbol":
            tokens.append(Token("symbol", lexeme, line, col))
        i = m.end()
    tokens.append(Token("eof", "end of input", line, len(text) - line_start + 1))
    return tokens


class Parser:
    """Recursive-descent parser over the token list; one instance per text."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "eof":
            self.index += 1
        return token

    def _at(self, text: str) -> bool:
        token = self.current
        return token.kind in ("keyword", "symbol") and token.text == text

    def _error(self, message: str, expected: Sequence[str] = ()) -> QplSyntaxError:
        token = self.current
        return QplSyntaxError(f"{message}, found {token.text!r}", token.line, token.col, list(expected))

    def _expect(self, text: str) -> Token:
        if not self._at(text):
            raise self._error(f"expected {text!r}", [text])
        return self._advance()

    def _expect_name(self) -> Token:
        token = self.current
        if token.kind != "ident":
            raise self._error("expected a variable name", ["identifier"])
        if token.text in RESERVED:
            raise QplSyntaxError(f"{token.text!r} is a reserved gate name", token.line, token.col,
                                 ["identifier"])
        return self._advance()

    def _expect_int(self, low: int = 0, high: Optional[int] = None) -> int:
        token = self.current
        if token.kind != "number" or not isinstance(token.value, int):
            raise self._error("expected an integer", ["integer"])
        if token.value < low or (high is not None and token.value > high):
            bound = f"{low}..{high}" if high is not None else f">= {low}"
            raise QplSyntaxError(f"integer {token.value} outside {bound}", token.line, token.col,
                                 ["integer"])
        self._advance()
        return token.value

    def _skip_newlines(self) -> None:
        while self.current.kind == "newline":
            self._advance()

    def _skip_separators(self) -> None:
        while self.current.kind == "newline" or self._at(";"):
            self._advance()

    # Grammar

    def parse_program(self) -> Program:
        self._skip_separators()
        inputs: List[InputDecl] = []
        while self._at("input"):
            inputs.append(self._parse_input())
            self._end_statement(("eof",))
            self._skip_separators()
        body = self._parse_statements(("eof",))
        if self.current.kind != "eof":
            raise self._error("expected end of input", ["end of input"])
        return Program(tuple(inputs), body)

    def _end_statement(self, closers: Tuple[str, ...]) -> None:
        if self.current.kind == "newline" or self._at(";"):
            return
        if self.current.kind == "eof" and "eof" in closers:
            return
        if "}" in closers and self._at("}"):
            return
        raise self._error("expected end of statement", ["newline", ";"] + [c for c in closers if c != "eof"])

    def _parse_statements(self, closers: Tuple[str, ...]) -> Tuple[Statement, ...]:
        statements: List[Statement] = []
        self._skip_separators()
        while not (self.current.kind == "eof" or self._at("}")):
            if self._at("input"):
                raise self._error("input declarations must precede all statements")
            statements.append(self._parse_statement())
            self._end_statement(closers)
            self._skip_separators()
        return tuple(statements)

    def _parse_block(self) -> Tuple[Statement, ...]:
        self._expect("{")
        body = self._parse_statements(("}",))
        self._expect("}")
        return body

    def _parse_input(self) -> InputDecl:
        start = self._expect("input")
        kind = self._parse_kind()
        names = [self._expect_name().text]
        while self._at(","):
            self._advance()
            names.append(self._expect_name().text)
        return InputDecl(kind, tuple(names), start.pos)

    def _parse_kind(self) -> VarKind:
        if self._at("bit"):
            self._advance()
            return VarKind.BIT
        if self._at("qbit"):
            self._advance()
            return VarKind.QBIT
        raise self._error("expected a variable kind", ["bit", "qbit"])

    def _parse_statement(self) -> Statement:
        token = self.current
        if self._at("new"):
            self._advance()
            kind = self._parse_kind()
            name = self._expect_name().text
            self._expect(":=")
            value = self._expect_int(0, 1)
            return NewBit(name, value, token.pos) if kind == VarKind.BIT else NewQbit(name, value, token.pos)
        if self._at("measure"):
            self._advance()
            qbit = self._expect_name().text
            if not self._at("{"):
                return Measure(qbit, pos=token.pos)
            then_block = self._parse_block()
            self._skip_newlines()
            self._expect("else")
            else_block = self._parse_block()
            return Measure(qbit, then_block, else_block, token.pos)
        if self._at("merge"):
            self._advance()
            return Merge(token.pos)
        if self._at("discard"):
            self._advance()
            return Discard(self._expect_name().text, token.pos)
        if self._at("repeat"):
            self._advance()
            count = self._expect_int(0)
            return Repeat(count, self._parse_block(), token.pos)
        if self._at("while"):
            self._advance()
            bit = self._expect_name().text
            return While(bit, self._parse_block(), token.pos)
        if self._at("rec"):
            self._advance()
            name = self._expect_name().text
            return DefRec(name, self._parse_block(), token.pos)
        if self._at("call"):
            self._advance()
            return CallRec(self._expect_name().text, token.pos)
        if token.kind == "ident":
            first = self._expect_name()
            if self._at(":="):
                self._advance()
                return Assign(first.text, self._expect_int(0, 1), token.pos)
            targets = [first.text]
            while self._at(","):
                self._advance()
                targets.append(self._expect_name().text)
            self._expect("*=")
            return ApplyUnitary(tuple(targets), self._parse_unitary(), token.pos)
        raise self._error("expected a statement",
                          ["new", "measure", "merge", "discard", "repeat", "while", "rec", "call",
                           "identifier"])

    def _parse_unitary(self) -> UnitaryRef:
        token = self.current
        if self._at("["):
            return UnitaryRef(matrix=self._parse_matrix(), pos=token.pos)
        if token.kind == "ident" and token.text in GATES:
            self._advance()
            return UnitaryRef(name=token.text, pos=token.pos)
        if token.kind == "ident" and token.text in PARAMETRIZED:
            self._advance()
            self._expect("(")
            params = [self._expect_int(0)]
            while self._at(","):
                self._advance()
                params.append(self._expect_int(0))
            self._expect(")")
            return UnitaryRef(name=token.text, params=tuple(params), pos=token.pos)
        raise self._error("expected a unitary", sorted(RESERVED) + ["matrix literal"])

    def _parse_matrix(self) -> Tuple[Tuple[complex, ...], ...]:
        self._expect("[")
        rows = [self._parse_row()]
        while self._at(","):
            self._advance()
            rows.append(self._parse_row())
        self._expect("]")
        return tuple(rows)

    def _parse_row(self) -> Tuple[complex, ...]:
        self._expect("[")
        entries = [self._parse_expr()]
        while self._at(","):
            self._advance()
            entries.append(self._parse_expr())
        self._expect("]")
        return tuple(entries)

    # Complex arithmetic inside matrix literals

    def _parse_expr(self) -> complex:
        value = self._parse_term()
        while self._at("+") or self._at("-"):
            op = self._advance().text
            rhs = self._parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _parse_term(self) -> complex:
        value = self._parse_unary()
        while self._at("*") or self._at("/"):
            op = self._advance()
            rhs = self._parse_unary()
            if op.text == "*":
                value = value * rhs
            elif rhs == 0:
                raise QplSyntaxError("division by zero in matrix literal", op.line, op.col)
            else:
                value = value / rhs
        return value

    def _parse_unary(self) -> complex:
        if self._at("-"):
            self._advance()
            return -self._parse_unary()
        if self._at("+"):
            self._advance()
            return self._parse_unary()
        return self._parse_atom()

    def _parse_atom(self) -> complex:
        token = self.current
        if token.kind == "number":
            self._advance()
            return complex(token.value)
        if token.kind == "ident" and token.text == "i":
            self._advance()
            return 1j
        if self._at("sqrt"):
            self._advance()
            self._expect("(")
            value = cmath.sqrt(self._parse_expr())
            self._expect(")")
            return value
        if self._at("("):
            self._advance()
            value = self._parse_expr()
            self._expect(")")
            return value
        raise self._error("expected a number", ["number", "i", "sqrt", "("])


def check_scope(program: Program) -> None:
    """
    Reject uses of undeclared variables, redeclarations of live ones, and
    calls outside the recursive block they name.

    Raises:
        ScopeError: On the first violation, with its source position
    """
    live: Dict[str, VarKind] = {}
    for decl in program.inputs:
        for name in decl.names:
            if name in live:
                raise ScopeError(_at(decl.pos, f"input {name!r} declared twice"))
            live[name] = decl.kind
    _check_block(program.body, live, ())


def _at(pos: Position, message: str) -> str:
    return f"{pos[0]}:{pos[1]}: {message}"


def _check_block(body: Sequence[Statement], live: Dict[str, VarKind], recs: Tuple[str, ...]) -> Dict[str, VarKind]:
    live = dict(live)
    for stmt in body:
        if isinstance(stmt, (NewBit, NewQbit)):
            if stmt.name in live:
                raise ScopeError(_at(stmt.pos, f"variable {stmt.name!r} is already declared"))
            live[stmt.name] = VarKind.BIT if isinstance(stmt, NewBit) else VarKind.QBIT
        elif isinstance(stmt, (Assign, Discard)):
            _require(live, stmt.name, stmt.pos)
            if isinstance(stmt, Discard):
                del live[stmt.name]
        elif isinstance(stmt, ApplyUnitary):
            for name in stmt.targets:
                _require(live, name, stmt.pos)
        elif isinstance(stmt, Measure):
            _require(live, stmt.qbit, stmt.pos)
            if stmt.branching:
                after = _check_block(stmt.then_block, live, recs)
                _check_block(stmt.else_block, live, recs)
                live = after
        elif isinstance(stmt, (Repeat, While, DefRec)):
            if isinstance(stmt, While):
                _require(live, stmt.bit, stmt.pos)
            inner = recs + (stmt.name,) if isinstance(stmt, DefRec) else recs
            _check_block(stmt.body, live, inner)
        elif isinstance(stmt, CallRec):
            if stmt.name not in recs:
                raise ScopeError(_at(stmt.pos, f"call to {stmt.name!r} outside its recursive block"))
    return live


def _require(live: Dict[str, VarKind], name: str, pos: Position) -> None:
    if name not in live:
        raise ScopeError(_at(pos, f"variable {name!r} is not declared"))


def parse(text: str) -> Program:
    """
    Parse and scope-check program text.

    Raises:
        QplSyntaxError: With line, column and the expected tokens
        ScopeError: On undeclared or redeclared variables
    """
    program = Parser(text).parse_program()
    check_scope(program)
    return program


# Printing

def _format_number(x: float) -> str:
    return repr(float(x))


def _format_complex(z: complex) -> str:
    if z.imag == 0:
        return _format_number(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{_format_number(z.real)}{sign}{_format_number(abs(z.imag))}i"


def format_unitary(ref: UnitaryRef) -> str:
    if ref.matrix is not None:
        rows = ", ".join("[" + ", ".join(_format_complex(z) for z in row) + "]" for row in ref.matrix)
        return f"[{rows}]"
    if ref.params:
        return f"{ref.name}({', '.join(str(p) for p in ref.params)})"
    return ref.name


def _format_block(body: Sequence[Statement], depth: int) -> str:
    lines = [_format_statement(stmt, depth + 1) for stmt in body]
    inner = "".join(line + "\n" for line in lines)
    return "{\n" + inner + "  " * depth + "}"


def _format_statement(stmt: Statement, depth: int) -> str:
    pad = "  " * depth
    if isinstance(stmt, NewBit):
        return f"{pad}new bit {stmt.name} := {stmt.value}"
    if isinstance(stmt, NewQbit):
        return f"{pad}new qbit {stmt.name} := {stmt.value}"
    if isinstance(stmt, Assign):
        return f"{pad}{stmt.name} := {stmt.value}"
    if isinstance(stmt, ApplyUnitary):
        return f"{pad}{', '.join(stmt.targets)} *= {format_unitary(stmt.unitary)}"
    if isinstance(stmt, Measure):
        if not stmt.branching:
            return f"{pad}measure {stmt.qbit}"
        return (f"{pad}measure {stmt.qbit} {_format_block(stmt.then_block, depth)} "
                f"else {_format_block(stmt.else_block, depth)}")
    if isinstance(stmt, Merge):
        return f"{pad}merge"
    if isinstance(stmt, Discard):
        return f"{pad}discard {stmt.name}"
    if isinstance(stmt, Repeat):
        return f"{pad}repeat {stmt.count} {_format_block(stmt.body, depth)}"
    if isinstance(stmt, While):
        return f"{pad}while {stmt.bit} {_format_block(stmt.body, depth)}"
    if isinstance(stmt, DefRec):
        return f"{pad}rec {stmt.name} {_format_block(stmt.body, depth)}"
    if isinstance(stmt, CallRec):
        return f"{pad}call {stmt.name}"
    raise TypeError(f"unknown statement {type(stmt).__name__}")


def format_program(program: Program) -> str:
    """Canonical text: one statement per line, two-space indentation, trailing newline."""
    lines = [f"input {decl.kind.value} {', '.join(decl.names)}" for decl in program.inputs]
    lines.extend(_format_statement(stmt, 0) for stmt in program.body)
    return "".join(line + "\n" for line in lines)

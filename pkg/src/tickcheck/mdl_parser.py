"""Tokenizer, parser and canonical printer for the block-structured `.mdl` subset.

Grammar::

    document := "Model" block
    block    := "{" (pair | node)* "}"
    pair     := IDENT (STRING | NUMBER | IDENT)
    node     := IDENT block

Whitespace separates tokens and ``#`` starts a comment running to end of line.
String parameter values are decoded; identifiers used as values are kept as
:class:`Symbol` so that printing can tell ``BlockType Gain`` from ``Name "Gain"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Union

from .errors import ParseError

ID_KINDS = ("Block", "state", "transition", "data")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    code: str
    message: str
    span: SourceSpan

    def __str__(self):
        return f"{self.span}: {self.severity}: {self.code}: {self.message}"


class Symbol(str):
    """A bare identifier appearing in value position."""

    def __repr__(self):
        return f"Symbol({str.__repr__(self)})"


Scalar = Union[str, int, Decimal, Symbol]


@dataclass(frozen=True)
class Token:
    kind: str  # ident | string | number | lbrace | rbrace | eof
    lexeme: str
    span: SourceSpan
    trivia: str = ""  # whitespace and comments preceding the lexeme


@dataclass
class RawNode:
    kind: str
    params: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    span: SourceSpan = field(default=SourceSpan(1, 1, 0), compare=False)

    def get(self, key, default=None):
        return self.params.get(key, default)

    def structurally_equal(self, other: "RawNode") -> bool:
        if self.kind != other.kind or len(self.children) != len(other.children):
            return False
        if list(self.params.items()) != list(other.params.items()):
            return False
        # Symbol vs str distinction is part of the structure
        for (_, a), (_, b) in zip(self.params.items(), other.params.items()):
            if type(a) is not type(b):
                return False
        return all(a.structurally_equal(b) for a, b in zip(self.children, other.children))


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?![A-Za-z_.]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
  | (?P<quote>")
    """,
    re.VERBOSE,
)

_STRING_BODY_RE = re.compile(r'(?:[^"\\\n]|\\.)*')


def tokenize(source: str) -> list[Token]:
    """Split *source* into tokens; the final token is ``eof`` carrying trailing trivia."""
    tokens: list[Token] = []
    pos = 0
    line, col = 1, 1
    trivia_start = 0
    n = len(source)

    def advance(text):
        nonlocal line, col
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)

    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError([ParseDiagnostic(
                "error", "IllegalCharacter", f"illegal character {source[pos]!r}",
                SourceSpan(line, col, 1))])
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            advance(m.group())
            pos = m.end()
            continue
        start_line, start_col = line, col
        trivia = source[trivia_start:pos]
        if kind == "quote":
            body = _STRING_BODY_RE.match(source, pos + 1)
            end = body.end()
            if end >= n or source[end] != '"':
                raise ParseError([ParseDiagnostic(
                    "error", "UnterminatedString", "unterminated string literal",
                    SourceSpan(start_line, start_col, end - pos))])
            lexeme = source[pos:end + 1]
            kind = "string"
        else:
            lexeme = m.group()
        tokens.append(Token(kind, lexeme, SourceSpan(start_line, start_col, len(lexeme)), trivia))
        advance(lexeme)
        pos += len(lexeme)
        trivia_start = pos
    tokens.append(Token("eof", "", SourceSpan(line, col, 0), source[trivia_start:]))
    return tokens


def untokenize(tokens: list[Token]) -> str:
    return "".join(t.trivia + t.lexeme for t in tokens)


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def decode_string(lexeme: str) -> str:
    body = lexeme[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt in _ESCAPES:
                out.append(_ESCAPES[nxt])
            else:
                out.append(c + nxt)
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def encode_string(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def _number(lexeme: str):
    if re.fullmatch(r"-?\d+", lexeme):
        return int(lexeme)
    return Decimal(lexeme)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[ParseDiagnostic] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, code, message, span):
        self.diags.append(ParseDiagnostic("error", code, message, span))

    def document(self) -> RawNode | None:
        head = self.peek()
        if head.kind != "ident" or head.lexeme != "Model":
            self.error("MissingRoot", "document must start with 'Model'", head.span)
            return None
        self.take()
        root = self.block("Model", head.span)
        if root is None:
            return None
        trailing = self.peek()
        if trailing.kind != "eof":
            code = "UnbalancedBrace" if trailing.kind == "rbrace" else "UnexpectedToken"
            self.error(code, f"unexpected {trailing.lexeme!r} after document end", trailing.span)
            return None
        return root

    def block(self, kind: str, span: SourceSpan) -> RawNode | None:
        open_tok = self.peek()
        if open_tok.kind != "lbrace":
            self.error("ExpectedBrace", f"expected '{{' after {kind!r}", open_tok.span)
            return None
        self.take()
        node = RawNode(kind, {}, [], span)
        while True:
            tok = self.peek()
            if tok.kind == "rbrace":
                self.take()
                return node
            if tok.kind == "eof":
                self.error("UnbalancedBrace", f"missing '}}' for {kind!r} opened at {open_tok.span}", open_tok.span)
                return None
            if tok.kind != "ident":
                self.error("UnexpectedToken", f"expected identifier, found {tok.lexeme!r}", tok.span)
                return None
            self.take()
            nxt = self.peek()
            if nxt.kind == "lbrace":
                child = self.block(tok.lexeme, tok.span)
                if child is None:
                    return None
                node.children.append(child)
            elif nxt.kind in ("string", "number", "ident"):
                self.take()
                if tok.lexeme in node.params:
                    self.error("DuplicateParam", f"duplicate parameter {tok.lexeme!r} in {kind!r}", tok.span)
                    continue
                if nxt.kind == "string":
                    node.params[tok.lexeme] = decode_string(nxt.lexeme)
                elif nxt.kind == "number":
                    node.params[tok.lexeme] = _number(nxt.lexeme)
                else:
                    node.params[tok.lexeme] = Symbol(nxt.lexeme)
            else:
                self.error("UnexpectedToken", f"expected value or '{{' after {tok.lexeme!r}", nxt.span)
                return None


def _check_ids(root: RawNode) -> list[ParseDiagnostic]:
    diags = []
    seen: dict[tuple, RawNode] = {}
    for node in _walk(root):
        if node.kind not in ID_KINDS:
            continue
        if "id" not in node.params:
            diags.append(ParseDiagnostic("error", "MissingId", f"{node.kind} without 'id'", node.span))
            continue
        key = (node.kind, node.params["id"])
        if key in seen:
            diags.append(ParseDiagnostic(
                "error", "DuplicateId",
                f"duplicate {node.kind} id {node.params['id']} (first at {seen[key].span})", node.span))
        else:
            seen[key] = node
    return diags


def _walk(node: RawNode):
    yield node
    for child in node.children:
        yield from _walk(child)


def parse_document(tokens: list[Token]) -> RawNode:
    """Build the Model tree from *tokens*; raises :class:`ParseError` with diagnostics."""
    p = _Parser(tokens)
    root = p.document()
    if root is not None:
        p.diags.extend(_check_ids(root))
    if p.diags:
        raise ParseError(p.diags)
    return root


def parse(source: str) -> RawNode:
    return parse_document(tokenize(source))


def parse_file(path) -> RawNode:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def find_all(root: RawNode, kind: str) -> list[RawNode]:
    """Depth-first pre-order list of descendants of *root* with the given kind."""
    return [n for n in _walk(root) if n is not root and n.kind == kind]


def _format_value(value) -> str:
    if isinstance(value, Symbol):
        return str(value)
    if isinstance(value, str):
        return encode_string(value)
    if isinstance(value, bool):
        raise TypeError("boolean parameter values are not representable")
    return str(value)


def print_document(root: RawNode) -> str:
    lines: list[str] = []

    def emit(node: RawNode, depth: int):
        pad = "  " * depth
        lines.append(f"{pad}{node.kind} {{")
        for key, value in node.params.items():
            lines.append(f"{pad}  {key} {_format_value(value)}")
        for child in node.children:
            emit(child, depth + 1)
        lines.append(f"{pad}}}")

    emit(root, 0)
    return "\n".join(lines) + "\n"

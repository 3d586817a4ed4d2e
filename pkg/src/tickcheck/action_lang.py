"""Condition/action mini-language: parsing, type checking and concrete evaluation.

Grammar::

    expr  := or
    or    := and ("||" and)*
    and   := cmp ("&&" cmp)*
    cmp   := add (("<"|"<="|">"|">="|"=="|"!=") add)?
    add   := mul (("+"|"-") mul)*
    mul   := unary (("*"|"/") unary)*
    unary := ("!"|"-")? atom
    atom  := NUMBER | IDENT | "(" expr ")"
    stmt  := IDENT "=" expr ";"

``true`` and ``false`` are Boolean literals.  Reals are exact rationals.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import ActionSyntaxError, ActionTypeError, DivisionByZero, UnboundVariable


class ValueType(enum.Enum):
    Bool = "Bool"
    Int = "Int"
    Real = "Real"

    @property
    def numeric(self) -> bool:
        return self is not ValueType.Bool


Value = Union[bool, int, Fraction]


@dataclass(frozen=True)
class Lit:
    value: Value
    type: ValueType
    pos: int = field(default=0, compare=False)

    def __str__(self):
        if self.type is ValueType.Bool:
            return "true" if self.value else "false"
        if self.type is ValueType.Real:
            return _real_text(self.value)
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unary:
    op: str  # "!" or "-"
    operand: "Expr"
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"{self.op}{_paren(self.operand)}"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


Expr = Union[Lit, Var, Unary, Binary]


@dataclass(frozen=True)
class Stmt:
    target: str
    rhs: Expr
    pos: int = field(default=0, compare=False)

    def __str__(self):
        return f"{self.target} = {self.rhs};"


def _paren(e):
    return str(e) if isinstance(e, (Lit, Var)) else f"({e})"


def _real_text(v: Fraction) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return f"{v.numerator}.0"
    return f"({v.numerator} / {v.denominator})"


# -- lexer -------------------------------------------------------------------

_LEX_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d+|\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)"
    r"|(?P<op>\|\||&&|<=|>=|==|!=|[<>!+\-*/()=;]))"
)

CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
ARITH_OPS = ("+", "-", "*", "/")
BOOL_OPS = ("&&", "||")


def _lex(text: str):
    toks = []
    pos = 0
    while True:
        m = _LEX_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            rest = text[pos:]
            stripped = pos + len(rest) - len(rest.lstrip())
            if stripped >= len(text):
                break
            raise ActionSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _ExprParser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, lexeme):
        kind, lex, pos = self.peek()
        if lex != lexeme or kind == "eof":
            raise ActionSyntaxError(f"expected {lexeme!r}", pos)
        return self.take()

    def _binary_chain(self, ops, sub):
        left = sub()
        while self.peek()[0] == "op" and self.peek()[1] in ops:
            _, op, pos = self.take()
            left = Binary(op, left, sub(), pos)
        return left

    def expr(self):
        return self._binary_chain(("||",), self.conj)

    def conj(self):
        return self._binary_chain(("&&",), self.cmp)

    def cmp(self):
        left = self.add()
        if self.peek()[0] == "op" and self.peek()[1] in CMP_OPS:
            _, op, pos = self.take()
            return Binary(op, left, self.add(), pos)
        return left

    def add(self):
        return self._binary_chain(("+", "-"), self.mul)

    def mul(self):
        return self._binary_chain(("*", "/"), self.unary)

    def unary(self):
        kind, lex, pos = self.peek()
        if kind == "op" and lex in ("!", "-"):
            self.take()
            return Unary(lex, self.atom(), pos)
        return self.atom()

    def atom(self):
        kind, lex, pos = self.take()
        if kind == "num":
            if "." in lex:
                return Lit(Fraction(lex), ValueType.Real, pos)
            return Lit(int(lex), ValueType.Int, pos)
        if kind == "id":
            if lex == "true":
                return Lit(True, ValueType.Bool, pos)
            if lex == "false":
                return Lit(False, ValueType.Bool, pos)
            return Var(lex, pos)
        if kind == "op" and lex == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ActionSyntaxError("expected number, identifier or '('" if kind != "eof"
                                else "unexpected end of input", pos)

    def finish(self):
        kind, lex, pos = self.peek()
        if kind != "eof":
            raise ActionSyntaxError(f"unexpected {lex!r}", pos)


def parse_expr(text: str) -> Expr:
    p = _ExprParser(text)
    e = p.expr()
    p.finish()
    return e


def parse_stmts(text: str) -> list[Stmt]:
    """Parse a sequence of ``IDENT = expr ;`` statements (possibly empty)."""
    p = _ExprParser(text)
    out = []
    while p.peek()[0] != "eof":
        kind, lex, pos = p.take()
        if kind != "id" or lex in ("true", "false"):
            raise ActionSyntaxError("expected assignment target", pos)
        p.expect("=")
        rhs = p.expr()
        p.expect(";")
        out.append(Stmt(lex, rhs, pos))
    return out


# -- typing ------------------------------------------------------------------

def _is_int_literal(e: Expr) -> bool:
    if isinstance(e, Lit):
        return e.type is ValueType.Int
    return isinstance(e, Unary) and e.op == "-" and _is_int_literal(e.operand)


def _unify_numeric(e: Binary, lt: ValueType, rt: ValueType) -> ValueType:
    if not lt.numeric:
        raise ActionTypeError(f"operator {e.op!r} needs numeric operands, got Bool in {e.left}", e.left)
    if not rt.numeric:
        raise ActionTypeError(f"operator {e.op!r} needs numeric operands, got Bool in {e.right}", e.right)
    if lt is rt:
        return lt
    # only literal widening Int -> Real
    if lt is ValueType.Int and _is_int_literal(e.left):
        return ValueType.Real
    if rt is ValueType.Int and _is_int_literal(e.right):
        return ValueType.Real
    raise ActionTypeError(f"cannot mix Int and Real in {e}", e)


def typecheck(e: Expr, env: Mapping[str, ValueType]) -> ValueType:
    if isinstance(e, Lit):
        return e.type
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(f"unbound variable {e.name!r}", e)
        return env[e.name]
    if isinstance(e, Unary):
        t = typecheck(e.operand, env)
        if e.op == "!":
            if t is not ValueType.Bool:
                raise ActionTypeError(f"'!' needs Bool operand: {e.operand}", e.operand)
            return t
        if not t.numeric:
            raise ActionTypeError(f"'-' needs numeric operand: {e.operand}", e.operand)
        return t
    lt = typecheck(e.left, env)
    rt = typecheck(e.right, env)
    if e.op in BOOL_OPS:
        for side, t in ((e.left, lt), (e.right, rt)):
            if t is not ValueType.Bool:
                raise ActionTypeError(f"{e.op!r} needs Bool operands, got {t.value} in {side}", side)
        return ValueType.Bool
    if e.op in ("==", "!=") and (lt is ValueType.Bool or rt is ValueType.Bool):
        if lt is not rt:
            raise ActionTypeError(f"cannot compare {lt.value} with {rt.value} in {e}", e)
        return ValueType.Bool
    t = _unify_numeric(e, lt, rt)
    return ValueType.Bool if e.op in CMP_OPS else t


def check_stmt(s: Stmt, env: Mapping[str, ValueType]) -> None:
    if s.target not in env:
        raise UnboundVariable(f"assignment to undeclared variable {s.target!r}", s)
    target = env[s.target]
    rt = typecheck(s.rhs, env)
    if rt is target:
        return
    if target is ValueType.Real and rt is ValueType.Int and _is_int_literal(s.rhs):
        return
    raise ActionTypeError(f"cannot assign {rt.value} to {target.value} variable {s.target!r}", s.rhs)


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unary):
        return free_vars(e.operand)
    if isinstance(e, Binary):
        return free_vars(e.left) | free_vars(e.right)
    return set()


# -- evaluation --------------------------------------------------------------

def int_div(a: int, b: int) -> int:
    """Euclidean integer division (remainder always non-negative), as SMT-LIB ``div``."""
    if b == 0:
        raise DivisionByZero()
    q = a // b if b > 0 else -((-a) // b)
    return q


def coerce(value: Value, t: ValueType) -> Value:
    if t is ValueType.Bool:
        return bool(value)
    if t is ValueType.Int:
        return int(value)
    return Fraction(value)


def eval_concrete(e: Expr, store: Mapping[str, Value]) -> Value:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return store[e.name]
    if isinstance(e, Unary):
        v = eval_concrete(e.operand, store)
        return (not v) if e.op == "!" else -v
    op = e.op
    if op == "&&":
        return bool(eval_concrete(e.left, store)) and bool(eval_concrete(e.right, store))
    if op == "||":
        return bool(eval_concrete(e.left, store)) or bool(eval_concrete(e.right, store))
    a = eval_concrete(e.left, store)
    b = eval_concrete(e.right, store)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise DivisionByZero()
        if isinstance(a, Fraction) or isinstance(b, Fraction):
            return Fraction(a) / Fraction(b)
        return int_div(a, b)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    raise ValueError(f"unknown operator {op!r}")


def exec_stmts(stmts, store: dict, types: Mapping[str, ValueType]) -> dict:
    """Run assignments in order on a copy of *store*."""
    out = dict(store)
    for s in stmts:
        out[s.target] = coerce(eval_concrete(s.rhs, out), types[s.target])
    return out

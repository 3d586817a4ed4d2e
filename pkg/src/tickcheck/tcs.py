"""Reader for `.tcs` timing-constraint files.

::

    spec       := (clockdef | constraint)*
    clockdef   := "clock" IDENT "=" ("rising" "(" expr ")" | "entered" "(" statepath ")"
                  | "every" INT ("offset" INT)?) ";"
    constraint := "constraint" IDENT ":" body ("prob" ">=" DECIMAL)? ";"

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import action_lang as al
from . import naming
from .ccsl import Clock, Entered, Every, Rising, TimingConstraint
from .errors import ActionSyntaxError, ParamError, SpecSyntaxError, UnknownStateRef


@dataclass
class TimingSpec:
    clocks: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)

    def clocks_for(self, tc: TimingConstraint) -> list:
        return [self.clocks[c] for c in tc.clocks]


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+|\#[^\n]*)|(?P<dec>\d+\.\d+)|(?P<int>\d+)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)|(?P<punct>>=|[(),=;:])"
)

_KIND_WORDS = {
    "periodic": "Periodic", "sporadic": "Sporadic", "execution": "Execution",
    "endToEnd": "EndToEnd", "synchronization": "Synchronization",
    "comparison": "Comparison", "exclusion": "Exclusion",
}


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message, pos=None):
        raise SpecSyntaxError(message, *self.where(pos))

    def _skip(self):
        while True:
            m = _TOKEN_RE.match(self.text, self.pos)
            if m and m.lastgroup == "ws":
                self.pos = m.end()
            else:
                return

    def peek(self):
        self._skip()
        if self.pos >= len(self.text):
            return ("eof", "", self.pos)
        m = _TOKEN_RE.match(self.text, self.pos)
        if m is None:
            self.fail(f"unexpected character {self.text[self.pos]!r}")
        return (m.lastgroup, m.group(), self.pos)

    def take(self):
        tok = self.peek()
        self.pos += len(tok[1])
        return tok

    def expect(self, lexeme):
        kind, lex, pos = self.take()
        if lex != lexeme or kind == "eof":
            self.fail(f"expected {lexeme!r}, found {lex or 'end of input'!r}", pos)

    def ident(self):
        kind, lex, pos = self.take()
        if kind != "id":
            self.fail(f"expected identifier, found {lex or 'end of input'!r}", pos)
        return lex

    def integer(self):
        kind, lex, pos = self.take()
        if kind != "int":
            self.fail(f"expected integer, found {lex or 'end of input'!r}", pos)
        return int(lex)

    def keyword_int(self, key):
        self.expect(key)
        self.expect("=")
        return self.integer()

    def balanced(self):
        """Raw text up to the parenthesis closing the one just consumed."""
        depth = 1
        start = self.pos
        i = start
        while i < len(self.text):
            ch = self.text[i]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    self.pos = i + 1
                    return self.text[start:i], start
            i += 1
        self.fail("unbalanced parenthesis", start)


def parse_tcs(text: str) -> TimingSpec:
    r = _Reader(text)
    spec = TimingSpec()
    while True:
        kind, lex, pos = r.peek()
        if kind == "eof":
            break
        if lex == "clock":
            r.take()
            name = r.ident()
            if name in spec.clocks:
                r.fail(f"clock {name!r} defined twice", pos)
            r.expect("=")
            spec.clocks[name] = Clock(name, _clock_source(r))
        elif lex == "constraint":
            r.take()
            spec.constraints.append(_constraint(r, spec))
        else:
            r.fail(f"expected 'clock' or 'constraint', found {lex!r}", pos)
        r.expect(";")
    names = [c.name for c in spec.constraints]
    for n in names:
        if names.count(n) > 1:
            raise ParamError(f"constraint {n!r} defined twice")
    return spec


def _clock_source(r: _Reader):
    kind, word, pos = r.take()
    if word == "rising":
        r.expect("(")
        raw, start = r.balanced()
        try:
            return Rising(al.parse_expr(raw), raw.strip())
        except ActionSyntaxError as exc:
            r.fail(f"in rising(): {exc}", start + exc.position)
    if word == "entered":
        r.expect("(")
        path = r.ident()
        r.expect(")")
        return Entered(path)
    if word == "every":
        k = r.integer()
        offset = 0
        if r.peek()[1] == "offset":
            r.take()
            offset = r.integer()
        if k < 1:
            r.fail("every needs a period >= 1", pos)
        return Every(k, offset)
    r.fail(f"expected rising, entered or every, found {word!r}", pos)


def _clock_ref(r: _Reader, spec: TimingSpec) -> str:
    pos = r.peek()[2]
    name = r.ident()
    if name not in spec.clocks:
        r.fail(f"unknown clock {name!r}", pos)
    return name


def _constraint(r: _Reader, spec: TimingSpec) -> TimingConstraint:
    name = r.ident()
    r.expect(":")
    kind_pos = r.peek()[2]
    word = r.ident()
    if word not in _KIND_WORDS:
        r.fail(f"unknown constraint kind {word!r}", kind_pos)
    kind = _KIND_WORDS[word]
    r.expect("(")
    params: dict = {}
    if kind == "Periodic":
        clocks = (_clock_ref(r, spec),)
        r.expect(",")
        params["period"] = r.keyword_int("period")
        r.expect(",")
        params["jitter"] = r.keyword_int("jitter")
    elif kind == "Sporadic":
        clocks = (_clock_ref(r, spec),)
        r.expect(",")
        params["minGap"] = r.keyword_int("minGap")
    elif kind in ("Execution", "EndToEnd"):
        a = _clock_ref(r, spec)
        r.expect(",")
        b = _clock_ref(r, spec)
        clocks = (a, b)
        r.expect(",")
        params["lower"] = r.keyword_int("lower")
        r.expect(",")
        params["upper"] = r.keyword_int("upper")
    elif kind == "Synchronization":
        names = [_clock_ref(r, spec)]
        r.expect(",")
        while r.peek()[1] != "window":
            names.append(_clock_ref(r, spec))
            r.expect(",")
        if len(names) < 2:
            r.fail("synchronization needs at least two clocks")
        clocks = tuple(names)
        params["window"] = r.keyword_int("window")
    elif kind == "Comparison":
        a = _clock_ref(r, spec)
        rel_pos = r.peek()[2]
        rel = r.ident()
        if rel not in ("precedes", "causes"):
            r.fail(f"expected 'precedes' or 'causes', found {rel!r}", rel_pos)
        b = _clock_ref(r, spec)
        clocks = (a, b)
        params["relation"] = rel
    else:
        a = _clock_ref(r, spec)
        r.expect(",")
        clocks = (a, _clock_ref(r, spec))
    r.expect(")")
    prob = None
    if r.peek()[1] == "prob":
        r.take()
        r.expect(">=")
        kind_, lex, pos = r.take()
        if kind_ != "dec":
            r.fail(f"expected decimal probability, found {lex!r}", pos)
        prob = Fraction(lex)
    return TimingConstraint(name, kind, clocks, params, prob)


def load_tcs(path) -> TimingSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_tcs(fh.read())


def check_against_model(spec: TimingSpec, model) -> None:
    """Resolve every signal and state reference; raises on the first unknown one."""
    for c in spec.clocks.values():
        src = c.source
        if isinstance(src, Entered):
            try:
                naming.resolve_state(model, src.path)
            except KeyError:
                raise UnknownStateRef(f"clock {c.name!r}: unknown state {src.path!r}") from None
        elif isinstance(src, Rising):
            env = {}
            for name in al.free_vars(src.expr):
                try:
                    env[name] = naming.resolve_name(model, name)[1]
                except KeyError:
                    raise al.UnboundVariable(f"clock {c.name!r}: unknown signal {name!r}", name) from None
            if al.typecheck(src.expr, env) is not al.ValueType.Bool:
                raise al.ActionTypeError(f"clock {c.name!r}: rising() needs a Bool expression")

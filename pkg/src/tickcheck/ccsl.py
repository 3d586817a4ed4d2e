"""Logical clocks, CCSL relations and EAST-ADL timing constraints.

Bounded semantics over ``N`` steps.  ``H_c(i)`` counts ticks of ``c`` strictly
before step ``i`` (``0 <= i <= N``).  The k-th tick of ``c`` (k counted from 0)
sits at step ``i`` iff ``tick_c(i)`` and ``H_c(i) = k``.  Constraint instances
whose defining ticks fall outside the bound hold vacuously.

Every encoded formula has a direct-scan counterpart here (``check_*``); the
scans work on tick index lists and share nothing with the encodings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import action_lang as al
from . import naming
from .action_lang import ValueType
from .errors import ActionTypeError, ClockUndefinedOnTrace, ParamError, UnknownStateRef
from .smt_encoder import EncodingContext, ExprEncoder, conj, neg

RELATION_KINDS = ("Coincidence", "Causality", "Precedence", "Subclock", "Exclusion")
CONSTRAINT_KINDS = ("EndToEnd", "Periodic", "Sporadic", "Execution", "Synchronization",
                    "Comparison", "Exclusion")


@dataclass(frozen=True)
class Rising:
    expr: object
    text: str = ""


@dataclass(frozen=True)
class Entered:
    path: str


@dataclass(frozen=True)
class Every:
    period: int
    offset: int = 0


@dataclass(frozen=True)
class Explicit:
    """Tick vector given outright (used to drive relations from raw vectors)."""
    ticks: tuple


@dataclass(frozen=True)
class Clock:
    name: str
    source: Union[Rising, Entered, Every, Explicit]


@dataclass(frozen=True)
class ClockRelation:
    kind: str
    left: str
    right: str

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise ParamError(f"unknown relation kind {self.kind!r}")


@dataclass(frozen=True)
class TimingConstraint:
    name: str
    kind: str
    clocks: tuple
    params: dict = field(default_factory=dict, hash=False)
    prob: Optional[Fraction] = None

    def __post_init__(self):
        validate_constraint(self)


def validate_constraint(tc: TimingConstraint) -> None:
    k, p = tc.kind, tc.params
    if k not in CONSTRAINT_KINDS:
        raise ParamError(f"unknown constraint kind {k!r}")
    for key, v in p.items():
        if isinstance(v, int) and v < 0:
            raise ParamError(f"{tc.name}: {key} must be >= 0")
    arity = {"Periodic": 1, "Sporadic": 1, "EndToEnd": 2, "Execution": 2, "Comparison": 2, "Exclusion": 2}
    if k in arity and len(tc.clocks) != arity[k]:
        raise ParamError(f"{tc.name}: {k} takes {arity[k]} clocks")
    if k == "Synchronization":
        if len(tc.clocks) < 2:
            raise ParamError(f"{tc.name}: synchronization needs at least two clocks")
        _need(tc, "window")
    elif k == "Periodic":
        _need(tc, "period", "jitter")
        if p["period"] < 1 or p["jitter"] >= p["period"]:
            raise ParamError(f"{tc.name}: need period >= 1 and jitter < period")
    elif k == "Sporadic":
        _need(tc, "minGap")
    elif k in ("EndToEnd", "Execution"):
        _need(tc, "lower", "upper")
        if p["lower"] > p["upper"]:
            raise ParamError(f"{tc.name}: lower bound exceeds upper bound")
    elif k == "Comparison":
        if p.get("relation") not in ("precedes", "causes"):
            raise ParamError(f"{tc.name}: comparison must be 'precedes' or 'causes'")
    if tc.prob is not None and not 0 <= tc.prob <= 1:
        raise ParamError(f"{tc.name}: probability threshold outside [0, 1]")


def _need(tc, *keys):
    for key in keys:
        if key not in tc.params:
            raise ParamError(f"{tc.name}: missing parameter {key!r}")


# -- encoding ----------------------------------------------------------------

def _signal_env(ctx: EncodingContext, expr):
    env, bases = {}, {}
    for name in al.free_vars(expr):
        try:
            base, ty = naming.resolve_name(ctx.model, name)
        except (KeyError, AttributeError):
            raise al.UnboundVariable(f"unknown signal {name!r}", name) from None
        env[name], bases[name] = ty, base
    return env, bases


def encode_clock(ctx: EncodingContext, c: Clock) -> EncodingContext:
    N = ctx.bound
    tick = ctx.declare(naming.tick_base(c.name), ValueType.Bool)
    ctx.clock_vectors[c.name] = tick
    src = c.source
    if isinstance(src, Every):
        for i in range(N):
            on = i >= src.offset and (i - src.offset) % src.period == 0
            ctx.add(tick[i] if on else f"(not {tick[i]})")
    elif isinstance(src, Explicit):
        for i in range(N):
            ctx.add(tick[i] if src.ticks[i] else f"(not {tick[i]})")
    elif isinstance(src, Entered):
        try:
            chart, sid = naming.resolve_state(ctx.model, src.path)
        except (KeyError, AttributeError):
            raise UnknownStateRef(f"unknown state {src.path!r}") from None
        act = ctx.state_vectors[(chart.id, sid)]
        for i in range(N):
            now = f"(= {act[i]} 1)"
            fired = now if i == 0 else f"(and (= {act[i - 1]} 0) {now})"
            ctx.add(f"(= {tick[i]} {fired})")
    elif isinstance(src, Rising):
        env, bases = _signal_env(ctx, src.expr)
        if al.typecheck(src.expr, env) is not ValueType.Bool:
            raise ActionTypeError(f"rising() needs a Bool expression: {src.text or src.expr}", src.expr)
        enc = ExprEncoder(ctx, env)
        vals = []
        for i in range(N):
            store = {name: ctx.vectors[b][i] for name, b in bases.items()}
            term, _ = enc.encode(src.expr, store)
            vals.append(term)
        for i in range(N):
            fired = vals[0] if i == 0 else conj([neg(vals[i - 1]), vals[i]])
            ctx.add(f"(= {tick[i]} {fired})")
    else:
        raise ParamError(f"unsupported clock source {src!r}")
    return ctx


def encode_history(ctx: EncodingContext, c: Union[Clock, str]) -> EncodingContext:
    name = c if isinstance(c, str) else c.name
    tick = ctx.clock_vectors[name]
    H = ctx.declare(naming.count_base(name), ValueType.Int, ctx.bound + 1)
    ctx.history_vectors[name] = H
    ctx.add(f"(= {H[0]} 0)")
    for i in range(ctx.bound):
        ctx.add(f"(= {H[i + 1]} (+ {H[i]} (ite {tick[i]} 1 0)))")
    return ctx


def encode_clocks(ctx: EncodingContext, clocks) -> EncodingContext:
    for c in clocks:
        encode_clock(ctx, c)
        encode_history(ctx, c)
    return ctx


def encode_relation(ctx: EncodingContext, r: ClockRelation) -> str:
    N = ctx.bound
    tl, tr = ctx.clock_vectors[r.left], ctx.clock_vectors[r.right]
    if r.kind == "Coincidence":
        return conj([f"(= {tl[i]} {tr[i]})" for i in range(N)])
    if r.kind == "Subclock":
        return conj([f"(=> {tl[i]} {tr[i]})" for i in range(N)])
    if r.kind == "Exclusion":
        return conj([f"(not (and {tl[i]} {tr[i]}))" for i in range(N)])
    Hl, Hr = ctx.history_vectors[r.left], ctx.history_vectors[r.right]
    if r.kind == "Causality":
        return conj([f"(>= {Hl[i]} {Hr[i]})" for i in range(N + 1)])
    return conj([f"(=> (= {Hl[i]} {Hr[i]}) (not {tr[i]}))" for i in range(N)])


def _no_tick_between(H, i, j, N):
    """No tick in steps i+1 .. j-1 (clamped to the bound)."""
    j = min(j, N)
    if j <= i + 1:
        return "true"
    return f"(= {H[j]} {H[i + 1]})"


def _paired_window(ctx, start: str, stop: str, lower: int, upper: int) -> list:
    """k-th tick of *stop* lies within [lower, upper] steps after the k-th of *start*."""
    N = ctx.bound
    ts, Hs = ctx.clock_vectors[start], ctx.history_vectors[start]
    Hr = ctx.history_vectors[stop]
    out = []
    for i in range(N):
        ante = f"(and {ts[i]} (> {Hr[N]} {Hs[i]}))"
        out.append(f"(=> {ante} (<= {Hr[min(i + lower, N)]} {Hs[i]}))")
        if i + upper + 1 < N:
            out.append(f"(=> {ante} (> {Hr[i + upper + 1]} {Hs[i]}))")
    return out


def desugar(ctx: EncodingContext, tc: TimingConstraint) -> str:
    validate_constraint(tc)
    N = ctx.bound
    k, p = tc.kind, tc.params
    if k in ("Periodic", "Sporadic"):
        c = tc.clocks[0]
        t, H = ctx.clock_vectors[c], ctx.history_vectors[c]
        lo = p["period"] - p["jitter"] if k == "Periodic" else p["minGap"]
        parts = []
        for i in range(N):
            gap = _no_tick_between(H, i, i + lo, N)
            if gap != "true":
                parts.append(f"(=> {t[i]} {gap})")
            if k == "Periodic":
                hi = i + p["period"] + p["jitter"] + 1
                if hi < N:
                    parts.append(f"(=> (and {t[i]} (> {H[N]} {H[i + 1]})) (> {H[hi]} {H[i + 1]}))")
        return conj(parts)
    if k in ("EndToEnd", "Execution"):
        start, stop = tc.clocks
        parts = _paired_window(ctx, start, stop, p["lower"], p["upper"])
        parts.append(encode_relation(ctx, ClockRelation("Causality", start, stop)))
        return conj(parts)
    if k == "Synchronization":
        parts = []
        for a in tc.clocks:
            ta, Ha = ctx.clock_vectors[a], ctx.history_vectors[a]
            for i in range(N):
                inbound = " ".join(f"(> {ctx.history_vectors[c][N]} {Ha[i]})" for c in tc.clocks if c != a)
                ante = f"(and {ta[i]} {inbound})"
                hi = i + p["window"] + 1
                if hi >= N:
                    continue
                for b in tc.clocks:
                    if b != a:
                        parts.append(f"(=> {ante} (> {ctx.history_vectors[b][hi]} {Ha[i]}))")
        return conj(parts)
    if k == "Comparison":
        kind = "Precedence" if p["relation"] == "precedes" else "Causality"
        return encode_relation(ctx, ClockRelation(kind, *tc.clocks))
    return encode_relation(ctx, ClockRelation("Exclusion", *tc.clocks))


# -- definitional scans --------------------------------------------------------

def _ticks_at(ticks: Sequence) -> list:
    return [i for i, t in enumerate(ticks) if t]


def _count_before(ticks: Sequence, i: int) -> int:
    return sum(1 for t in ticks[:i] if t)


def check_relation(kind: str, left: Sequence, right: Sequence) -> bool:
    n = len(left)
    if len(right) != n:
        raise ValueError("tick vectors differ in length")
    if kind == "Coincidence":
        return all(bool(a) == bool(b) for a, b in zip(left, right))
    if kind == "Subclock":
        return all(not a or b for a, b in zip(left, right))
    if kind == "Exclusion":
        return not any(a and b for a, b in zip(left, right))
    if kind == "Causality":
        return all(_count_before(left, i) >= _count_before(right, i) for i in range(n + 1))
    if kind == "Precedence":
        return all(not (right[i] and _count_before(left, i) == _count_before(right, i)) for i in range(n))
    raise ParamError(f"unknown relation kind {kind!r}")


def _gaps(ts):
    return [b - a for a, b in zip(ts, ts[1:])]


def check_constraint(tc: TimingConstraint, ticks: dict) -> bool:
    """Definitional check of *tc* over tick vectors keyed by clock name."""
    try:
        vecs = [ticks[c] for c in tc.clocks]
    except KeyError as exc:
        raise ClockUndefinedOnTrace(f"clock {exc.args[0]!r} has no ticks on this trace") from None
    p = tc.params
    k = tc.kind
    if k == "Periodic":
        lo, hi = p["period"] - p["jitter"], p["period"] + p["jitter"]
        return all(lo <= g <= hi for g in _gaps(_ticks_at(vecs[0])))
    if k == "Sporadic":
        return all(g >= p["minGap"] for g in _gaps(_ticks_at(vecs[0])))
    if k in ("EndToEnd", "Execution"):
        a, b = _ticks_at(vecs[0]), _ticks_at(vecs[1])
        paired = all(p["lower"] <= tb - ta <= p["upper"] for ta, tb in zip(a, b))
        return paired and check_relation("Causality", vecs[0], vecs[1])
    if k == "Synchronization":
        lists = [_ticks_at(v) for v in vecs]
        depth = min(len(lst) for lst in lists)
        return all(max(lst[j] for lst in lists) - min(lst[j] for lst in lists) <= p["window"]
                   for j in range(depth))
    if k == "Comparison":
        return check_relation("Precedence" if p["relation"] == "precedes" else "Causality", *vecs)
    return check_relation("Exclusion", *vecs)


def constrained_instances(tc: TimingConstraint, ticks: dict) -> int:
    """Number of tick pairs/instances the constraint actually restricts on a trace."""
    lists = [_ticks_at(ticks[c]) for c in tc.clocks]
    if tc.kind in ("Periodic", "Sporadic"):
        return max(len(lists[0]) - 1, 0)
    if tc.kind in ("EndToEnd", "Execution", "Synchronization"):
        return min(len(lst) for lst in lists)
    return sum(len(lst) for lst in lists)


def check_on_trace(trace, item) -> bool:
    """Evaluate a ClockRelation or TimingConstraint on a trace with derived ticks."""
    if isinstance(item, ClockRelation):
        for c in (item.left, item.right):
            if c not in trace.ticks:
                raise ClockUndefinedOnTrace(f"clock {c!r} has no ticks on this trace")
        return check_relation(item.kind, trace.ticks[item.left], trace.ticks[item.right])
    return check_constraint(item, trace.ticks)


def clocks_of(tc: TimingConstraint) -> tuple:
    return tuple(tc.clocks)


def kind_label(kind: str) -> str:
    return {"EndToEnd": "End-to-End"}.get(kind, kind)

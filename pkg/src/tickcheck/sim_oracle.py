"""Concrete step-by-step execution of a SystemModel.

This is the brute-force oracle for the encoder: it follows docs/SEMANTICS.md
directly with exact values and shares no step logic with smt_encoder.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from . import action_lang as al
from . import naming
from .action_lang import ValueType
from .ccsl import Clock, Entered, Every, Explicit, Rising
from .errors import ClockUndefinedOnTrace, DivisionByZero, MissingPin
from .model_ir import SystemModel, topo_order


@dataclass
class Trace:
    bound: int
    signals: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    variables: dict = field(default_factory=dict)
    memory: dict = field(default_factory=dict)
    ticks: dict = field(default_factory=dict)

    def symbols(self) -> dict:
        """Every encoded vector by base name (clock ticks excluded)."""
        out = {}
        for part in (self.signals, self.states, self.variables, self.memory):
            out.update(part)
        return out

    def value(self, name: str, model: SystemModel) -> list:
        base, _ = naming.resolve_name(model, name)
        return self.symbols()[base]

    def activity(self, path: str, model: SystemModel) -> list:
        chart, sid = naming.resolve_state(model, path)
        return self.states[naming.state_base(chart, sid)]

    def to_csv(self, include_ticks: bool = True) -> str:
        cols = dict(self.symbols())
        if include_ticks:
            cols.update({naming.tick_base(k): v for k, v in self.ticks.items()})
        names = list(cols)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step"] + names)
        for i in range(self.bound):
            w.writerow([i] + [render_value(cols[n][i]) for n in names])
        return buf.getvalue()


def render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def _as_type(v, t: ValueType):
    if t is ValueType.Bool:
        return bool(v)
    if t is ValueType.Int:
        if isinstance(v, Fraction) and v.denominator != 1:
            raise ValueError(f"non-integer {v} for Int signal")
        return int(v)
    return Fraction(v)


class _ChartRunner:
    def __init__(self, chart):
        self.chart = chart
        self.types = chart.var_types
        self.history = {sid: chart.default_child(sid) for sid, st in chart.states.items()
                        if st.has_history_junction and st.substates}
        self.leaf = None
        self.store: dict = {}

    def _exec(self, stmts, store, step):
        try:
            return al.exec_stmts(stmts, store, self.types)
        except DivisionByZero:
            raise DivisionByZero(f"division by zero in chart {self.chart.name!r}", step) from None

    def _eval(self, expr, store, step):
        try:
            return al.eval_concrete(expr, store)
        except DivisionByZero:
            raise DivisionByZero(f"division by zero in chart {self.chart.name!r}", step) from None

    def _descend(self, sid, use_history: bool) -> list:
        entered = [sid]
        st = self.chart.states[sid]
        while st.substates:
            if use_history and st.has_history_junction:
                nxt = self.history[st.id]
            else:
                nxt = self.chart.default_child(st.id)
            entered.append(nxt)
            st = self.chart.states[nxt]
        return entered

    def _remember(self):
        path = self.chart.ancestry(self.leaf)
        for parent, child in zip(path, path[1:]):
            if parent in self.history:
                self.history[parent] = child

    def start(self, step=0):
        store = {v.name: v.init for v in self.chart.variables}
        entered = self._descend(self.chart.default_child(None), use_history=False)
        for sid in entered:
            store = self._exec(self.chart.states[sid].entry_actions, store, step)
        self.leaf = entered[-1]
        self.store = store
        self._remember()

    def step(self, inputs: Mapping, step: int):
        """Advance one step; *inputs* are the input values seen at the previous step."""
        chart = self.chart
        before = dict(self.store)
        before.update(inputs)
        path = chart.ancestry(self.leaf)
        store = dict(before)
        for depth, sid in enumerate(path):
            for t in chart.outgoing(sid):
                if self._eval(t.condition, before, step):
                    for x in reversed(path[depth:]):
                        store = self._exec(chart.states[x].exit_actions, store, step)
                    store = self._exec(t.action, store, step)
                    entered = self._descend(t.dst, use_history=True)
                    for x in entered:
                        store = self._exec(chart.states[x].entry_actions, store, step)
                    self.leaf = entered[-1]
                    self.store = store
                    self._remember()
                    return
            store = self._exec(chart.states[sid].during_actions, store, step)
        self.store = store

    def active(self) -> set:
        return set(self.chart.ancestry(self.leaf))


def simulate(model: SystemModel, N: int, pins: Optional[Mapping] = None,
             inputs: Optional[Mapping] = None) -> Trace:
    """Run *model* for N steps with RandomSource *pins* and Inport *inputs*."""
    order = topo_order(model)
    pins = pins or {}
    inputs = inputs or {}
    types = model.signal_types
    out: dict = {}   # (block id, port) -> list
    inp: dict = {}
    for b in model.blocks:
        for k in range(1, b.out_ports + 1):
            out[(b.id, k)] = []
        for k in range(1, b.in_ports + 1):
            inp[(b.id, k)] = []
    runners = {c.id: _ChartRunner(c) for c in model.charts}
    chart_vars = {c.id: {v.name: [] for v in c.variables} for c in model.charts}
    activity = {c.id: {sid: [] for sid in c.states} for c in model.charts}
    memory = {c.id: {sid: [] for sid in runners[c.id].history} for c in model.charts}
    input_values = {}
    for b in model.inports():
        vals = inputs.get(b.name, inputs.get(b.id))
        if vals is None or len(vals) < N:
            raise MissingPin(f"no input values for Inport {b.name!r}")
        input_values[b.id] = list(vals)

    for i in range(N):
        for chart in model.charts:
            r = runners[chart.id]
            if i == 0:
                r.start(0)
            else:
                prev_inputs = {name: chart_vars[chart.id][name][i - 1] for name in chart.input_signals}
                r.step(prev_inputs, i)
        for b in model.blocks:
            if b.kind == "UnitDelay":
                val = b.params["init"] if i == 0 else inp[(b.id, 1)][i - 1]
                out[(b.id, 1)].append(_as_type(val, b.params["type"]))
            elif b.kind == "Chart":
                chart = model.chart_for_block(b.id)
                for k, name in enumerate(chart.output_signals, start=1):
                    out[(b.id, k)].append(runners[chart.id].store[name])
        for bid in order:
            b = model.block(bid)
            if b.kind in ("UnitDelay", "Chart", "Outport"):
                continue
            args = []
            for k in range(1, b.in_ports + 1):
                src = model.driver(bid, k)
                args.append(out[src][i])
            out[(bid, 1)].append(_as_type(_block_value(b, args, i, pins, input_values), types[(bid, 1)]))
        for c in model.connections:
            inp[c.dst].append(out[c.src][i])
        for chart in model.charts:
            r = runners[chart.id]
            blk = model.block(chart.block_id)
            for k, name in enumerate(chart.input_signals, start=1):
                r.store[name] = _as_type(inp[(blk.id, k)][i], chart.var(name).type)
            for name in chart_vars[chart.id]:
                chart_vars[chart.id][name].append(r.store[name])
            live = r.active()
            for sid in chart.states:
                activity[chart.id][sid].append(1 if sid in live else 0)
            for sid, child in r.history.items():
                memory[chart.id][sid].append(child)

    trace = Trace(N)
    for b in model.blocks:
        for k in range(1, b.out_ports + 1):
            trace.signals[naming.out_signal(b, k)] = out[(b.id, k)]
        for k in range(1, b.in_ports + 1):
            trace.signals[naming.in_signal(b, k)] = inp[(b.id, k)]
    for chart in model.charts:
        for name, vals in chart_vars[chart.id].items():
            trace.variables[naming.var_base(chart, name)] = vals
        for sid, vals in activity[chart.id].items():
            trace.states[naming.state_base(chart, sid)] = vals
        for sid, vals in memory[chart.id].items():
            trace.memory[naming.memory_base(chart, sid)] = vals
    return trace


def _block_value(b, args, i, pins, input_values):
    k = b.kind
    p = b.params
    if k == "Constant":
        return p["value"]
    if k == "Gain":
        return p["gain"] * args[0]
    if k == "Sum":
        total = 0
        for sign, a in zip(p["signs"], args):
            total = total + a if sign == "+" else total - a
        return total
    if k == "Product":
        prod = 1
        for a in args:
            prod = prod * a
        return prod
    if k == "RelationalOperator":
        a, c = args
        return {"<": a < c, "<=": a <= c, ">": a > c, ">=": a >= c, "==": a == c, "~=": a != c}[p["op"]]
    if k == "LogicalOperator":
        if p["op"] == "NOT":
            return not args[0]
        return all(args) if p["op"] == "AND" else any(args)
    if k == "Switch":
        ctrl = args[1]
        if isinstance(ctrl, bool):
            passes = ctrl
        elif p["criteria"] == "u2 ~= 0":
            passes = ctrl != 0
        elif p["criteria"] == "u2 >= Threshold":
            passes = ctrl >= p["threshold"]
        else:
            passes = ctrl > p["threshold"]
        return args[0] if passes else args[2]
    if k == "Inport":
        return input_values[b.id][i]
    if k == "RandomSource":
        if (b.id, i) not in pins:
            raise MissingPin(f"no pinned value for {b.name} at step {i}")
        return pins[(b.id, i)]
    raise ValueError(f"cannot simulate block kind {k!r}")


def derive_ticks(trace: Trace, clocks, model: SystemModel) -> Trace:
    """Fill ``trace.ticks`` for each clock definition."""
    N = trace.bound
    symbols = trace.symbols()
    for c in clocks:
        src = c.source
        if isinstance(src, Every):
            ticks = [i >= src.offset and (i - src.offset) % src.period == 0 for i in range(N)]
        elif isinstance(src, Explicit):
            ticks = [bool(t) for t in src.ticks[:N]]
        elif isinstance(src, Entered):
            try:
                chart, sid = naming.resolve_state(model, src.path)
                act = symbols[naming.state_base(chart, sid)]
            except KeyError:
                raise ClockUndefinedOnTrace(f"clock {c.name!r}: state {src.path!r} not on trace") from None
            ticks = [act[i] == 1 and (i == 0 or act[i - 1] == 0) for i in range(N)]
        elif isinstance(src, Rising):
            series = {}
            for name in al.free_vars(src.expr):
                try:
                    series[name] = symbols[naming.resolve_name(model, name)[0]]
                except KeyError:
                    raise ClockUndefinedOnTrace(f"clock {c.name!r}: signal {name!r} not on trace") from None
            vals = []
            for i in range(N):
                try:
                    vals.append(bool(al.eval_concrete(src.expr, {n: s[i] for n, s in series.items()})))
                except DivisionByZero:
                    raise DivisionByZero(f"division by zero in clock {c.name!r}", i) from None
            ticks = [vals[i] and (i == 0 or not vals[i - 1]) for i in range(N)]
        else:
            raise ClockUndefinedOnTrace(f"clock {c.name!r}: unsupported source")
        trace.ticks[c.name] = ticks
    return trace

"""Bounded unrolling of a SystemModel into an SMT-LIB 2.6 script.

Every signal, chart variable and state activity becomes one constant per step,
``<base>__<i>`` for ``0 <= i < N``.  Terms are built directly as SMT-LIB text.
The chart step is symbolically executed: each (active leaf, fired transition,
history choice) combination is an outcome with a guard over step ``i-1``
symbols, and every step-``i`` value is an ``ite`` over those outcomes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from . import action_lang as al
from . import naming
from .action_lang import Binary, Lit, Unary, ValueType, Var
from .errors import BoundTooSmall, EncodingError, MissingPin, NonSiblingTransition, UndeclaredSymbol, UnsupportedKind
from .model_ir import ChartDef, SystemModel, topo_order, validate

SORTS = {ValueType.Bool: "Bool", ValueType.Int: "Int", ValueType.Real: "Real"}


# -- term helpers --------------------------------------------------------------

def lit(value, vtype: ValueType) -> str:
    if vtype is ValueType.Bool:
        return "true" if value else "false"
    if vtype is ValueType.Int:
        v = int(value)
        return str(v) if v >= 0 else f"(- {-v})"
    v = Fraction(value)
    mag = abs(v)
    body = f"{mag.numerator}.0" if mag.denominator == 1 else f"(/ {mag.numerator}.0 {mag.denominator}.0)"
    return body if v >= 0 else f"(- {body})"


_INT_LIT_RE = re.compile(r"^(?:(\d+)|\(- (\d+)\))$")


def widen(term: str, src: ValueType, dst: ValueType) -> str:
    if src is ValueType.Int and dst is ValueType.Real:
        m = _INT_LIT_RE.match(term)
        if m:
            return lit(int(m.group(1)) if m.group(1) else -int(m.group(2)), ValueType.Real)
        return f"(to_real {term})"
    return term


def conj(terms) -> str:
    terms = [t for t in terms if t != "true"]
    if "false" in terms:
        return "false"
    if not terms:
        return "true"
    if len(terms) == 1:
        return terms[0]
    return "(and " + " ".join(terms) + ")"


def disj(terms) -> str:
    terms = [t for t in terms if t != "false"]
    if "true" in terms:
        return "true"
    if not terms:
        return "false"
    if len(terms) == 1:
        return terms[0]
    return "(or " + " ".join(terms) + ")"


def neg(term: str) -> str:
    if term == "true":
        return "false"
    if term == "false":
        return "true"
    if term.startswith("(not ") and _one_term(term[5:-1]):
        return term[5:-1]
    return f"(not {term})"


def _one_term(text: str) -> bool:
    depth = 0
    for j, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and j < len(text) - 1:
            return False
    return depth == 0


def ite_chain(cases, default: str) -> str:
    """``cases`` is a list of (guard, value); earlier guards take precedence."""
    out = default
    for guard, value in reversed(cases):
        if value == out:
            continue
        out = f"(ite {guard} {value} {out})"
    return out


def select(cases) -> str:
    """Value term for mutually exclusive, exhaustive (guard, value) cases."""
    groups: dict = {}
    for guard, value in cases:
        groups.setdefault(value, []).append(guard)
    default = max(groups, key=lambda v: sum(len(g) for g in groups[v]))
    out = default
    for value, guards in reversed(groups.items()):
        if value != default:
            out = f"(ite {disj(guards)} {value} {out})"
    return out


# -- context -----------------------------------------------------------------

@dataclass(frozen=True)
class StepVector:
    base_name: str
    sort: ValueType
    bound: int

    def __post_init__(self):
        stem = naming.sanitize(self.base_name)
        object.__setattr__(self, "_names", tuple(f"{stem}__{i}" for i in range(self.bound)))

    def symbol(self, i: int) -> str:
        if not 0 <= i < self.bound:
            raise IndexError(f"{self.base_name}: step {i} outside [0, {self.bound})")
        return self._names[i]

    def __getitem__(self, i: int) -> str:
        return self.symbol(i)

    def symbols(self) -> list:
        return list(self._names)


@dataclass
class EncodingContext:
    bound: int
    model: Optional[SystemModel] = None
    signal_vectors: dict = field(default_factory=dict)
    state_vectors: dict = field(default_factory=dict)
    var_vectors: dict = field(default_factory=dict)
    memory_vectors: dict = field(default_factory=dict)
    clock_vectors: dict = field(default_factory=dict)
    history_vectors: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    obligations: list = field(default_factory=list)
    scenario_pins: Optional[Mapping] = None
    inputs: Optional[Mapping] = None
    nonlinear: bool = False
    _vectors: dict = field(default_factory=dict)
    _symbols: set = field(default_factory=set)
    _units: list = field(default_factory=list)  # per-assertion unit sets, filled by index_assertions

    def declare(self, base: str, sort: ValueType, length: Optional[int] = None) -> StepVector:
        vec = StepVector(base, sort, self.bound if length is None else length)
        if base in self._vectors:
            raise EncodingError(f"vector {base!r} declared twice")
        syms = vec.symbols()
        clash = self._symbols.intersection(syms)
        if clash:
            raise EncodingError(f"symbol clash after sanitization: {sorted(clash)[0]}")
        self._symbols.update(syms)
        self._vectors[base] = vec
        return vec

    def add(self, term: str) -> None:
        if term != "true":
            self.assertions.append(term)

    @property
    def vectors(self) -> dict:
        return self._vectors

    def declarations(self) -> list:
        return [line for v in self._vectors.values() for line in _declare(v)]


# -- expression encoding -----------------------------------------------------

class ExprEncoder:
    """Translate action-language Exprs to terms over a symbolic store."""

    def __init__(self, ctx: EncodingContext, types: Mapping[str, ValueType]):
        self.ctx = ctx
        self.types = types

    def encode(self, e, store: Mapping[str, str], guard: str = "true") -> tuple[str, ValueType]:
        if isinstance(e, Lit):
            return lit(e.value, e.type), e.type
        if isinstance(e, Var):
            return store[e.name], self.types[e.name]
        if isinstance(e, Unary):
            t, ty = self.encode(e.operand, store, guard)
            return (neg(t), ty) if e.op == "!" else (f"(- {t})", ty)
        assert isinstance(e, Binary)
        lt, lty = self.encode(e.left, store, guard)
        if e.op in ("&&", "||"):
            # right operand only matters under short-circuit, mirroring evaluation
            rguard = conj([guard, lt]) if e.op == "&&" else conj([guard, neg(lt)])
            rt, _ = self.encode(e.right, store, rguard)
            return (conj([lt, rt]) if e.op == "&&" else disj([lt, rt])), ValueType.Bool
        rt, rty = self.encode(e.right, store, guard)
        if lty is not rty:
            lt, rt = widen(lt, lty, ValueType.Real), widen(rt, rty, ValueType.Real)
            ty = ValueType.Real
        else:
            ty = lty
        op = e.op
        if op in ("+", "-"):
            return f"({op} {lt} {rt})", ty
        if op == "*":
            if not (_is_literal(lt) or _is_literal(rt)):
                self.ctx.nonlinear = True
            return f"(* {lt} {rt})", ty
        if op == "/":
            if not _is_literal(rt):
                self.ctx.nonlinear = True
            zero = lit(0, ty)
            self.ctx.obligations.append(_implies(guard, f"(not (= {rt} {zero}))"))
            return (f"(div {lt} {rt})" if ty is ValueType.Int else f"(/ {lt} {rt})"), ty
        if op == "==":
            return f"(= {lt} {rt})", ValueType.Bool
        if op == "!=":
            return f"(not (= {lt} {rt}))", ValueType.Bool
        return f"({op} {lt} {rt})", ValueType.Bool

    def exec_stmts(self, stmts, store: dict, guard: str) -> dict:
        out = dict(store)
        for s in stmts:
            term, ty = self.encode(s.rhs, out, guard)
            out[s.target] = widen(term, ty, self.types[s.target])
        return out


_LITERAL_RE = re.compile(r"^(\(- )?(\(/ )?\d+(\.\d+)?( \d+(\.\d+)?\))?\)?$")


def _is_literal(term: str) -> bool:
    return bool(_LITERAL_RE.match(term))


def _implies(guard: str, term: str) -> str:
    return term if guard == "true" else f"(=> {guard} {term})"


# -- model encoding ----------------------------------------------------------

def init_context(model: SystemModel, N: int, pins: Optional[Mapping] = None,
                 inputs: Optional[Mapping] = None) -> EncodingContext:
    """Declare all step vectors of *model* and assert initial conditions.

    *pins* maps ``(RandomSource block id, step)`` to a concrete value;
    *inputs* maps an Inport block name (or id) to a list of N values.
    """
    if N < 1:
        raise BoundTooSmall(f"bound must be >= 1, got {N}")
    if not model.signal_types and model.blocks:
        problems = validate(model)
        if problems:
            raise EncodingError("model does not validate: " + "; ".join(map(str, problems)))
    ctx = EncodingContext(N, model, scenario_pins=pins, inputs=inputs)
    if pins is not None:
        for b in model.random_sources():
            for i in range(N):
                if (b.id, i) not in pins:
                    raise MissingPin(f"no pinned value for {b.name} at step {i}")
    for b in model.blocks:
        for k in range(1, b.out_ports + 1):
            ctx.signal_vectors[(b.id, "o", k)] = ctx.declare(naming.out_signal(b, k), model.signal_types[(b.id, k)])
        for k in range(1, b.in_ports + 1):
            src = model.driver(b.id, k)
            ctx.signal_vectors[(b.id, "i", k)] = ctx.declare(naming.in_signal(b, k), model.signal_types[src])
    for chart in model.charts:
        for v in chart.variables:
            ctx.var_vectors[(chart.id, v.name)] = ctx.declare(naming.var_base(chart, v.name), v.type)
        for sid in chart.states:
            vec = ctx.declare(naming.state_base(chart, sid), ValueType.Int)
            ctx.state_vectors[(chart.id, sid)] = vec
            for i in range(N):
                ctx.add(f"(or (= {vec[i]} 0) (= {vec[i]} 1))")
        for sid, st in chart.states.items():
            if st.has_history_junction and st.substates:
                ctx.memory_vectors[(chart.id, sid)] = ctx.declare(naming.memory_base(chart, sid), ValueType.Int)
    for b in model.blocks:
        if b.kind == "UnitDelay":
            out = ctx.signal_vectors[(b.id, "o", 1)]
            ctx.add(f"(= {out[0]} {lit(b.params['init'], b.params['type'])})")
    return ctx


def encode_lines(ctx: EncodingContext, model: SystemModel) -> EncodingContext:
    for c in model.connections:
        src = ctx.signal_vectors[(c.src[0], "o", c.src[1])]
        dst = ctx.signal_vectors[(c.dst[0], "i", c.dst[1])]
        for i in range(ctx.bound):
            ctx.add(f"(= {dst[i]} {src[i]})")
    return ctx


def _input_values(ctx: EncodingContext, block):
    if ctx.inputs is None:
        return None
    for key in (block.name, block.id):
        if key in ctx.inputs:
            vals = list(ctx.inputs[key])
            if len(vals) < ctx.bound:
                raise MissingPin(f"input {block.name} has {len(vals)} values, need {ctx.bound}")
            return vals
    return None


def encode_block(ctx: EncodingContext, block) -> EncodingContext:
    model = ctx.model
    k = block.kind
    N = ctx.bound
    if k in ("Outport", "Chart"):
        return ctx
    out = ctx.signal_vectors[(block.id, "o", 1)]
    oty = out.sort
    ins = [ctx.signal_vectors[(block.id, "i", p)] for p in range(1, block.in_ports + 1)]
    ity = [v.sort for v in ins]
    for i in range(N):
        if k == "Constant":
            rhs = lit(block.params["value"], oty)
        elif k == "Gain":
            g = block.params["gain"]
            gl = lit(g, oty) if oty is ValueType.Real else lit(int(g), ValueType.Int)
            rhs = f"(* {gl} {widen(ins[0][i], ity[0], oty)})"
        elif k == "Sum":
            parts = []
            for sign, v, t in zip(block.params["signs"], ins, ity):
                term = widen(v[i], t, oty)
                parts.append(term if sign == "+" else f"(- {term})")
            rhs = parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"
        elif k == "Product":
            if len(ins) > 1:
                ctx.nonlinear = True
            terms = [widen(v[i], t, oty) for v, t in zip(ins, ity)]
            rhs = terms[0] if len(terms) == 1 else "(* " + " ".join(terms) + ")"
        elif k == "RelationalOperator":
            a, b = ins[0][i], ins[1][i]
            if ity[0] is not ity[1]:
                a, b = widen(a, ity[0], ValueType.Real), widen(b, ity[1], ValueType.Real)
            op = block.params["op"]
            rhs = f"(not (= {a} {b}))" if op == "~=" else f"({'=' if op == '==' else op} {a} {b})"
        elif k == "LogicalOperator":
            op = block.params["op"]
            terms = [v[i] for v in ins]
            rhs = f"(not {terms[0]})" if op == "NOT" else f"({op.lower()} {' '.join(terms)})"
        elif k == "Switch":
            ctrl, cty = ins[1][i], ity[1]
            crit = block.params["criteria"]
            if cty is ValueType.Bool:
                passes = ctrl
            elif crit == "u2 ~= 0":
                passes = f"(not (= {ctrl} {lit(0, cty)}))"
            else:
                thr = Fraction(block.params["threshold"])
                tty = cty if (cty is ValueType.Real or thr.denominator == 1) else ValueType.Real
                op = ">=" if crit == "u2 >= Threshold" else ">"
                passes = f"({op} {widen(ctrl, cty, tty)} {lit(thr, tty)})"
            rhs = f"(ite {passes} {widen(ins[0][i], ity[0], oty)} {widen(ins[2][i], ity[2], oty)})"
        elif k == "UnitDelay":
            if i == 0:
                continue  # initial value asserted by init_context
            rhs = widen(ins[0][i - 1], ity[0], oty)
        elif k == "Inport":
            vals = _input_values(ctx, block)
            if vals is None:
                continue
            rhs = lit(vals[i], oty)
        elif k == "RandomSource":
            dist = block.params["dist"]
            if ctx.scenario_pins is not None:
                rhs = lit(ctx.scenario_pins[(block.id, i)], oty)
            else:
                ctx.add(_support(dist, out[i], oty))
                continue
        else:
            raise UnsupportedKind(f"cannot encode block kind {k!r}")
        ctx.add(f"(= {out[i]} {rhs})")
    return ctx


def _support(dist, sym: str, ty: ValueType) -> str:
    if dist.kind in ("UniformInt", "UniformReal"):
        lo, hi = dist.params
        return f"(and (<= {lit(lo, ty)} {sym}) (<= {sym} {lit(hi, ty)}))"
    if dist.kind == "Bernoulli":
        q = dist.params[0]
        if q == 0:
            return f"(not {sym})"
        if q == 1:
            return sym
        return "true"
    values, weights = dist.params
    return disj([f"(= {sym} {lit(v, ty)})" for v, w in zip(values, weights) if w > 0])


# -- chart encoding ----------------------------------------------------------

def _enter_options(chart: ChartDef, sid: int, memory_at) -> list:
    """Ways of entering *sid*: list of (guards, states entered outermost-first).

    *memory_at(sid)* returns the history symbol to consult, or None on the
    initial activation where history is not yet meaningful.
    """
    st = chart.states[sid]
    if not st.substates:
        return [([], [sid])]
    mem = memory_at(sid) if st.has_history_junction else None
    options = []
    if mem is None:
        for guards, path in _enter_options(chart, chart.default_child(sid), memory_at):
            options.append((guards, [sid] + path))
        return options
    for child in st.substates:
        for guards, path in _enter_options(chart, child, memory_at):
            options.append(([f"(= {mem} {child})"] + guards, [sid] + path))
    return options


def encode_chart(ctx: EncodingContext, chart: ChartDef) -> EncodingContext:
    """Assert the chart step relation for every step (initial activation at step 0)."""
    for t in chart.transitions:
        if chart.states[t.src].parent != chart.states[t.dst].parent:
            raise NonSiblingTransition(f"transition {t.id} in chart {chart.name!r}")
    N = ctx.bound
    model = ctx.model
    block = model.block(chart.block_id)
    types = chart.var_types
    enc = ExprEncoder(ctx, types)
    act = {sid: ctx.state_vectors[(chart.id, sid)] for sid in chart.states}
    var = {v.name: ctx.var_vectors[(chart.id, v.name)] for v in chart.variables}
    mem = {sid: ctx.memory_vectors[(chart.id, sid)] for sid in chart.states if (chart.id, sid) in ctx.memory_vectors}

    # port bindings
    for k, name in enumerate(chart.input_signals, start=1):
        sig = ctx.signal_vectors[(block.id, "i", k)]
        for i in range(N):
            ctx.add(f"(= {var[name][i]} {widen(sig[i], sig.sort, types[name])})")
    for k, name in enumerate(chart.output_signals, start=1):
        sig = ctx.signal_vectors[(block.id, "o", k)]
        for i in range(N):
            ctx.add(f"(= {sig[i]} {var[name][i]})")

    locals_ = [v.name for v in chart.variables if v.scope != "Input"]

    # step 0: initial activation on the declared initial store
    init_store = {v.name: lit(v.init, v.type) for v in chart.variables}
    options = []
    for guards, path in _enter_options(chart, chart.default_child(None), lambda s: None):
        store = init_store
        for sid in path:
            store = enc.exec_stmts(chart.states[sid].entry_actions, store, "true")
        options.append((path, store))
    (path0, store0), = options
    for sid in chart.states:
        ctx.add(f"(= {act[sid][0]} {1 if sid in path0 else 0})")
    for name in locals_:
        ctx.add(f"(= {var[name][0]} {store0[name]})")

    for i in range(1, N):
        prev = {name: var[name][i - 1] for name in var}
        outcomes = _step_outcomes(chart, enc, prev, act, mem, i)
        for sid in chart.states:
            active = disj([g for g, path, _ in outcomes if sid in path])
            ctx.add(f"(= {act[sid][i]} (ite {active} 1 0))" if active not in ("true", "false")
                    else f"(= {act[sid][i]} {1 if active == 'true' else 0})")
        for name in locals_:
            value = select([(g, store[name]) for g, _, store in outcomes])
            ctx.add(f"(= {var[name][i]} {value})")

    # hierarchy: parent activity equals the sum of its substates'
    for i in range(N):
        roots = [act[s][i] for s in chart.root_states]
        ctx.add(f"(= {_sum(roots)} 1)")
        for sid, st in chart.states.items():
            if st.substates:
                ctx.add(f"(= {act[sid][i]} {_sum([act[c][i] for c in st.substates])})")

    # history memory: last active substate
    for sid, vec in mem.items():
        st = chart.states[sid]
        for i in range(N):
            fallback = str(chart.default_child(sid)) if i == 0 else vec[i - 1]
            cases = [(f"(= {act[c][i]} 1)", str(c)) for c in st.substates]
            ctx.add(f"(= {vec[i]} {ite_chain(cases, fallback)})")
    return ctx


def _sum(terms) -> str:
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def _step_outcomes(chart, enc, prev, act, mem, i):
    """Enumerate (guard, new active path, store) for step *i* from step i-1."""
    outcomes = []
    memory_at = lambda sid: mem[sid][i - 1] if sid in mem else None
    for leaf in chart.leaves():
        path = chart.ancestry(leaf)
        base = f"(= {act[leaf][i - 1]} 1)"
        blocked: list = []
        store = dict(prev)
        for depth, sid in enumerate(path):
            for t in chart.outgoing(sid):
                guard_pre = conj([base] + blocked)
                cond, _ = enc.encode(t.condition, prev, guard_pre)
                fire = conj([base] + blocked + [cond])
                if fire != "false":
                    fstore = store
                    for x in reversed(path[depth:]):
                        fstore = enc.exec_stmts(chart.states[x].exit_actions, fstore, fire)
                    fstore = enc.exec_stmts(t.action, fstore, fire)
                    for hguards, entered in _enter_options(chart, t.dst, memory_at):
                        g = conj([fire] + hguards)
                        estore = fstore
                        for x in entered:
                            estore = enc.exec_stmts(chart.states[x].entry_actions, estore, g)
                        outcomes.append((g, path[:depth] + entered, estore))
                blocked.append(neg(cond))
            store = enc.exec_stmts(chart.states[sid].during_actions, store, conj([base] + blocked))
        outcomes.append((conj([base] + blocked), path, store))
    return [o for o in outcomes if o[0] != "false"]


def encode_model(model: SystemModel, N: int, pins=None, inputs=None) -> EncodingContext:
    ctx = init_context(model, N, pins, inputs)
    encode_lines(ctx, model)
    for bid in topo_order(model):
        encode_block(ctx, model.block(bid))
    for chart in model.charts:
        encode_chart(ctx, chart)
    return ctx


# -- emission ----------------------------------------------------------------

@dataclass
class SmtScript:
    logic: str
    declarations: list
    assertions: list
    goal: Optional[str]
    footer: list

    def render(self) -> str:
        lines = [f"(set-logic {self.logic})"]
        lines += self.declarations
        lines += [f"(assert {a})" for a in self.assertions]
        if self.goal is not None:
            lines.append(f"(assert {self.goal})")
        lines += self.footer
        return "\n".join(lines) + "\n"


_SYMBOL_RE = re.compile(r"[A-Za-z0-9_]+__\d+")


def _units(ctx: EncodingContext) -> dict:
    """Sanitized vector stem -> owning unit (a block id, or a clock)."""
    owner = {}
    for (bid, _, _), vec in ctx.signal_vectors.items():
        owner[vec.base_name] = bid
    if ctx.model is not None:
        chart_block = {c.id: c.block_id for c in ctx.model.charts}
        for table in (ctx.state_vectors, ctx.var_vectors, ctx.memory_vectors):
            for (cid, _), vec in table.items():
                owner[vec.base_name] = chart_block[cid]
    for name, vec in list(ctx.clock_vectors.items()) + list(ctx.history_vectors.items()):
        owner[vec.base_name] = ("clock", name)
    return {naming.sanitize(base): owner.get(base, base) for base in ctx.vectors}


def index_assertions(ctx: EncodingContext) -> dict:
    """Extend the per-assertion unit index to cover every assertion; returns the unit map."""
    unit_of = _units(ctx)
    for term in ctx.assertions[len(ctx._units):]:
        units = [unit_of[m.rsplit("__", 1)[0]] for m in _SYMBOL_RE.findall(term)]
        ctx._units.append(tuple(dict.fromkeys(units)))
    return unit_of


def cone_of_influence(ctx: EncodingContext, goal: str) -> tuple[list, set]:
    """Assertions and vector bases the goal (and every obligation) can depend on.

    Every block and chart defines its own vectors as a total function of its
    inputs, so dropping units outside the cone preserves satisfiability.  An
    assertion belongs to the unit of its first symbol.
    """
    unit_of = index_assertions(ctx)
    owned, deps = [], {}
    for units in ctx._units:
        owner = units[0] if units else None
        owned.append(owner)
        if units:
            deps.setdefault(owner, set()).update(units)
    todo = [unit_of[m.rsplit("__", 1)[0]] for m in _SYMBOL_RE.findall(conj(list(ctx.obligations) + [goal]))]
    keep: set = set()
    while todo:
        u = todo.pop()
        if u not in keep:
            keep.add(u)
            todo.extend(deps.get(u, ()))
    assertions = [t for t, u in zip(ctx.assertions, owned) if u is None or u in keep]
    bases = {b for b in ctx.vectors if unit_of[naming.sanitize(b)] in keep}
    return assertions, bases


def build_script(ctx: EncodingContext, goal: str = "true", polarity: str = "assert",
                 get_model: bool = True, sliced: bool = False) -> SmtScript:
    if polarity not in ("assert", "assert-negated"):
        raise ValueError(f"unknown polarity {polarity!r}")
    full = conj(list(ctx.obligations) + [goal])
    stmt = full if polarity == "assert" else neg(full)
    if sliced:
        assertions, bases = cone_of_influence(ctx, goal)
        declarations = [line for base, vec in ctx.vectors.items() if base in bases
                        for line in _declare(vec)]
    else:
        assertions, declarations = list(ctx.assertions), ctx.declarations()
    script = SmtScript(
        logic="QF_NIRA" if ctx.nonlinear else "QF_LIRA",
        declarations=declarations,
        assertions=assertions,
        goal=stmt,
        footer=["(check-sat)"] + (["(get-model)"] if get_model else []),
    )
    return script


def _declare(vec: StepVector) -> list:
    return [f"(declare-const {s} {SORTS[vec.sort]})" for s in vec.symbols()]


def check_declared(ctx: EncodingContext, text: str) -> None:
    for sym in set(_SYMBOL_RE.findall(text)):
        if sym not in ctx._symbols:
            raise UndeclaredSymbol(sym)


def emit_smtlib(ctx: EncodingContext, goal: str = "true", polarity: str = "assert",
                check: bool = True, sliced: bool = False) -> str:
    """Render the script; byte-deterministic for equal inputs.

    ``sliced`` keeps only the cone of influence of the goal and obligations.
    """
    script = build_script(ctx, goal, polarity, sliced=sliced)
    text = script.render()
    if check:
        body = "\n".join(script.assertions + [script.goal])
        check_declared(ctx, body)
    return text


def decode_trace(ctx: EncodingContext, assignment: Mapping) -> dict:
    """Per-vector value lists from a solver model; missing symbols raise KeyError."""
    return {base: [assignment[vec.symbol(i)] for i in range(vec.bound)]
            for base, vec in ctx.vectors.items()}


def blocking_clause(ctx: EncodingContext, assignment: Mapping, bases=None) -> str:
    """Formula excluding the given assignment over model vectors (for uniqueness checks)."""
    diffs = []
    for base, vec in ctx.vectors.items():
        if bases is not None and base not in bases:
            continue
        for i in range(vec.bound):
            s = vec.symbol(i)
            diffs.append(f"(not (= {s} {lit(assignment[s], vec.sort)}))")
    return disj(diffs)

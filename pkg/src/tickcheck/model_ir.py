"""Elaboration of the raw `.mdl` tree into a typed, validated SystemModel.

Dataflow blocks live under ``System``; charts live under ``Stateflow`` and are
bound into the dataflow by a ``Block`` of type ``Chart`` whose ``ChartId``
names the chart.  Chart ``Input``/``Output`` data become the chart block's
in/out ports in ``Port`` order.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from . import action_lang as al
from .action_lang import Stmt, ValueType
from .errors import ActionSyntaxError, ActionTypeError, AlgebraicLoop, ElaborationError
from .mdl_parser import ParseDiagnostic, RawNode, SourceSpan, Symbol, find_all

BLOCK_KINDS = (
    "Constant", "Gain", "Sum", "Product", "RelationalOperator", "LogicalOperator",
    "Switch", "UnitDelay", "Inport", "Outport", "RandomSource", "Chart",
)
# blocks whose step-i output does not depend on step-i inputs
STATEFUL_KINDS = ("UnitDelay", "Chart")
REL_OPS = ("<", "<=", ">", ">=", "==", "~=")
SWITCH_CRITERIA = ("u2 >= Threshold", "u2 > Threshold", "u2 ~= 0")

_TYPE_ALIASES = {
    "bool": ValueType.Bool, "boolean": ValueType.Bool,
    "int": ValueType.Int, "int32": ValueType.Int, "integer": ValueType.Int,
    "real": ValueType.Real, "double": ValueType.Real,
}

_NOSPAN = SourceSpan(1, 1, 0)


def Diagnostic(code: str, message: str, span: SourceSpan | None = None) -> ParseDiagnostic:
    return ParseDiagnostic("error", code, message, span or _NOSPAN)


@dataclass(frozen=True)
class Distribution:
    kind: str  # UniformInt | UniformReal | Bernoulli | DiscreteChoice
    params: tuple

    @property
    def value_type(self) -> ValueType:
        if self.kind == "UniformInt":
            return ValueType.Int
        if self.kind == "UniformReal":
            return ValueType.Real
        if self.kind == "Bernoulli":
            return ValueType.Bool
        values = self.params[0]
        return ValueType.Int if all(isinstance(v, int) for v in values) else ValueType.Real

    def __str__(self):
        if self.kind == "DiscreteChoice":
            vals = ",".join(str(v) for v in self.params[0])
            ws = ",".join(str(w) for w in self.params[1])
            return f"DiscreteChoice([{vals}],[{ws}])"
        return f"{self.kind}({','.join(str(p) for p in self.params)})"


def parse_number(text) -> int | Fraction:
    if isinstance(text, int):
        return text
    s = str(text).strip()
    if re.fullmatch(r"[+-]?\d+", s):
        return int(s)
    return Fraction(Decimal(s)) if re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", s) else Fraction(s)


def parse_distribution(text: str) -> Distribution:
    s = re.sub(r"\s+", "", str(text))
    m = re.fullmatch(r"(UniformInt|UniformReal|Bernoulli|DiscreteChoice)\((.*)\)", s)
    if not m:
        raise ValueError(f"unknown distribution {text!r}")
    kind, body = m.groups()
    if kind == "DiscreteChoice":
        lm = re.fullmatch(r"\[(.*)\],\[(.*)\]", body)
        if not lm:
            raise ValueError(f"DiscreteChoice expects two lists: {text!r}")
        values = tuple(parse_number(v) for v in lm.group(1).split(",") if v)
        weights = tuple(Fraction(parse_number(w)) for w in lm.group(2).split(",") if w)
        if not values or len(values) != len(weights) or any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValueError(f"bad DiscreteChoice {text!r}")
        return Distribution(kind, (values, weights))
    args = tuple(parse_number(a) for a in body.split(",") if a)
    if kind == "Bernoulli":
        if len(args) != 1 or not 0 <= args[0] <= 1:
            raise ValueError(f"Bernoulli expects q in [0,1]: {text!r}")
        return Distribution(kind, (Fraction(args[0]),))
    if len(args) != 2 or args[0] > args[1]:
        raise ValueError(f"{kind} expects lo <= hi: {text!r}")
    if kind == "UniformInt":
        if not all(isinstance(a, int) for a in args):
            raise ValueError(f"UniformInt bounds must be integers: {text!r}")
        return Distribution(kind, args)
    return Distribution(kind, tuple(Fraction(a) for a in args))


@dataclass
class BlockInstance:
    id: int
    name: str
    kind: str
    params: dict
    in_ports: int
    out_ports: int
    span: SourceSpan = field(default=_NOSPAN, compare=False)


@dataclass(frozen=True)
class Connection:
    src: tuple  # (block id, out-port index, 1-based)
    dst: tuple  # (block id, in-port index, 1-based)


@dataclass
class ChartVar:
    name: str
    type: ValueType
    init: object
    scope: str = "Local"  # Local | Input | Output
    port: int = 0


@dataclass
class StateNode:
    id: int
    name: str
    parent: Optional[int] = None
    substates: list = field(default_factory=list)
    decomposition: str = "Exclusive"
    has_history_junction: bool = False
    entry_actions: list = field(default_factory=list)
    during_actions: list = field(default_factory=list)
    exit_actions: list = field(default_factory=list)
    is_default: bool = False


@dataclass
class TransitionEdge:
    id: int
    src: int
    dst: int
    condition: object
    action: list
    priority: int


@dataclass
class ChartDef:
    id: int
    name: str
    block_id: int
    root_states: list
    states: dict
    transitions: list
    variables: list
    input_signals: list
    output_signals: list

    def var(self, name) -> ChartVar:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def var_types(self) -> dict:
        return {v.name: v.type for v in self.variables}

    def children(self, sid: Optional[int]) -> list:
        return self.root_states if sid is None else self.states[sid].substates

    def default_child(self, sid: Optional[int]) -> int:
        kids = self.children(sid)
        return next(k for k in kids if self.states[k].is_default)

    def path(self, sid: int) -> str:
        parts = []
        cur = sid
        while cur is not None:
            parts.append(self.states[cur].name)
            cur = self.states[cur].parent
        return ".".join([self.name] + parts[::-1])

    def outgoing(self, sid: int) -> list:
        return sorted((t for t in self.transitions if t.src == sid), key=lambda t: t.priority)

    def leaves(self) -> list:
        return [s for s in self.states if not self.states[s].substates]

    def ancestry(self, sid: int) -> list:
        """States from the root level down to *sid*."""
        chain = []
        cur = sid
        while cur is not None:
            chain.append(cur)
            cur = self.states[cur].parent
        return chain[::-1]


@dataclass
class SystemModel:
    name: str
    blocks: list
    connections: list
    charts: list
    base_step: int = 1
    signal_types: dict = field(default_factory=dict, compare=False)

    def block(self, bid: int) -> BlockInstance:
        for b in self.blocks:
            if b.id == bid:
                return b
        raise KeyError(bid)

    def block_by_name(self, name: str) -> BlockInstance:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def chart_for_block(self, bid: int) -> ChartDef:
        return next(c for c in self.charts if c.block_id == bid)

    def chart_by_name(self, name: str) -> ChartDef:
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def driver(self, bid: int, port: int) -> Optional[tuple]:
        for c in self.connections:
            if c.dst == (bid, port):
                return c.src
        return None

    def random_sources(self) -> list:
        return [b for b in self.blocks if b.kind == "RandomSource"]

    def inports(self) -> list:
        return [b for b in self.blocks if b.kind == "Inport"]

    def out_type(self, bid: int, port: int = 1) -> ValueType:
        return self.signal_types[(bid, port)]


# -- elaboration -------------------------------------------------------------

def _text(v) -> str:
    return str(v)


def _as_int(v, what, diags, span):
    try:
        if isinstance(v, (int,)) and not isinstance(v, bool):
            return v
        if isinstance(v, Decimal) and v == v.to_integral_value():
            return int(v)
        return int(str(v))
    except (ValueError, TypeError):
        diags.append(Diagnostic("BadParam", f"{what} must be an integer, got {v!r}", span))
        return None


def _as_bool_flag(v) -> bool:
    s = str(v).strip().lower()
    return s in ("1", "true", "on", "yes")


def _literal(value, vtype: Optional[ValueType]):
    """Parse a literal parameter; returns (value, inferred type)."""
    s = str(value).strip()
    if s.lower() in ("true", "false"):
        b = s.lower() == "true"
        if vtype not in (None, ValueType.Bool):
            raise ValueError(f"Boolean literal {s!r} for {vtype.value}")
        return b, ValueType.Bool
    num = parse_number(value if not isinstance(value, Decimal) else str(value))
    if vtype is ValueType.Bool:
        if num not in (0, 1):
            raise ValueError(f"not a Boolean literal: {s!r}")
        return bool(num), ValueType.Bool
    if vtype is ValueType.Int:
        if Fraction(num).denominator != 1:
            raise ValueError(f"not an integer literal: {s!r}")
        return int(num), ValueType.Int
    if vtype is ValueType.Real:
        return Fraction(num), ValueType.Real
    if isinstance(num, int) and "." not in s and "e" not in s.lower():
        return num, ValueType.Int
    return Fraction(num), ValueType.Real


def _parse_type(v, diags, span) -> Optional[ValueType]:
    t = _TYPE_ALIASES.get(str(v).strip().lower())
    if t is None:
        diags.append(Diagnostic("BadParam", f"unknown data type {v!r}", span))
    return t


class _Arity(ValueError):
    pass


def _elab_block(node: RawNode, diags) -> Optional[BlockInstance]:
    span = node.span
    kind = _text(node.get("BlockType", ""))
    bid = _as_int(node.get("id"), "Block id", diags, span)
    name = _text(node.get("Name", f"block{bid}"))
    if kind not in BLOCK_KINDS:
        diags.append(Diagnostic("UnknownBlockKind", f"unknown block type {kind!r} ({name})", span))
        return None
    params: dict = {}
    n_in, n_out = 1, 1
    try:
        if kind == "Constant":
            vt = _parse_type(node.get("OutDataType"), diags, span) if "OutDataType" in node.params else None
            params["value"], params["type"] = _literal(node.get("Value", "0"), vt)
            n_in = 0
        elif kind == "Gain":
            params["gain"] = Fraction(parse_number(node.get("Gain", "1")))
        elif kind == "Sum":
            signs = _text(node.get("Inputs", "++")).replace("|", "")
            if signs.isdigit():
                signs = "+" * int(signs)
            if not signs or set(signs) - {"+", "-"}:
                raise ValueError(f"bad Sum sign string {signs!r}")
            params["signs"] = signs
            n_in = len(signs)
        elif kind == "Product":
            raw = _text(node.get("Inputs", "2"))
            count = len(raw) if set(raw) == {"*"} else int(raw)
            if count < 1:
                raise _Arity("Product needs at least one input")
            n_in = count
        elif kind == "RelationalOperator":
            op = _text(node.get("Operator", "<="))
            if op not in REL_OPS:
                raise ValueError(f"bad relational operator {op!r}")
            params["op"] = op
            n_in = 2
        elif kind == "LogicalOperator":
            op = _text(node.get("Operator", "AND")).upper()
            if op not in ("AND", "OR", "NOT"):
                raise ValueError(f"bad logical operator {op!r}")
            params["op"] = op
            n_in = int(_text(node.get("Inputs", "1" if op == "NOT" else "2")))
            if op == "NOT" and n_in != 1:
                raise _Arity("NOT takes exactly one input")
            if op != "NOT" and n_in < 2:
                raise _Arity("AND/OR need at least two inputs")
        elif kind == "Switch":
            crit = _text(node.get("Criteria", "u2 >= Threshold"))
            if crit not in SWITCH_CRITERIA:
                raise ValueError(f"bad Switch criteria {crit!r}")
            params["criteria"] = crit
            params["threshold"] = parse_number(node.get("Threshold", "0"))
            n_in = 3
        elif kind == "UnitDelay":
            vt = _parse_type(node.get("OutDataType"), diags, span) if "OutDataType" in node.params else None
            params["init"], params["type"] = _literal(node.get("InitialCondition", "0"), vt)
        elif kind == "Inport":
            params["type"] = _parse_type(node.get("OutDataType", "Real"), diags, span)
            params["port"] = int(_text(node.get("Port", "1")))
            n_in = 0
        elif kind == "Outport":
            params["port"] = int(_text(node.get("Port", "1")))
            n_out = 0
        elif kind == "RandomSource":
            params["dist"] = parse_distribution(node.get("Distribution", ""))
            params["type"] = params["dist"].value_type
            n_in = 0
        elif kind == "Chart":
            params["chart"] = _as_int(node.get("ChartId"), "ChartId", diags, span)
            n_in = n_out = 0  # fixed once the chart is elaborated
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        code = "ArityMismatch" if isinstance(exc, _Arity) else "BadParam"
        diags.append(Diagnostic(code, f"{name}: {exc}", span))
        return None
    if bid is None:
        return None
    return BlockInstance(bid, name, kind, params, n_in, n_out, span)


def _resolve_block_ref(ref, blocks_by_id, blocks_by_name):
    if isinstance(ref, int):
        return ref if ref in blocks_by_id else None
    if isinstance(ref, Decimal) and ref == ref.to_integral_value():
        return int(ref) if int(ref) in blocks_by_id else None
    b = blocks_by_name.get(str(ref))
    return b.id if b else None


def _elab_lines(system: RawNode, blocks: list, diags) -> list:
    by_id = {b.id: b for b in blocks}
    by_name = {b.name: b for b in blocks}
    conns = []
    for line in [c for c in system.children if c.kind == "Line"]:
        src = _resolve_block_ref(line.get("SrcBlock"), by_id, by_name)
        if src is None:
            diags.append(Diagnostic("DanglingConnection", f"Line source {line.get('SrcBlock')!r} does not exist", line.span))
            continue
        sport = _as_int(line.get("SrcPort", 1), "SrcPort", diags, line.span)
        if sport is None:
            continue
        targets = [line] if "DstBlock" in line.params else []
        targets += find_all(line, "Branch")
        if not targets:
            diags.append(Diagnostic("DanglingConnection", "Line without destination", line.span))
        for t in targets:
            if "DstBlock" not in t.params:
                continue
            dst = _resolve_block_ref(t.get("DstBlock"), by_id, by_name)
            if dst is None:
                diags.append(Diagnostic("DanglingConnection", f"Line destination {t.get('DstBlock')!r} does not exist", t.span))
                continue
            dport = _as_int(t.get("DstPort", 1), "DstPort", diags, t.span)
            if dport is None:
                continue
            conns.append(Connection((src, sport), (dst, dport)))
    return conns


def _parse_actions(text, diags, span, where) -> list:
    if text is None:
        return []
    try:
        return al.parse_stmts(str(text))
    except ActionSyntaxError as exc:
        diags.append(Diagnostic("ActionSyntax", f"{where}: {exc}", span))
        return []


def _elab_chart(node: RawNode, block: Optional[BlockInstance], diags) -> Optional[ChartDef]:
    cid = _as_int(node.get("id"), "chart id", diags, node.span)
    name = block.name if block else _text(node.get("Name", f"chart{cid}"))
    variables = []
    for d in find_all(node, "data"):
        vname = _text(d.get("Name", ""))
        scope = _text(d.get("Scope", "Local")).capitalize()
        if scope not in ("Local", "Input", "Output"):
            diags.append(Diagnostic("BadParam", f"data {vname!r}: unknown scope {scope!r}", d.span))
            continue
        vt = _parse_type(d.get("DataType", "Real"), diags, d.span)
        if vt is None:
            continue
        default = "false" if vt is ValueType.Bool else "0"
        try:
            init, _ = _literal(d.get("InitialValue", default), vt)
        except ValueError as exc:
            diags.append(Diagnostic("BadParam", f"data {vname!r}: {exc}", d.span))
            continue
        port = int(_text(d.get("Port", "0")))
        variables.append(ChartVar(vname, vt, init, scope, port))

    names = [v.name for v in variables]
    for n in set(names):
        if names.count(n) > 1:
            diags.append(Diagnostic("DuplicateName", f"chart {name!r}: variable {n!r} declared twice", node.span))

    states: dict = {}
    roots: list = []

    def visit(snode: RawNode, parent: Optional[int]):
        sid = _as_int(snode.get("id"), "state id", diags, snode.span)
        if sid is None:
            return
        decomp = _text(snode.get("Decomposition", "Exclusive"))
        if decomp.upper() in ("PARALLEL", "AND", "SET_CHART", "PARALLEL_AND"):
            diags.append(Diagnostic("UnsupportedDecomposition", f"state {sid}: parallel decomposition", snode.span))
        sname = _text(snode.get("Name", f"s{sid}"))
        where = f"state {sname!r}"
        st = StateNode(
            id=sid, name=sname, parent=parent,
            has_history_junction=_as_bool_flag(snode.get("History", snode.get("HistoryJunction", 0))),
            entry_actions=_parse_actions(snode.get("EntryAction"), diags, snode.span, where),
            during_actions=_parse_actions(snode.get("DuringAction"), diags, snode.span, where),
            exit_actions=_parse_actions(snode.get("ExitAction"), diags, snode.span, where),
            is_default=_as_bool_flag(snode.get("Default", 0)),
        )
        states[sid] = st
        (states[parent].substates if parent is not None else roots).append(sid)
        for child in snode.children:
            if child.kind == "state":
                visit(child, sid)

    for child in node.children:
        if child.kind == "state":
            visit(child, None)

    transitions = []
    used: dict = {}
    pending = []
    for t in find_all(node, "transition"):
        tid = _as_int(t.get("id"), "transition id", diags, t.span)
        dst = _as_int(t.get("Destination"), "Destination", diags, t.span)
        if tid is None or dst is None:
            continue
        if dst not in states:
            diags.append(Diagnostic("DanglingTransition", f"transition {tid}: unknown destination {dst}", t.span))
            continue
        if "Source" not in t.params:
            states[dst].is_default = True  # default transition
            continue
        src = _as_int(t.get("Source"), "Source", diags, t.span)
        if src is None:
            continue
        if src not in states:
            diags.append(Diagnostic("DanglingTransition", f"transition {tid}: unknown source {src}", t.span))
            continue
        try:
            cond = al.parse_expr(_text(t.get("Condition", "true")))
        except ActionSyntaxError as exc:
            diags.append(Diagnostic("ActionSyntax", f"transition {tid} condition: {exc}", t.span))
            continue
        action = _parse_actions(t.get("Action"), diags, t.span, f"transition {tid}")
        prio = t.get("Priority")
        pending.append((tid, src, dst, cond, action, None if prio is None else _as_int(prio, "Priority", diags, t.span), t.span))
    for tid, src, dst, cond, action, prio, span in pending:
        if prio is not None:
            if prio < 1:
                diags.append(Diagnostic("BadParam", f"transition {tid}: priority must be positive", span))
            used.setdefault(src, set()).add(prio)
    for tid, src, dst, cond, action, prio, span in pending:
        if prio is None:
            taken = used.setdefault(src, set())
            prio = 1
            while prio in taken:
                prio += 1
            taken.add(prio)
        transitions.append(TransitionEdge(tid, src, dst, cond, action, prio))

    inputs = sorted((v for v in variables if v.scope == "Input"), key=lambda v: v.port)
    outputs = sorted((v for v in variables if v.scope == "Output"), key=lambda v: v.port)
    return ChartDef(
        id=cid, name=name, block_id=block.id if block else -1, root_states=roots,
        states=states, transitions=transitions, variables=variables,
        input_signals=[v.name for v in inputs], output_signals=[v.name for v in outputs],
    )


def elaborate(root: RawNode, check: bool = True) -> SystemModel:
    """Build a SystemModel from a parsed document; raises ElaborationError.

    With ``check=False`` only structural elaboration errors are raised and the
    semantic checks of :func:`validate` are skipped.
    """
    diags: list = []
    systems = [c for c in root.children if c.kind == "System"]
    if len(systems) > 1:
        diags.append(Diagnostic("MultipleSystems", "only one System level is supported", systems[1].span))
    system = systems[0] if systems else RawNode("System")
    blocks = []
    for node in [c for c in system.children if c.kind == "Block"]:
        b = _elab_block(node, diags)
        if b is not None:
            blocks.append(b)
    connections = _elab_lines(system, blocks, diags)

    chart_nodes = find_all(root, "chart")
    chart_blocks = {b.params.get("chart"): b for b in blocks if b.kind == "Chart"}
    charts = []
    seen_chart_ids = set()
    for cn in chart_nodes:
        cid = cn.get("id")
        cid = int(cid) if isinstance(cid, (int, Decimal)) else cid
        if cid in seen_chart_ids:
            diags.append(Diagnostic("DuplicateId", f"duplicate chart id {cid}", cn.span))
            continue
        seen_chart_ids.add(cid)
        blk = chart_blocks.get(cid)
        if blk is None:
            diags.append(Diagnostic("UnboundChart", f"chart {cid} is not referenced by any Chart block", cn.span))
            continue
        chart = _elab_chart(cn, blk, diags)
        if chart is not None:
            blk.in_ports = len(chart.input_signals)
            blk.out_ports = len(chart.output_signals)
            charts.append(chart)
    for cid, blk in chart_blocks.items():
        if cid not in seen_chart_ids:
            diags.append(Diagnostic("DanglingConnection", f"Chart block {blk.name!r} references missing chart {cid}", blk.span))

    if diags:
        raise ElaborationError(diags)
    model = SystemModel(_text(root.get("Name", "model")), blocks, connections, charts)
    if check:
        problems = validate(model)
        if problems:
            raise ElaborationError(problems)
    return model


# -- ordering and validation -------------------------------------------------

def _delay_free_edges(model: SystemModel):
    kinds = {b.id: b.kind for b in model.blocks}
    for c in model.connections:
        if kinds.get(c.src[0]) in STATEFUL_KINDS:
            continue
        yield c.src[0], c.dst[0]


def topo_order(model: SystemModel) -> list:
    """Block ids ordered so every delay-free connection runs forward; ties by id."""
    ids = sorted(b.id for b in model.blocks)
    succ = {i: set() for i in ids}
    indeg = {i: 0 for i in ids}
    for s, d in _delay_free_edges(model):
        if d not in succ[s]:
            succ[s].add(d)
            indeg[d] += 1
    heap = [i for i in ids if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for d in sorted(succ[i]):
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, d)
    if len(order) != len(ids):
        remaining = {i for i in ids if i not in order}
        raise AlgebraicLoop(_find_cycle(remaining, succ))
    return order


def _find_cycle(nodes: set, succ: dict) -> list:
    start = min(nodes)
    path, seen = [], {}
    cur = start
    while cur not in seen:
        seen[cur] = len(path)
        path.append(cur)
        cur = min(d for d in succ[cur] if d in nodes)
    return sorted(path[seen[cur]:])


def _numeric_join(types) -> ValueType:
    return ValueType.Real if ValueType.Real in types else ValueType.Int


def infer_types(model: SystemModel, order: list) -> tuple[dict, list]:
    """Infer the value type of every out-port; returns (types, diagnostics)."""
    types: dict = {}
    diags = []
    for b in model.blocks:
        if b.kind in ("Constant", "UnitDelay", "Inport", "RandomSource"):
            types[(b.id, 1)] = b.params["type"]
        elif b.kind == "Chart":
            chart = model.chart_for_block(b.id)
            for k, name in enumerate(chart.output_signals, start=1):
                types[(b.id, k)] = chart.var(name).type
    for bid in order:
        b = model.block(bid)
        ins = []
        for p in range(1, b.in_ports + 1):
            src = model.driver(bid, p)
            ins.append(types.get(src) if src else None)
        if any(t is None for t in ins):
            continue

        def bad(msg):
            diags.append(Diagnostic("TypeMismatch", f"{b.name}: {msg}", b.span))

        k = b.kind
        if k in ("Gain", "Sum", "Product"):
            if ValueType.Bool in ins:
                bad("numeric inputs required")
                continue
            out = _numeric_join(ins)
            if k == "Gain" and b.params["gain"].denominator != 1:
                out = ValueType.Real
            types[(bid, 1)] = out
        elif k == "RelationalOperator":
            if (ValueType.Bool in ins) and (ins[0] is not ins[1] or b.params["op"] not in ("==", "~=")):
                bad("Bool operands only support == and ~=")
                continue
            types[(bid, 1)] = ValueType.Bool
        elif k == "LogicalOperator":
            if any(t is not ValueType.Bool for t in ins):
                bad("Bool inputs required")
                continue
            types[(bid, 1)] = ValueType.Bool
        elif k == "Switch":
            a, c = ins[0], ins[2]
            if (a is ValueType.Bool) != (c is ValueType.Bool):
                bad("data inputs must both be Bool or both numeric")
                continue
            types[(bid, 1)] = a if a is ValueType.Bool else _numeric_join([a, c])
        elif k == "UnitDelay":
            want = b.params["type"]
            if not _assignable(ins[0], want):
                bad(f"input {ins[0].value} does not fit {want.value} delay")
        elif k == "Outport":
            pass
        elif k == "Chart":
            chart = model.chart_for_block(bid)
            for t, name in zip(ins, chart.input_signals):
                want = chart.var(name).type
                if not _assignable(t, want):
                    bad(f"input {name!r} expects {want.value}, got {t.value}")
    return types, diags


def _assignable(src: ValueType, dst: ValueType) -> bool:
    return src is dst or (src is ValueType.Int and dst is ValueType.Real)


def _check_chart(chart: ChartDef, diags):
    env = chart.var_types
    writable = {v.name for v in chart.variables if v.scope != "Input"}

    def check_stmts(stmts, where):
        for s in stmts:
            try:
                al.check_stmt(s, env)
            except ActionTypeError as exc:
                code = "UnresolvedName" if isinstance(exc, al.UnboundVariable) else "TypeMismatch"
                diags.append(Diagnostic(code, f"chart {chart.name!r} {where}: {exc}"))
                continue
            if s.target not in writable:
                diags.append(Diagnostic("ReadOnlyInput", f"chart {chart.name!r} {where}: assigns input {s.target!r}"))

    if not chart.root_states:
        diags.append(Diagnostic("EmptyChart", f"chart {chart.name!r} has no states"))
    for parent in [None] + list(chart.states):
        kids = chart.children(parent)
        if not kids:
            continue
        defaults = [k for k in kids if chart.states[k].is_default]
        where = f"chart {chart.name!r}" if parent is None else f"state {chart.states[parent].name!r}"
        if len(defaults) > 1:
            diags.append(Diagnostic("MultipleDefaults", f"{where}: several default substates {defaults}"))
        elif not defaults:
            diags.append(Diagnostic("MissingDefault", f"{where}: no default substate"))
    for st in chart.states.values():
        check_stmts(st.entry_actions, f"state {st.name!r} entry")
        check_stmts(st.during_actions, f"state {st.name!r} during")
        check_stmts(st.exit_actions, f"state {st.name!r} exit")
    prios: dict = {}
    for t in chart.transitions:
        if chart.states[t.src].parent != chart.states[t.dst].parent:
            diags.append(Diagnostic("NonSiblingTransition", f"chart {chart.name!r} transition {t.id}: source and destination have different parents"))
        if (t.src, t.priority) in prios:
            diags.append(Diagnostic("DuplicatePriority", f"chart {chart.name!r}: transitions {prios[(t.src, t.priority)]} and {t.id} share priority {t.priority}"))
        prios[(t.src, t.priority)] = t.id
        try:
            ct = al.typecheck(t.condition, env)
            if ct is not ValueType.Bool:
                diags.append(Diagnostic("TypeMismatch", f"chart {chart.name!r} transition {t.id}: condition is {ct.value}, not Bool"))
        except ActionTypeError as exc:
            code = "UnresolvedName" if isinstance(exc, al.UnboundVariable) else "TypeMismatch"
            diags.append(Diagnostic(code, f"chart {chart.name!r} transition {t.id}: {exc}"))
        check_stmts(t.action, f"transition {t.id}")


def validate(model: SystemModel) -> list:
    """All invariant checks; an empty list means the model is encodable."""
    diags = []
    names = [b.name for b in model.blocks]
    for n in sorted(set(names)):
        if names.count(n) > 1:
            diags.append(Diagnostic("DuplicateName", f"block name {n!r} used more than once"))
    ids = {b.id: b for b in model.blocks}
    drivers: dict = {}
    for c in model.connections:
        sb, db = ids.get(c.src[0]), ids.get(c.dst[0])
        if sb is None or db is None:
            diags.append(Diagnostic("DanglingConnection", f"connection {c} names a missing block"))
            continue
        if not 1 <= c.src[1] <= sb.out_ports:
            diags.append(Diagnostic("DanglingConnection", f"{sb.name} has no out-port {c.src[1]}"))
        if not 1 <= c.dst[1] <= db.in_ports:
            diags.append(Diagnostic("DanglingConnection", f"{db.name} has no in-port {c.dst[1]}"))
        if c.dst in drivers:
            diags.append(Diagnostic("MultipleDrivers", f"{db.name} in-port {c.dst[1]} has several incoming lines"))
        drivers[c.dst] = c.src
    for b in model.blocks:
        for p in range(1, b.in_ports + 1):
            if (b.id, p) not in drivers:
                diags.append(Diagnostic("UnconnectedPort", f"{b.name} in-port {p} has no incoming line", b.span))
    for chart in model.charts:
        _check_chart(chart, diags)
    if diags:
        return diags
    try:
        order = topo_order(model)
    except AlgebraicLoop as exc:
        return [Diagnostic("AlgebraicLoop", str(exc))]
    types, tdiags = infer_types(model, order)
    if tdiags:
        return tdiags
    model.signal_types = types
    return []


def load_model(path) -> SystemModel:
    from .mdl_parser import parse_file
    return elaborate(parse_file(path))

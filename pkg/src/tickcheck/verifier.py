"""End-to-end verification: encode, solve, aggregate, report."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from . import ccsl
from .action_lang import free_vars
from .errors import DivisionByZero, MissingPin, SolverProtocolError, SolverSpawnError, TaskError, TickcheckError
from .model_ir import SystemModel, load_model
from .naming import resolve_name, resolve_state, state_base
from .scenario import ScenarioSeed, sample_scenario
from .sim_oracle import derive_ticks, render_value, simulate
from .smt_encoder import EncodingContext, check_declared, emit_smtlib, encode_model, index_assertions
from .solver import SolverResult, default_command, run_solver
from .tcs import TimingSpec, check_against_model, load_tcs

VALID, INVALID, UNDETERMINED = "valid", "invalid", "undetermined"


@dataclass
class VerificationTask:
    model_path: str
    spec_path: str
    bound: int = 300
    runs: int = 100
    seed: int = 0
    threshold: Optional[Fraction] = None
    solver: str = field(default_factory=default_command)
    mode: str = "prob"  # det | prob
    jobs: int = 1

    def echo(self) -> dict:
        return {
            "model": self.model_path, "spec": self.spec_path, "bound": self.bound,
            "runs": self.runs, "seed": self.seed,
            "threshold": None if self.threshold is None else str(self.threshold),
            "solver": self.solver, "mode": self.mode, "jobs": self.jobs,
        }


@dataclass
class Verdict:
    name: str
    kind: str
    result: str
    sat_runs: int
    total_runs: int
    threshold: Fraction
    vacuous_runs: int = 0
    wall_time_ms: int = 0
    peak_mem_kb: Optional[int] = None
    counterexample: Optional[str] = None
    errors: list = field(default_factory=list)

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.sat_runs, self.total_runs) if self.total_runs else Fraction(0)

    def wilson(self, z: float = 1.96) -> tuple[float, float]:
        n = self.total_runs
        if n == 0:
            return 0.0, 1.0
        phat = self.sat_runs / n
        denom = 1 + z * z / n
        centre = (phat + z * z / (2 * n)) / denom
        half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class Report:
    version: str
    task: dict
    verdicts: list
    wall_time_ms: int = 0
    peak_mem_kb: Optional[int] = None

    @property
    def exit_code(self) -> int:
        results = {v.result for v in self.verdicts}
        if INVALID in results:
            return 1
        if UNDETERMINED in results:
            return 2
        return 0


@dataclass
class RunOutcome:
    status: str  # Sat | Unsat | Unknown | SolverError | Error
    vacuous: bool = False
    wall_time: float = 0.0
    peak_rss_kb: Optional[int] = None
    assignment: Optional[dict] = None
    error: Optional[str] = None


def decide(sat_runs: int, total_runs: int, threshold: Fraction, poisoned: bool) -> str:
    if poisoned or total_runs == 0:
        return UNDETERMINED
    return VALID if Fraction(sat_runs, total_runs) >= threshold else INVALID


# -- per-run checking ----------------------------------------------------------

def _fork(base: EncodingContext) -> EncodingContext:
    ctx = EncodingContext(base.bound, base.model)
    for name in ("signal_vectors", "state_vectors", "var_vectors", "memory_vectors",
                 "clock_vectors", "history_vectors", "_vectors"):
        setattr(ctx, name, dict(getattr(base, name)))
    ctx.assertions = list(base.assertions)
    ctx.obligations = list(base.obligations)
    ctx._symbols = set(base._symbols)
    ctx._units = list(base._units)
    ctx.scenario_pins, ctx.inputs, ctx.nonlinear = base.scenario_pins, base.inputs, base.nonlinear
    return ctx


def constraint_script(base: EncodingContext, spec: TimingSpec, tc) -> tuple[EncodingContext, str]:
    """Negated-constraint query for *tc* on top of an encoded model."""
    if len(base._units) < len(base.assertions):
        check_declared(base, "\n".join(base.assertions))
        index_assertions(base)
    ctx = _fork(base)
    ccsl.encode_clocks(ctx, spec.clocks_for(tc))
    goal = ccsl.desugar(ctx, tc)
    check_declared(ctx, "\n".join(ctx.assertions[len(base.assertions):] + [goal]))
    return ctx, emit_smtlib(ctx, goal, "assert-negated", check=False, sliced=True)


def _vacuity(model, spec, constraints, N, pins) -> dict:
    """Per-constraint vacuity from a concrete run (empty when not simulable)."""
    if model.inports():
        return {}
    try:
        trace = simulate(model, N, pins)
        clocks = {c for tc in constraints for c in tc.clocks}
        derive_ticks(trace, [spec.clocks[c] for c in sorted(clocks)], model)
    except (DivisionByZero, MissingPin):
        return {}
    return {tc.name: ccsl.constrained_instances(tc, trace.ticks) == 0 for tc in constraints}


def check_scenario(model: SystemModel, spec: TimingSpec, constraints, N: int,
                   pins: Optional[dict], solver: str) -> dict:
    """Solve every constraint under one scenario; returns name -> RunOutcome."""
    base = encode_model(model, N, pins)
    vacuous = _vacuity(model, spec, constraints, N, pins) if pins is not None or not model.random_sources() else {}
    out = {}
    for tc in constraints:
        _, text = constraint_script(base, spec, tc)
        try:
            res = run_solver(text, solver)
        except SolverProtocolError as exc:
            out[tc.name] = RunOutcome("Error", error=str(exc))
            continue
        out[tc.name] = RunOutcome(res.status, res.status == "Unsat" and vacuous.get(tc.name, False),
                                  res.wall_time, res.peak_rss_kb, res.assignment)
    return out


# -- counterexamples -------------------------------------------------------------

def render_counterexample(ctx: EncodingContext, spec: TimingSpec, tc, assignment: dict) -> str:
    N = ctx.bound

    def column(base):
        vec = ctx.vectors[base]
        return [assignment[vec.symbol(i)] for i in range(vec.bound)]

    cols = []
    for c in tc.clocks:
        vec = ctx.clock_vectors[c]
        cols.append((c, [assignment[vec.symbol(i)] for i in range(N)]))
    for c in tc.clocks:
        src = spec.clocks[c].source
        if isinstance(src, ccsl.Rising):
            for name in sorted(free_vars(src.expr)):
                cols.append((name, column(resolve_name(ctx.model, name)[0])))
        elif isinstance(src, ccsl.Entered):
            chart, sid = resolve_state(ctx.model, src.path)
            cols.append((src.path, column(state_base(chart, sid))))
    ticks = [vals for name, vals in cols[:len(tc.clocks)]]
    steps = [i for i in range(N) if any(t[i] for t in ticks)]
    header = ["step"] + [name for name, _ in cols]
    rows = [[str(i)] + [_cell(vals[i]) for _, vals in cols] for i in steps]
    widths = [max(len(h), *(len(r[j]) for r in rows)) if rows else len(h) for j, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    if not rows:
        lines.append("(no clock ticks within the bound)")
    return "\n".join(lines)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "X" if v else "."
    return render_value(v)


# -- task level ----------------------------------------------------------------

def load_task(task: VerificationTask) -> tuple[SystemModel, TimingSpec]:
    model = load_model(task.model_path)
    spec = load_tcs(task.spec_path)
    check_against_model(spec, model)
    return model, spec


def _threshold(task: VerificationTask, tc) -> Fraction:
    if task.threshold is not None:
        return Fraction(task.threshold)
    return tc.prob if tc.prob is not None else Fraction(1)


def run_deterministic_validity(task: VerificationTask, constraint, model=None, spec=None) -> Verdict:
    if model is None:
        model, spec = load_task(task)
    if model.random_sources():
        raise TaskError("deterministic mode needs a model without RandomSource blocks")
    tc = constraint if isinstance(constraint, ccsl.TimingConstraint) else \
        next(c for c in spec.constraints if c.name == constraint)
    base = encode_model(model, task.bound)
    ctx, text = constraint_script(base, spec, tc)
    start = time.perf_counter()
    res = run_solver(text, task.solver)
    vac = _vacuity(model, spec, [tc], task.bound, None).get(tc.name, False)
    v = Verdict(tc.name, tc.kind, UNDETERMINED, 0, 1, Fraction(1),
                wall_time_ms=int((time.perf_counter() - start) * 1000), peak_mem_kb=res.peak_rss_kb)
    if res.status == "Unsat":
        v.result, v.sat_runs, v.vacuous_runs = VALID, 1, int(vac)
    elif res.status == "Sat":
        v.result = INVALID
        if res.assignment:
            v.counterexample = render_counterexample(ctx, spec, tc, res.assignment)
    else:
        v.errors.append(res.raw)
    return v


def aggregate(tc, outcomes: list, threshold: Fraction) -> Verdict:
    sat = sum(1 for o in outcomes if o.status == "Unsat")
    poisoned = any(o.status not in ("Sat", "Unsat") for o in outcomes)
    peaks = [o.peak_rss_kb for o in outcomes if o.peak_rss_kb is not None]
    return Verdict(
        tc.name, tc.kind, decide(sat, len(outcomes), threshold, poisoned), sat, len(outcomes), threshold,
        vacuous_runs=sum(1 for o in outcomes if o.vacuous),
        wall_time_ms=int(sum(o.wall_time for o in outcomes) * 1000),
        peak_mem_kb=max(peaks) if peaks else None,
        errors=[o.error for o in outcomes if o.error],
    )


def _scenario_runs(task, model, spec, constraints) -> list:
    def one(k):
        pins = sample_scenario(model, task.bound, task.seed, k).pins
        try:
            return check_scenario(model, spec, constraints, task.bound, pins, task.solver)
        except TickcheckError as exc:
            if isinstance(exc, (TaskError, SolverSpawnError)):
                raise
            return {tc.name: RunOutcome("Error", error=str(exc)) for tc in constraints}

    if task.jobs > 1:
        with ThreadPoolExecutor(max_workers=task.jobs) as pool:
            return list(pool.map(one, range(task.runs)))
    return [one(k) for k in range(task.runs)]


def run_probabilistic(task: VerificationTask, constraint, model=None, spec=None) -> Verdict:
    if model is None:
        model, spec = load_task(task)
    tc = constraint if isinstance(constraint, ccsl.TimingConstraint) else \
        next(c for c in spec.constraints if c.name == constraint)
    if task.runs < 1:
        raise TaskError("probabilistic mode needs at least one run")
    runs = _scenario_runs(task, model, spec, [tc])
    return aggregate(tc, [r[tc.name] for r in runs], _threshold(task, tc))


def verify(task: VerificationTask) -> Report:
    start = time.perf_counter()
    model, spec = load_task(task)
    verdicts = []
    if task.mode == "det":
        for tc in spec.constraints:
            verdicts.append(run_deterministic_validity(task, tc, model, spec))
    elif task.mode == "prob":
        if task.runs < 1:
            raise TaskError("probabilistic mode needs at least one run")
        runs = _scenario_runs(task, model, spec, spec.constraints)
        for tc in spec.constraints:
            verdicts.append(aggregate(tc, [r[tc.name] for r in runs], _threshold(task, tc)))
    else:
        raise TaskError(f"unknown mode {task.mode!r}")
    peaks = [v.peak_mem_kb for v in verdicts if v.peak_mem_kb is not None]
    return Report(__version__, task.echo(), verdicts,
                  wall_time_ms=int((time.perf_counter() - start) * 1000),
                  peak_mem_kb=max(peaks) if peaks else None)


# -- rendering -------------------------------------------------------------------

def report_dict(report: Report) -> dict:
    items = []
    for v in report.verdicts:
        lo, hi = v.wilson()
        items.append({
            "name": v.name, "kind": v.kind, "result": v.result,
            "sat_runs": v.sat_runs, "total_runs": v.total_runs,
            "estimate": str(v.estimate), "threshold": str(v.threshold),
            "vacuous_runs": v.vacuous_runs, "wall_time_ms": v.wall_time_ms,
            "wilson95": [f"{lo:.4f}", f"{hi:.4f}"],
        })
    return {"version": report.version, "task": report.task, "verdicts": items}


def render_report(report: Report, fmt: str = "table") -> str:
    if not report.verdicts:
        raise ValueError("nothing to render")
    if fmt == "json":
        return json.dumps(report_dict(report), indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    header = ["Constraint", "Kind", "Result", "Sat/Runs", "Estimate", "Wilson 95%", "Time (s)", "Mem (MB)"]
    rows = []
    for v in report.verdicts:
        lo, hi = v.wilson()
        mem = "-" if v.peak_mem_kb is None else f"{v.peak_mem_kb / 1024:.1f}"
        rows.append([v.name, ccsl.kind_label(v.kind), v.result,
                     f"{v.sat_runs}/{v.total_runs}", str(v.estimate), f"[{lo:.3f}, {hi:.3f}]",
                     f"{v.wall_time_ms / 1000:.2f}", mem])
    widths = [max(len(h), *(len(r[j]) for r in rows)) for j, h in enumerate(header)]
    sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    lines = [sep, "| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |", sep]
    lines += ["| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |" for r in rows]
    lines.append(sep)
    for v in report.verdicts:
        if v.counterexample:
            lines.append(f"\ncounterexample for {v.name}:\n{v.counterexample}")
        for e in v.errors[:3]:
            lines.append(f"\n{v.name}: {e}")
    return "\n".join(lines) + "\n"


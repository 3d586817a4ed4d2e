"""Encoder versus simulator agreement on a single scenario."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import groupby
from typing import Mapping, Optional, Sequence

from .action_lang import ValueType
from .ccsl import Clock, ClockRelation, Explicit, desugar, encode_clocks, encode_relation
from .smt_encoder import EncodingContext

from .model_ir import SystemModel
from .sim_oracle import simulate
from .smt_encoder import blocking_clause, conj, decode_trace, emit_smtlib, encode_model
from .solver import run_solver


@dataclass
class DiffResult:
    status: str                      # status of the first query
    unique: Optional[bool] = None    # second query with the model blocked was Unsat
    mismatches: list = field(default_factory=list)  # (symbol base, step, solver value, sim value)

    @property
    def ok(self) -> bool:
        return self.status == "Sat" and self.unique is True and not self.mismatches


def compare(model: SystemModel, N: int, pins: Optional[Mapping] = None,
            inputs: Optional[Mapping] = None, solver: Optional[str] = None) -> DiffResult:
    ctx = encode_model(model, N, pins, inputs)
    first = run_solver(emit_smtlib(ctx), solver)
    if first.status != "Sat" or first.assignment is None:
        return DiffResult(first.status)
    solved = decode_trace(ctx, first.assignment)
    trace = simulate(model, N, pins, inputs).symbols()
    out = DiffResult(first.status)
    for base, vals in solved.items():
        sim = trace.get(base)
        if sim is None:
            out.mismatches.append((base, None, vals, None))
            continue
        for i, (a, b) in enumerate(zip(vals, sim)):
            if a != b or isinstance(a, bool) != isinstance(b, bool):
                out.mismatches.append((base, i, a, b))
    for base in trace.keys() - solved.keys():
        out.mismatches.append((base, None, None, trace[base]))
    block = blocking_clause(ctx, first.assignment)
    again = run_solver(emit_smtlib(ctx, conj([block]), "assert", check=False), solver)
    out.unique = again.status == "Unsat"
    return out


def evaluate_on_vectors(instances: Sequence, solver: Optional[str] = None) -> list:
    """Solver-side truth of relations/constraints over explicit tick vectors.

    Each instance is ``(item, ticks)`` with *ticks* mapping clock name to a
    vector; all vectors of one instance share a length. Instances of equal
    length go into one query with one Bool result symbol each.
    """
    results: list = [None] * len(instances)
    order = sorted(range(len(instances)), key=lambda k: len(next(iter(instances[k][1].values()))))
    for n, group in groupby(order, key=lambda k: len(next(iter(instances[k][1].values())))):
        ctx = EncodingContext(n)
        names = {}
        for k in group:
            item, ticks = instances[k]
            rename = {c: f"i{k}_{c}" for c in ticks}
            encode_clocks(ctx, [Clock(rename[c], Explicit(tuple(v))) for c, v in ticks.items()])
            if isinstance(item, ClockRelation):
                goal = encode_relation(ctx, ClockRelation(item.kind, rename[item.left], rename[item.right]))
            else:
                goal = desugar(ctx, replace(item, clocks=tuple(rename[c] for c in item.clocks)))
            res = ctx.declare(f"res{k}", ValueType.Bool, 1)
            ctx.add(f"(= {res[0]} {goal})")
            names[k] = res[0]
        out = run_solver(emit_smtlib(ctx, check=False), solver)
        if out.status != "Sat" or out.assignment is None:
            raise RuntimeError(f"batch query ended {out.status}: {out.raw}")
        for k, sym in names.items():
            results[k] = out.assignment[sym]
    return results

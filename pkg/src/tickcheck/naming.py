"""Base names for per-step vectors, shared by the encoder, the simulator and traces."""

from __future__ import annotations

import re

from .action_lang import ValueType


_UNSAFE = re.compile(r"[^A-Za-z0-9]")


def sanitize(text: str) -> str:
    return _UNSAFE.sub("_", text)


def step_symbol(base: str, i: int) -> str:
    return f"{sanitize(base)}__{i}"


def out_signal(block, k: int = 1) -> str:
    return f"sig_{block.name}_o{k}"


def in_signal(block, k: int = 1) -> str:
    return f"sig_{block.name}_i{k}"


def state_base(chart, sid: int) -> str:
    return "act_" + chart.path(sid)


def var_base(chart, name: str) -> str:
    return f"var_{chart.name}_{name}"


def memory_base(chart, sid: int) -> str:
    return "hist_" + chart.path(sid)


def tick_base(clock_name: str) -> str:
    return f"tick_{clock_name}"


def count_base(clock_name: str) -> str:
    return f"H_{clock_name}"


def resolve_name(model, name: str) -> tuple[str, ValueType]:
    """Map a user-facing signal name to its vector base name and type.

    ``blk`` is out-port 1 of block ``blk`` (the input of an Outport),
    ``blk.oK`` is out-port K and ``chart.var`` is a chart variable.
    """
    if "." in name:
        head, tail = name.split(".", 1)
        for chart in model.charts:
            if chart.name == head:
                for v in chart.variables:
                    if v.name == tail:
                        return var_base(chart, tail), v.type
        m = re.fullmatch(r"o(\d+)", tail)
        if m:
            for b in model.blocks:
                if b.name == head and 1 <= int(m.group(1)) <= b.out_ports:
                    return out_signal(b, int(m.group(1))), model.signal_types[(b.id, int(m.group(1)))]
        raise KeyError(name)
    for b in model.blocks:
        if b.name == name:
            if b.kind == "Outport":
                src = model.driver(b.id, 1)
                return in_signal(b, 1), model.signal_types[src]
            if b.out_ports >= 1:
                return out_signal(b, 1), model.signal_types[(b.id, 1)]
    raise KeyError(name)


def resolve_state(model, path: str):
    """``chart.State.Sub`` -> (chart, state id)."""
    parts = path.split(".")
    chart = next((c for c in model.charts if c.name == parts[0]), None)
    if chart is None or len(parts) < 2:
        raise KeyError(path)
    parent = None
    sid = None
    for part in parts[1:]:
        sid = next((k for k in chart.children(parent) if chart.states[k].name == part), None)
        if sid is None:
            raise KeyError(path)
        parent = sid
    return chart, sid

"""External SMT solver process: SMT-LIB on stdin, answer on stdout."""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from .errors import SolverProtocolError, SolverSpawnError

DEFAULT_SOLVER = "z3 -in -smt2"
STATUSES = {"sat": "Sat", "unsat": "Unsat", "unknown": "Unknown"}


@dataclass
class SolverResult:
    status: str  # Sat | Unsat | Unknown | SolverError
    assignment: Optional[dict] = None
    wall_time: float = 0.0
    raw: str = ""
    peak_rss_kb: Optional[int] = None


def default_command() -> str:
    return os.environ.get("TICKCHECK_SOLVER", DEFAULT_SOLVER)


# -- s-expressions -------------------------------------------------------------

_SEXP_TOKEN = re.compile(r'\s*(?:(\()|(\))|("(?:[^"]|"")*")|(\|[^|]*\|)|([^\s()"|]+))')


def parse_sexprs(text: str) -> list:
    """Parse a sequence of s-expressions into nested lists of atom strings."""
    stack: list = [[]]
    pos = 0
    while True:
        m = _SEXP_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise SolverProtocolError(f"cannot parse solver output near {text[pos:pos + 30]!r}")
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise SolverProtocolError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(m.group(3) or m.group(4) or m.group(5))
    if len(stack) != 1:
        raise SolverProtocolError("unbalanced '(' in solver output")
    return stack[0]


def _number(atom) -> Fraction:
    if isinstance(atom, str):
        try:
            return Fraction(Decimal(atom))
        except Exception:
            raise SolverProtocolError(f"not a number: {atom!r}") from None
    if len(atom) == 2 and atom[0] == "-":
        return -_number(atom[1])
    if len(atom) == 3 and atom[0] == "/":
        return _number(atom[1]) / _number(atom[2])
    if len(atom) == 2 and atom[0] == "to_real":
        return _number(atom[1])
    raise SolverProtocolError(f"unsupported value term {atom!r}")


def sexpr_value(term, sort: str):
    if sort == "Bool":
        if term not in ("true", "false"):
            raise SolverProtocolError(f"bad Bool value {term!r}")
        return term == "true"
    v = _number(term)
    if sort == "Int":
        if v.denominator != 1:
            raise SolverProtocolError(f"non-integral Int value {term!r}")
        return int(v)
    return v


def _model_entries(forms) -> Optional[dict]:
    if not forms:
        return None
    body = forms[0]
    if not isinstance(body, list):
        raise SolverProtocolError(f"unexpected model text {body!r}")
    if body and body[0] == "error":
        return None
    if body and body[0] == "model":
        body = body[1:]
    out = {}
    for entry in body:
        if not (isinstance(entry, list) and len(entry) == 5 and entry[0] == "define-fun" and entry[2] == []):
            raise SolverProtocolError(f"unsupported model entry {entry!r}")
        name = entry[1].strip("|")
        out[name] = sexpr_value(entry[4], entry[3])
    return out


def parse_solver_output(text: str) -> SolverResult:
    """Map raw solver stdout to a SolverResult; first line is the status."""
    stripped = text.lstrip()
    first, _, rest = stripped.partition("\n")
    first = first.strip()
    if first not in STATUSES:
        raise SolverProtocolError(f"unexpected solver answer {first!r}")
    status = STATUSES[first]
    assignment = None
    if status == "Sat" and rest.strip():
        assignment = _model_entries(parse_sexprs(rest))
    return SolverResult(status, assignment, raw=text[:400])


def run_solver(script: str, command: Optional[str] = None, timeout: Optional[float] = None) -> SolverResult:
    """One solver process per query; measures wall time and the child's peak RSS."""
    argv = shlex.split(command or default_command())
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                stderr=subprocess.STDOUT)
    except OSError as exc:
        raise SolverSpawnError(f"cannot start solver {argv[0]!r}: {exc}") from None

    def feed():
        try:
            proc.stdin.write(script.encode())
            proc.stdin.close()
        except (BrokenPipeError, OSError):
            pass

    writer = threading.Thread(target=feed, daemon=True)
    writer.start()
    timer = threading.Timer(timeout, proc.kill) if timeout else None
    if timer:
        timer.start()
    output = proc.stdout.read().decode(errors="replace")
    writer.join()
    try:
        _, status, usage = os.wait4(proc.pid, 0)
        proc.returncode = os.waitstatus_to_exitcode(status)
        peak = usage.ru_maxrss
    except ChildProcessError:
        proc.wait()
        peak = None
    if timer:
        timer.cancel()
    elapsed = time.perf_counter() - start
    if output.lstrip().startswith("(error"):
        return SolverResult("SolverError", None, elapsed, output[:400], peak)
    if not output.strip():
        return SolverResult("SolverError", None, elapsed, f"solver exited with {proc.returncode} and no output", peak)
    result = parse_solver_output(output)
    result.wall_time = elapsed
    result.peak_rss_kb = peak
    return result

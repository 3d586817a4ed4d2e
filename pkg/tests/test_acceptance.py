"""Acceptance criteria for the toolchain, one test per criterion.

Each test is tagged with ``criterion``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from tickcheck.ccsl import CONSTRAINT_KINDS, RELATION_KINDS, ClockRelation, TimingConstraint, check_on_trace
from tickcheck.differential import compare, evaluate_on_vectors
from tickcheck.errors import ParseError
from tickcheck.mdl_parser import parse, print_document
from tickcheck.model_ir import load_model
from tickcheck.scenario import sample_scenario
from tickcheck.sim_oracle import Trace
from tickcheck.verifier import VALID, INVALID, VerificationTask, verify

from conftest import DIFF_MODELS, FIXTURES, needs_solver

SEVEN = {"EndToEnd", "Periodic", "Sporadic", "Execution", "Synchronization", "Comparison", "Exclusion"}


@needs_solver
@pytest.mark.slow
@pytest.mark.criterion("seven-constraint fixture run")
def test_mini_cas_probabilistic(record_property):
    task = VerificationTask(str(FIXTURES / "mini_cas.mdl"), str(FIXTURES / "mini_cas.tcs"),
                            bound=300, runs=100, seed=42, threshold=Fraction(95, 100))
    start = time.perf_counter()
    report = verify(task)
    elapsed = time.perf_counter() - start
    results = {v.kind: v.result for v in report.verdicts}
    record_property("detail", f"{sum(r == VALID for r in results.values())}/7 valid in {elapsed:.0f} s")
    assert set(results) == SEVEN
    assert all(r == VALID for r in results.values()), results
    assert elapsed < 600


@needs_solver
@pytest.mark.criterion("deterministic validity")
def test_mini_cas_deterministic(record_property):
    task = VerificationTask(str(FIXTURES / "mini_cas_det.mdl"), str(FIXTURES / "mini_cas.tcs"),
                            bound=100, mode="det")
    report = verify(task)
    slowest = max(v.wall_time_ms for v in report.verdicts) / 1000
    record_property("detail", f"slowest query {slowest:.2f} s")
    assert {v.kind for v in report.verdicts} == SEVEN
    assert [v.result for v in report.verdicts] == [VALID] * 7
    assert slowest < 30


def _inputs(model, N, rng):
    out = {}
    for b in model.inports():
        if b.params["type"].value == "Int":
            out[b.name] = [rng.randint(-5, 5) for _ in range(N)]
        else:
            out[b.name] = [Fraction(rng.randint(-40, 100), 4) for _ in range(N)]
    return out


@needs_solver
@pytest.mark.criterion("encoder-simulator differential")
def test_differential(record_property):
    rng = random.Random(42)
    kinds, failures, checked = set(), [], 0
    for name in DIFF_MODELS:
        model = load_model(FIXTURES / f"{name}.mdl")
        kinds.update(b.kind for b in model.blocks)
        for N in (1, 2, 10, 50):
            pins = sample_scenario(model, N, 42, 0).pins if model.random_sources() else None
            r = compare(model, N, pins, _inputs(model, N, rng))
            checked += 1
            if not r.ok:
                failures.append((name, N, r.status, r.unique, r.mismatches[:3]))
    record_property("detail", f"{checked - len(failures)}/{checked} model-bound pairs agree")
    assert len(DIFF_MODELS) >= 8
    assert kinds >= {"Constant", "Gain", "Sum", "Product", "RelationalOperator", "LogicalOperator", "Switch",
                     "UnitDelay", "Inport", "Outport", "RandomSource", "Chart"}
    assert not failures, failures


@needs_solver
@pytest.mark.criterion("clock relation oracle equivalence")
def test_relations_exhaustive(record_property):
    vecs = [list(v) for v in itertools.product([False, True], repeat=6)]
    pairs = [(a, b) for a in vecs for b in vecs]
    assert len(pairs) == 4096
    disagreements = 0
    scan = {}
    for kind in RELATION_KINDS:
        cases = [(ClockRelation(kind, "a", "b"), {"a": a, "b": b}) for a, b in pairs]
        for (rel, ticks), got in zip(cases, evaluate_on_vectors(cases)):
            want = check_on_trace(Trace(6, ticks=ticks), rel)
            scan[(kind, tuple(ticks["a"]), tuple(ticks["b"]))] = want
            disagreements += got != want
    laws = all(
        (not scan[("Precedence", tuple(a), tuple(b))] or scan[("Causality", tuple(a), tuple(b))])
        and scan[("Exclusion", tuple(a), tuple(b))] == scan[("Exclusion", tuple(b), tuple(a))]
        for a, b in pairs)
    record_property("detail", f"{disagreements} disagreements over {5 * 4096} cases")
    assert disagreements == 0
    assert laws


def _random_instance(kind, rng):
    n = rng.randint(1, 30)
    density = rng.choice([0.1, 0.3, 0.5, 0.8])
    vec = lambda: [rng.random() < density for _ in range(n)]
    if kind == "Periodic":
        period = rng.randint(1, 6)
        tc = TimingConstraint("c", kind, ("a",), {"period": period, "jitter": rng.randint(0, period - 1)})
        # mostly near-periodic vectors so both outcomes occur
        if rng.random() < 0.6:
            a, t = [False] * n, rng.randint(0, 3)
            while t < n:
                a[t] = True
                t += max(1, period + rng.randint(-1, 1) * (rng.random() < 0.3))
            return tc, {"a": a}
        return tc, {"a": vec()}
    if kind == "Sporadic":
        return TimingConstraint("c", kind, ("a",), {"minGap": rng.randint(0, 6)}), {"a": vec()}
    if kind in ("EndToEnd", "Execution"):
        lo = rng.randint(0, 4)
        tc = TimingConstraint("c", kind, ("a", "b"), {"lower": lo, "upper": lo + rng.randint(0, 4)})
        a = vec()
        if rng.random() < 0.6:
            b = [False] * n
            for i in (i for i, t in enumerate(a) if t):
                j = i + rng.randint(0, 6)
                if j < n:
                    b[j] = True
            return tc, {"a": a, "b": b}
        return tc, {"a": a, "b": vec()}
    if kind == "Synchronization":
        names = ("a", "b", "c")[: rng.randint(2, 3)]
        tc = TimingConstraint("c", kind, names, {"window": rng.randint(0, 3)})
        return tc, {c: vec() for c in names}
    if kind == "Comparison":
        tc = TimingConstraint("c", kind, ("a", "b"), {"relation": rng.choice(["precedes", "causes"])})
        a = vec()
        b = [False] + a[:-1] if rng.random() < 0.5 else vec()
        return tc, {"a": a, "b": b}
    a = vec()
    return TimingConstraint("c", kind, ("a", "b"), {}), {"a": a, "b": [not x and rng.random() < 0.5 for x in a]
                                                           if rng.random() < 0.5 else vec()}


@needs_solver
@pytest.mark.criterion("constraint desugaring oracle")
def test_desugar_oracle(record_property):
    rng = random.Random(2024)
    instances = [_random_instance(kind, rng) for kind in CONSTRAINT_KINDS for _ in range(1000)]
    got = evaluate_on_vectors(instances)
    bad, balance = [], {k: [0, 0] for k in CONSTRAINT_KINDS}
    for (tc, ticks), g in zip(instances, got):
        want = check_on_trace(Trace(len(ticks["a"]), ticks=ticks), tc)
        balance[tc.kind][want] += 1
        if g != want:
            bad.append((tc, ticks, g, want))
    record_property("detail", f"{len(bad)} disagreements over {len(instances)} instances")
    assert not bad, bad[:3]
    # every kind sees both satisfied and violated instances
    assert all(f > 0 and t > 0 for f, t in balance.values()), balance


@needs_solver
@pytest.mark.slow
@pytest.mark.criterion("probabilistic decision sanity")
def test_probabilistic_sanity(record_property):
    counts = {}
    for name, want in (("prob_q02", VALID), ("prob_q20", INVALID)):
        hits = 0
        for seed in range(20):
            task = VerificationTask(str(FIXTURES / f"{name}.mdl"), str(FIXTURES / "prob.tcs"),
                                    bound=10, runs=200, seed=seed, threshold=Fraction(95, 100))
            hits += verify(task).verdicts[0].result == want
        counts[name] = hits
    record_property("detail", f"q=0.02: {counts['prob_q02']}/20 valid, q=0.20: {counts['prob_q20']}/20 invalid")
    assert counts["prob_q02"] >= 18
    assert counts["prob_q20"] >= 18


def _cli_report(tmp_path, tag):
    out = tmp_path / f"{tag}.json"
    cmd = [sys.executable, "-m", "tickcheck.cli", "verify", str(FIXTURES / "mini_cas.mdl"),
           str(FIXTURES / "mini_cas.tcs"), "-N", "60", "-M", "5", "--seed", "42", "--format", "json",
           "--out", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode in (0, 1, 2), proc.stderr
    assert proc.stdout == out.read_text()
    return b"".join(line for line in out.read_bytes().splitlines(keepends=True) if b'"wall_time_ms"' not in line)


@needs_solver
@pytest.mark.criterion("reproducibility")
def test_reproducible_reports(tmp_path, record_property):
    first = _cli_report(tmp_path, "a")
    second = _cli_report(tmp_path, "b")
    record_property("detail", f"{len(first)} bytes compared")
    assert json.loads(first)["verdicts"]
    assert first == second


def _mutate(text, rng):
    chars = list(text)
    for _ in range(rng.randint(1, 4)):
        op = rng.randrange(5)
        i = rng.randrange(len(chars) + 1)
        if op == 0 and chars:
            del chars[min(i, len(chars) - 1)]
        elif op == 1:
            chars.insert(i, rng.choice('{}"\\ \n\tABZaz09.-_#;()[]\x00é'))
        elif op == 2 and chars:
            chars[min(i, len(chars) - 1)] = rng.choice('{}" \n0x')
        elif op == 3:
            j = rng.randrange(len(chars) + 1)
            lo, hi = sorted((i, j))
            chars[lo:lo] = chars[lo:min(hi, lo + 40)]
        else:
            del chars[i:i + rng.randint(1, 60)]
    return "".join(chars)


@pytest.mark.criterion("parser round-trip and fuzzing")
def test_parser_round_trip_and_fuzz(record_property):
    files = sorted(FIXTURES.glob("*.mdl"))
    texts = [f.read_text() for f in files]
    for f, text in zip(files, texts):
        tree = parse(text)
        assert parse(print_document(tree)).structurally_equal(tree), f.name
    rng = random.Random(7)
    rejected = 0
    for _ in range(10_000):
        try:
            parse(_mutate(rng.choice(texts), rng))
        except ParseError:
            rejected += 1
    record_property("detail", f"{len(files)} files round-trip; {rejected}/10000 mutants rejected cleanly")

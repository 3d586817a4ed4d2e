from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tickcheck.ccsl import Clock, Entered, Every, Explicit, Rising
from tickcheck.action_lang import parse_expr
from tickcheck.errors import ClockUndefinedOnTrace, DivisionByZero, MissingPin
from tickcheck.mdl_parser import parse
from tickcheck.model_ir import elaborate, load_model
from tickcheck.scenario import sample_scenario
from tickcheck.sim_oracle import derive_ticks, render_value, simulate

from conftest import FIXTURES

GAIN = """Model { System {
  Block { id 1 BlockType Inport Name "u" Port 1 }
  Block { id 2 BlockType Gain Name "g" Gain "2.5" }
  Block { id 3 BlockType Outport Name "y" Port 1 }
  Line { SrcBlock 1 DstBlock 2 } Line { SrcBlock 2 DstBlock 3 } } }"""


def test_counter_wraps():
    m = load_model(FIXTURES / "counter.mdl")
    t = simulate(m, 6)
    assert t.value("prev", m) == [0, 1, 2, 3, 0, 1]
    assert t.value("cnt", m) == [1, 2, 3, 0, 1, 2]


def test_toggle_activity():
    m = load_model(FIXTURES / "toggle.mdl")
    t = simulate(m, 4)
    assert t.activity("tog.A", m) == [1, 0, 1, 0]
    assert t.activity("tog.B", m) == [0, 1, 0, 1]
    assert t.value("tog.n", m) == [1, 1, 2, 2]


def test_gain_on_inputs():
    m = elaborate(parse(GAIN))
    t = simulate(m, 2, inputs={"u": [1, 2]})
    assert t.value("g", m) == [Fraction(5, 2), 5]


def test_history_resumes_child():
    m = load_model(FIXTURES / "hierarchy.mdl")
    t = simulate(m, 30)
    slow, fast = t.activity("hc.Run.Slow", m), t.activity("hc.Run.Fast", m)
    run = t.activity("hc.Run", m)
    for i in range(1, 30):
        assert run[i] == slow[i] + fast[i]
        if run[i] and not run[i - 1]:
            # re-entry resumes the child that was active when Run was left
            j = max(k for k in range(i) if run[k])
            assert (slow[i], fast[i]) == (slow[j], fast[j])


def test_division_is_euclidean():
    m = load_model(FIXTURES / "division.mdl")
    t = simulate(m, 3)
    assert t.value("dv.q", m)[1] == -3  # -7 / 3


def test_division_by_zero_raises():
    text = """Model { System { Block { id 1 BlockType Chart Name "c" ChartId 1 } }
      Stateflow { chart { id 1 data { id 1 Name "x" DataType Int InitialValue 0 }
        state { id 1 Name "A" Default 1 DuringAction "x = 1 / x;" } } } }"""
    m = elaborate(parse(text))
    with pytest.raises(DivisionByZero) as exc:
        simulate(m, 3)
    assert exc.value.step == 1


def test_missing_pin():
    m = load_model(FIXTURES / "random.mdl")
    with pytest.raises(MissingPin):
        simulate(m, 3, pins={})


def test_random_pins_drive_values():
    m = load_model(FIXTURES / "random.mdl")
    pins = sample_scenario(m, 5, 7, 0).pins
    a, b = simulate(m, 5, pins), simulate(m, 5, pins)
    assert a.symbols() == b.symbols()


def test_derive_ticks():
    m = load_model(FIXTURES / "toggle.mdl")
    t = simulate(m, 7)
    derive_ticks(t, [
        Clock("e", Every(3)),
        Clock("o", Every(2, 1)),
        Clock("a", Entered("tog.A")),
        Clock("r", Rising(parse_expr("tog.n > 2"))),
        Clock("x", Explicit((1, 0, 0, 1, 0, 0, 1))),
    ], m)
    assert t.ticks["e"] == [True, False, False, True, False, False, True]
    assert t.ticks["o"] == [False, True, False, True, False, True, False]
    assert t.ticks["a"] == [True, False, True, False, True, False, True]
    assert t.ticks["r"] == [False, False, False, False, True, False, False]
    assert t.ticks["x"] == t.ticks["e"]


def test_rising_over_values():
    text = """Model { System { Block { id 1 BlockType Inport Name "x" Port 1 OutDataType Int } } }"""
    m = elaborate(parse(text))
    t = simulate(m, 3, inputs={"x": [-1, 3, 4]})
    derive_ticks(t, [Clock("r", Rising(parse_expr("x > 0")))], m)
    assert t.ticks["r"] == [False, True, False]


def test_entered_always_active():
    text = """Model { System { Block { id 1 BlockType Chart Name "c" ChartId 1 } }
      Stateflow { chart { id 1 state { id 1 Name "A" Default 1 } } } }"""
    m = elaborate(parse(text))
    t = simulate(m, 4)
    derive_ticks(t, [Clock("a", Entered("c.A"))], m)
    assert t.ticks["a"] == [True, False, False, False]


def test_unknown_clock_source():
    m = load_model(FIXTURES / "counter.mdl")
    t = simulate(m, 2)
    with pytest.raises(ClockUndefinedOnTrace):
        derive_ticks(t, [Clock("z", Rising(parse_expr("nope > 0")))], m)


def test_csv_header_and_values():
    m = load_model(FIXTURES / "toggle.mdl")
    t = simulate(m, 2)
    lines = t.to_csv().splitlines()
    assert lines[0].split(",")[0] == "step"
    assert len(lines) == 3
    assert render_value(Fraction(1, 3)) == "1/3" and render_value(True) == "true"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=20))
def test_gain_linear(xs):
    m = elaborate(parse(GAIN))
    t = simulate(m, len(xs), inputs={"u": xs})
    assert t.value("g", m) == [Fraction(5, 2) * x for x in xs]

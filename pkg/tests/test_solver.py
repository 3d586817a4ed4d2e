from fractions import Fraction

import pytest

from tickcheck.errors import SolverProtocolError, SolverSpawnError
from tickcheck.solver import parse_sexprs, parse_solver_output, run_solver, sexpr_value

from conftest import needs_solver


def test_parse_sat_with_model():
    text = """sat
(
  (define-fun x__0 () Int (- 3))
  (define-fun r__0 () Real (/ 1.0 4.0))
  (define-fun b__0 () Bool true)
  (define-fun s__0 () Real (- (/ 5.0 2.0)))
)
"""
    r = parse_solver_output(text)
    assert r.status == "Sat"
    assert r.assignment == {"x__0": -3, "r__0": Fraction(1, 4), "b__0": True, "s__0": Fraction(-5, 2)}


@pytest.mark.parametrize("text, status", [("unsat\n", "Unsat"), ("unknown\n", "Unknown"), ("sat\n", "Sat")])
def test_status_lines(text, status):
    r = parse_solver_output(text)
    assert r.status == status and r.assignment is None


@pytest.mark.parametrize("text", ["timeout\n", "", "(error \"x\")\n", "sat\n((define-fun x () Int 1)"])
def test_protocol_errors(text):
    with pytest.raises(SolverProtocolError):
        parse_solver_output(text)


def test_sexpr_values():
    assert sexpr_value("7", "Int") == 7
    assert sexpr_value("2.5", "Real") == Fraction(5, 2)
    assert sexpr_value(["-", "0.5"], "Real") == Fraction(-1, 2)
    with pytest.raises(SolverProtocolError):
        sexpr_value("1.5", "Int")
    with pytest.raises(SolverProtocolError):
        sexpr_value("maybe", "Bool")
    assert parse_sexprs('(a (b "c d") |e f|)') == [["a", ["b", '"c d"'], "|e f|"]]


def test_spawn_failure():
    with pytest.raises(SolverSpawnError):
        run_solver("(check-sat)\n", "no-such-solver-binary")


@needs_solver
def test_round_trip_with_solver():
    script = "(declare-const x__0 Int)\n(assert (= (* 2 x__0) (- 6)))\n(check-sat)\n(get-model)\n"
    r = run_solver(script)
    assert r.status == "Sat" and r.assignment == {"x__0": -3}
    assert r.wall_time > 0
    assert run_solver("(assert false)\n(check-sat)\n").status == "Unsat"


@needs_solver
def test_solver_error_reported():
    assert run_solver("(assert undeclared)\n(check-sat)\n").status == "SolverError"

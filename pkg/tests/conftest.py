import shutil
import shlex
from pathlib import Path

import pytest

from tickcheck.solver import default_command

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# Models used by the encoder/simulator differential and the round-trip checks.
DIFF_MODELS = ["toggle", "counter", "arith", "logic", "hierarchy", "division", "chart_io", "random", "mini_cas"]


def solver_available() -> bool:
    return shutil.which(shlex.split(default_command())[0]) is not None


needs_solver = pytest.mark.skipif(not solver_available(), reason="SMT solver not on PATH")


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


# -- acceptance reporting --------------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and rep.when == "call":
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _ACCEPTANCE.append((marker.args[0], "PASS" if rep.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name, status, detail in _ACCEPTANCE:
            terminalreporter.write_line(f"{status} {name}" + (f" ({detail})" if detail else ""))

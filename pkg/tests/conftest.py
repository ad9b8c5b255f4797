from pathlib import Path

import pytest

from forlog.engine import Machine
from forlog.reader import parse_goal, parse_program
from forlog.terms import Program
from forlog.translate import format_term

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
GOLDEN = Path(__file__).resolve().parent / "golden"

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion checked by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        previous = _criteria.get(n, (text, "PASS"))[1]
        status = "PASS" if report.passed and previous == "PASS" else "FAIL"
        _criteria[n] = (text, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, status = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")


def load_program(*names: str) -> Program:
    clauses = []
    for name in names:
        clauses += parse_program((PROGRAMS / name).read_text(), origin=name).clauses
    return Program(clauses)


def program_from(source: str) -> Program:
    return Program(parse_program(source).clauses)


def run(source_or_program, query: str, inp: str = "", **kw):
    """(answers as {name: source text}, output) for `query`."""
    program = (
        source_or_program
        if isinstance(source_or_program, Program)
        else program_from(source_or_program)
    )
    max_solutions = kw.pop("max_solutions", None)
    m = Machine(program, inp=inp, **kw)
    solutions, output = m.run(parse_goal(query), max_solutions)
    return [{k: format_term(v) for k, v in s.answer.items()} for s in solutions], output


@pytest.fixture
def factorial():
    return load_program("factorial.fl")

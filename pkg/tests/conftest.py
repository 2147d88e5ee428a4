import itertools

import pytest
from hypothesis import settings

from pbmc import parse_formula

settings.register_profile("default", deadline=None, max_examples=150)
settings.load_profile("default")

THRESHOLD = "* #variable= 3 #constraint= 1\n+2 x1 +1 x2 +1 x3 >= 2 ;\n"

ACCEPTANCE_LINES = []


@pytest.fixture
def threshold():
    return parse_formula(THRESHOLD)


@pytest.fixture
def report():
    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
        return ok
    return record


def assignments(vars_):
    """All assignments over ``vars_`` as dicts."""
    vars_ = sorted(vars_)
    for bits in itertools.product((0, 1), repeat=len(vars_)):
        yield dict(zip(vars_, bits))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from lassopath import ProblemInstance

ACCEPTANCE_LINES = []


def random_instance(seed, n=30, p=10):
    rng = np.random.default_rng(seed)
    return ProblemInstance(rng.standard_normal(n), rng.standard_normal((n, p)))


@pytest.fixture
def unit():
    """The one-dimensional instance y = [1], X = [1]."""
    return ProblemInstance(np.array([1.0]), np.array([[1.0]]))


@pytest.fixture
def accept(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    A test that raises before recording is reported as FAIL.
    """
    state = {}

    def record(number, ok, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        state["line"] = line
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    yield record
    if "line" not in state:
        ACCEPTANCE_LINES.append(f"ACCEPTANCE {request.node.name}: FAIL - raised before completion")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)


def _criterion_key(line):
    token = line.split()[1].rstrip(":")
    return (0, int(token)) if token.isdigit() else (1, token)

import pytest

from mdgraph.experiments import load_zachary
from mdgraph.graph import Graph

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record a criterion verdict for the end-of-run table, then assert it."""

    def record(criterion: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}")
        assert ok, f"{criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def zachary():
    return load_zachary()


@pytest.fixture
def p4():
    return Graph.path(4)


@pytest.fixture
def k4():
    return Graph.complete(4)

import pytest

from stedi.hypergraph import TripleSystem

# The seven lines of the Fano plane on points 1..7, shifted to 0..6.
FANO_LINES = [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]


@pytest.fixture
def fano():
    return TripleSystem(7, [(a - 1, b - 1, c - 1) for a, b, c in FANO_LINES])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from rimcheck.exactmat import IntMatrix

DELTA4 = [[1, 0, 0, 0, 0], [1, 1, 0, 0, 0], [0, 1, 1, 0, 0], [1, 1, 1, 1, 0], [1, 0, 0, 1, 1]]
DELTA5 = [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [1, 1, 1, 0, 0], [0, 1, 1, 1, 0], [1, 0, 1, 0, 1]]
# products as printed alongside the two matrices above
CARTAN4 = [[4, 2, 1, 2, 1], [2, 3, 2, 1, 0], [1, 2, 2, 1, 0], [2, 1, 1, 2, 1], [1, 0, 0, 1, 1]]
CARTAN5 = [[3, 1, 2, 0, 1], [1, 3, 2, 1, 0], [2, 2, 3, 1, 1], [0, 1, 1, 1, 0], [1, 0, 1, 0, 1]]


@pytest.fixture
def delta4():
    return IntMatrix.from_rows(DELTA4)


@pytest.fixture
def delta5():
    return IntMatrix.from_rows(DELTA5)


# One line per acceptance criterion, printed after the test run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

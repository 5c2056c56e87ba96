import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ejlogic.syntax import Signature, parse_formula, parse_term  # noqa: E402

SIG = Signature(["d", "d1", "d2"], ["c", "c0", "c1", "c2"])

ACCEPTANCE_LINES = []


@pytest.fixture
def sig():
    return SIG


@pytest.fixture
def P():
    return lambda text: parse_formula(text, SIG)


@pytest.fixture
def T():
    return lambda text: parse_term(text, SIG)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

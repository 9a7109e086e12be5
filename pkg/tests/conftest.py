import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import CRITERIA, four_regular_multigraphs, regular_corpus  # noqa: E402

@pytest.fixture(scope="session")
def corpus():
    return regular_corpus()


@pytest.fixture(scope="session")
def small_four_regular():
    return four_regular_multigraphs(6)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

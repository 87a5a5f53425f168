from __future__ import annotations

import pytest

from ftoracle.graph_core import Graph

# acceptance tests append "criterion N: PASS|FAIL ..." lines here
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def triangle() -> Graph:
    # s-a (2), a-b (1), s-b (5)
    return Graph.from_triples(3, [(0, 1, 2.0), (1, 2, 1.0), (0, 2, 5.0)], source=0)


@pytest.fixture
def four_cycle() -> Graph:
    # s=0, a=1, t=2, b=3
    return Graph.from_triples(4, [(0, 1, 1.0), (1, 2, 1.0), (0, 3, 1.0), (3, 2, 1.0)], source=0)


@pytest.fixture
def abc() -> Graph:
    # ab(1), bc(2), ac(3)
    return Graph.from_triples(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])

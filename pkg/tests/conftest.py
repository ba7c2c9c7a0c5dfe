import pytest

from treeflip.geometry import PointSet
from treeflip.trees import Tree


QUAD = [(0, 0), (4, 1), (5, 4), (1, 5)]


@pytest.fixture
def quad():
    return PointSet.from_coords(QUAD)


def tree(ps, *pairs):
    """Tree from 1-based vertex pairs, e.g. tree(ps, (1, 2), (2, 3))."""
    return Tree(ps, [(a - 1, b - 1) for a, b in pairs])


def star1(ps):
    return Tree(ps, [(0, k) for k in range(1, ps.n)])


def star_at(ps, c):
    return Tree(ps, [(c, k) for k in range(ps.n) if k != c])


# acceptance criteria report one line each; shown in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

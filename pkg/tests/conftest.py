import copy

import pytest
from hypothesis import strategies as st

from hrnflow.builtin_scenarios import THREE_CYCLE
from hrnflow.dataflow import MarginProfile
from hrnflow.persistence import INF, ErrorDiagram


@pytest.fixture
def three_cycle_doc():
    return copy.deepcopy(THREE_CYCLE)


@pytest.fixture
def reference_profile():
    # thetas (7, 0, 3) against desired outputs (1, 2, 3)
    return MarginProfile(((0, 6), (2, 0), (0, 0)))


@st.composite
def hrn_shapes(draw, max_m=4, max_k=7):
    m = draw(st.integers(1, max_m))
    lengths = draw(st.lists(st.integers(3, max_k), min_size=m, max_size=m))
    return m, lengths


@st.composite
def diagrams(draw, max_points=5, span=8, allow_inf=True):
    pts = []
    for _ in range(draw(st.integers(0, max_points))):
        b = draw(st.integers(0, span))
        if allow_inf and draw(st.booleans()) and draw(st.booleans()):
            pts.append((b, INF, 1))
        else:
            pts.append((b, b + draw(st.integers(1, span)), 1))
    return ErrorDiagram.from_points(pts)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

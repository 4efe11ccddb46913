import sys

import pytest

from satdisco.graph import MixedGraph
from satdisco.sat import pysat_available

BACKENDS = ["embedded"] + (["minisat"] if pysat_available() else [])


@pytest.fixture
def collider_graph():
    return MixedGraph.from_edges("x y z w".split(), [("x", "z"), ("y", "z"), ("z", "w")])


@pytest.fixture
def chain():
    return MixedGraph.from_edges("x y z".split(), [("x", "y"), ("y", "z")])


@pytest.fixture(params=BACKENDS)
def backend_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

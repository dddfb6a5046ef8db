import numpy as np
import pytest

from poakit.mmspace import (FiniteMetricSpace, build_graph_metric, cycle_graph, path_graph,
                            uniform_measure)


@pytest.fixture
def two_point():
    return FiniteMetricSpace([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def path3():
    g = path_graph(3)
    return build_graph_metric(g), g


@pytest.fixture
def cycle4():
    g = cycle_graph(4)
    return build_graph_metric(g), g


@pytest.fixture
def line101():
    g = path_graph(101, 0.01)
    return build_graph_metric(g), g, uniform_measure(101)


def euclidean_space(pts):
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return FiniteMetricSpace(np.linalg.norm(pts[:, None] - pts[None], axis=-1))


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {status}  {detail}")

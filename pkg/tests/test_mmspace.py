import numpy as np
import pytest

from poakit.errors import AllZeroMass, DisconnectedGraph, NegativeMass, NonPositiveWeight
from poakit.mmspace import (WeightedGraph, build_graph_metric, normalize_measure,
                            random_connected_graph, random_tree, validate_metric)


def relaxation_oracle(g):
    """Bellman-Ford style all-pairs relaxation, independent of scipy."""
    D = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(D, 0.0)
    for _ in range(g.n):
        changed = False
        for s in range(g.n):
            for i, j, w in g.edges:
                for a, b in ((i, j), (j, i)):
                    if D[s, a] + w < D[s, b]:
                        D[s, b] = D[s, a] + w
                        changed = True
        if not changed:
            break
    return D


def test_path_graph_metric(path3):
    X, _ = path3
    np.testing.assert_array_equal(X.dist, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert X.diameter == 2


def test_single_edge():
    X = build_graph_metric(WeightedGraph(2, ((0, 1, 3.0),)))
    assert X.dist[0, 1] == 3 and X.diameter == 3


def test_cycle_opposite_corners(cycle4):
    X, _ = cycle4
    assert X.dist[0, 2] == 2 and X.dist[1, 3] == 2 and X.dist[0, 1] == 1


def test_disconnected_and_bad_weight():
    with pytest.raises(DisconnectedGraph):
        build_graph_metric(WeightedGraph(3, ((0, 1, 1.0),)))
    with pytest.raises(NonPositiveWeight):
        WeightedGraph(2, ((0, 1, 0.0),))
    with pytest.raises(NonPositiveWeight):
        WeightedGraph(2, ((0, 1, -1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 1, 1.0), (1, 0, 2.0)))


@pytest.mark.parametrize("seed", range(8))
def test_graph_metric_properties(seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(int(rng.integers(2, 30)), 10, rng)
    X = build_graph_metric(g)
    fw = build_graph_metric(g, method="floyd-warshall")
    np.testing.assert_allclose(X.dist, fw.dist, rtol=0, atol=1e-12)
    np.testing.assert_allclose(X.dist, relaxation_oracle(g), atol=1e-12)
    assert validate_metric(X.dist).ok
    for i, j, w in g.edges:
        assert X.dist[i, j] <= w
    assert X.diameter == X.dist.max()


def test_validate_metric_reports():
    assert validate_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]]).ok
    rep = validate_metric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert rep.triangle[:3] == (0, 1, 2) and rep.triangle[3] == pytest.approx(3)
    rep = validate_metric([[0, 1], [2, 0]])
    assert rep.symmetry and rep.symmetry[0][:2] == (0, 1)
    rep = validate_metric([[1, 1], [1, 0]])
    assert rep.diagonal == [(0, 1.0)]


def test_normalize_measure():
    np.testing.assert_allclose(normalize_measure([1, 1, 1, 1]).weights, [0.25] * 4)
    np.testing.assert_allclose(normalize_measure([3, 1]).weights, [0.75, 0.25])
    assert abs(normalize_measure([0.1, 0.7, 2.2]).weights.sum() - 1) < 1e-12
    with pytest.raises(AllZeroMass):
        normalize_measure([0, 0])
    with pytest.raises(NegativeMass):
        normalize_measure([1, -1])


def test_random_tree_is_tree():
    g = random_tree(40, np.random.default_rng(0))
    assert len(g.edges) == 39 and g.connected

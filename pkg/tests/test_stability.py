import numpy as np
import pytest

from poakit.errors import MissingDistance, NotSurjective, UncertifiedObservable
from poakit.mmspace import (FiniteMetricSpace, build_graph_metric, dirac, normalize_measure,
                            random_connected_graph, random_tree, uniform_measure)
from poakit.solver import SolverConfig, solve_poa
from poakit.stability import (consistency_trend, correspondence_distortion,
                              covariance_stability_audit, default_family, empirical_sample,
                              functional_hausdorff, mean_stability_audit, wasserstein1,
                              wasserstein1_dual)

from conftest import euclidean_space


def w1_on_line(x, a, b):
    """Closed form on the real line: integral of |F_a - F_b|."""
    order = np.argsort(x)
    x, a, b = x[order], a[order], b[order]
    cdf_gap = np.cumsum(a - b)[:-1]
    return float(np.sum(np.abs(cdf_gap) * np.diff(x)))


def test_w1_examples(two_point):
    v, plan = wasserstein1(two_point, [1, 0], [0, 1])
    assert v == 1 and plan.plan[0, 1] == 1
    assert wasserstein1(two_point, [0.3, 0.7], [0.3, 0.7])[0] == pytest.approx(0, abs=1e-12)
    v, plan = wasserstein1(two_point, [0.75, 0.25], [0.25, 0.75])
    assert v == pytest.approx(0.5, abs=1e-9)
    np.testing.assert_allclose(plan.plan.sum(axis=1), [0.75, 0.25], atol=1e-9)
    np.testing.assert_allclose(plan.plan.sum(axis=0), [0.25, 0.75], atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_w1_against_line_formula_and_dual(seed):
    rng = np.random.default_rng(seed)
    x = rng.random(9) * 5
    X = euclidean_space(x)
    a, b = rng.dirichlet(np.ones(9)), rng.dirichlet(np.ones(9))
    a[rng.integers(9)] = 0
    a /= a.sum()
    v, plan = wasserstein1(X, a, b)
    assert v == pytest.approx(w1_on_line(x, a, b), abs=1e-9)
    assert v == pytest.approx(wasserstein1_dual(X, a, b), abs=1e-9)
    assert v == pytest.approx(plan.cost)
    assert (plan.plan >= 0).all()


@pytest.mark.parametrize("seed", range(6))
def test_w1_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    X = build_graph_metric(random_connected_graph(10, 6, rng))
    a, b, c = (rng.dirichlet(np.ones(10)) for _ in range(3))
    ab, ba = wasserstein1(X, a, b)[0], wasserstein1(X, b, a)[0]
    assert ab == pytest.approx(ba, abs=1e-9)
    assert ab <= wasserstein1(X, a, c)[0] + wasserstein1(X, c, b)[0] + 1e-8


def test_mean_audit_tight_case(two_point):
    rep = mean_stability_audit(two_point, [1, 0], [0.5, 0.5], [np.array([0.5, -0.5])])
    assert rep.passed
    assert rep.checks["max_mean_gap"] == pytest.approx(0.5, abs=1e-12)
    assert rep.w1 == pytest.approx(0.5, abs=1e-12)
    rep = mean_stability_audit(two_point, [0.5, 0.5], [0.5, 0.5], [np.array([0.5, -0.5])])
    assert rep.passed and rep.checks["max_mean_gap"] == 0
    with pytest.raises(UncertifiedObservable):
        mean_stability_audit(two_point, [1, 0], [0, 1], [np.array([2.0, 0.0])])


def test_covariance_audit_two_point(two_point):
    f = np.array([0.5, -0.5])
    rep = covariance_stability_audit(two_point, [1, 0], [0.5, 0.5], [(f, f)])
    assert rep.passed
    assert rep.checks["max_sup_gap"] == pytest.approx(0.5)
    assert rep.checks["max_cov_gap"] == pytest.approx(0.25)
    assert rep.checks["cov_bound"] == pytest.approx(2.0)
    assert rep.checks["epsilon"] == pytest.approx(2.0)
    same = covariance_stability_audit(two_point, [0.4, 0.6], [0.4, 0.6], [(f, f)])
    assert same.passed and same.checks["max_cov_gap"] == 0


def test_audits_on_random_graph():
    rng = np.random.default_rng(4)
    g = random_connected_graph(20, 10, rng)
    X = build_graph_metric(g)
    mu, nu = (normalize_measure(rng.dirichlet(np.ones(20))) for _ in range(2))
    fam = default_family(X, mu, None, 50, seed=1)
    assert mean_stability_audit(X, mu, nu, fam).passed
    T = build_graph_metric(random_tree(15, rng))
    mu, nu = (normalize_measure(rng.dirichlet(np.ones(15))) for _ in range(2))
    fam = default_family(T, mu, None, 20, seed=2)
    idx = rng.integers(len(fam), size=(30, 2))
    assert covariance_stability_audit(T, mu, nu, [(fam[i], fam[j]) for i, j in idx]).passed


def test_functional_hausdorff():
    assert functional_hausdorff([1.0, 2.0], [1.0, 2.0], [[0, 1], [1, 0]]) == 0
    assert functional_hausdorff([0.0], [3.0], [[0.0]]) == 3
    assert functional_hausdorff([0.0], [0.5], [[1.0]]) == 1
    with pytest.raises(MissingDistance):
        functional_hausdorff([0.0], [0.5], [[np.nan]])
    with pytest.raises(MissingDistance):
        functional_hausdorff([0.0, 1.0], [0.5], [[1.0]])


def test_correspondence_distortion(path3):
    X, _ = path3
    d = X.dist
    assert correspondence_distortion([(0, 0), (1, 1), (2, 2)], d, d, [1, 0, -1], [1, 0, -1])[:2] == (0, 0)
    r = correspondence_distortion([(0, 0), (1, 1)], [[0, 1], [1, 0]], [[0, 2], [2, 0]], [0, 0], [0, 0])
    assert (r.dis, r.fdis, r.score) == (1, 0, 0.5)
    r = correspondence_distortion([(0, 0), (1, 1), (2, 2)], d, d, [1, 0, -1], [0.5, 0, -0.5])
    assert (r.dis, r.fdis) == (0, 0.5)
    with pytest.raises(NotSurjective):
        correspondence_distortion([(0, 0)], [[0, 1], [1, 0]], [[0]], [0, 0], [0])


def test_empirical_sample(two_point):
    a = empirical_sample(two_point, [0.75, 0.25], 4000, seed=3)
    assert abs(a.weights[0] - 0.75) <= 3 / np.sqrt(4000)
    X = euclidean_space(np.arange(5.0))
    np.testing.assert_array_equal(empirical_sample(X, dirac(5, 2), 17, 1).weights, dirac(5, 2).weights)
    b = empirical_sample(X, uniform_measure(5), 30, seed=9)
    c = empirical_sample(X, uniform_measure(5), 30, seed=9)
    np.testing.assert_array_equal(b.weights, c.weights)
    assert np.allclose(b.weights * 30, np.round(b.weights * 30))


def test_consistency_trend():
    rng = np.random.default_rng(0)
    g = random_connected_graph(20, 8, rng)
    X = build_graph_metric(g)
    mu = normalize_measure(rng.dirichlet(np.ones(20)))
    pos = solve_poa(X, mu, 3, SolverConfig(restarts=6))
    out = consistency_trend(X, mu, list(pos.observables))
    assert out["sizes"] == [25, 50, 100, 200]
    assert out["nonincreasing"], out["medians"]

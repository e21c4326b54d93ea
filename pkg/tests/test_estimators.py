import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone

from dynpr.estimators import (
    DynamicPageRank,
    OscillatoryPageRank,
    StaticPageRank,
    check_activity,
    check_graph,
    epoch_features,
)
from dynpr.exceptions import ConfigError
from dynpr.integrate import Trajectory
from dynpr.synth import random_activity
from dynpr.teleportation import PiecewiseSchedule

from .conftest import FOUR_A, FOUR_S_MAGNITUDE


EDGES = np.array([[0, 2], [1, 2], [2, 1], [2, 3], [3, 0], [3, 1]])


@pytest.mark.parametrize(
    "graph", [FOUR_A, sp.csr_matrix(FOUR_A), EDGES], ids=["dense", "sparse", "edges"]
)
def test_check_graph_inputs(graph, four_P):
    np.testing.assert_array_equal(check_graph(graph).to_dense(), four_P.to_dense())


def test_check_graph_passthrough_and_errors(four_adj, four_P):
    assert check_graph(four_P) is four_P
    np.testing.assert_array_equal(check_graph(four_adj).to_dense(), four_P.to_dense())
    with pytest.raises(ConfigError):
        check_graph(None)
    with pytest.raises(ConfigError):
        check_graph(np.ones((2, 3, 4)))
    with pytest.raises(ConfigError):
        check_graph(sp.csr_matrix(np.ones((2, 3))))


def test_check_activity():
    with pytest.raises(ConfigError):
        check_activity(np.ones((3, 2)), 4)
    with pytest.raises(ConfigError):
        check_activity(-np.ones((4, 2)), 4)
    assert check_activity(np.ones((4, 2)), 4).dtype == float


def test_static_estimator(four_P):
    est = StaticPageRank(alpha=0.85, tol=1e-12).fit(FOUR_A)
    oracle = np.linalg.solve(np.eye(4) - 0.85 * four_P.to_dense(), np.full(4, 0.0375))
    np.testing.assert_allclose(est.pagerank_, oracle, atol=1e-11)
    assert est.n_nodes_ == 4
    assert est.get_params() == {"alpha": 0.85, "tol": 1e-12, "max_iter": 10000}


def test_params_and_clone():
    est = DynamicPageRank(graph=EDGES, alpha=0.7, theta=2.0)
    params = est.get_params()
    assert params["alpha"] == 0.7 and params["theta"] == 2.0
    c = clone(est)
    assert c.get_params()["alpha"] == 0.7 and c is not est
    c.set_params(alpha=0.5)
    assert est.alpha == 0.7


def test_dynamic_fit_transform():
    counts = random_activity(4, 6, seed=1)
    est = DynamicPageRank(graph=EDGES, timescale=0.5)
    F = est.fit_transform(counts)
    assert F.shape == (4, 6)
    np.testing.assert_allclose(F.sum(axis=0), 1.0, atol=1e-8)
    np.testing.assert_allclose(est.transform(counts), F)
    assert est.trajectory_.times[-1] == pytest.approx(3.0)
    rep = est.rank_report(k=2)
    assert rep.top["difference"].size == 2


def test_dynamic_transform_before_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        DynamicPageRank(graph=EDGES).transform(np.ones((4, 3)))


def test_epoch_features_requires_boundaries():
    sch = PiecewiseSchedule(np.eye(2), 1.0)
    traj = Trajectory([0.0, 0.5, 1.5], np.full((3, 2), 0.5))
    with pytest.raises(ConfigError):
        epoch_features(traj, sch)
    traj = Trajectory([0.0, 1.0, 2.0], [[0.5, 0.5], [0.6, 0.4], [0.3, 0.7]])
    np.testing.assert_array_equal(epoch_features(traj, sch), [[0.6, 0.3], [0.4, 0.7]])


def test_oscillatory_estimator():
    est = OscillatoryPageRank(graph=EDGES, alpha=0.85).fit(np.eye(4))
    np.testing.assert_array_equal(np.round(est.amplitude_, 4), FOUR_S_MAGNITUDE)
    X = est.predict([0.0, 2 * np.pi])
    np.testing.assert_allclose(X[0], X[1], atol=1e-15)
    np.testing.assert_allclose(X.sum(axis=1), 1.0, atol=1e-10)

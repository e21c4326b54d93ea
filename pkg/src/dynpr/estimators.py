"""scikit-learn style estimators over the functional core.

The graph is a constructor parameter (like a precomputed kernel); ``X`` is
the per-node data: activity counts of shape ``(n_nodes, n_epochs)`` or a
matrix of teleportation columns.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ConfigError
from .graph import AdjacencyStructure, TransitionOperator, build_transition, from_edges
from .integrate import EvolutionConfig, evolve
from .ranks import rank_report
from .solvers import SolveConfig, oscillatory_steady_state, static_pagerank
from .teleportation import PiecewiseSchedule, normalize_activity

__all__ = [
    "check_graph",
    "check_activity",
    "epoch_features",
    "StaticPageRank",
    "DynamicPageRank",
    "OscillatoryPageRank",
]


def check_graph(graph):
    """Coerce ``graph`` to a :class:`TransitionOperator`.

    Accepts an operator, an :class:`AdjacencyStructure`, a square
    (sparse or dense) adjacency matrix with ``A[i, j] != 0`` for edge
    ``i -> j``, or an ``(m, 2)`` integer edge array.
    """
    if graph is None:
        raise ConfigError("a graph is required")
    if isinstance(graph, TransitionOperator):
        return graph
    if isinstance(graph, AdjacencyStructure):
        return build_transition(graph)
    if sp.issparse(graph):
        A = sp.coo_matrix(graph)
        if A.shape[0] != A.shape[1]:
            raise ConfigError(f"adjacency matrix must be square, got {A.shape}")
        keep = A.data != 0
        return build_transition(from_edges(A.row[keep], A.col[keep], n=A.shape[0]))
    arr = np.asarray(graph)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and arr.shape[1] != 2:
        src, dst = np.nonzero(arr)
        return build_transition(from_edges(src, dst, n=arr.shape[0]))
    if arr.ndim == 2 and arr.shape[1] == 2:
        return build_transition(from_edges(arr[:, 0], arr[:, 1]))
    raise ConfigError("graph must be an operator, adjacency matrix or (m, 2) edge array")


def check_activity(X, n_nodes):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[0] != n_nodes:
        raise ConfigError(f"activity has {X.shape[0]} rows, graph has {n_nodes} nodes")
    if np.any(X < 0):
        raise ConfigError("activity counts must be nonnegative")
    return X


def epoch_features(traj, schedule):
    """Transient scores at the end of each epoch, shape ``(n, k)``.

    Column ``j`` is ``x((j+1) s)``, which depends on epochs ``0..j`` only.
    """
    t = (np.arange(schedule.k) + 1) * schedule.timescale
    idx = np.searchsorted(traj.times, t - 1e-9 * schedule.timescale)
    if np.any(idx >= traj.times.size) or not np.allclose(traj.times[idx], t, rtol=0, atol=1e-9 * schedule.timescale):
        raise ConfigError("trajectory grid does not include every epoch boundary")
    return traj.states[idx].T.copy()


class StaticPageRank(BaseEstimator):
    """Static PageRank by Richardson iteration.

    ``fit(X)`` takes the graph; the teleportation vector defaults to uniform.
    """

    def __init__(self, alpha=0.85, tol=1e-10, max_iter=10000):
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, teleport=None):
        self.operator_ = check_graph(X)
        cfg = SolveConfig(self.alpha, self.tol, self.max_iter)
        self.pagerank_ = static_pagerank(self.operator_, cfg, teleport)
        self.n_nodes_ = self.operator_.n
        return self


class DynamicPageRank(TransformerMixin, BaseEstimator):
    """PageRank driven by time-varying teleportation from epoch activity.

    Parameters
    ----------
    graph : graph-like
        See :func:`check_graph`.
    alpha : float
        Damping.
    timescale : float
        Model time per activity epoch (``s``).
    theta : float or None
        Exponential smoothing rate of the teleportation; ``None`` disables it.
    method : {"rk45", "euler"}
    step : float
        Euler step ``h``.
    rtol, atol : float
        Runge-Kutta tolerances.
    initial : {"static_pr", "teleport0", "uniform"}
    correction : bool
        Keep the probability mass at one during integration.
    samples_per_epoch : int
        Output samples per epoch; epoch boundaries are always included.

    Attributes
    ----------
    trajectory_ : Trajectory
    schedule_ : PiecewiseSchedule
    operator_ : TransitionOperator
    """

    def __init__(self, graph=None, alpha=0.85, timescale=1.0, theta=None, method="rk45",
                 step=1.0, rtol=1e-6, atol=1e-9, initial="static_pr", correction=True,
                 samples_per_epoch=10):
        self.graph = graph
        self.alpha = alpha
        self.timescale = timescale
        self.theta = theta
        self.method = method
        self.step = step
        self.rtol = rtol
        self.atol = atol
        self.initial = initial
        self.correction = correction
        self.samples_per_epoch = samples_per_epoch

    def _evolve(self, X):
        op = self.operator_
        X = check_activity(X, op.n)
        schedule = PiecewiseSchedule(normalize_activity(X), self.timescale, theta=self.theta)
        k = schedule.k
        grid = np.linspace(0.0, schedule.t_max, k * int(self.samples_per_epoch) + 1)
        cfg = EvolutionConfig(
            alpha=self.alpha, t_max=schedule.t_max, method=self.method, step=self.step,
            rtol=self.rtol, atol=self.atol, initial=self.initial,
            correction=self.correction, output_grid=grid,
        )
        return schedule, evolve(op, schedule, cfg)

    def fit(self, X, y=None):
        self.operator_ = check_graph(self.graph)
        self.schedule_, self.trajectory_ = self._evolve(X)
        self.n_features_in_ = self.schedule_.k
        return self

    def transform(self, X):
        """Transient scores at the end of each epoch of ``X``, shape ``(n, k)``."""
        check_is_fitted(self, "trajectory_")
        schedule, traj = self._evolve(X)
        return epoch_features(traj, schedule)

    def fit_transform(self, X, y=None):
        self.fit(X)
        return epoch_features(self.trajectory_, self.schedule_)

    def rank_report(self, window=None, k=None):
        check_is_fitted(self, "trajectory_")
        return rank_report(self.trajectory_, window, k=k)


class OscillatoryPageRank(BaseEstimator):
    """Closed-form steady state under cosine teleportation over columns of ``X``.

    Attributes
    ----------
    mean_ : ndarray
        Static PageRank of the average teleportation.
    phasor_ : ndarray of complex
    amplitude_ : ndarray
        ``|phasor_|``, the oscillation amplitude of each node.
    """

    def __init__(self, graph=None, alpha=0.85, tol=1e-10, max_iter=10000):
        self.graph = graph
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        self.operator_ = check_graph(self.graph)
        V = check_array(X, dtype=float)
        cfg = SolveConfig(self.alpha, self.tol, self.max_iter)
        self.mean_, sol = oscillatory_steady_state(self.operator_, self.alpha, V, cfg)
        self.phasor_ = sol.s
        self.amplitude_ = sol.magnitude
        self.residual_ = sol.residual
        return self

    def predict(self, t):
        """Steady-state vectors at times ``t`` (one row per time)."""
        check_is_fitted(self, "phasor_")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.mean_[None, :] + np.real(np.exp(1j * t)[:, None] * self.phasor_[None, :])

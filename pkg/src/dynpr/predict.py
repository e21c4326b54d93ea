"""One-step-ahead activity prediction from lagged features.

Each node gets its own linear model (no intercept)::

    [f(t-1), f(t-2), ..., f(t-w)] b  ~  p(t)

where ``f`` is the node's activity alone (base model) or activity together
with its transient dynamic PageRank score (augmented model). Models are
evaluated walk-forward: fit on everything observed up to ``t``, predict
``t+1``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import ConfigError

__all__ = [
    "RankDeficientWarning",
    "LaggedDesign",
    "lagged_design",
    "fit_lagged",
    "predict_next",
    "smape",
    "LaggedLinearRegression",
    "walk_forward",
    "node_smape",
    "cohorts_by_difference",
    "error_ratio",
    "PredictionReport",
    "prediction_report",
]


class RankDeficientWarning(UserWarning):
    pass


@dataclass
class LaggedDesign:
    """Stacked lag features for one node.

    Row ``r`` targets epoch ``targets[r]`` and holds
    ``[f(t-1), ..., f(t-w)]`` with ``f`` the concatenation of all blocks.
    """

    X: np.ndarray
    y: np.ndarray
    targets: np.ndarray
    window: int
    n_blocks: int

    @property
    def n_coef(self):
        return self.window * self.n_blocks


def _lag_row(blocks, t, w):
    # features [f(t), f(t-1), ..., f(t-w+1)]
    return np.array([blk[t - lag] for lag in range(w) for blk in blocks])


def lagged_design(blocks, window):
    """Build the design for series ``blocks`` (each of length ``k``)."""
    blocks = [np.asarray(b, dtype=float).ravel() for b in blocks]
    if not blocks:
        raise ConfigError("at least one feature block is required")
    k = blocks[0].size
    if any(b.size != k for b in blocks):
        raise ConfigError("feature blocks must share the same epoch indexing")
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    if window >= k:
        raise ConfigError(f"window {window} leaves no targets in {k} epochs")
    targets = np.arange(window, k)
    X = np.array([_lag_row(blocks, t - 1, window) for t in targets])
    y = blocks[0][targets]
    return LaggedDesign(X, y, targets, window, len(blocks))


def fit_lagged(design, y=None):
    """Least-squares coefficients (minimum norm if rank deficient).

    Accepts a :class:`LaggedDesign` or a raw ``(X, y)`` pair.

    Returns
    -------
    b : ndarray
    rank_deficient : bool
    """
    if isinstance(design, LaggedDesign):
        X, y = design.X, design.y
    else:
        X = design
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ConfigError("design must be 2-d with one target per row")
    b, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    deficient = rank < X.shape[1]
    if deficient:
        warnings.warn(
            f"lagged design has rank {rank} < {X.shape[1]} coefficients; "
            "using the minimum-norm solution",
            RankDeficientWarning,
            stacklevel=2,
        )
    return b, bool(deficient)


def predict_next(b, features):
    b = np.asarray(b, dtype=float)
    features = np.asarray(features, dtype=float)
    if features.shape[-1] != b.size:
        raise ConfigError(f"feature layout has {features.shape[-1]} entries, model expects {b.size}")
    return features @ b


def smape(actual, predicted):
    """Mean of ``|p - q| / ((p + q) / 2)``; steps with ``p = q = 0`` count as 0."""
    p = np.asarray(actual, dtype=float)
    q = np.asarray(predicted, dtype=float)
    if p.shape != q.shape:
        raise ConfigError(f"length mismatch: {p.shape} vs {q.shape}")
    if p.size == 0:
        raise ConfigError("smape of an empty series")
    if np.any(p < 0) or np.any(q < 0):
        raise ConfigError("smape needs nonnegative series")
    den = (p + q) / 2.0
    num = np.abs(p - q)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(terms.mean())


class LaggedLinearRegression(RegressorMixin, BaseEstimator):
    """Linear least squares without intercept, minimum-norm on rank loss.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    rank_deficient_ : bool
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankDeficientWarning)
            self.coef_, self.rank_deficient_ = fit_lagged(X, y)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return predict_next(self.coef_, X)


def walk_forward(blocks, window, min_train=None):
    """Walk-forward one-step predictions for a single node.

    For each admissible ``t`` fit on targets ``window..t`` and predict
    ``t+1``. ``t`` is admissible once there are at least ``min_train``
    training rows (default: the number of coefficients).

    Returns
    -------
    actual, predicted : ndarray
        Aligned series over the evaluated epochs; predictions are clipped
        at zero since activity is a count.
    """
    blocks = [np.asarray(b, dtype=float).ravel() for b in blocks]
    design = lagged_design(blocks, window)
    if min_train is None:
        min_train = design.n_coef
    k = blocks[0].size
    actual, predicted = [], []
    for t in range(window, k - 1):
        n_rows = t - window + 1
        if n_rows < min_train:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankDeficientWarning)
            b, _ = fit_lagged(design.X[:n_rows], design.y[:n_rows])
        q = predict_next(b, _lag_row(blocks, t, window))
        actual.append(blocks[0][t + 1])
        predicted.append(max(q, 0.0))
    if not actual:
        raise ConfigError(
            f"no admissible prediction epochs: {k} epochs, window {window}, "
            f"{min_train} training rows required"
        )
    return np.array(actual), np.array(predicted)


def node_smape(counts, window, extra=None, min_train=None):
    """Per-node walk-forward sMAPE; ``extra`` adds a second feature block per node."""
    counts = np.asarray(counts, dtype=float)
    n, k = counts.shape
    if extra is not None:
        extra = np.asarray(extra, dtype=float)
        if extra.shape != counts.shape:
            raise ConfigError(f"extra features {extra.shape} do not match activity {counts.shape}")
    out = np.empty(n)
    for i in range(n):
        blocks = [counts[i]] if extra is None else [counts[i], extra[i]]
        a, q = walk_forward(blocks, window, min_train)
        out[i] = smape(a, q)
    return out


def cohorts_by_difference(d, m):
    """Top ``m`` (non-stationary) and bottom ``m`` (stationary) nodes by ``d``."""
    d = np.asarray(d)
    if m < 1:
        raise ConfigError("cohort size must be >= 1")
    m = min(m, d.size)
    order = np.lexsort((np.arange(d.size), -d))
    return {"non-stationary": order[:m], "stationary": order[::-1][:m][::-1]}


def error_ratio(base, augmented, cohorts):
    """Per-cohort mean sMAPE of each model and their ratio (augmented / base).

    A ratio below 1 means the augmented features help. ``None`` marks an
    undefined ratio (base error of zero).
    """
    base = np.asarray(base, dtype=float)
    augmented = np.asarray(augmented, dtype=float)
    if base.shape != augmented.shape:
        raise ConfigError("base and augmented errors must cover the same nodes")
    table = {}
    for name, idx in cohorts.items():
        idx = np.asarray(idx, dtype=int)
        if idx.size == 0:
            raise ConfigError(f"cohort {name!r} is empty")
        b = float(base[idx].mean())
        a = float(augmented[idx].mean())
        table[name] = {"base": b, "augmented": a, "ratio": a / b if b > 0 else None, "size": int(idx.size)}
    return table


@dataclass
class PredictionReport:
    smape_base: np.ndarray
    smape_augmented: np.ndarray
    cohorts: dict
    ratios: dict = field(default_factory=dict)

    @property
    def mean_base(self):
        return float(self.smape_base.mean())

    @property
    def mean_augmented(self):
        return float(self.smape_augmented.mean())

    def to_dict(self):
        return {
            "mean_smape_base": self.mean_base,
            "mean_smape_augmented": self.mean_augmented,
            "cohorts": self.ratios,
        }


def prediction_report(counts, transient_scores, window, difference_scores, m):
    """Compare base and augmented models on identical nodes and epochs."""
    counts = np.asarray(counts, dtype=float)
    min_train = 2 * window
    base = node_smape(counts, window, None, min_train)
    aug = node_smape(counts, window, transient_scores, min_train)
    cohorts = cohorts_by_difference(difference_scores, m)
    return PredictionReport(base, aug, cohorts, error_ratio(base, aug, cohorts))

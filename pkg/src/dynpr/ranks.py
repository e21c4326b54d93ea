"""Static scores extracted from a trajectory, and ranking comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import ConfigError, DomainError

__all__ = [
    "RankReport",
    "transient",
    "cumulative",
    "variance",
    "difference",
    "default_window",
    "isim",
    "top_k",
    "rank_report",
]


def _span(traj):
    return traj.times[0], traj.times[-1]


def transient(traj, t):
    """State at time ``t`` by linear interpolation between samples."""
    lo, hi = _span(traj)
    if not lo <= t <= hi:
        raise DomainError(f"t={t} outside trajectory range [{lo}, {hi}]")
    i = int(np.searchsorted(traj.times, t, side="left"))
    if traj.times[i] == t:
        return traj.states[i].copy()
    t0, t1 = traj.times[i - 1], traj.times[i]
    w = (t - t0) / (t1 - t0)
    return (1 - w) * traj.states[i - 1] + w * traj.states[i]


def _need_two(traj):
    if len(traj) < 2:
        raise ConfigError("at least two trajectory samples are needed")


def cumulative(traj):
    """Trapezoid integral of ``x(t)`` over the sampled span."""
    _need_two(traj)
    return trapezoid(traj.states, traj.times, axis=0)


def variance(traj):
    """Trapezoid integral of ``(x(t) - c/T)^2`` where ``T`` is the span length."""
    _need_two(traj)
    c = cumulative(traj)
    T = traj.times[-1] - traj.times[0]
    dev = traj.states - c / T
    return trapezoid(dev * dev, traj.times, axis=0)


def default_window(traj):
    """``[t0 + 0.2 (t_end - t0), t_end]``, skipping the initial transient."""
    lo, hi = _span(traj)
    return (lo + 0.2 * (hi - lo), hi)


def difference(traj, window=None):
    """Per-node ``max - min`` over the samples whose time lies in ``window``."""
    if window is None:
        window = default_window(traj)
    w_lo, w_hi = window
    if w_lo > w_hi:
        raise ConfigError(f"window [{w_lo}, {w_hi}] is inverted")
    slack = 1e-12 * max(1.0, abs(traj.times[-1]))
    mask = (traj.times >= w_lo - slack) & (traj.times <= w_hi + slack)
    if not mask.any():
        raise ConfigError(f"window [{w_lo}, {w_hi}] contains no trajectory samples")
    X = traj.states[mask]
    return X.max(axis=0) - X.min(axis=0)


def top_k(scores, k):
    """Indices of the ``k`` largest scores; ties go to the smaller index."""
    scores = np.asarray(scores)
    if k < 0 or k > scores.size:
        raise ConfigError(f"k={k} out of range for {scores.size} scores")
    order = np.lexsort((np.arange(scores.size), -scores))
    return order[:k]


def isim(x, y, k):
    """Intersection similarity profile ``isim_1 .. isim_k``.

    ``isim_k = (1/k) sum_{j<=k} |X_j symdiff Y_j| / (2j)`` where ``X_j`` and
    ``Y_j`` are the top-``j`` sets. 0 means identical top sets at every depth.
    """
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise ConfigError("x and y must be vectors of equal length")
    if k < 1 or k > x.size:
        raise ConfigError(f"k={k} out of range for {x.size} nodes")
    ox, oy = top_k(x, k), top_k(y, k)
    in_x = np.zeros(x.size, dtype=bool)
    in_y = np.zeros(x.size, dtype=bool)
    sym = 0
    levels = np.empty(k)
    for j in range(k):
        a, b = ox[j], oy[j]
        in_x[a] = True
        sym += -1 if in_y[a] else 1
        in_y[b] = True
        sym += -1 if in_x[b] else 1
        levels[j] = sym / (2.0 * (j + 1))
    return np.cumsum(levels) / np.arange(1, k + 1)


@dataclass
class RankReport:
    scores: dict
    window: tuple | None = None
    times: tuple | None = None
    top: dict = field(default_factory=dict)

    def ordering(self, name, k=None):
        s = self.scores[name]
        return top_k(s, s.size if k is None else k)


def rank_report(traj, window=None, transient_times=(), k=None):
    """Cumulative, variance and difference scores plus requested transients."""
    if window is None:
        window = default_window(traj)
    scores = {
        "cumulative": cumulative(traj),
        "variance": variance(traj),
        "difference": difference(traj, window),
    }
    for t in transient_times:
        scores[f"transient@{t:g}"] = transient(traj, t)
    k = traj.n if k is None else min(k, traj.n)
    top = {name: top_k(s, k) for name, s in scores.items()}
    return RankReport(scores, tuple(window), tuple(transient_times), top)

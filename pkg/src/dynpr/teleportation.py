"""Time-dependent teleportation functions ``v(t)``.

Three kinds are provided: constant, piecewise-constant from epoch activity
(with a time-scale ``s``), and the cosine family whose phases are the
``k``-th roots of unity. Any of them may carry an exponential smoothing
rate ``theta``; the smoothed state itself lives in the integrator.
"""

from __future__ import annotations

import csv
import io
import math
import os

import numpy as np

from .exceptions import ConfigError, DomainError, ParseError

__all__ = [
    "ConstantSchedule",
    "PiecewiseSchedule",
    "OscillatorySchedule",
    "normalize_activity",
    "read_activity_csv",
    "write_activity_csv",
    "eval_oscillatory",
    "smoothed_derivative",
    "smoothing_weight",
    "implicit_euler_smoothing",
]

# floor(t/s) fuzz so that k*h landing a hair below j*s still selects epoch j
_EPOCH_FUZZ = 1e-9


def normalize_activity(raw):
    """Scale each column of a nonnegative ``(n, k)`` activity matrix to sum 1.

    All-zero columns become uniform.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    if raw.ndim != 2 or raw.shape[1] < 1 or raw.shape[0] < 1:
        raise ConfigError("activity must be a non-empty (n, k) matrix")
    if np.any(raw < 0) or not np.all(np.isfinite(raw)):
        raise ConfigError("activity counts must be finite and nonnegative")
    n = raw.shape[0]
    totals = raw.sum(axis=0)
    out = np.empty_like(raw)
    live = totals > 0
    out[:, live] = raw[:, live] / totals[live]
    out[:, ~live] = 1.0 / n
    return out


def _check_distributions(V, what="teleportation column"):
    V = np.asarray(V, dtype=float)
    if np.any(V < 0):
        raise ConfigError(f"{what} has negative entries")
    sums = V.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > 1e-10):
        raise ConfigError(f"{what} does not sum to 1 (got {sums})")
    return V


def eval_oscillatory(V, t):
    """``(1/k) * sum_j V[:, j] * (cos(t + 2*pi*j/k) + 1)`` for ``k >= 2``."""
    V = np.asarray(V, dtype=float)
    k = V.shape[1]
    if k < 2:
        raise DomainError("oscillatory teleportation needs k >= 2 columns")
    phases = 2.0 * np.pi * np.arange(k) / k
    w = (np.cos(t + phases) + 1.0) / k
    return V @ w


def smoothing_weight(h, theta):
    """Weight on new data of one implicit-Euler smoothing step, ``h*theta/(1+h*theta)``."""
    if theta <= 0:
        raise ConfigError("smoothing rate theta must be > 0")
    return h * theta / (1.0 + h * theta)


def implicit_euler_smoothing(vbar, v_new, h, theta):
    g = smoothing_weight(h, theta)
    return g * np.asarray(v_new) + (1.0 - g) * np.asarray(vbar)


def smoothed_derivative(vbar, t, schedule):
    """Right-hand side ``theta * (v(t) - vbar)`` of the smoothing ODE."""
    theta = schedule.theta
    if theta is None or theta <= 0:
        raise ConfigError("schedule has no positive smoothing rate theta")
    return theta * (schedule.eval(t) - np.asarray(vbar))


class _Schedule:
    kind = None

    def __init__(self, n, t_max, theta=None):
        if theta is not None and not theta > 0:
            raise ConfigError(f"smoothing theta must be > 0, got {theta}")
        if not t_max > 0:
            raise ConfigError(f"t_max must be > 0, got {t_max}")
        self.n = int(n)
        self.t_max = float(t_max)
        self.theta = None if theta is None else float(theta)

    @property
    def smoothed(self):
        return self.theta is not None

    def _check_time(self, t):
        slack = 1e-12 * max(1.0, self.t_max)
        if not (-slack <= t <= self.t_max + slack):
            raise DomainError(f"t={t} outside [0, {self.t_max}]")

    def eval(self, t):
        self._check_time(t)
        return self._eval(t)

    __call__ = eval

    def breakpoints(self):
        """Sorted discontinuity times strictly inside ``(0, t_max)``."""
        return np.empty(0)

    def on_segment(self, a, b):
        """Callable equal to ``v`` on the closed segment ``[a, b]``.

        ``[a, b]`` must not contain a breakpoint in its interior. For
        piecewise schedules the value at ``b`` is the left limit, so
        integrators can evaluate stages at the segment end.
        """
        return self._eval


class ConstantSchedule(_Schedule):
    kind = "constant"

    def __init__(self, v, t_max, theta=None):
        v = _check_distributions(np.asarray(v, dtype=float)[:, None])[:, 0]
        super().__init__(v.size, t_max, theta)
        self.v = v
        self.V = v[:, None]

    def _eval(self, t):
        return self.v.copy()


class PiecewiseSchedule(_Schedule):
    """``v(t) = V[:, floor(t/s)]``, clamped to the last column past ``k*s``."""

    kind = "piecewise"

    def __init__(self, V, timescale=1.0, t_max=None, theta=None):
        V = np.asarray(V, dtype=float)
        if V.ndim != 2 or V.shape[1] < 1:
            raise ConfigError("V must be an (n, k) matrix with k >= 1")
        V = _check_distributions(V)
        if not timescale > 0:
            raise ConfigError(f"time-scale s must be > 0, got {timescale}")
        self.timescale = float(timescale)
        self.V = V
        self.k = V.shape[1]
        if t_max is None:
            t_max = self.k * self.timescale
        super().__init__(V.shape[0], t_max, theta)

    def epoch(self, t):
        """Zero-based epoch index active at time ``t``."""
        j = int(math.floor(t / self.timescale + _EPOCH_FUZZ))
        return min(max(j, 0), self.k - 1)

    def _eval(self, t):
        return self.V[:, self.epoch(t)].copy()

    def breakpoints(self):
        j = np.arange(1, self.k)
        bp = j * self.timescale
        return bp[bp < self.t_max * (1 - 1e-12)]

    def on_segment(self, a, b):
        v = self.V[:, self.epoch(a)].copy()
        return lambda t: v

    def epoch_times(self):
        """Times ``j*s`` for ``j = 0..k`` that lie in ``[0, t_max]``."""
        t = np.arange(self.k + 1) * self.timescale
        return t[t <= self.t_max * (1 + 1e-12)]


class OscillatorySchedule(_Schedule):
    kind = "oscillatory"

    def __init__(self, V, t_max, theta=None):
        V = _check_distributions(np.asarray(V, dtype=float))
        if V.ndim != 2 or V.shape[1] < 2:
            raise DomainError("oscillatory teleportation needs k >= 2 columns")
        self.V = V
        self.k = V.shape[1]
        super().__init__(V.shape[0], t_max, theta)

    def _eval(self, t):
        return eval_oscillatory(self.V, t)


def read_activity_csv(source, n=None):
    """Read ``node,epoch,count`` rows into a dense ``(n, k)`` count matrix.

    Missing ``(node, epoch)`` pairs are zero; repeated pairs are summed.
    ``n`` defaults to ``1 + max node id``; ``k`` is ``1 + max epoch``.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_activity_csv(fh, n=n)
    if isinstance(source, bytes):
        source = io.StringIO(source.decode("utf-8"))
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise ParseError("activity file is empty")
    if [h.strip() for h in header] != ["node", "epoch", "count"]:
        raise ParseError(f"expected header node,epoch,count, got {header}", 1)
    nodes, epochs, counts = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
        try:
            i, j, c = int(row[0]), int(row[1]), float(row[2])
        except ValueError:
            raise ParseError(f"malformed row {row}", lineno) from None
        if i < 0 or j < 0 or not c >= 0 or not math.isfinite(c):
            raise ParseError(f"negative or non-finite value in {row}", lineno)
        nodes.append(i)
        epochs.append(j)
        counts.append(c)
    if not nodes:
        raise ParseError("activity file has no rows")
    max_node = max(nodes)
    if n is None:
        n = max_node + 1
    elif max_node >= n:
        raise ParseError(f"node id {max_node} exceeds graph size {n}")
    k = max(epochs) + 1
    P = np.zeros((n, k))
    np.add.at(P, (np.array(nodes), np.array(epochs)), np.array(counts))
    return P


def write_activity_csv(path, counts):
    """Write the nonzero entries of an ``(n, k)`` count matrix in long form.

    The ``(n-1, k-1)`` corner is always written so the shape round-trips.
    """
    counts = np.asarray(counts, dtype=float)
    n, k = counts.shape
    mask = counts != 0
    mask[n - 1, k - 1] = True
    rows = [
        f"{i},{j},{float(c)!r}"
        for i, j, c in zip(*np.nonzero(mask), counts[mask])
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("node,epoch,count\n")
        fh.write("\n".join(rows))
        fh.write("\n")

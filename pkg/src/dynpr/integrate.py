"""Evolution of the dynamic PageRank system.

The state obeys::

    x'(t) = (1 - alpha) v(t) - (gamma I - alpha P) x(t)

with ``gamma = (1 - alpha) sum(v(t)) + alpha sum(x(t))`` when the sum
correction is on and ``gamma = 1`` otherwise. With smoothing, ``v`` is
replaced by ``vbar`` which follows ``vbar' = theta (v(t) - vbar)`` and is
carried as the second half of the integrator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _dopri
from .exceptions import ConfigError, NumericError
from .solvers import SolveConfig, static_pagerank
from .teleportation import implicit_euler_smoothing

__all__ = [
    "EvolutionConfig",
    "Trajectory",
    "derivative",
    "initial_state",
    "evolve_euler",
    "evolve_rk",
    "evolve",
    "default_grid",
]

METHODS = ("euler", "rk45")
INITIAL_CHOICES = ("uniform", "teleport0", "static_pr")


def default_grid(t_max, per_unit=10):
    m = max(int(math.ceil(t_max * per_unit)), 1)
    return np.linspace(0.0, t_max, m + 1)


@dataclass
class EvolutionConfig:
    """Integration parameters.

    ``step`` is the forward-Euler time step ``h``; ``rtol``/``atol`` drive the
    adaptive Runge-Kutta pair. ``output_grid`` defaults to ten samples per
    unit of model time.
    """

    alpha: float = 0.85
    t_max: float = 1.0
    method: str = "rk45"
    step: float = 1.0
    rtol: float = 1e-6
    atol: float = 1e-9
    initial: str = "static_pr"
    correction: bool = True
    output_grid: np.ndarray | None = None
    solve_tol: float = 1e-12

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ConfigError(f"alpha must be in [0, 1), got {self.alpha}")
        if not self.t_max > 0:
            raise ConfigError(f"t_max must be > 0, got {self.t_max}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.initial == "staticpr":
            self.initial = "static_pr"
        if self.initial not in INITIAL_CHOICES:
            raise ConfigError(f"initial must be one of {INITIAL_CHOICES}, got {self.initial!r}")
        if self.method == "euler":
            bound = 2.0 / (1.0 + self.alpha)
            if not 0 < self.step < bound:
                raise ConfigError(
                    f"forward Euler is unstable: need 0 < h < 2/(1+alpha) = {bound:.6g}, got h={self.step}"
                )
        if not (self.rtol > 0 and self.atol > 0):
            raise ConfigError("rtol and atol must be > 0")
        if self.output_grid is None:
            self.output_grid = default_grid(self.t_max)
        grid = np.asarray(self.output_grid, dtype=float).ravel()
        if grid.size == 0:
            raise ConfigError("output grid is empty")
        if np.any(np.diff(grid) <= 0):
            raise ConfigError("output grid must be strictly increasing")
        slack = 1e-12 * self.t_max
        if grid[0] < -slack or grid[-1] > self.t_max + slack:
            raise ConfigError(f"output grid must lie in [0, {self.t_max}]")
        self.output_grid = np.clip(grid, 0.0, self.t_max)

    def solve_config(self):
        return SolveConfig(self.alpha, self.solve_tol)


@dataclass
class Trajectory:
    """Samples of ``x(t)``: ``states[i]`` is the state at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[0] != self.times.size:
            raise ConfigError("states must align 1:1 with times")

    @property
    def n(self):
        return self.states.shape[1]

    @property
    def sum_drift(self):
        return np.abs(1.0 - self.states.sum(axis=1))

    def __len__(self):
        return self.times.size


def _rhs(P, v, x, alpha, correction):
    y = alpha * P.apply(x)
    y += (1.0 - alpha) * v
    if correction:
        gamma = (1.0 - alpha) * v.sum() + alpha * x.sum()
        y -= gamma * x
    else:
        y -= x
    return y


def derivative(P, t, x, schedule, alpha, correction=True):
    """``x'(t)``; ``schedule`` is a schedule object or a fixed vector ``v``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (P.n,):
        raise ConfigError(f"state must have length {P.n}")
    v = schedule.eval(t) if hasattr(schedule, "eval") else np.asarray(schedule, dtype=float)
    return _rhs(P, v, x, alpha, correction)


def initial_state(choice, P, schedule, alpha, cfg=None):
    """Starting vector: ``uniform``, ``teleport0`` (= v(0)) or ``static_pr``."""
    if choice == "staticpr":
        choice = "static_pr"
    v0 = schedule.eval(0.0)
    if choice == "uniform":
        return np.full(P.n, 1.0 / P.n)
    if choice == "teleport0":
        return v0
    if choice == "static_pr":
        cfg = cfg or SolveConfig(alpha, 1e-12)
        return static_pagerank(P, SolveConfig(alpha, cfg.tol, cfg.max_iter), v0)
    raise ConfigError(f"unknown initial condition {choice!r}")


def _check_finite(y, t):
    if not np.all(np.isfinite(y)):
        raise NumericError(f"non-finite state at t={t:.6g}", time=t)


def evolve_euler(P, schedule, cfg):
    """Forward Euler with fixed step ``cfg.step``.

    Grid points that fall between steps are linearly interpolated. With
    smoothing, ``vbar`` is advanced by the implicit-Euler update
    ``vbar <- g v(t) + (1 - g) vbar``, ``g = h theta / (1 + h theta)``.
    """
    _check_schedule(P, schedule, cfg)
    h, alpha, T = cfg.step, cfg.alpha, cfg.t_max
    grid = cfg.output_grid
    x = initial_state(cfg.initial, P, schedule, alpha, cfg.solve_config())
    vbar = schedule.eval(0.0) if schedule.smoothed else None

    out = np.empty((grid.size, P.n))
    gi = 0
    tol = 1e-9 * h
    while gi < grid.size and grid[gi] <= tol:
        out[gi] = x
        gi += 1

    n_steps = int(math.ceil(T / h - 1e-9))
    t = 0.0
    for k in range(n_steps):
        v = schedule.eval(t)
        if vbar is not None:
            if k > 0:
                vbar = implicit_euler_smoothing(vbar, v, h, schedule.theta)
            v = vbar
        t_next = min((k + 1) * h, T)
        x_next = x + (t_next - t) * _rhs(P, v, x, alpha, cfg.correction)
        _check_finite(x_next, t_next)
        while gi < grid.size and grid[gi] <= t_next + tol:
            g = grid[gi]
            if abs(g - t_next) <= tol:
                out[gi] = x_next
            else:
                w = (g - t) / (t_next - t)
                out[gi] = (1 - w) * x + w * x_next
            gi += 1
        x, t = x_next, t_next
    return Trajectory(grid.copy(), out, {"method": "euler", "steps": n_steps, "fevals": n_steps})


def _check_schedule(P, schedule, cfg):
    if schedule.n != P.n:
        raise ConfigError(f"schedule has {schedule.n} nodes, graph has {P.n}")
    if schedule.t_max < cfg.t_max * (1 - 1e-12):
        raise ConfigError(f"schedule covers [0, {schedule.t_max}] but t_max={cfg.t_max}")


def evolve_rk(P, schedule, cfg):
    """Adaptive Dormand-Prince 5(4) integration with dense output.

    Integration restarts at every breakpoint of ``schedule`` so no step
    crosses a jump in ``v(t)``. Error control uses the max-norm of the
    local error scaled by ``atol + rtol * |y|``.
    """
    _check_schedule(P, schedule, cfg)
    alpha, T, corr = cfg.alpha, cfg.t_max, cfg.correction
    n = P.n
    grid = cfg.output_grid
    x0 = initial_state(cfg.initial, P, schedule, alpha, cfg.solve_config())
    smoothed = schedule.smoothed
    if smoothed:
        theta = schedule.theta
        y = np.concatenate([x0, schedule.eval(0.0)])
    else:
        y = x0.copy()

    out = np.empty((grid.size, n))
    gi = 0
    while gi < grid.size and grid[gi] <= 0.0:
        out[gi] = y[:n]
        gi += 1

    stats = {"method": "rk45", "steps": 0, "rejected": 0, "fevals": 0, "segments": 0}
    h_min = 1e-12 * T
    bps = [b for b in schedule.breakpoints() if 0 < b < T]
    edges = [0.0] + bps + [T]
    K = np.empty((7, y.size))

    for a, b in zip(edges[:-1], edges[1:]):
        vfun = schedule.on_segment(a, b)
        stats["segments"] += 1

        if smoothed:
            def fun(t, z, vfun=vfun):
                x, vb = z[:n], z[n:]
                return np.concatenate([_rhs(P, vb, x, alpha, corr), theta * (vfun(t) - vb)])
        else:
            def fun(t, z, vfun=vfun):
                return _rhs(P, vfun(t), z, alpha, corr)

        t = a
        f = fun(t, y)
        h = _dopri.initial_step(fun, t, y, f, cfg.atol, cfg.rtol, b - a)
        stats["fevals"] += 2
        at_end = False
        while not at_end:
            if t + h >= b - 1e-12 * T or t + 1.05 * h >= b:
                h = b - t
                at_end = True
            y_new, err = _dopri.step(fun, t, y, f, h, K)
            stats["fevals"] += 6
            scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.max(np.abs(err) / scale))
            if not np.isfinite(err_norm):
                raise NumericError(f"non-finite state near t={t:.6g}", time=t)
            if err_norm > 1.0:
                stats["rejected"] += 1
                at_end = False
                h *= max(0.2, 0.9 * err_norm ** (-1 / (_dopri.ORDER + 1)))
                if h < h_min:
                    raise NumericError(
                        f"step size underflow (h={h:.3e}) at t={t:.6g}; problem may be stiff", time=t
                    )
                continue
            t_new = b if at_end else t + h
            stats["steps"] += 1
            # emit grid points in (t, t_new]
            hi = t_new + (1e-12 * T if at_end else 0.0)
            j = gi
            while j < grid.size and grid[j] <= hi:
                j += 1
            if j > gi:
                g = grid[gi:j]
                exact = np.abs(g - t_new) <= 1e-12 * T
                inner = ~exact
                if inner.any():
                    sig = (g[inner] - t) / h
                    out[gi:j][inner] = _dopri.dense(y, h, K, sig)[:, :n]
                out[gi:j][exact] = y_new[:n]
                gi = j
            y, f, t = y_new, K[6].copy(), t_new
            fac = 10.0 if err_norm == 0 else min(10.0, max(0.2, 0.9 * err_norm ** (-1 / (_dopri.ORDER + 1))))
            h *= fac

    if gi < grid.size:
        out[gi:] = y[:n]
    return Trajectory(grid.copy(), out, stats)


def evolve(P, schedule, cfg):
    if cfg.method == "euler":
        return evolve_euler(P, schedule, cfg)
    return evolve_rk(P, schedule, cfg)

"""Static and complex-teleportation PageRank via Richardson iteration.

All solves go through :func:`richardson`, which only needs ``P @ x``.
Convergence is declared on the 1-norm of the residual
``b - (I - gamma P) x``, so a returned vector carries a certified
backward error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, ConvergenceError, DomainError
from .teleportation import _check_distributions

__all__ = [
    "SolveConfig",
    "ComplexSolution",
    "richardson",
    "static_pagerank",
    "complex_pagerank",
    "oscillatory_steady_state",
    "eval_steady",
]


@dataclass(frozen=True)
class SolveConfig:
    alpha: float = 0.85
    tol: float = 1e-10
    max_iter: int = 10000

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ConfigError(f"alpha must be in [0, 1), got {self.alpha}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")


@dataclass(frozen=True)
class ComplexSolution:
    s: np.ndarray
    residual: float
    iterations: int = 0

    @property
    def magnitude(self):
        return np.abs(self.s)


def richardson(P, gamma, b, tol=1e-10, max_iter=10000):
    """Solve ``(I - gamma P) x = b`` by ``x <- gamma P x + b``.

    Starts from ``x = b``. Works for real or complex ``gamma`` and ``b``
    provided ``|gamma| < 1`` (``P`` column-stochastic, so the 1-norm
    residual contracts by ``|gamma|`` each sweep).

    Returns
    -------
    x : ndarray
    residuals : list of float
        Residual 1-norm of each iterate, starting with the initial guess.
    """
    x = np.array(b, copy=True)
    residuals = []
    for it in range(max_iter + 1):
        y = gamma * P.apply(x) + b
        r = y - x  # = b - (I - gamma P) x
        res = float(np.abs(r).sum())
        residuals.append(res)
        if not np.isfinite(res):
            raise ConvergenceError("non-finite residual", residual=res, iterations=it)
        if res <= tol:
            return x, residuals
        if it == max_iter:
            break
        x = y
    raise ConvergenceError(
        f"Richardson iteration did not reach tol={tol:g} in {max_iter} "
        f"iterations (residual {residuals[-1]:.3e})",
        residual=residuals[-1],
        iterations=max_iter,
    )


def static_pagerank(P, cfg=None, v=None):
    """PageRank vector solving ``(I - alpha P) x = (1 - alpha) v``.

    ``v`` defaults to uniform teleportation. Because
    ``e^T r = (1 - alpha)(1 - e^T x)`` for a residual ``r``, the iteration runs
    to a residual of ``tol * (1 - alpha) / 2`` so that both the residual and the
    mass defect ``|1 - sum(x)|`` end up below ``tol``.
    """
    cfg = cfg or SolveConfig()
    if v is None:
        v = np.full(P.n, 1.0 / P.n)
    v = _check_distributions(np.asarray(v, dtype=float)[:, None], "teleportation vector")[:, 0]
    if v.size != P.n:
        raise ConfigError(f"teleportation vector has length {v.size}, graph has {P.n} nodes")
    # half again for headroom against rounding in the final sum
    tol = 0.5 * cfg.tol * (1.0 - cfg.alpha)
    x, _ = richardson(P, cfg.alpha, (1.0 - cfg.alpha) * v, tol, cfg.max_iter)
    return x


def complex_pagerank(P, gamma, b, cfg=None):
    """Solve ``(I - gamma P) s = b`` for complex ``gamma`` with ``|gamma| < 1``."""
    cfg = cfg or SolveConfig()
    gamma = complex(gamma)
    if not abs(gamma) < 1:
        raise DomainError(f"|gamma| must be < 1, got {abs(gamma)}")
    b = np.asarray(b, dtype=complex)
    if b.shape != (P.n,):
        raise ConfigError(f"right-hand side must have length {P.n}")
    s, residuals = richardson(P, gamma, b, cfg.tol, cfg.max_iter)
    return ComplexSolution(s=s, residual=residuals[-1], iterations=len(residuals) - 1)


def oscillatory_steady_state(P, alpha, V, cfg=None):
    """Mean and phasor of the periodic steady state under cosine teleportation.

    For ``v(t) = (1/k) V (cos(t + f) + 1)`` with ``f_j = 2*pi*j/k`` the
    dynamic system settles on ``x + Re(s * exp(i t))``.

    Returns
    -------
    x : ndarray
        Static PageRank for the average teleportation ``V e / k``.
    sol : ComplexSolution
        Solution of ``(I - alpha/(1+i) P) s = (1-alpha)/(k(1+i)) V exp(i f)``.
    """
    V = _check_distributions(V)
    k = V.shape[1]
    if k < 2:
        raise DomainError("oscillatory steady state needs k >= 2")
    cfg = SolveConfig(alpha, cfg.tol, cfg.max_iter) if cfg else SolveConfig(alpha)
    x = static_pagerank(P, cfg, V.mean(axis=1))
    f = 2.0 * np.pi * np.arange(k) / k
    gamma = alpha / (1 + 1j)
    b = (1 - alpha) / (k * (1 + 1j)) * (V @ np.exp(1j * f))
    return x, complex_pagerank(P, gamma, b, cfg)


def eval_steady(x, s, t):
    """``x + Re(s * exp(i t))``; ``t`` may be a scalar or 1-d array of times.

    For array ``t`` the result has one row per time.
    """
    s = s.s if isinstance(s, ComplexSolution) else np.asarray(s)
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return x + np.real(s * np.exp(1j * t))
    return x[None, :] + np.real(np.exp(1j * t)[:, None] * s[None, :])

"""Seeded synthetic graphs and activity used as reproducible fixtures."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .graph import build_transition, from_edges
from .solvers import SolveConfig, static_pagerank
from .teleportation import normalize_activity

__all__ = ["random_graph", "random_activity", "diffusion_activity"]


def random_graph(n, m, seed, self_loops=False):
    """Directed graph with exactly ``m`` distinct uniformly random edges."""
    max_edges = n * n if self_loops else n * (n - 1)
    if m > max_edges:
        raise ValueError(f"cannot place {m} distinct edges on {n} nodes")
    rng = np.random.default_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    while keys.size < m:
        draw = int(1.2 * (m - keys.size)) + 16
        src = rng.integers(0, n, draw)
        dst = rng.integers(0, n, draw)
        if not self_loops:
            keep = src != dst
            src, dst = src[keep], dst[keep]
        new = src * n + dst
        # keep first occurrences in draw order so the result depends only on seed
        _, first = np.unique(np.concatenate([keys, new]), return_index=True)
        keys = np.concatenate([keys, new])[np.sort(first)]
    keys = keys[:m]
    return from_edges(keys // n, keys % n, n=n)


def random_activity(n, k, seed, spike_rate=0.05, spike_size=20.0):
    """Nonnegative ``(n, k)`` counts: lognormal base rates with random spikes."""
    rng = np.random.default_rng(seed)
    base = rng.lognormal(mean=1.0, sigma=1.0, size=n)
    noise = rng.lognormal(mean=0.0, sigma=0.3, size=(n, k))
    spikes = (rng.random((n, k)) < spike_rate) * rng.exponential(spike_size, size=(n, k))
    return np.round(base[:, None] * noise + spikes * base[:, None], 3)


def diffusion_activity(adj, k, seed, alpha=0.85, timescale=1.0, volume=None,
                       noise=0.02, shock_rate=0.08, shock_size=3.0):
    """Activity whose next epoch follows the dynamic PageRank state.

    Epoch ``t+1`` counts are ``volume * x((t+1) s)`` perturbed by
    multiplicative noise and sparse shocks, where ``x`` is the exact
    solution of the dynamic system driven by the normalized counts of
    epochs ``0..t`` and started from the static PageRank of epoch 0.
    Transient scores therefore lead activity by one epoch by construction.

    Returns
    -------
    counts : ndarray, shape (n, k)
    states : ndarray, shape (k + 1, n)
        ``x(j s)`` for ``j = 0..k``.
    """
    rng = np.random.default_rng(seed)
    P = build_transition(adj)
    n = adj.n
    if volume is None:
        volume = 100.0 * n
    M = np.eye(n) - alpha * P.to_dense()
    E = expm(-M * timescale)
    cfg = SolveConfig(alpha, 1e-13)

    counts = np.zeros((n, k))
    counts[:, 0] = rng.lognormal(0.0, 1.0, n) * volume / n
    x = static_pagerank(P, cfg, normalize_activity(counts[:, :1])[:, 0])
    states = [x]
    for t in range(k):
        v = normalize_activity(counts[:, t : t + 1])[:, 0]
        x_star = np.linalg.solve(M, (1 - alpha) * v)
        x = E @ (x - x_star) + x_star
        states.append(x)
        if t + 1 < k:
            nxt = volume * x * rng.lognormal(0.0, noise, n)
            shocks = (rng.random(n) < shock_rate) * rng.exponential(shock_size, n)
            counts[:, t + 1] = nxt * (1.0 + shocks)
    return counts, np.array(states)

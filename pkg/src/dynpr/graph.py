"""Edge-list ingestion and the column-stochastic random-walk operator."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .exceptions import ConfigError, ParseError

__all__ = [
    "AdjacencyStructure",
    "TransitionOperator",
    "load_edge_list",
    "build_transition",
    "from_edges",
]


@dataclass(frozen=True)
class AdjacencyStructure:
    """Directed simple graph on nodes ``0..n-1``.

    ``src``/``dst`` hold the deduplicated edges in lexicographic order.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    out_degree: np.ndarray = field(repr=False)

    @property
    def edges(self):
        return set(zip(self.src.tolist(), self.dst.tolist()))

    @property
    def n_edges(self):
        return int(self.src.size)

    def to_dense(self):
        A = np.zeros((self.n, self.n))
        A[self.src, self.dst] = 1.0
        return A


def from_edges(src, dst, n=None):
    """Build an :class:`AdjacencyStructure` from parallel index arrays.

    Duplicate edges are collapsed. ``n`` defaults to ``1 + max id``.
    """
    src = np.asarray(src, dtype=np.int64).ravel()
    dst = np.asarray(dst, dtype=np.int64).ravel()
    if src.shape != dst.shape:
        raise ConfigError("src and dst must have equal length")
    if src.size and (src.min() < 0 or dst.min() < 0):
        raise ConfigError("node ids must be nonnegative")
    max_id = int(max(src.max(), dst.max())) if src.size else -1
    if n is None:
        n = max_id + 1
    elif max_id >= n:
        raise ConfigError(f"node id {max_id} out of range for n={n}")
    if n <= 0:
        raise ConfigError("graph has no nodes")
    if src.size:
        key = np.unique(src * n + dst)
        src, dst = key // n, key % n
    out_degree = np.bincount(src, minlength=n).astype(np.int64)
    return AdjacencyStructure(int(n), src, dst, out_degree)


def load_edge_list(source):
    """Parse a whitespace-separated ``src dst`` edge list.

    Parameters
    ----------
    source : path-like, bytes or file-like
        A ``str``/``PathLike`` is opened as a file; ``bytes`` are parsed
        directly. Text or binary streams are both accepted; binary input is
        decoded as UTF-8. Lines starting with ``#`` and blank lines are
        skipped.

    Returns
    -------
    AdjacencyStructure
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load_edge_list(fh)
    if isinstance(source, bytes):
        source = io.BytesIO(source)

    src, dst = [], []
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, got {len(parts)}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        if a < 0 or b < 0:
            raise ParseError(f"negative node id in {line!r}", lineno)
        src.append(a)
        dst.append(b)
    if not src:
        raise ParseError("edge list is empty")
    return from_edges(src, dst)


class TransitionOperator:
    """Column-stochastic operator ``P = A^T D^{-1}`` with uniform dangling repair.

    Column ``i`` is the out-distribution of node ``i``. Dangling columns are
    not stored; :meth:`apply` adds ``sum(x[dangling]) / n`` to every entry
    instead, which is the same as a dense uniform column.
    """

    def __init__(self, n, matrix, dangling):
        self.n = int(n)
        self._P = matrix
        self._P.sort_indices()
        self.dangling = np.asarray(dangling, dtype=np.int64)
        self._dangling_mask = np.zeros(self.n, dtype=bool)
        self._dangling_mask[self.dangling] = True

    @property
    def nnz(self):
        return int(self._P.nnz)

    @property
    def shape(self):
        return (self.n, self.n)

    def apply(self, x):
        """Return ``P @ x``. Real or complex ``x`` of length ``n``."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise ConfigError(f"vector of length {self.n} expected, got shape {x.shape}")
        if np.iscomplexobj(x):
            return self.apply(x.real) + 1j * self.apply(x.imag)
        y = self._P @ x
        if self.dangling.size:
            y += x[self._dangling_mask].sum() / self.n
        return y

    __matmul__ = apply

    def to_dense(self):
        D = self._P.toarray()
        D[:, self.dangling] = 1.0 / self.n
        return D

    def column(self, i):
        if self._dangling_mask[i]:
            return np.full(self.n, 1.0 / self.n)
        return self._P[:, [i]].toarray().ravel()

    def __repr__(self):
        return f"TransitionOperator(n={self.n}, nnz={self.nnz}, dangling={self.dangling.size})"


def build_transition(adj):
    """Uniform random-walk operator for ``adj``.

    Raises
    ------
    ConfigError
        If the graph has no nodes.
    """
    n = adj.n
    if n <= 0:
        raise ConfigError("cannot build a transition operator on 0 nodes")
    deg = adj.out_degree
    data = 1.0 / deg[adj.src]
    # P[j, i] = 1/deg(i) for edge i -> j
    P = sp.csc_matrix((data, (adj.dst, adj.src)), shape=(n, n))
    dangling = np.flatnonzero(deg == 0)
    return TransitionOperator(n, P, dangling)

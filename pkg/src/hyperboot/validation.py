"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np

from .exceptions import OutOfRange
from .hypergraph import Hypergraph


def check_hypergraph(h) -> Hypergraph:
    """Accept a :class:`Hypergraph` or an ``(n, k, edges)`` triple."""
    if isinstance(h, Hypergraph):
        return h
    if isinstance(h, tuple) and len(h) == 3:
        n, k, edges = h
        return Hypergraph(int(n), int(k), edges)
    raise TypeError(f"expected a Hypergraph or (n, k, edges), got {type(h).__name__}")


def check_seed_matrix(X, n: int) -> np.ndarray:
    """Normalise initial sets to a boolean ``(n_samples, n)`` matrix.

    ``X`` may already be such a matrix (bool or 0/1), or an iterable of
    vertex collections, one per sample.
    """
    if isinstance(X, np.ndarray) and X.ndim == 2:
        if X.shape[1] != n:
            raise ValueError(f"seed matrix has {X.shape[1]} columns, expected {n}")
        if X.dtype != bool:
            if not np.isin(X, (0, 1)).all():
                raise ValueError("seed matrix entries must be 0/1")
            X = X.astype(bool)
        return X
    rows = [np.asarray(list(s), dtype=np.int64) for s in X]
    out = np.zeros((len(rows), n), dtype=bool)
    for i, row in enumerate(rows):
        if row.size and (row.min() < 0 or row.max() >= n):
            raise OutOfRange(f"sample {i} has vertices outside [0, {n})")
        out[i, row] = True
    return out

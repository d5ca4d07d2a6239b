"""scikit-learn style wrappers around the three infection processes.

``fit`` binds a hypergraph; ``transform`` maps a batch of initial sets (rows
of a boolean vertex matrix) to the final infected sets.

>>> from hyperboot.hypergraph import Hypergraph
>>> est = BootstrapPercolation(r=2).fit(Hypergraph(3, 2, [(0, 2), (1, 2)]))
>>> est.transform([[0, 1]]).astype(int).tolist()
[[1, 1, 1]]
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import mild_process, percolation, query_process
from .validation import check_hypergraph, check_seed_matrix


class _ProcessTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        if self.r < 2:
            raise ValueError("r must be at least 2")
        self.hypergraph_ = check_hypergraph(X)
        self.n_features_in_ = self.hypergraph_.n
        return self

    def _final(self, seeds: np.ndarray) -> set[int]:
        raise NotImplementedError

    def transform(self, X):
        check_is_fitted(self, "hypergraph_")
        seeds = check_seed_matrix(X, self.hypergraph_.n)
        out = np.zeros_like(seeds)
        for i, row in enumerate(seeds):
            final = self._final(np.flatnonzero(row))
            out[i, list(final)] = True
        self.final_sizes_ = out.sum(axis=1)
        return out


class BootstrapPercolation(_ProcessTransformer):
    def __init__(self, r: int = 2):
        self.r = r

    def _final(self, seeds):
        state = percolation.init(self.hypergraph_, self.r, seeds)
        return percolation.run(state)[0]


class QueryProcess(_ProcessTransformer):
    """Upper coupling; ``shuffle_seed`` randomises the within-family order."""

    def __init__(self, r: int = 2, shuffle_seed=None):
        self.r = r
        self.shuffle_seed = shuffle_seed

    def _final(self, seeds):
        rng = None if self.shuffle_seed is None else np.random.default_rng(self.shuffle_seed)
        return query_process.run(self.hypergraph_, self.r, seeds, rng=rng)[0]


class MildProcess(_ProcessTransformer):
    """Lower coupling; with ``p`` set the batch schedule follows the regime, else all-at-once."""

    def __init__(self, r: int = 2, p=None, delta: float = 0.05):
        self.r = r
        self.p = p
        self.delta = delta

    def _final(self, seeds):
        schedule = None
        if self.p is not None:
            schedule = mild_process.MildSchedule.for_graph(
                self.hypergraph_, self.r, self.p, c0=float(len(seeds)), delta=self.delta)
        return mild_process.run(self.hypergraph_, self.r, seeds, schedule=schedule)[0]

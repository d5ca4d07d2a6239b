"""r-neighbourhood bootstrap percolation on random k-uniform hypergraphs.

Reference dynamics, an upper coupling (query-process), a lower coupling
(mild process), the threshold formulas and trajectories, a Galton-Watson
toolkit and a seeded Monte Carlo harness.
"""

from .exceptions import (BadArity, BadChi, BadMu, BadPairing, DuplicateVertex, EmptyIncrements,
                         HyperbootError, InvalidKSet, MissingTrace, NoRoot, OutOfRange, TooLarge,
                         WrongArity)
from .hypergraph import EdgeOracle, Hypergraph, canonical_kset, materialize_from_oracle, sample_explicit
from .theory import RegimeParams, a_crit, a_star, eta, regime_margin

__version__ = "0.1.0"

__all__ = [
    "BadArity", "BadChi", "BadMu", "BadPairing", "DuplicateVertex", "EdgeOracle", "EmptyIncrements",
    "Hypergraph", "HyperbootError", "InvalidKSet", "MissingTrace", "NoRoot", "OutOfRange",
    "RegimeParams", "TooLarge", "WrongArity", "a_crit", "a_star", "canonical_kset", "eta",
    "materialize_from_oracle", "regime_margin", "sample_explicit",
]

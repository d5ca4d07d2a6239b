"""Galton-Watson processes whose offspring count is a sum of weighted Bernoullis.

An individual has ``sum_i w_i * Be(p_i)`` children.  The exact engines
(:func:`offspring_pmf`, :func:`total_progeny_pmf_dp`, :func:`dwass_pmf`) and
the samplers need positive integer weights, since generation sizes are counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .exceptions import BadChi, BadMu, TooLarge

DEFAULT_CAP = 10**6
DP_STATE_CAP = 10**7


@dataclass(frozen=True)
class OffspringDistribution:
    weights: tuple
    probs: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        q = tuple(float(x) for x in self.probs)
        if len(w) != len(q):
            raise ValueError("weights and probs must have equal length")
        if any(x <= 0 for x in w):
            raise ValueError("weights must be positive")
        if any(not 0.0 <= x <= 1.0 for x in q):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "probs", q)

    @classmethod
    def from_terms(cls, terms) -> "OffspringDistribution":
        terms = list(terms)
        return cls(tuple(w for w, _ in terms), tuple(q for _, q in terms))

    @property
    def terms(self) -> list[tuple]:
        return list(zip(self.weights, self.probs))

    @property
    def mu(self) -> float:
        return float(sum(w * q for w, q in self.terms))

    @property
    def M(self):
        return max(self.weights) if self.weights else 0

    @property
    def integer_valued(self) -> bool:
        return all(float(w).is_integer() for w in self.weights)

    def _int_weights(self) -> list[int]:
        if not self.integer_valued:
            raise ValueError("exact engines need integer weights")
        return [int(w) for w in self.weights]

    @cached_property
    def pmf(self) -> np.ndarray:
        """Exact pmf on 0..sum(w) by convolving one two-point law per term."""
        out = np.ones(1)
        for w, q in zip(self._int_weights(), self.probs):
            term = np.zeros(w + 1)
            term[0], term[w] = 1.0 - q, q
            out = np.convolve(out, term)
        return out


@dataclass(frozen=True)
class GWProcess:
    offspring: OffspringDistribution
    roots: int = 1

    def __post_init__(self):
        if self.roots < 0:
            raise ValueError("roots must be non-negative")


def offspring_pmf(dist: OffspringDistribution, j: int) -> float:
    if j < 0:
        raise ValueError("j must be non-negative")
    pmf = dist.pmf
    return float(pmf[j]) if j < pmf.size else 0.0


def total_progeny_pmf_dp(process: GWProcess, m: int) -> float:
    """P[Z = m | Z_0 = roots] by dynamic programming over (total, generation size).

    Totals above ``m`` are discarded, which is exact because totals never decrease.
    """
    ell = process.roots
    if not m >= ell >= 1:
        raise ValueError("need m >= roots >= 1")
    base = process.offspring.pmf[: m + 1]
    powers = {0: np.ones(1)}

    def power(g: int) -> np.ndarray:
        # g-fold convolution of the offspring pmf, truncated at m
        if g not in powers:
            prev = power(g - 1)
            powers[g] = np.convolve(prev, base)[: m + 1]
        return powers[g]

    # dist[total][gen] = probability; totals stay <= m
    frontier = {(ell, ell): 1.0}
    absorbed = 0.0
    steps = 0
    while frontier:
        steps += len(frontier)
        if steps > DP_STATE_CAP:
            raise TooLarge("dynamic programme exceeded its state budget")
        nxt: dict[tuple, float] = {}
        for (total, gen), prob in frontier.items():
            if gen == 0:
                if total == m:
                    absorbed += prob
                continue
            children = power(gen)
            room = m - total
            for c in range(min(room, children.size - 1) + 1):
                pc = children[c]
                if pc == 0.0:
                    continue
                key = (total + c, c)
                nxt[key] = nxt.get(key, 0.0) + prob * pc
        frontier = nxt
    return absorbed


def dwass_pmf(process: GWProcess, m: int) -> float:
    """(roots / m) * P[S_m = m - roots] with S_m the offspring total of m individuals."""
    ell = process.roots
    if not m >= ell >= 1:
        raise ValueError("need m >= roots >= 1")
    target = m - ell
    acc = np.ones(1)
    for w, q in zip(process.offspring._int_weights(), process.offspring.probs):
        # w * Binomial(m, q) spread onto the integer grid
        scaled = np.zeros(w * m + 1)
        scaled[::w] = stats.binom.pmf(np.arange(m + 1), m, q)
        acc = np.convolve(acc, scaled)[: target + 1]
    prob = acc[target] if target < acc.size else 0.0
    return ell / m * float(prob)


class Overflow:
    """Marker returned when a sampled process exceeds its cap."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Overflow"


OVERFLOW = Overflow()


def sample_total_progeny(process: GWProcess, seed=None, cap: int = DEFAULT_CAP):
    """One total-progeny draw, or :data:`OVERFLOW` once the total passes ``cap``."""
    out = sample_total_progeny_many(process, 1, seed=seed, cap=cap)[0]
    return OVERFLOW if out < 0 else out.item()


def sample_total_progeny_many(process: GWProcess, size: int, seed=None,
                              cap: int = DEFAULT_CAP) -> np.ndarray:
    """``size`` independent totals, advanced generation by generation in lockstep.

    Overflowed draws are reported as -1.
    """
    if cap <= process.roots:
        raise ValueError("cap must exceed the number of roots")
    rng = np.random.default_rng(seed)
    dist = process.offspring
    weights = dist._int_weights()
    gen = np.full(size, process.roots, dtype=np.int64)
    total = gen.copy()
    alive = gen > 0
    over = np.zeros(size, dtype=bool)
    while alive.any():
        idx = np.flatnonzero(alive)
        g = gen[idx]
        kids = np.zeros(idx.size, dtype=np.int64)
        for w, q in zip(weights, dist.probs):
            kids += w * rng.binomial(g, q)
        gen[idx] = kids
        total[idx] += kids
        blown = total[idx] > cap
        over[idx[blown]] = True
        alive[idx] = (kids > 0) & ~blown
    return np.where(over, -1, total)


def gw_tail_bound(mu: float, M: float, chi: float, ell: int) -> float:
    """Upper bound on P[Z > (1 + chi) ell | Z_0 = ell] for a subcritical process."""
    if mu >= 1:
        raise BadMu("mean offspring must be below 1")
    if mu <= 0:
        raise BadMu("mean offspring must be positive")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if chi < mu / (1.0 - mu) and not math.isclose(chi, mu / (1.0 - mu), rel_tol=1e-12):
        raise BadChi("need chi >= mu / (1 - mu)")
    gap = max(0.0, 1.0 - 1.0 / (1.0 + chi) - mu)
    rate = gap**2 * (1.0 + chi) / (3.0 * M)
    if rate <= 1e-15:
        return math.inf
    return math.exp(-rate * ell) / -math.expm1(-rate)

"""Reference r-neighbourhood bootstrap percolation on a fixed hypergraph.

Rounds are synchronous: every uninfected vertex holding at least ``r``
distinct infected neighbours at the start of a step is infected at its end.
The incremental engine keeps a per-vertex count of infected neighbours and
updates it from the distinct-neighbour lists of newly infected vertices, so a
neighbour shared through several hyperedges is counted once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import OutOfRange, TooLarge
from .hypergraph import Hypergraph, csr_gather

BRUTE_FORCE_MAX_N = 2000


def as_vertex_array(vertices, n: int) -> np.ndarray:
    arr = np.unique(np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                               dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise OutOfRange(f"initial vertices must lie in [0, {n})")
    return arr


@dataclass
class InfectionState:
    h: Hypergraph
    r: int
    infected: np.ndarray
    infected_nbr_count: np.ndarray
    frontier: np.ndarray
    t: int = 0
    trace: list[int] = field(default_factory=list)
    verbose: bool = False
    step_sets: list[np.ndarray] = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.trace[-1])

    def infected_set(self) -> set[int]:
        return set(np.flatnonzero(self.infected).tolist())


def init(h: Hypergraph, r: int, A0, verbose: bool = False) -> InfectionState:
    if r < 2:
        raise ValueError("r must be at least 2")
    seeds = as_vertex_array(A0, h.n)
    infected = np.zeros(h.n, dtype=bool)
    infected[seeds] = True
    indptr, nbrs = h.neighbour_csr
    counts = np.bincount(csr_gather(indptr, nbrs, seeds), minlength=h.n).astype(np.int64)
    state = InfectionState(h, r, infected, counts, seeds, 0, [int(seeds.size)], verbose)
    if verbose:
        state.step_sets.append(seeds)
    return state


def step(state: InfectionState) -> np.ndarray:
    """Advance one synchronous round and return the newly infected vertices."""
    new = np.flatnonzero(~state.infected & (state.infected_nbr_count >= state.r))
    if new.size:
        state.infected[new] = True
        indptr, nbrs = state.h.neighbour_csr
        state.infected_nbr_count += np.bincount(csr_gather(indptr, nbrs, new), minlength=state.h.n)
    state.frontier = new
    state.t += 1
    state.trace.append(state.trace[-1] + int(new.size))
    if state.verbose:
        state.step_sets.append(new)
    return new


def run(state: InfectionState) -> tuple[set[int], list[int]]:
    """Iterate :func:`step` to the fixpoint.

    The trace ends with the final size; the last, empty step is not
    recorded, so ``len(trace) - 1`` is the number of productive steps.
    """
    while True:
        new = step(state)
        if new.size == 0:
            state.trace.pop()
            state.t -= 1
            if state.verbose:
                state.step_sets.pop()
            break
    return state.infected_set(), list(state.trace)


def productive_steps(trace: list[int]) -> int:
    return len(trace) - 1


def final_size(h: Hypergraph, r: int, A0) -> tuple[int, int]:
    """Final infected count and number of productive steps."""
    state = init(h, r, A0)
    run(state)
    return state.size, productive_steps(state.trace)


def brute_force_fixpoint(h: Hypergraph, r: int, A0) -> set[int]:
    """Fixpoint recomputed from scratch every round (no incremental state)."""
    if h.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"brute force is capped at n <= {BRUTE_FORCE_MAX_N}")
    adjacency: list[set[int]] = [set() for _ in range(h.n)]
    for e in h.edges.tolist():
        for u in e:
            adjacency[u].update(e)
    for v in range(h.n):
        adjacency[v].discard(v)
    infected = set(int(v) for v in A0)
    if any(v < 0 or v >= h.n for v in infected):
        raise OutOfRange("initial vertex out of range")
    while True:
        new = {v for v in range(h.n)
               if v not in infected and len(adjacency[v] & infected) >= r}
        if not new:
            return infected
        infected |= new


def trace_json(state: InfectionState) -> dict:
    return {
        "process": "bootstrap",
        "n": state.h.n,
        "k": state.h.k,
        "r": state.r,
        "a0_size": int(state.trace[0]),
        "steps": [int(s) for s in state.trace],
        "final_size": int(state.trace[-1]),
    }

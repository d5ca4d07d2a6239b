"""Mild r-bootstrap percolation: a lower coupling of bootstrap percolation.

Infected vertices are released ("activated") in batches.  In each step only
hyperedges holding exactly one vertex of the current batch and no other
infected vertex are exposed.  An uninfected vertex climbs one level per
distinct batch neighbour it meets through those edges; level r means r
active neighbours.  For r >= 3 level r infects; for r = 2 a vertex reaching
level 2 infects itself and every vertex sharing an exposed edge with it.

Started from the same seed set on the same hypergraph, the final infected
set is contained in the bootstrap one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph
from .percolation import as_vertex_array
from .theory import RegimeParams, eta, log_comb, mild_c_values


@dataclass
class MildSchedule:
    """Batch-size schedule: zeta, the two thresholds and the c(t) table."""

    zeta: float
    t_low: float
    t_high: float
    c_values: list[float]
    growth: tuple = ()  # (n, k, r, p, delta, c0) used to extend c_values

    @classmethod
    def from_params(cls, params: RegimeParams, c0: float, T: int = 64) -> "MildSchedule":
        if params.side != "supercritical":
            params = params.with_side("supercritical")  # validates (1+eps)(1-delta) > 1
        n, k, r, p = params.n, params.k, params.r, params.p
        log_base = (k - 2) * math.log(n) + math.log(p)  # log n^{k-2} p
        zeta = math.exp(((k - 1) * math.log(n) + math.log(p)) / (r + 1))
        t_low = math.exp(-log_base) / zeta
        t_high = math.exp(-log_base) * math.sqrt(zeta)
        growth = (n, k, r, p, params.delta, float(c0))
        return cls(zeta, t_low, t_high, mild_c_values(*growth, T), growth)

    @classmethod
    def for_graph(cls, h: Hypergraph, r: int, p: float, c0: float, delta: float = 0.05,
                  eps: float | None = None) -> "MildSchedule":
        eps = eps if eps is not None else 2.0 * delta / (1.0 - delta)
        return cls.from_params(RegimeParams(h.n, h.k, r, p, eps, delta, "supercritical"), c0)

    @classmethod
    def activate_all(cls) -> "MildSchedule":
        """Activate every infected vertex as soon as it is infected."""
        return cls(math.nan, math.inf, math.inf, [math.inf], (0, 0, 0, 0.0, 0.0, 0.0))

    def c(self, t: int) -> float:
        while t >= len(self.c_values):
            self.c_values.append(_next_c(self.c_values[-1], *self.growth))
        return self.c_values[t]


def _next_c(c: float, n, k, r, p, delta, c0) -> float:
    if math.isinf(c):
        return math.inf
    if c <= 0:
        return float(c0)
    log_term = (math.log1p(-delta) + math.log(eta(k, r)) - math.lgamma(r + 1) + math.log(n)
                + r * (log_comb(n, k - 2, k) + math.log(p)) + r * math.log(c))
    val = math.exp(log_term) + c0 if log_term < 700 else math.inf
    return math.inf if val > n else val


@dataclass
class MildStepRecord:
    t: int
    batch: np.ndarray
    exposed: np.ndarray  # edge ids of F'(t+1)
    infected_before: np.ndarray  # bool mask of C(t)
    newly_infected: np.ndarray


@dataclass
class MildState:
    h: Hypergraph
    r: int
    k: int
    C: np.ndarray  # bool mask
    C_hat: np.ndarray  # bool mask
    level: np.ndarray  # -1 on C(0), else number of active neighbours capped at r
    F: np.ndarray  # bool mask over edge ids
    Xi: np.ndarray  # bool mask over edge ids
    t: int = 0
    trace: dict = field(default_factory=lambda: {"C": [], "levels": [], "activated": [], "xi": []})
    verbose: bool = False
    history: list[MildStepRecord] = field(default_factory=list)

    def level_sizes(self) -> list[int]:
        return [int(np.count_nonzero(self.level >= i)) for i in range(self.r + 1)]

    def level_set(self, i: int) -> set[int]:
        return set(np.flatnonzero(self.level >= i).tolist())

    def infected_set(self) -> set[int]:
        return set(np.flatnonzero(self.C).tolist())


def init(h: Hypergraph, r: int, C0, verbose: bool = False) -> MildState:
    if r < 2:
        raise ValueError("r must be at least 2")
    seeds = as_vertex_array(C0, h.n)
    C = np.zeros(h.n, dtype=bool)
    C[seeds] = True
    level = np.where(C, -1, 0).astype(np.int64)
    state = MildState(h, r, h.k, C, np.zeros(h.n, dtype=bool), level,
                      np.zeros(h.m, dtype=bool), np.zeros(h.m, dtype=bool), verbose=verbose)
    state.trace["C"].append(int(seeds.size))
    state.trace["levels"].append(state.level_sizes())
    state.trace["xi"].append(0)
    return state


def activation_batch_size(state: MildState, schedule: MildSchedule) -> int:
    """Batch size keyed on |C(t) minus activated| against the two thresholds.

    Below ``t_low`` the batch tops the activated set up to min(c(t), |C(t)|);
    the middle and upper cases use ceil(t_low) and ceil(t_high).  The result
    is clamped to [0, |C(t) minus activated|].
    """
    rest = int(np.count_nonzero(state.C & ~state.C_hat))
    if rest == 0:
        return 0
    if rest < schedule.t_low:
        target = min(schedule.c(state.t), float(np.count_nonzero(state.C)))
        size = math.floor(target) - int(np.count_nonzero(state.C_hat))
    elif rest < schedule.t_high:
        size = math.ceil(schedule.t_low)
    else:
        size = math.ceil(schedule.t_high)
    return int(min(max(size, 0), rest))


def mstep(state: MildState, schedule: MildSchedule) -> np.ndarray:
    """Advance one step in place and return the newly infected vertices."""
    h, n = state.h, state.h.n
    size = activation_batch_size(state, schedule)
    batch = np.flatnonzero(state.C & ~state.C_hat)[:size]
    in_batch = np.zeros(n, dtype=bool)
    in_batch[batch] = True
    C_before = state.C.copy()

    if h.m and batch.size:
        edges = h.edges
        n_inf = C_before[edges].sum(axis=1)
        n_bat = in_batch[edges].sum(axis=1)
        exposed = np.flatnonzero((n_inf == 1) & (n_bat == 1))
    else:
        exposed = np.zeros(0, dtype=np.int64)
    state.C_hat[batch] = True
    state.F[exposed] = True

    newly = np.zeros(0, dtype=np.int64)
    old_level = state.level.copy()
    if exposed.size:
        sub = h.edges[exposed]
        bat_pos = np.argmax(in_batch[sub], axis=1)
        hub = sub[np.arange(sub.shape[0]), bat_pos]  # the batch vertex of each edge
        owner = np.repeat(hub, h.k)
        verts = sub.ravel()
        keep = verts != owner
        pair_key = np.unique(owner[keep] * n + verts[keep])
        gain = np.bincount(pair_key % n, minlength=n)
        free = state.level >= 0
        state.level[free] = np.minimum(state.r, state.level[free] + gain[free])

        # edges sharing both their batch vertex and an uninfected vertex with another exposed edge
        keys = owner[keep] * n + verts[keep]
        _, inv, counts = np.unique(keys, return_inverse=True, return_counts=True)
        dup = (counts[inv] >= 2).reshape(sub.shape[0], h.k - 1)
        state.Xi[exposed[dup.any(axis=1)]] = True

        if state.r >= 3:
            cand = np.flatnonzero((state.level >= state.r) & ~state.C)
        else:
            promoted = np.flatnonzero((state.level >= 2) & (old_level < 2))
            cand = _closed_neighbourhood(h, state.F, promoted)
            cand = cand[~state.C[cand]]
        newly = cand
        state.C[newly] = True

    if state.verbose:
        state.history.append(MildStepRecord(state.t, batch, exposed, C_before, newly))
    state.t += 1
    state.trace["C"].append(int(np.count_nonzero(state.C)))
    state.trace["levels"].append(state.level_sizes())
    state.trace["activated"].append(int(batch.size))
    state.trace["xi"].append(int(np.count_nonzero(state.Xi)))
    return newly


def _closed_neighbourhood(h: Hypergraph, F: np.ndarray, centres: np.ndarray) -> np.ndarray:
    if centres.size == 0:
        return centres
    mark = np.zeros(h.n, dtype=bool)
    mark[centres] = True
    exposed = h.edges[F]
    touching = exposed[mark[exposed].any(axis=1)]
    return np.union1d(centres, touching.ravel())


def run_state(state: MildState, schedule: MildSchedule, max_steps: int | None = None) -> MildState:
    """Step until nothing is left to activate and the last step infected nothing.

    A step that neither activates nor infects while c(t) has stopped growing
    also ends the run; ``max_steps`` (default 10 n) is a safety valve.
    """
    limit = max_steps if max_steps is not None else 10 * state.h.n
    while state.t < limit:
        # newly infected vertices are never active yet, so an empty pool also
        # means the previous step infected nothing
        if not np.any(state.C & ~state.C_hat):
            break
        c_now = schedule.c(state.t)
        newly = mstep(state, schedule)
        if state.trace["activated"][-1] == 0 and newly.size == 0:
            c_next = schedule.c(state.t)
            if math.isinf(c_now) or c_next - c_now <= 1e-12 * max(1.0, c_now):
                break
    return state


def run(h: Hypergraph, r: int, C0, schedule: MildSchedule | None = None, p: float | None = None,
        verbose: bool = False) -> tuple[set[int], dict]:
    """Run to completion.

    Without a schedule, :meth:`MildSchedule.for_graph` is used when ``p`` is
    given and :meth:`MildSchedule.activate_all` otherwise.
    """
    state = init(h, r, C0, verbose=verbose)
    if schedule is None:
        if p is None:
            schedule = MildSchedule.activate_all()
        else:
            schedule = MildSchedule.for_graph(h, r, p, c0=float(np.count_nonzero(state.C)))
    run_state(state, schedule)
    return state.infected_set(), state.trace


def productive_steps(trace: dict) -> int:
    sizes = trace["C"]
    return sum(1 for a, b in zip(sizes, sizes[1:]) if b > a)


def trace_json(state: MildState) -> dict:
    sizes = state.trace["C"]
    return {
        "process": "mild",
        "n": state.h.n,
        "k": state.k,
        "r": state.r,
        "a0_size": sizes[0],
        "steps": list(sizes),
        "final_size": sizes[-1],
        "levels": [list(x) for x in state.trace["levels"]],
        "activated": list(state.trace["activated"]),
        "xi": list(state.trace["xi"]),
    }

"""Query-process: an upper coupling of bootstrap percolation.

Each step builds four families of k-set collections from the current and
previous infected sets B(t), B(t-1) and exposed-edge sets F(t), F(t-1):

* ``neutron_star_adjacent`` (single k-sets touching an exposed edge in an
  uninfected vertex),
* ``heavily_infected`` (single k-sets with two or more infected vertices),
* ``widely_overlapping`` (pairs sharing two or more uninfected vertices),
* ``star`` (r k-sets meeting pairwise only in one uninfected hub, each
  carrying exactly one infected vertex).

The families are examined in that order.  A collection survives the discard
rules, is queried, and succeeds iff all of its k-sets are edges; success
exposes the edges and infects vertices.  Started from the same seed set on
the same hypergraph, the final infected set contains the bootstrap one.

``mode="fast"`` enumerates only collections made of present edges, which
yields the same run because failed queries never change state.
``mode="exhaustive"`` enumerates over all k-sets and is used to measure
family sizes on tiny instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import MissingTrace, TooLarge
from .hypergraph import Hypergraph

EXHAUSTIVE_CANDIDATE_CAP = 10**7

STAR = "star"
WIDE = "widely_overlapping"
HEAVY = "heavily_infected"
NEUTRON = "neutron_star_adjacent"
EXAMINATION_ORDER = (NEUTRON, HEAVY, WIDE, STAR)


@dataclass
class CollectionFamily:
    kind: str
    collections: list[tuple]  # each a sorted tuple of k-sets

    def __len__(self) -> int:
        return len(self.collections)

    def __iter__(self):
        return iter(self.collections)


class Families(NamedTuple):
    star: CollectionFamily
    widely_overlapping: CollectionFamily
    heavily_infected: CollectionFamily
    neutron_star_adjacent: CollectionFamily

    def by_kind(self, kind: str) -> CollectionFamily:
        return getattr(self, kind)

    def sizes(self) -> tuple[int, int, int, int]:
        return (len(self.star), len(self.widely_overlapping),
                len(self.heavily_infected), len(self.neutron_star_adjacent))


@dataclass
class StepRecord:
    t: int  # the step just performed is t + 1
    B_prev: frozenset
    B_t: frozenset
    F_prev: frozenset
    F_t: frozenset
    successes: list[tuple[str, tuple]]


@dataclass
class QueryState:
    h: Hypergraph
    r: int
    k: int
    B_prev: frozenset
    B_cur: frozenset
    F_prev: frozenset
    F_cur: frozenset
    t: int = 0
    trace: dict = field(default_factory=lambda: {"B": [], "F": [], "families": []})
    verbose: bool = False
    history: list[StepRecord] = field(default_factory=list)

    @property
    def fresh(self) -> frozenset:
        return self.B_cur - self.B_prev

    def exposed_with_uninfected(self, new_only: bool = True) -> list[tuple]:
        edges = self.F_cur - self.F_prev if new_only else self.F_cur
        return [e for e in edges if any(v not in self.B_cur for v in e)]


def init(h: Hypergraph, r: int, B0, verbose: bool = False) -> QueryState:
    if r < 2:
        raise ValueError("r must be at least 2")
    B0 = frozenset(int(v) for v in B0)
    if any(v < 0 or v >= h.n for v in B0):
        raise ValueError(f"initial vertices must lie in [0, {h.n})")
    state = QueryState(h, r, h.k, frozenset(), B0, frozenset(), frozenset(), verbose=verbose)
    state.trace["B"].append(len(B0))
    state.trace["F"].append(0)
    return state


class _EdgePool:
    """Candidate k-sets: present edges (fast) or every k-set (exhaustive)."""

    def __init__(self, h: Hypergraph, exhaustive: bool):
        self.h = h
        self.exhaustive = exhaustive
        self._by_vertex: dict[int, list[tuple]] = {}
        if not exhaustive:
            indptr, eids = h.incidence
            self._edges = h.edge_tuples()
            self._indptr, self._eids = indptr, eids
        elif math.comb(h.n, h.k) > EXHAUSTIVE_CANDIDATE_CAP:
            raise TooLarge(f"C({h.n},{h.k}) k-sets exceed the exhaustive cap")

    def containing(self, v: int) -> list[tuple]:
        got = self._by_vertex.get(v)
        if got is None:
            if self.exhaustive:
                others = [u for u in range(self.h.n) if u != v]
                got = [tuple(sorted((v,) + rest))
                       for rest in itertools.combinations(others, self.h.k - 1)]
            else:
                ids = self._eids[self._indptr[v]:self._indptr[v + 1]]
                got = [self._edges[i] for i in ids.tolist()]
            self._by_vertex[v] = got
        return got


def build_families(state: QueryState, mode: str = "fast") -> Families:
    """Enumerate the four families for step ``state.t + 1``."""
    if mode not in ("fast", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    pool = _EdgePool(state.h, exhaustive=(mode == "exhaustive"))
    budget = [EXHAUSTIVE_CANDIDATE_CAP if mode == "exhaustive" else math.inf]

    def spend(count: int = 1):
        budget[0] -= count
        if budget[0] < 0:
            raise TooLarge("exhaustive candidate count exceeds the cap")

    B = state.B_cur
    fresh = sorted(state.B_cur - state.B_prev)
    r = state.r

    def n_inf(K):
        return sum(1 for v in K if v in B)

    # heavily-infected
    heavy = set()
    for f in fresh:
        for K in pool.containing(f):
            spend()
            if n_inf(K) >= 2:
                heavy.add(K)

    # neutron-star-adjacent
    exposed_unf = {v for e in state.F_cur for v in e if v not in B}
    new_exposed_unf = {v for e in state.F_cur - state.F_prev for v in e if v not in B}
    neutron = set()
    if exposed_unf:
        for f in fresh:
            for K in pool.containing(f):
                spend()
                if any(v in exposed_unf for v in K):
                    neutron.add(K)
    for u in sorted(new_exposed_unf):
        for K in pool.containing(u):
            spend()
            if n_inf(K) >= 1:
                neutron.add(K)

    # widely-overlapping
    wide = set()
    for f in fresh:
        for K1 in pool.containing(f):
            spend()
            unf1 = [v for v in K1 if v not in B]
            if len(unf1) < 2:
                continue
            for u in unf1:
                for K2 in pool.containing(u):
                    spend()
                    if K2 == K1 or n_inf(K2) < 1:
                        continue
                    shared = sum(1 for v in K2 if v in unf1)
                    if shared >= 2:
                        wide.add((K1, K2) if K1 < K2 else (K2, K1))

    # stars: hubs are uninfected vertices of k-sets with one (fresh) infected vertex
    hubs = set()
    for f in fresh:
        for K in pool.containing(f):
            spend()
            if n_inf(K) == 1:
                hubs.update(v for v in K if v not in B)
    fresh_set = set(fresh)
    stars = []
    for v in sorted(hubs):
        cand = [K for K in pool.containing(v) if n_inf(K) == 1]
        spend(len(cand))
        if len(cand) < r:
            continue
        rests = [frozenset(K) - {v} for K in cand]
        has_fresh = [any(u in fresh_set for u in K) for K in cand]

        def grow(start, chosen, used, fresh_seen):
            if len(chosen) == r:
                if fresh_seen:
                    stars.append(tuple(cand[i] for i in chosen))
                return
            for i in range(start, len(cand)):
                spend()
                if rests[i].isdisjoint(used):
                    chosen.append(i)
                    grow(i + 1, chosen, used | rests[i], fresh_seen or has_fresh[i])
                    chosen.pop()

        grow(0, [], frozenset(), False)

    return Families(
        CollectionFamily(STAR, sorted(stars)),
        CollectionFamily(WIDE, sorted(wide)),
        CollectionFamily(HEAVY, sorted((K,) for K in heavy)),
        CollectionFamily(NEUTRON, sorted((K,) for K in neutron)),
    )


def family_sizes_exhaustive(state: QueryState) -> tuple[int, int, int, int]:
    """Exact (S, W, H, N) over all k-sets; tiny instances only."""
    return build_families(state, mode="exhaustive").sizes()


def observation_bounds(state: QueryState) -> tuple[float, float, float, float]:
    """Upper bounds on (S, W, H, N) for the next step in terms of |B(t)|, |B(t-1)|."""
    n, k, r = state.h.n, state.k, state.r
    b, b_prev = len(state.B_cur), len(state.B_prev)
    comb = lambda a, c: math.comb(a, c) if c >= 0 else 0  # noqa: E731
    S = (b**r - b_prev**r) / math.factorial(r) * n * comb(n, k - 2) ** r
    W = b * (b - b_prev) * n**2 * comb(n, k - 3) ** 2
    H = b * (b - b_prev) * comb(n, k - 2)
    N = 2 * k * r * (b - b_prev) * b * comb(n, k - 2)
    return S, W, H, N


def qstep(state: QueryState, families: Families | None = None,
          rng: np.random.Generator | None = None) -> QueryState:
    """Run one step of the query-process in place.

    ``rng`` shuffles the examination order inside each family; the family
    order itself is fixed.
    """
    if families is None:
        families = build_families(state)
    h = state.h
    Bt, Ft = state.B_cur, state.F_cur
    Phi = set(Ft)
    B = set(Bt)
    # uninfected-at-start vertices lying in some exposed edge
    touched = {v for e in Ft for v in e if v not in Bt}
    ft_by_unf: dict[int, list[tuple]] = {}
    for e in Ft:
        for v in e:
            if v not in Bt:
                ft_by_unf.setdefault(v, []).append(e)
    successes: list[tuple[str, tuple]] = []

    def expose(K):
        Phi.add(K)
        touched.update(v for v in K if v not in Bt)

    for kind in EXAMINATION_ORDER:
        collections = list(families.by_kind(kind))
        if rng is not None:
            rng.shuffle(collections)
        for coll in collections:
            if kind == NEUTRON or kind == HEAVY:
                (K,) = coll
                if K in Phi or not h.has_edge(K):
                    continue
                expose(K)
                B.update(K)
                if kind == NEUTRON:
                    for u in K:
                        for e in ft_by_unf.get(u, ()):
                            B.update(e)
            elif kind == WIDE:
                if any(K in Phi for K in coll) or not all(h.has_edge(K) for K in coll):
                    continue
                for K in coll:
                    expose(K)
                    B.update(K)
            else:
                if any(K in Phi for K in coll):
                    continue
                if any(v in touched for K in coll for v in K if v not in Bt):
                    continue
                if not all(h.has_edge(K) for K in coll):
                    continue
                for K in coll:
                    expose(K)
                if state.r == 2:
                    for K in coll:
                        B.update(K)
                else:
                    B.update(set.intersection(*(set(K) for K in coll)))
            successes.append((kind, coll))

    if state.verbose:
        state.history.append(StepRecord(state.t, state.B_prev, Bt, state.F_prev, Ft, successes))
    state.B_prev, state.B_cur = Bt, frozenset(B)
    state.F_prev, state.F_cur = Ft, frozenset(Phi)
    state.t += 1
    S, W, H, N = families.sizes()
    state.trace["B"].append(len(state.B_cur))
    state.trace["F"].append(len(state.F_cur))
    state.trace["families"].append({"t": state.t, "S": S, "W": W, "H": H, "N": N})
    return state


def run(h: Hypergraph, r: int, B0, rng: np.random.Generator | None = None,
        verbose: bool = False) -> tuple[set[int], dict]:
    """Iterate :func:`qstep` until a step neither exposes nor infects."""
    state = init(h, r, B0, verbose=verbose)
    run_state(state, rng=rng)
    return set(state.B_cur), state.trace


def run_state(state: QueryState, rng: np.random.Generator | None = None) -> QueryState:
    while True:
        before = (len(state.B_cur), len(state.F_cur))
        qstep(state, rng=rng)
        if (len(state.B_cur), len(state.F_cur)) == before:
            break
    return state


def productive_steps(trace: dict) -> int:
    sizes = trace["B"]
    return sum(1 for a, b in zip(sizes, sizes[1:]) if b > a)


def trace_json(state: QueryState) -> dict:
    sizes = state.trace["B"]
    return {
        "process": "query",
        "n": state.h.n,
        "k": state.k,
        "r": state.r,
        "a0_size": sizes[0],
        "steps": list(sizes),
        "final_size": sizes[-1],
        "families": list(state.trace["families"]),
        "exposed": list(state.trace["F"]),
    }


@dataclass
class InfectionForest:
    parent: dict[int, int]
    roots: set[int]
    step_of: dict[int, int]

    def children(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for v, u in self.parent.items():
            out.setdefault(u, set()).add(v)
        return out


def extract_infection_forest(state: QueryState, cut: int = 0) -> InfectionForest:
    """Attach each vertex infected after step ``cut`` to its smallest potential parent.

    Roots are the vertices infected at step ``cut`` (``B(cut) - B(cut-1)``).
    A potential parent of ``v`` (infected at step t+1) is a vertex ``u``
    infected at step t that lies in a successful collection whose edges reach
    ``v``; for neutron-star-adjacent k-sets ``u`` may instead lie in an edge
    exposed at step t that meets the k-set in an uninfected vertex.
    """
    if not state.verbose or len(state.history) != state.t:
        raise MissingTrace("run the query-process with verbose=True")
    step_of: dict[int, int] = {}
    roots: set[int] = set()
    parent: dict[int, int] = {}
    for rec in state.history:
        if rec.t == cut:
            roots = set(rec.B_t - rec.B_prev)
            step_of.update((v, cut) for v in roots)
    if cut == state.t:
        roots = set(state.B_cur - state.B_prev)
        step_of.update((v, cut) for v in roots)
    for idx, rec in enumerate(state.history):
        if rec.t < cut:
            continue
        fresh = rec.B_t - rec.B_prev
        after = state.history[idx + 1].B_t if idx + 1 < len(state.history) else state.B_cur
        newly = after - rec.B_t
        if not newly:
            continue
        f_new = rec.F_t - rec.F_prev
        exposed_unf = {v for e in rec.F_t for v in e if v not in rec.B_t}
        potential: dict[int, set[int]] = {v: set() for v in newly}
        for kind, coll in rec.successes:
            if kind != NEUTRON:
                reach = set().union(*coll)
                parents = reach & fresh
            else:
                (K,) = coll
                hit = [e for e in rec.F_t if any(v in e and v not in rec.B_t for v in K)]
                reach = set(K).union(*hit)
                parents = set()
                if fresh & set(K) and any(v in exposed_unf for v in K if v not in rec.B_t):
                    parents |= fresh & set(K)  # N1 membership
                if any(v in rec.B_t for v in K):
                    for e in hit:
                        if e in f_new:
                            parents |= fresh & set(e)  # N2 membership
            for v in reach & newly:
                potential[v] |= parents
        for v in sorted(newly):
            if not potential[v]:
                raise RuntimeError(f"vertex {v} infected at step {rec.t + 1} has no potential parent")
            parent[v] = min(potential[v])
            step_of[v] = rec.t + 1
    return InfectionForest(parent, roots, step_of)

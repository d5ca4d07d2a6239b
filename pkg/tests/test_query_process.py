import numpy as np
import pytest

from conftest import random_instance
from hyperboot import percolation as P
from hyperboot import query_process as Q
from hyperboot.exceptions import MissingTrace, TooLarge
from hyperboot.hypergraph import Hypergraph, sample_explicit

STAR_H = Hypergraph(3, 2, [(0, 2), (1, 2)])
HEAVY_H = Hypergraph(3, 3, [(0, 1, 2)])


def test_first_step_has_no_neutron_star_adjacent():
    h = sample_explicit(12, 3, 0.2, 3)
    fam = Q.build_families(Q.init(h, 2, [0, 1, 2]), mode="exhaustive")
    assert len(fam.neutron_star_adjacent) == 0


def test_graphs_have_no_widely_overlapping(rng):
    for _ in range(20):
        h, r, A0 = random_instance(rng, n_max=40, k_choices=(2,))
        state = Q.init(h, r, A0)
        while True:
            assert len(Q.build_families(state).widely_overlapping) == 0
            before = (len(state.B_cur), len(state.F_cur))
            Q.qstep(state)
            if (len(state.B_cur), len(state.F_cur)) == before:
                break


def test_heavily_infected_example():
    fam = Q.build_families(Q.init(HEAVY_H, 2, [0, 1]))
    assert fam.heavily_infected.collections == [((0, 1, 2),)]


def test_exhaustive_star_count():
    state = Q.init(Hypergraph(8, 2, []), 2, [0, 1])
    fam = Q.build_families(state, mode="exhaustive")
    assert len(fam.star) == 6
    assert fam.star.collections[0] == ((0, 2), (1, 2))
    S, W, H, N = Q.family_sizes_exhaustive(state)
    assert (S, W, N) == (6, 0, 0)
    assert S <= Q.observation_bounds(state)[0]


def test_stale_state_counts_only_second_neutron_variant():
    h = Hypergraph(5, 2, [(0, 2), (2, 3)])
    state = Q.QueryState(h, 2, 2, frozenset({0}), frozenset({0}), frozenset(), frozenset({(0, 2)}))
    assert Q.family_sizes_exhaustive(state) == (0, 0, 0, 1)


def test_exhaustive_cap():
    with pytest.raises(TooLarge):
        Q.build_families(Q.init(Hypergraph(400, 4, []), 2, [0]), mode="exhaustive")


def test_star_step_example():
    state = Q.init(STAR_H, 2, [0, 1], verbose=True)
    Q.qstep(state)
    assert state.B_cur == {0, 1, 2}
    assert state.history[0].successes == [("star", ((0, 2), (1, 2)))]
    Q.qstep(state)
    assert state.history[1].successes == []
    assert Q.run(STAR_H, 2, [0, 1])[0] == {0, 1, 2}
    assert P.run(P.init(STAR_H, 2, [0, 1]))[0] == {0, 1, 2}


def test_star_with_r3_infects_only_hub():
    h = Hypergraph(7, 3, [(0, 3, 6), (1, 4, 6), (2, 5, 6)])
    final, _ = Q.run(h, 3, [0, 1, 2])
    assert final == {0, 1, 2, 6}


def test_trivial_runs():
    assert Q.run(Hypergraph(6, 3, []), 2, [1, 4])[0] == {1, 4}
    h = sample_explicit(15, 3, 0.1, 8)
    assert Q.run(h, 2, range(15))[0] == set(range(15))
    assert Q.run(HEAVY_H, 2, [0, 1])[0] == {0, 1, 2}


def test_neutron_star_adjacent_pulls_in_exposed_edge():
    # r=3 star at hub 9 exposes three edges but infects only 9; next step the
    # edge {3,6,9} meets the exposed {0,3,9} in the uninfected 3
    h = Hypergraph(10, 3, [(0, 3, 9), (1, 4, 9), (2, 5, 9), (3, 6, 9)])
    state = Q.init(h, 3, [0, 1, 2], verbose=True)
    Q.run_state(state)
    kinds = [[k for k, _ in rec.successes] for rec in state.history]
    assert kinds[0] == ["star"]
    assert kinds[1] == ["neutron_star_adjacent"]
    assert state.history[1].successes[0][1] == ((3, 6, 9),)
    assert state.B_cur == {0, 1, 2, 3, 6, 9}
    A_f, _ = P.run(P.init(h, 3, [0, 1, 2]))
    assert A_f == {0, 1, 2, 9}


def test_coupling_with_shuffled_orders(rng):
    for i in range(150):
        h, r, A0 = random_instance(rng, n_max=150)
        A_f, _ = P.run(P.init(h, r, A0))
        assert A_f <= Q.run(h, r, A0)[0]
        if i < 10:
            for _ in range(5):
                assert A_f <= Q.run(h, r, A0, rng=rng)[0]


def test_step_invariants(rng):
    for _ in range(60):
        h, r, A0 = random_instance(rng, n_max=80)
        state = Q.init(h, r, A0)
        edges = h.edge_set
        while True:
            before_B, before_F = state.B_cur, state.F_cur
            Q.qstep(state)
            assert before_B <= state.B_cur and before_F <= state.F_cur
            assert state.F_cur <= edges
            fresh = state.B_cur - state.B_prev
            assert len(state.exposed_with_uninfected()) <= r * len(fresh)
            if r == 2:
                assert all(v in state.B_cur for e in state.F_cur for v in e)
            if (state.B_cur, state.F_cur) == (before_B, before_F):
                break


def test_observation_bounds_on_reached_states(rng):
    for _ in range(40):
        n = int(rng.integers(5, 11))
        k = int(rng.integers(2, 4))
        r = int(rng.integers(2, 4))
        h = sample_explicit(n, k, float(rng.uniform(0.05, 0.5)), int(rng.integers(1 << 60)))
        state = Q.init(h, r, rng.choice(n, int(rng.integers(1, n)), replace=False))
        for _ in range(4):
            sizes = Q.family_sizes_exhaustive(state)
            bounds = Q.observation_bounds(state)
            assert all(s <= b for s, b in zip(sizes, bounds))
            Q.qstep(state)


def test_fast_mode_is_exhaustive_restricted_to_edges(rng):
    for _ in range(20):
        n = int(rng.integers(5, 10))
        h = sample_explicit(n, 3, 0.3, int(rng.integers(1 << 60)))
        state = Q.init(h, 2, rng.choice(n, 3, replace=False))
        Q.qstep(state)
        fast = Q.build_families(state)
        full = Q.build_families(state, mode="exhaustive")
        for kind in Q.EXAMINATION_ORDER:
            keep = [c for c in full.by_kind(kind) if all(h.has_edge(K) for K in c)]
            assert fast.by_kind(kind).collections == keep


def test_forest_star_example():
    state = Q.init(STAR_H, 2, [0, 1], verbose=True)
    Q.run_state(state)
    forest = Q.extract_infection_forest(state)
    assert forest.roots == {0, 1}
    assert forest.parent == {2: 0}


def test_forest_structure(rng):
    for _ in range(40):
        h, r, A0 = random_instance(rng, n_max=120)
        if len(A0) == 0:
            continue
        state = Q.init(h, r, A0, verbose=True)
        Q.run_state(state)
        forest = Q.extract_infection_forest(state)
        assert forest.roots == set(A0.tolist())
        assert set(forest.parent) == state.B_cur - forest.roots
        for v, u in forest.parent.items():
            assert forest.step_of[v] == forest.step_of[u] + 1
        kids = forest.children()
        seen = set()
        for u, c in kids.items():
            assert not (c & seen)
            seen |= c


def test_forest_needs_verbose_trace():
    state = Q.init(STAR_H, 2, [0, 1])
    Q.run_state(state)
    with pytest.raises(MissingTrace):
        Q.extract_infection_forest(state)


def test_trace_json():
    state = Q.init(STAR_H, 2, [0, 1])
    Q.run_state(state)
    out = Q.trace_json(state)
    assert out["process"] == "query" and out["final_size"] == 3
    assert out["exposed"] == [0, 2, 2]
    assert out["families"][0] == {"t": 1, "S": 1, "W": 0, "H": 0, "N": 0}

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperboot.exceptions import DuplicateVertex, OutOfRange, TooLarge, WrongArity
from hyperboot.hashing import fold_kset, fold_kset_array, mix64, splitmix64, splitmix64_array
from hyperboot.hypergraph import (EdgeOracle, Hypergraph, canonical_kset, count_intersecting_tuples,
                                  edge_present, materialize_from_oracle, neighbours, sample_explicit)


def test_splitmix_reference_value():
    # first output of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_array_twins_match_scalars():
    xs = np.array([0, 1, 2**63, 2**64 - 1, 12345], dtype=np.uint64)
    assert splitmix64_array(xs).tolist() == [splitmix64(int(x)) for x in xs]
    ks = np.array([[0, 1, 2], [3, 7, 9], [10, 11, 40]])
    assert fold_kset_array(99, ks).tolist() == [fold_kset(99, row) for row in ks.tolist()]


def test_mix64_is_order_sensitive():
    assert mix64(1, 2) != mix64(2, 1)


@pytest.mark.parametrize("verts, k, expected", [((3, 1, 2), 3, (1, 2, 3)), ((5, 0), 2, (0, 5))])
def test_canonical_kset(verts, k, expected):
    assert canonical_kset(verts, k) == expected


@pytest.mark.parametrize("verts, k, n, err", [
    ((1, 1, 2), 3, None, DuplicateVertex),
    ((1, 2), 3, None, WrongArity),
    ((1, 2, 9), 3, 5, OutOfRange),
])
def test_canonical_kset_errors(verts, k, n, err):
    with pytest.raises(err):
        canonical_kset(verts, k, n)


def test_oracle_deterministic(rng):
    oracle = EdgeOracle(50, 3, 0.2, seed=7)
    sets = [tuple(sorted(rng.choice(50, 3, replace=False).tolist())) for _ in range(10_000)]
    first = [edge_present(oracle, e) for e in sets]
    assert first == [edge_present(oracle, e) for e in sets]


def test_oracle_extremes():
    for e in itertools.combinations(range(6), 3):
        assert not edge_present(EdgeOracle(6, 3, 0.0, 1), e)
        assert edge_present(EdgeOracle(6, 3, 1.0, 1), e)


def test_oracle_threshold():
    assert EdgeOracle(5, 2, 0.5, 0).threshold == 2**63
    assert EdgeOracle(5, 2, 1.0, 0).threshold == 2**64 - 1


def test_oracle_marginal():
    n, k, p, seeds = 30, 2, 0.3, 200
    total = math.comb(n, k) * seeds
    present = sum(materialize_from_oracle(EdgeOracle(n, k, p, s)).m for s in range(seeds))
    sd = math.sqrt(total * p * (1 - p))
    assert abs(present - total * p) <= 3 * sd


def test_materialize_examples():
    assert materialize_from_oracle(EdgeOracle(5, 2, 1.0, 3)).m == 10
    assert materialize_from_oracle(EdgeOracle(6, 3, 0.0, 3)).m == 0
    a = materialize_from_oracle(EdgeOracle(20, 3, 0.1, 11))
    b = materialize_from_oracle(EdgeOracle(20, 3, 0.1, 11))
    assert a.to_text() == b.to_text()


def test_materialize_cap():
    with pytest.raises(TooLarge):
        materialize_from_oracle(EdgeOracle(1000, 4, 0.1, 0))


def test_sample_explicit_examples():
    assert sample_explicit(5, 2, 1.0, 0).m == 10
    assert sample_explicit(6, 3, 0.0, 0).m == 0
    with pytest.raises(TooLarge):
        sample_explicit(10**6, 3, 0.5, 0)


def test_sample_explicit_mean_edges():
    counts = [sample_explicit(100, 2, 0.05, s).m for s in range(1000)]
    assert abs(np.mean(counts) - 247.5) <= 1.5


def test_sample_explicit_uniform_over_ksets():
    # each of the C(6,3)=20 triples should be present with probability p
    hits = np.zeros(20)
    index = {e: i for i, e in enumerate(itertools.combinations(range(6), 3))}
    trials = 4000
    for s in range(trials):
        for e in sample_explicit(6, 3, 0.3, s).edge_tuples():
            hits[index[e]] += 1
    sd = math.sqrt(trials * 0.3 * 0.7)
    assert np.all(np.abs(hits - trials * 0.3) <= 4 * sd)


def test_sample_explicit_sparse_path_distinct():
    h = sample_explicit(2000, 3, 1e-6, 5)
    assert len(set(h.edge_tuples())) == h.m
    assert np.all(np.diff(h.edges, axis=1) > 0)


def test_incidence_consistency(rng):
    h = sample_explicit(60, 3, 0.01, 4)
    indptr, eids = h.incidence
    assert indptr[-1] == h.k * h.m
    for v in range(h.n):
        listed = set(eids[indptr[v]:indptr[v + 1]].tolist())
        assert listed == {i for i, e in enumerate(h.edge_tuples()) if v in e}


def test_duplicate_edges_rejected():
    with pytest.raises(ValueError):
        Hypergraph(4, 2, [(0, 1), (1, 0)])


def test_neighbours_examples():
    h = Hypergraph(6, 3, [(1, 2, 3)])
    assert neighbours(h, 1) == {2, 3}
    assert neighbours(h, 0) == set()
    h = Hypergraph(6, 3, [(1, 2, 3), (1, 4, 5)])
    assert neighbours(h, 1) == {2, 3, 4, 5}
    with pytest.raises(OutOfRange):
        neighbours(h, 6)


def test_neighbours_symmetric():
    h = sample_explicit(40, 3, 0.005, 9)
    for u in range(h.n):
        for w in neighbours(h, u):
            assert u in neighbours(h, w)


def test_text_roundtrip(tmp_path):
    h = sample_explicit(30, 3, 0.02, 1)
    path = tmp_path / "h.txt"
    h.save(path)
    g = Hypergraph.load(path)
    assert g == h
    lines = path.read_text().splitlines()
    assert lines[0] == f"30 3 {h.m}"
    assert lines[1:] == sorted(lines[1:], key=lambda s: tuple(map(int, s.split())))


def test_intersecting_tuples_examples():
    assert count_intersecting_tuples(Hypergraph(6, 3, [(0, 1, 2), (3, 4, 5)]), {0, 3}, set(), 2) == 0
    h = Hypergraph(6, 3, [(1, 2, 3), (3, 4, 5)])
    assert count_intersecting_tuples(h, {1, 4}, set(), 2) == 1
    assert count_intersecting_tuples(h, {1, 4}, set(), 2, strong=True) == 0
    g = Hypergraph(5, 3, [(0, 1, 2), (0, 1, 3)])
    assert count_intersecting_tuples(g, {2}, set(), 2) == 0  # one edge lacks a U vertex
    assert count_intersecting_tuples(g, {2, 3}, set(), 2, strong=True) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 12), st.floats(0.05, 0.9), st.integers(0, 2**32))
def test_strong_tuples_vanish_for_graphs(n, p, seed):
    h = sample_explicit(n, 2, p, seed)
    U = set(range(0, n, 3))
    assert count_intersecting_tuples(h, U, set(), 2, strong=True) == 0
    assert count_intersecting_tuples(h, U, set(), 3, strong=True) == 0


def test_intersecting_tuples_chain_of_three():
    # (0,5,6)-(1,6,7)-(2,7,8): edges 1-2 share 6, 2-3 share 7; 1 and 3 are disjoint
    h = Hypergraph(9, 3, [(0, 5, 6), (1, 6, 7), (2, 7, 8)])
    assert count_intersecting_tuples(h, {0, 1, 2}, set(), 3) == 1
    assert count_intersecting_tuples(h, {0, 1, 2}, set(), 2) == 2
    assert count_intersecting_tuples(h, {0, 1, 2}, {8}, 2) == 1  # drops the third edge
    assert count_intersecting_tuples(h, {0, 1, 2}, {7}, 2) == 0

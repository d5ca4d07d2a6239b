"""Binomial random k-uniform hypergraphs H_k(n, p).

Two generation paths are provided and both are exactly distributed as
H_k(n, p):

* :func:`materialize_from_oracle` walks every k-set in lexicographic order and
  keeps those accepted by a keyed hash (:class:`EdgeOracle`).  Tiny n only.
* :func:`sample_explicit` draws the edge count from a binomial and then picks
  that many distinct uniform k-sets by rejection.

Vertex ids are 0-based.  A k-set is a plain ascending ``tuple`` of ints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DuplicateVertex, OutOfRange, TooLarge, WrongArity
from .hashing import MASK64, fold_kset, fold_kset_array

KSet = tuple  # ascending tuple of k distinct vertex ids

EXHAUSTIVE_CAP = 10**7
EXPLICIT_EDGE_CAP = 10**8


def canonical_kset(vertices: Iterable[int], k: int, n: int | None = None) -> KSet:
    """Return the sorted tuple for ``vertices`` after validating it as a k-set.

    >>> canonical_kset((3, 1, 2), 3)
    (1, 2, 3)
    """
    vs = [int(v) for v in vertices]
    if len(vs) != k:
        raise WrongArity(f"expected {k} vertices, got {len(vs)}")
    out = tuple(sorted(vs))
    for a, b in zip(out, out[1:]):
        if a == b:
            raise DuplicateVertex(f"vertex {a} repeats in {tuple(vs)}")
    if out and (out[0] < 0 or (n is not None and out[-1] >= n)):
        raise OutOfRange(f"k-set {out} not inside [0, {n})")
    return out


@dataclass(frozen=True)
class EdgeOracle:
    """Deterministic membership test for the k-sets of one H_k(n, p) draw."""

    n: int
    k: int
    p: float
    seed: int
    threshold: int = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        t = math.floor(Fraction(self.p) * (1 << 64))
        object.__setattr__(self, "threshold", min(max(t, 0), MASK64))
        object.__setattr__(self, "seed", int(self.seed) & MASK64)

    @property
    def full(self) -> bool:
        return self.p >= 1.0

    def hash(self, e: Sequence[int]) -> int:
        return fold_kset(self.seed, e)


def edge_present(oracle: EdgeOracle, e: Sequence[int]) -> bool:
    e = canonical_kset(e, oracle.k, oracle.n)
    if oracle.full:
        return True
    return oracle.hash(e) < oracle.threshold


def all_ksets(n: int, k: int) -> np.ndarray:
    """Every k-subset of ``range(n)`` as rows, lexicographic order."""
    count = math.comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=count * k,
    )
    return flat.reshape(count, k)


def materialize_from_oracle(oracle: EdgeOracle) -> "Hypergraph":
    total = math.comb(oracle.n, oracle.k)
    if total > EXHAUSTIVE_CAP:
        raise TooLarge(f"C({oracle.n},{oracle.k}) = {total} exceeds {EXHAUSTIVE_CAP}")
    ks = all_ksets(oracle.n, oracle.k)
    if oracle.full:
        keep = np.ones(len(ks), dtype=bool)
    else:
        keep = fold_kset_array(oracle.seed, ks) < np.uint64(oracle.threshold)
    return Hypergraph(oracle.n, oracle.k, ks[keep], validate=False)


def _row_keys(rows: np.ndarray, n: int) -> np.ndarray | None:
    """Injective int64 key per row, or None when n**k would overflow."""
    k = rows.shape[1]
    if k * math.log2(max(n, 2)) >= 62:
        return None
    keys = np.zeros(len(rows), dtype=np.int64)
    for i in range(k):
        keys = keys * n + rows[:, i]
    return keys


def sample_explicit(n: int, k: int, p: float, seed: int) -> "Hypergraph":
    """Draw H_k(n, p) with ``numpy``'s PCG64 seeded by ``seed``."""
    if k < 1 or n < k:
        total = 0
    else:
        total = math.comb(n, k)
    if total * p > EXPLICIT_EDGE_CAP:
        raise TooLarge(f"expected edge count {total * p:.3g} exceeds {EXPLICIT_EDGE_CAP}")
    rng = np.random.default_rng(int(seed) & MASK64)
    m = int(rng.binomial(total, p)) if total > 0 and p > 0 else 0
    if m == 0:
        return Hypergraph(n, k, np.empty((0, k), dtype=np.int64), validate=False)
    if total <= 10**6 and m > total // 4:
        # dense: choose indices of the lexicographic enumeration directly
        idx = np.sort(rng.choice(total, size=m, replace=False))
        return Hypergraph(n, k, all_ksets(n, k)[idx], validate=False)
    chosen = _sample_distinct_ksets(rng, n, k, m)
    return Hypergraph(n, k, chosen, validate=False)


def _sample_distinct_ksets(rng: np.random.Generator, n: int, k: int, m: int) -> np.ndarray:
    # Sequential rejection: keep draws in order, drop rows with repeated
    # vertices and k-sets already seen; the first m survivors are a uniform
    # m-subset of all k-sets.
    parts: list[np.ndarray] = []
    have = 0
    seen_keys: np.ndarray | None = None
    seen_tuples: set = set()
    while have < m:
        need = m - have
        batch = rng.integers(0, n, size=(int(need * 1.1) + 16, k), dtype=np.int64)
        batch.sort(axis=1)
        ok = np.all(np.diff(batch, axis=1) > 0, axis=1) if k > 1 else np.ones(len(batch), bool)
        batch = batch[ok]
        keys = _row_keys(batch, n)
        if keys is not None:
            _, first = np.unique(keys, return_index=True)
            first.sort()
            batch, keys = batch[first], keys[first]
            if seen_keys is not None:
                fresh = ~np.isin(keys, seen_keys)
                batch, keys = batch[fresh], keys[fresh]
            batch, keys = batch[:need], keys[:need]
            seen_keys = keys if seen_keys is None else np.concatenate([seen_keys, keys])
        else:
            rows = []
            for row in map(tuple, batch.tolist()):
                if row not in seen_tuples:
                    seen_tuples.add(row)
                    rows.append(row)
                    if len(rows) == need:
                        break
            batch = np.array(rows, dtype=np.int64).reshape(-1, k)
        parts.append(batch)
        have += len(batch)
    return np.concatenate(parts)


def _csr(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order]


def csr_gather(indptr: np.ndarray, indices: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate ``indices[indptr[r]:indptr[r+1]]`` over ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return indices[:0]
    starts = indptr[rows]
    lengths = indptr[rows + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return indices[:0]
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return indices[offsets + np.arange(total)]


class Hypergraph:
    """An explicit k-uniform hypergraph on ``range(n)``.

    ``edges`` is an ``(m, k)`` int64 array with ascending rows, stored in
    lexicographic row order.  Incidence and neighbour lists are CSR arrays
    built on first use.  Instances are treated as immutable.
    """

    def __init__(self, n: int, k: int, edges, validate: bool = True):
        self.n = int(n)
        self.k = int(k)
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, self.k)
        if validate:
            self._validate(arr)
        if len(arr) > 1:
            arr = arr[np.lexsort(arr.T[::-1])]
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.edges = arr
        self._incidence = None
        self._neighbours = None
        self._edge_set = None

    def _validate(self, arr: np.ndarray) -> None:
        if arr.size == 0:
            return
        if self.k > 1 and not np.all(np.diff(arr, axis=1) > 0):
            bad = arr[~np.all(np.diff(arr, axis=1) > 0, axis=1)][0]
            raise DuplicateVertex(f"edge {tuple(bad)} is not strictly ascending")
        if arr.min() < 0 or arr.max() >= self.n:
            raise OutOfRange(f"edge vertex outside [0, {self.n})")
        srt = arr[np.lexsort(arr.T[::-1])]
        if len(srt) > 1 and np.any(np.all(srt[1:] == srt[:-1], axis=1)):
            raise ValueError("duplicate edges")

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return self.m

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.k, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, k={self.k}, m={self.m})"

    # -- incidence ---------------------------------------------------------
    @property
    def incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, edge_ids)``: edges incident to each vertex."""
        if self._incidence is None:
            m, k = self.edges.shape
            src = self.edges.reshape(-1)
            eid = np.repeat(np.arange(m, dtype=np.int64), k)
            self._incidence = _csr(src, eid, self.n)
        return self._incidence

    def incident_edges(self, v: int) -> np.ndarray:
        indptr, eids = self.incidence
        return eids[indptr[v]:indptr[v + 1]]

    @property
    def neighbour_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, vertices)`` of distinct neighbours, ascending."""
        if self._neighbours is None:
            m, k = self.edges.shape
            if m == 0 or k < 2:
                self._neighbours = (np.zeros(self.n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))
            else:
                src, dst = [], []
                for i in range(k):
                    for j in range(k):
                        if i != j:
                            src.append(self.edges[:, i])
                            dst.append(self.edges[:, j])
                src = np.concatenate(src)
                dst = np.concatenate(dst)
                if k > 2:
                    key = np.unique(src * self.n + dst)
                    src, dst = key // self.n, key % self.n
                else:
                    order = np.lexsort((dst, src))
                    src, dst = src[order], dst[order]
                self._neighbours = _csr(src, dst, self.n)
        return self._neighbours

    def degree(self) -> np.ndarray:
        indptr, _ = self.incidence
        return np.diff(indptr)

    @property
    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            self._edge_set = frozenset(map(tuple, self.edges.tolist()))
        return self._edge_set

    def has_edge(self, e: Sequence[int]) -> bool:
        return tuple(sorted(int(v) for v in e)) in self.edge_set

    def edge_tuples(self) -> list[tuple]:
        return list(map(tuple, self.edges.tolist()))

    # -- serialisation -----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{self.n} {self.k} {self.m}"]
        lines.extend(" ".join(map(str, row)) for row in self.edges.tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        rows = text.split("\n")
        n, k, m = (int(x) for x in rows[0].split())
        body = [r for r in rows[1:] if r.strip()]
        if len(body) != m:
            raise ValueError(f"header announces {m} edges, found {len(body)}")
        edges = [canonical_kset(r.split(), k, n) for r in body]
        return cls(n, k, np.array(edges, dtype=np.int64).reshape(-1, k))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Hypergraph":
        return cls.from_text(Path(path).read_text())


def neighbours(h: Hypergraph, v: int) -> set[int]:
    if not 0 <= v < h.n:
        raise OutOfRange(f"vertex {v} not in [0, {h.n})")
    indptr, nbrs = h.neighbour_csr
    return set(nbrs[indptr[v]:indptr[v + 1]].tolist())


def count_intersecting_tuples(h: Hypergraph, U, Vp, ell: int, strong: bool = False) -> int:
    """Count unordered intersecting ``ell``-tuples of edges w.r.t. ``U``.

    Only edges with exactly one vertex in ``U`` and none in ``Vp`` take part.
    A tuple is a set of ``ell`` distinct edges that can be ordered as a chain
    in which consecutive edges share a vertex outside ``U | Vp``.  With
    ``strong=True`` some pair of the tuple must also share two or more
    vertices (anywhere).
    """
    U, Vp = set(U), set(Vp)
    if U & Vp:
        raise ValueError("U and Vp must be disjoint")
    if ell < 2:
        raise ValueError("ell must be at least 2")
    blocked = U | Vp
    pool = [e for e in h.edge_tuples() if len(U.intersection(e)) == 1 and not Vp.intersection(e)]
    by_vertex: dict[int, list[int]] = {}
    for i, e in enumerate(pool):
        for v in e:
            if v not in blocked:
                by_vertex.setdefault(v, []).append(i)
    sets = [frozenset(e) for e in pool]
    found: set[frozenset] = set()

    def extend(chain: list[int]) -> None:
        if len(chain) == ell:
            members = frozenset(chain)
            if strong and not any(
                len(sets[a] & sets[b]) >= 2 for a, b in itertools.combinations(chain, 2)
            ):
                return
            found.add(members)
            return
        last = pool[chain[-1]]
        nxt = set()
        for v in last:
            nxt.update(by_vertex.get(v, ()))
        for j in sorted(nxt):
            if j not in chain:
                chain.append(j)
                extend(chain)
                chain.pop()

    for i in range(len(pool)):
        extend([i])
    return len(found)

"""Keyed 64-bit mixing used for seed derivation and the edge oracle.

The constants and fold order below are part of the on-disk contract: changing
any of them changes which hyperedges a given ``(seed, p)`` oracle produces.

``splitmix64(x)``
    The SplitMix64 output function applied to ``x + GOLDEN``.
``mix64(key, value)``
    ``splitmix64(key ^ splitmix64(value))``.
``fold_kset(seed, vertices)``
    ``h = splitmix64(seed)``, then for the i-th vertex ``v`` in ascending
    order ``h = splitmix64(h ^ ((v + 1) * LANE[i]))`` where
    ``LANE[i] = GOLDEN * (2 i + 1) mod 2**64``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64(key: int, value: int) -> int:
    return splitmix64((key & MASK64) ^ splitmix64(value & MASK64))


def lane(i: int) -> int:
    return (GOLDEN * (2 * i + 1)) & MASK64


def fold_kset(seed: int, vertices) -> int:
    h = splitmix64(seed & MASK64)
    for i, v in enumerate(vertices):
        h = splitmix64(h ^ (((int(v) + 1) * lane(i)) & MASK64))
    return h


# numpy twins, bit-identical to the scalar versions above

def splitmix64_array(x: np.ndarray) -> np.ndarray:
    z = x.astype(np.uint64, copy=True)
    z += np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def fold_kset_array(seed: int, ksets: np.ndarray) -> np.ndarray:
    """Row-wise :func:`fold_kset` over an ``(m, k)`` array of sorted k-sets."""
    ksets = np.asarray(ksets)
    m, k = ksets.shape
    with np.errstate(over="ignore"):
        h = np.full(m, splitmix64(seed & MASK64), dtype=np.uint64)
        for i in range(k):
            term = (ksets[:, i].astype(np.uint64) + np.uint64(1)) * np.uint64(lane(i))
            h = splitmix64_array(h ^ term)
    return h

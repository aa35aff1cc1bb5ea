"""Shared fixtures and small oracles for the test suite."""

from __future__ import annotations

import numpy as np

TRIANGLE = np.array([0, 1, 1, 2, 2, 0], dtype=np.uint64)  # n0=3, m0=3

# n=10, d=2, no seed; frozen from the scalar hash implementations and
# cross-checked against the sequential fill
GOLDEN_SIMPLE_N10_D2 = [
    (0, 0), (0, 0), (1, 1), (1, 0), (2, 1), (2, 1), (3, 0), (3, 2), (4, 2), (4, 1),
    (5, 3), (5, 3), (6, 1), (6, 4), (7, 4), (7, 2), (8, 5), (8, 5), (9, 1), (9, 1),
]
GOLDEN_CRC_N10_D2 = [
    (0, 0), (0, 0), (1, 0), (1, 0), (2, 1), (2, 2), (3, 3), (3, 3), (4, 3), (4, 0),
    (5, 0), (5, 3), (6, 6), (6, 0), (7, 0), (7, 0), (8, 4), (8, 4), (9, 5), (9, 0),
]


def ring_edges(k: int) -> np.ndarray:
    """Cycle 0-1-...-(k-1)-0 as a flat endpoint array (n0=k, m0=k)."""
    flat = []
    for i in range(k):
        flat += (i, (i + 1) % k)
    return np.array(flat, dtype=np.uint64)


def complete_edges(k: int) -> np.ndarray:
    flat = []
    for u in range(k):
        for v in range(u + 1, k):
            flat += (u, v)
    return np.array(flat, dtype=np.uint64)


def random_seed_graph(rng: np.random.Generator, k: int, m: int) -> np.ndarray:
    """m random (possibly repeated) edges over k nodes, every node touched.

    A ring underlay guarantees max node ID = k-1 so n0 is always k.
    """
    flat = list(ring_edges(k))
    for _ in range(m):
        flat += (int(rng.integers(k)), int(rng.integers(k)))
    return np.array(flat, dtype=np.uint64)


def naive_rank_all(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inclusive popcount scan over a packed little-endian bit vector."""
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:nbits]
    return bits.cumsum()


def degree_sum(edges: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    """Per-node degree (self-loops count 2) and the total."""
    deg = np.bincount(edges.astype(np.int64).ravel(), minlength=n)
    return deg, int(deg.sum())

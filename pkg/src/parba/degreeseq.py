"""Arbitrary per-node degree support.

With individual degrees the source of edge ``e`` is no longer a closed-form
division: it is the unique node ``v`` with ``W[v] <= e < W[v] + d_v`` where
``W`` holds prefix sums of the degree sequence.  Three interchangeable
lookups are provided: a rank bit vector (constant time), binary search over
``W``, and a deferred sort-and-merge pass for whole batches.  All three must
emit identical results; the generator exposes the choice for testing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Node degrees for nodes n0..n-1, one entry per node, zeros permitted.
DegreeSequence = np.ndarray

_WORD = 64
_WORDS_PER_SUPER = 8  # 512-bit superblocks
_LOW_ALL_BUT_BIT0 = np.uint64(0xFFFFFFFFFFFFFFFE)

# Half-open cap keeping 2*m and byte offsets 16*(m - m0) inside int64.
MAX_EDGES = 1 << 58


def _popcount_swar(x: np.ndarray) -> np.ndarray:
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + (
        (x >> np.uint64(2)) & np.uint64(0x3333333333333333)
    )
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


if hasattr(np, "bitwise_count"):

    def _popcount64(x: np.ndarray) -> np.ndarray:
        return np.bitwise_count(x).astype(np.uint64, copy=False)

else:
    _popcount64 = _popcount_swar


@dataclass(frozen=True)
class PrefixIndex:
    """Prefix sums of a degree sequence.

    ``W[v - n0]`` is the index of node v's first edge (``m0`` plus the sum
    of all earlier degrees); ``m`` is the total edge count including the
    seed graph's ``m0`` edges.
    """

    W: np.ndarray
    degrees: np.ndarray
    m: int
    m0: int
    n0: int

    @property
    def n_nodes(self) -> int:
        return len(self.W)


@dataclass(frozen=True)
class RankBits:
    """Bit vector with a one at each node's first edge index, plus a
    two-level rank directory (64-bit words, 8-word superblocks).

    ``owners`` maps rank index to node ID and is None when every node owns
    at least one edge (then the k-th one-bit simply belongs to node n0+k).
    """

    nbits: int
    words: np.ndarray
    super_counts: np.ndarray
    word_offsets: np.ndarray
    n_ones: int
    owners: np.ndarray | None
    n0: int
    m0: int


def build_prefix(degrees: DegreeSequence, m0: int, n0: int) -> PrefixIndex:
    degrees = np.asarray(degrees)
    if degrees.ndim != 1:
        raise ParameterError("degree sequence must be one-dimensional")
    if degrees.size and degrees.dtype.kind not in "ui":
        raise ParameterError("degrees must be integers")
    if degrees.dtype.kind == "i" and degrees.size and int(degrees.min()) < 0:
        raise ParameterError("degrees must be non-negative")
    if m0 < 0 or n0 < 0:
        raise ParameterError("m0 and n0 must be non-negative")
    degrees = degrees.astype(np.uint64, copy=False)

    if degrees.size:
        csum = np.cumsum(degrees)
        # Each degree fits in 64 bits, so any wraparound shows up as a
        # decreasing step in the running sum.
        if np.any(csum[1:] < csum[:-1]):
            raise ParameterError("degree sequence overflows the edge index space")
        total = int(csum[-1])
    else:
        csum = degrees
        total = 0
    m = m0 + total
    if m >= MAX_EDGES:
        raise ParameterError(f"total edge count {m} exceeds the supported maximum")

    W = np.empty(degrees.size, dtype=np.uint64)
    if degrees.size:
        W[0] = m0
        W[1:] = m0 + csum[:-1]
    return PrefixIndex(W=W, degrees=degrees, m=m, m0=m0, n0=n0)


def build_rank_bits(pi: PrefixIndex) -> RankBits:
    nbits = pi.m
    nwords = (nbits + _WORD - 1) // _WORD
    words = np.zeros(nwords, dtype=np.uint64)

    owning = pi.degrees > 0
    pos = pi.W[owning]
    if pos.size:
        np.bitwise_or.at(words, pos >> np.uint64(6), np.uint64(1) << (pos & np.uint64(63)))

    popc = _popcount64(words)
    before = np.zeros(nwords, dtype=np.uint64)
    if nwords:
        np.cumsum(popc[:-1], out=before[1:])
    super_counts = before[::_WORDS_PER_SUPER].copy()
    word_offsets = (before - np.repeat(super_counts, _WORDS_PER_SUPER)[:nwords]).astype(
        np.uint16
    )

    if bool(owning.all()):
        owners = None
    else:
        owners = (np.flatnonzero(owning) + pi.n0).astype(np.uint64)
    return RankBits(
        nbits=nbits,
        words=words,
        super_counts=super_counts,
        word_offsets=word_offsets,
        n_ones=int(pos.size),
        owners=owners,
        n0=pi.n0,
        m0=pi.m0,
    )


def rank1(rb: RankBits, e: int) -> int:
    """Number of one-bits at positions 0..e inclusive."""
    if not 0 <= e < rb.nbits:
        raise ParameterError(f"rank position {e} out of range [0, {rb.nbits})")
    w = e >> 6
    word = int(rb.words[w]) & ((1 << ((e & 63) + 1)) - 1)
    return int(rb.super_counts[w >> 3]) + int(rb.word_offsets[w]) + word.bit_count()


def rank1_many(rb: RankBits, es: np.ndarray) -> np.ndarray:
    es = np.asarray(es, dtype=np.uint64)
    w = es >> np.uint64(6)
    # Inclusive mask for bit b is ~(0xFF..FE << b); the shift stays < 64.
    mask = ~(_LOW_ALL_BUT_BIT0 << (es & np.uint64(63)))
    partial = _popcount64(rb.words[w] & mask)
    return rb.super_counts[w >> np.uint64(3)] + rb.word_offsets[w] + partial


def node_of_edge(e: int, rb: RankBits) -> int:
    """Owning node of generated edge index e, by constant-time rank."""
    if not rb.m0 <= e < rb.nbits:
        raise ParameterError(f"edge index {e} out of generated range [{rb.m0}, {rb.nbits})")
    r = rank1(rb, e)
    if rb.owners is None:
        return rb.n0 + r - 1
    return int(rb.owners[r - 1])


def node_of_edge_many(es: np.ndarray, rb: RankBits) -> np.ndarray:
    ranks = rank1_many(rb, es)
    if rb.owners is None:
        return np.uint64(rb.n0) + ranks - np.uint64(1)
    return rb.owners[ranks - np.uint64(1)]


def node_of_edge_bisect(e: int, pi: PrefixIndex) -> int:
    """Owning node of generated edge index e, by binary search over W."""
    if not pi.m0 <= e < pi.m:
        raise ParameterError(f"edge index {e} out of generated range [{pi.m0}, {pi.m})")
    # Rightmost node whose first edge is <= e; zero-degree nodes share their
    # successor's W value and are skipped by the right-biased search.
    k = int(np.searchsorted(pi.W, np.uint64(e), side="right")) - 1
    return pi.n0 + k


def node_of_edge_bisect_many(es: np.ndarray, pi: PrefixIndex) -> np.ndarray:
    ks = np.searchsorted(pi.W, np.asarray(es, dtype=np.uint64), side="right") - 1
    return (ks + pi.n0).astype(np.uint64)


def owners_of_edges_deferred(es: np.ndarray, pi: PrefixIndex) -> np.ndarray:
    """Owning nodes for a batch of edge indices via sort, linear merge
    against W, and order restoration.  Output matches the rank path exactly.
    """
    from ._kernels import _merge_owner_positions

    es = np.asarray(es, dtype=np.uint64)
    order = np.argsort(es, kind="stable")
    ks = _merge_owner_positions(es[order], pi.W)
    out = np.empty(es.size, dtype=np.uint64)
    out[order] = ks.astype(np.uint64) + np.uint64(pi.n0)
    return out


def resolve_targets_deferred(
    pairs: list[tuple[int, int]], pi: PrefixIndex
) -> list[tuple[int, int]]:
    """Resolve (edge index i, even terminal half-position r) pairs to edges.

    Sorts by r, merges once against W to find each r/2's owning node,
    restores the original order, and emits (source node, target node) per
    input pair.
    """
    if not pairs:
        return []
    for i, r in pairs:
        if r & 1:
            raise ParameterError(f"terminal half-position {r} for edge {i} is odd")
        if r >> 1 >= pi.m:
            raise ParameterError(f"terminal half-position {r} out of range")
    idx = np.array([i for i, _ in pairs], dtype=np.uint64)
    half = np.array([r >> 1 for _, r in pairs], dtype=np.uint64)
    sources = owners_of_edges_deferred(idx, pi)
    targets = owners_of_edges_deferred(half, pi)
    return [(int(u), int(v)) for u, v in zip(sources, targets)]


def first_half_pos(v: int, pi: PrefixIndex) -> int:
    """Chain start 2*W[v] for self-loop avoidance with individual degrees."""
    k = v - pi.n0
    if not 0 <= k < pi.n_nodes:
        raise ParameterError(f"node {v} outside generated range")
    if int(pi.degrees[k]) == 0:
        raise ParameterError(f"node {v} has degree zero and owns no edges")
    return 2 * int(pi.W[k])


def read_degree_file(path: str) -> DegreeSequence:
    """Parse one decimal degree per line; line v gives node n0+v's degree."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    degrees = []
    for line_no, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not (s.isascii() and s.isdigit()):
            raise ParameterError(f"{path}:{line_no}: expected a decimal degree, got {raw!r}")
        degrees.append(int(s))
    return np.array(degrees, dtype=np.uint64)

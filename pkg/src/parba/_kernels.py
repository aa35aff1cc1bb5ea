"""Compiled inner loops for chain resolution and the sequential array fill.

These kernels exist purely for throughput; their outputs are bit-identical
to the scalar functions in :mod:`parba.hashing` and :mod:`parba.generator`
(asserted by the test suite).  All arithmetic is uint64 with wraparound
semantics matching the exact integer definitions of the hash families.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

from .hashing import CRC32C_TABLE_U64, HashConfig, HashKind

_ZERO = uint64(0)
_ONE = uint64(1)


@njit(cache=True)
def _h_simple(r, mult):
    t = uint64(r * mult)
    a_lo = t & uint64(0xFFFFFFFF)
    a_hi = t >> uint64(32)
    b_lo = r & uint64(0xFFFFFFFF)
    b_hi = r >> uint64(32)
    cross = a_hi * b_lo + ((a_lo * b_lo) >> uint64(32))
    tt = a_lo * b_hi + (cross & uint64(0xFFFFFFFF))
    return a_hi * b_hi + (cross >> uint64(32)) + (tt >> uint64(32))


@njit(cache=True)
def _h_crc(r, s0, s1, table):
    c0 = s0
    c1 = s1
    w = r
    for _ in range(8):
        b = w & uint64(0xFF)
        c0 = table[c0 & uint64(0xFF) ^ b] ^ (c0 >> uint64(8))
        c1 = table[c1 & uint64(0xFF) ^ b] ^ (c1 >> uint64(8))
        w >>= uint64(8)
    return ((c0 << uint64(32)) + c1) % r


@njit(cache=True)
def _chain_simple(vals, stop_below, mult):
    """Walk r := h_simple(r) in place until r < stop_below or r is even.

    The loop body runs at least once.  Returns the total hash evaluations.
    """
    probes = _ZERO
    for k in range(vals.size):
        r = vals[k]
        while True:
            r = _h_simple(r, mult)
            probes += _ONE
            if r < stop_below or (r & _ONE) == _ZERO:
                break
        vals[k] = r
    return probes


@njit(cache=True)
def _chain_crc(vals, stop_below, s0, s1, table):
    """CRC-family twin of :func:`_chain_simple`."""
    probes = _ZERO
    for k in range(vals.size):
        r = vals[k]
        while True:
            r = _h_crc(r, s0, s1, table)
            probes += _ONE
            if r < stop_below or (r & _ONE) == _ZERO:
                break
        vals[k] = r
    return probes


@njit(cache=True)
def _bb_fill_simple(e, m0, d, n0, mult):
    """Sequential edge-array fill (uniform degree), multiply-shift hash.

    Used by the benchmark only; the correctness oracle is the pure-Python
    implementation in :mod:`parba.oracle`.
    """
    m = e.size // 2
    for i in range(m0, m):
        e[2 * i] = uint64((i - m0) // d + n0)
        x = _h_simple(uint64(2 * i + 1), mult)
        e[2 * i + 1] = e[x]


@njit(cache=True)
def _bb_fill_crc(e, m0, d, n0, s0, s1, table):
    m = e.size // 2
    for i in range(m0, m):
        e[2 * i] = uint64((i - m0) // d + n0)
        x = _h_crc(uint64(2 * i + 1), s0, s1, table)
        e[2 * i + 1] = e[x]


@njit(cache=True)
def _merge_owner_positions(sorted_keys, starts):
    """Single linear merge of ascending keys against ascending block starts.

    Returns, for each key, the index of the last block whose start is <= key
    (i.e. the block owning that key).  Blocks may be empty: equal consecutive
    starts are skipped, so the owning block is always the last one starting
    at or before the key.
    """
    out = np.empty(sorted_keys.size, dtype=np.int64)
    j = 0
    last = starts.size - 1
    for k in range(sorted_keys.size):
        key = sorted_keys[k]
        while j < last and starts[j + 1] <= key:
            j += 1
        out[k] = j
    return out


def resolve_chain_block(r0: np.ndarray, stop_below: int, cfg: HashConfig) -> tuple[np.ndarray, int]:
    """Resolve many hash chains at once.

    ``r0`` is consumed as scratch space conceptually but not modified; a
    fresh array holding the terminal value of each chain is returned along
    with the total number of hash evaluations.
    """
    vals = np.array(r0, dtype=np.uint64, copy=True)
    sb = uint64(stop_below)
    if cfg.kind is HashKind.CRC:
        s0, s1 = cfg.crc_seeds()
        probes = _chain_crc(vals, sb, uint64(s0), uint64(s1), CRC32C_TABLE_U64)
    else:
        probes = _chain_simple(vals, sb, uint64(cfg.simple_multiplier()))
    return vals, int(probes)


def warmup() -> None:
    """Force kernel compilation (or cache load) ahead of worker forks."""
    r = np.array([1, 9, 11], dtype=np.uint64)
    resolve_chain_block(r, 0, HashConfig(kind=HashKind.SIMPLE))
    resolve_chain_block(r, 0, HashConfig(kind=HashKind.CRC))
    _merge_owner_positions(np.array([0], dtype=np.uint64), np.array([0], dtype=np.uint64))

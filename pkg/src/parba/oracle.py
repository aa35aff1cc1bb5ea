"""Sequential edge-array generator used as ground truth.

This is the classic linear-time preferential-attachment construction: fill
a flat array E of 2m node IDs left to right, where E[2i] is edge i's source
and E[2i+1] copies a uniformly chosen earlier position E[x], x in 0..2i.
Every position is a node ID, so copying an even position picks a node
proportionally to 1 + in-degree and copying an odd one proportionally to
out-degree, which together yield preferential attachment.

In derandomized mode x is h(2i+1) with the same hash the parallel path
uses; the parallel chain recomputation then reproduces this array entry for
entry, which is exactly what the equivalence tests assert.  In rng mode x
is drawn from a seeded PCG64 stream (for distribution-level checks only).
"""

from __future__ import annotations

from typing import Literal

import numpy as np

from .errors import ParameterError
from .generator import GenParams
from .hashing import HashKind, hash_value

EdgeArray = np.ndarray

# The oracle materializes the whole array; keep it desk-scale.
DEFAULT_CAP = 10**8

Mode = Literal["derandomized", "rng"]
Engine = Literal["auto", "python", "compiled"]


def _sources(p: GenParams) -> np.ndarray:
    if p.d is not None:
        gen = np.arange(p.m - p.m0, dtype=np.uint64) // np.uint64(p.d) + np.uint64(p.n0)
    else:
        gen = np.repeat(
            np.arange(p.n0, p.n, dtype=np.uint64), p.degrees.astype(np.int64)
        )
    return gen


def bb_generate(
    p: GenParams,
    mode: Mode = "derandomized",
    rng_seed: int = 0,
    cap: int = DEFAULT_CAP,
    engine: Engine = "auto",
) -> EdgeArray:
    """Build the full edge array E[0..2m-1] sequentially.

    Plain mode only; the option flags have no sequential reference and are
    checked by property instead.  ``engine`` selects the pure-Python fill
    (the actual oracle) or the compiled fill used by the benchmark; both
    produce identical arrays, which the tests also assert.
    """
    if p.no_self_loops or p.no_parallel_edges:
        raise ParameterError("the sequential oracle supports plain mode only")
    if mode not in ("derandomized", "rng"):
        raise ParameterError(f"unknown mode {mode!r}")
    if p.m > cap:
        raise ParameterError(f"m = {p.m} exceeds the oracle cap {cap}")

    e = np.empty(2 * p.m, dtype=np.uint64)
    e[: 2 * p.m0] = p.seed_edges

    if mode == "rng":
        rng = np.random.Generator(np.random.PCG64(rng_seed))
        sources = _sources(p)
        idx = np.arange(p.m0, p.m, dtype=np.int64)
        xs = rng.integers(0, 2 * idx + 1)  # inclusive upper bound 2i
        for k in range(idx.size):
            i = int(idx[k])
            e[2 * i] = sources[k]
            e[2 * i + 1] = e[xs[k]]
        return e

    if engine == "auto":
        engine = "compiled" if p.d is not None else "python"
    if engine == "compiled":
        if p.d is None:
            raise ParameterError("the compiled fill supports uniform degrees only")
        from . import _kernels
        from .hashing import CRC32C_TABLE_U64

        if p.hash.kind is HashKind.CRC:
            s0, s1 = p.hash.crc_seeds()
            _kernels._bb_fill_crc(
                e, p.m0, p.d, p.n0, np.uint64(s0), np.uint64(s1), CRC32C_TABLE_U64
            )
        else:
            _kernels._bb_fill_simple(
                e, p.m0, p.d, p.n0, np.uint64(p.hash.simple_multiplier())
            )
        return e
    if engine != "python":
        raise ParameterError(f"unknown engine {engine!r}")

    sources = _sources(p)
    for k in range(p.m - p.m0):
        i = p.m0 + k
        e[2 * i] = sources[k]
        x = hash_value(2 * i + 1, p.hash)
        e[2 * i + 1] = e[x]
    return e


def edge_list(e: EdgeArray, m0: int = 0) -> np.ndarray:
    """View the generated region of an edge array as (m - m0, 2) pairs."""
    return e[2 * m0 :].reshape(-1, 2)

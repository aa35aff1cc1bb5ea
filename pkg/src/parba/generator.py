"""Independent recomputation of any edge of a preferential-attachment graph.

Edge i of the Batagelj-Brandes edge array E satisfies E[2i] = floor((i-m0)/d)
+ n0 and E[2i+1] = E[x] with x drawn uniformly from 0..2i.  Replacing the
random draw by a hash h(r) in 0..r-1 makes every entry a pure function of
its index: follow r := h(r) from r0 = 2i+1 until r is even (a source
position, giving the target by the closed form) or r drops into the seed
region.  Each edge is therefore computable in isolation, in any order, on
any worker, with identical results.

Option flags generalize the chain: no_self_loops starts every chain of node
v at v's own first half-position (so targets resolve strictly before v),
and no_parallel_edges re-runs a chain under attempt-salted hash families
until the target is fresh for the node.  Both need per-node processing.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from . import degreeseq
from .degreeseq import MAX_EDGES, PrefixIndex, RankBits
from .errors import InfeasibleTargetsError, ParameterError
from .hashing import HashConfig, hash_value

Resolution = Literal["rank", "bisect", "deferred"]


class Edge(NamedTuple):
    source: int
    target: int


class ChainResult(NamedTuple):
    """Terminal state of one hash chain.

    Exactly one of half_pos (even position in the generated region) and
    seed_pos (position < 2*m0, indexing seed_edges) is set.
    """

    half_pos: int | None
    seed_pos: int | None
    probes: int


@dataclass(frozen=True, eq=False)
class GenParams:
    """Full definition of one graph family member.

    Exactly one of d (uniform out-degree) and degrees (per-node sequence
    for nodes n0..n-1) must be given.  The seed graph is a flat array of
    2*m0 node IDs, all < n0; m0 is derived from its length.
    """

    n: int
    d: int | None = None
    degrees: np.ndarray | None = None
    n0: int = 0
    seed_edges: np.ndarray | None = None
    no_self_loops: bool = False
    no_parallel_edges: bool = False
    hash: HashConfig = field(default_factory=HashConfig)
    max_attempts: int | None = None

    def __post_init__(self) -> None:
        if (self.d is None) == (self.degrees is None):
            raise ParameterError("exactly one of d and degrees must be given")
        if self.n0 < 0 or self.n < self.n0:
            raise ParameterError(f"need 0 <= n0 <= n, got n0={self.n0}, n={self.n}")
        if self.d is not None and self.d < 1:
            raise ParameterError(f"uniform degree must be >= 1, got {self.d}")
        seed = self.seed_edges
        seed = np.array([] if seed is None else seed, dtype=np.uint64, copy=True)
        if seed.size % 2:
            raise ParameterError("seed_edges must hold two endpoints per edge")
        if seed.size and int(seed.max()) >= self.n0:
            raise ParameterError("seed graph references node IDs >= n0")
        object.__setattr__(self, "seed_edges", seed)
        if self.degrees is not None:
            degrees = np.asarray(self.degrees)
            if degrees.size != self.n - self.n0:
                raise ParameterError(
                    f"degree sequence length {degrees.size} != n - n0 = {self.n - self.n0}"
                )
            pi = degreeseq.build_prefix(degrees, self.m0, self.n0)
            object.__setattr__(self, "degrees", pi.degrees)
            self.__dict__["prefix"] = pi
        if (self.no_self_loops or self.no_parallel_edges) and self.m0 < 1:
            raise ParameterError(
                "no_self_loops / no_parallel_edges require a seed graph (m0 >= 1): "
                "with an empty seed the first edge is the forced self-loop (0, 0)"
            )
        if self.max_attempts is not None and self.max_attempts < 1:
            raise ParameterError("max_attempts must be >= 1")
        if self.m >= MAX_EDGES:
            raise ParameterError(f"total edge count {self.m} exceeds the supported maximum")

    @property
    def m0(self) -> int:
        return self.seed_edges.size // 2

    @property
    def m(self) -> int:
        if self.d is not None:
            return self.m0 + (self.n - self.n0) * self.d
        return self.prefix.m

    @functools.cached_property
    def prefix(self) -> PrefixIndex:
        raise ParameterError("uniform-degree parameters have no prefix index")

    @functools.cached_property
    def rank_bits(self) -> RankBits:
        return degreeseq.build_rank_bits(self.prefix)

    def degree_of(self, v: int) -> int:
        if not self.n0 <= v < self.n:
            raise ParameterError(f"node {v} outside generated range [{self.n0}, {self.n})")
        if self.d is not None:
            return self.d
        return int(self.degrees[v - self.n0])

    def first_edge_of(self, v: int) -> int:
        if not self.n0 <= v < self.n:
            raise ParameterError(f"node {v} outside generated range [{self.n0}, {self.n})")
        if self.d is not None:
            return self.m0 + (v - self.n0) * self.d
        return int(self.prefix.W[v - self.n0])


def edge_count(p: GenParams) -> int:
    return p.m


def resolve_chain(r0: int, stop_below: int, hash: HashConfig) -> ChainResult:
    """Iterate r := h(r) until r is even or r < stop_below (seed region).

    The body runs at least once, so an even r0 is hashed before testing.
    """
    if r0 < 1:
        raise ParameterError(f"chain start must be >= 1, got {r0}")
    r = r0
    probes = 0
    while True:
        r = hash_value(r, hash)
        probes += 1
        if r < stop_below:
            return ChainResult(half_pos=None, seed_pos=r, probes=probes)
        if r & 1 == 0:
            return ChainResult(half_pos=r, seed_pos=None, probes=probes)


def _source_of(i: int, p: GenParams) -> int:
    if p.d is not None:
        return (i - p.m0) // p.d + p.n0
    return degreeseq.node_of_edge(i, p.rank_bits)


def _target_of(cr: ChainResult, p: GenParams) -> int:
    if cr.seed_pos is not None:
        return int(p.seed_edges[cr.seed_pos])
    j = cr.half_pos >> 1
    if p.d is not None:
        return (j - p.m0) // p.d + p.n0
    return degreeseq.node_of_edge(j, p.rank_bits)


def generate_edge(i: int, p: GenParams) -> Edge:
    """Edge i in plain mode (both option flags off)."""
    if p.no_self_loops or p.no_parallel_edges:
        raise ParameterError(
            "option flags need whole-node processing; use generate_node_edges"
        )
    if not p.m0 <= i < p.m:
        raise ParameterError(f"edge index {i} out of range [{p.m0}, {p.m})")
    cr = resolve_chain(2 * i + 1, 2 * p.m0, p.hash)
    return Edge(_source_of(i, p), _target_of(cr, p))


def _node_edges_with_probes(v: int, p: GenParams) -> tuple[list[Edge], int]:
    first = p.first_edge_of(v)
    dv = p.degree_of(v)
    stop = 2 * p.m0
    edges: list[Edge] = []
    probes = 0

    if not p.no_parallel_edges:
        for i in range(first, first + dv):
            r0 = 2 * first if p.no_self_loops else 2 * i + 1
            cr = resolve_chain(r0, stop, p.hash)
            probes += cr.probes
            edges.append(Edge(v, _target_of(cr, p)))
        return edges, probes

    cap = p.max_attempts if p.max_attempts is not None else 64 * dv
    seen: set[int] = set()
    for i in range(first, first + dv):
        r0 = 2 * first if p.no_self_loops else 2 * i + 1
        for attempt in range(cap):
            cfg = p.hash.with_attempt(attempt) if attempt else p.hash
            cr = resolve_chain(r0, stop, cfg)
            probes += cr.probes
            target = _target_of(cr, p)
            if target not in seen:
                break
        else:
            raise InfeasibleTargetsError(
                f"edge {i} of node {v}: no fresh target in {cap} attempts "
                f"(distinct-target pool may be smaller than the degree)"
            )
        seen.add(target)
        edges.append(Edge(v, target))
    return edges, probes


def generate_node_edges(v: int, p: GenParams) -> list[Edge]:
    """All edges of node v in edge-index order, honoring the option flags."""
    if not p.n0 <= v < p.n:
        raise ParameterError(f"node {v} outside generated range [{p.n0}, {p.n})")
    if not (p.no_self_loops or p.no_parallel_edges):
        first = p.first_edge_of(v)
        return [generate_edge(i, p) for i in range(first, first + p.degree_of(v))]
    edges, _ = _node_edges_with_probes(v, p)
    return edges


def _owner_at_boundary(p: GenParams, pos: int) -> int:
    """Node whose first edge sits exactly at pos; error if misaligned."""
    if p.d is not None:
        if (pos - p.m0) % p.d:
            raise ParameterError(f"batch boundary {pos} is not a node boundary")
        return p.n0 + (pos - p.m0) // p.d
    v = degreeseq.node_of_edge_bisect(pos, p.prefix)
    if p.first_edge_of(v) != pos:
        raise ParameterError(f"batch boundary {pos} is not a node boundary")
    return v


def _check_node_boundary(p: GenParams, pos: int) -> None:
    if pos != p.m:
        _owner_at_boundary(p, pos)


def _resolve_nodes(es: np.ndarray, p: GenParams, resolution: Resolution) -> np.ndarray:
    if resolution == "rank":
        return degreeseq.node_of_edge_many(es, p.rank_bits)
    if resolution == "bisect":
        return degreeseq.node_of_edge_bisect_many(es, p.prefix)
    if resolution == "deferred":
        return degreeseq.owners_of_edges_deferred(es, p.prefix)
    raise ParameterError(f"unknown resolution {resolution!r}")


def generate_block(
    lo: int, hi: int, p: GenParams, resolution: Resolution = "rank"
) -> tuple[np.ndarray, int]:
    """Edges lo..hi-1 as an (hi-lo, 2) uint64 array, plus total hash probes.

    Plain and self-loop-free modes run vectorized through the compiled
    chain kernel; duplicate rejection falls back to per-node generation
    (batches are node-granular whenever an option flag is set).
    """
    if not (p.m0 <= lo <= hi <= p.m):
        raise ParameterError(f"block [{lo}, {hi}) out of range [{p.m0}, {p.m}]")
    if lo == hi:
        return np.empty((0, 2), dtype=np.uint64), 0

    if p.no_parallel_edges:
        v = _owner_at_boundary(p, lo)
        out = np.empty((hi - lo, 2), dtype=np.uint64)
        pos = lo
        probes = 0
        while pos < hi:
            edges, pr = _node_edges_with_probes(v, p)
            if pos + len(edges) > hi:
                raise ParameterError(f"batch boundary {hi} is not a node boundary")
            out[pos - lo : pos - lo + len(edges)] = edges
            pos += len(edges)
            probes += pr
            if pos < hi:
                v = degreeseq.node_of_edge_bisect(pos, p.prefix) if p.d is None else v + 1
        return out, probes

    from ._kernels import resolve_chain_block

    idx = np.arange(lo, hi, dtype=np.uint64)
    if p.no_self_loops:
        _owner_at_boundary(p, lo)
        _check_node_boundary(p, hi)
        if p.d is not None:
            firsts = np.uint64(p.m0) + ((idx - np.uint64(p.m0)) // np.uint64(p.d)) * np.uint64(p.d)
        else:
            firsts = p.prefix.W[
                np.searchsorted(p.prefix.W, idx, side="right") - 1
            ]
        r0 = np.uint64(2) * firsts
    else:
        r0 = np.uint64(2) * idx + np.uint64(1)

    vals, probes = resolve_chain_block(r0, 2 * p.m0, p.hash)

    out = np.empty((hi - lo, 2), dtype=np.uint64)
    if p.d is not None:
        out[:, 0] = (idx - np.uint64(p.m0)) // np.uint64(p.d) + np.uint64(p.n0)
    else:
        out[:, 0] = _resolve_nodes(idx, p, resolution)

    if p.m0:
        seed_mask = vals < np.uint64(2 * p.m0)
        gen_mask = ~seed_mask
        if seed_mask.any():
            out[seed_mask, 1] = p.seed_edges[vals[seed_mask]]
    else:
        gen_mask = slice(None)

    half = vals[gen_mask] >> np.uint64(1)
    if p.d is not None:
        out[gen_mask, 1] = (half - np.uint64(p.m0)) // np.uint64(p.d) + np.uint64(p.n0)
    else:
        out[gen_mask, 1] = _resolve_nodes(half, p, resolution)
    return out, probes

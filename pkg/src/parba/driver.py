"""Batch planning and multi-worker execution with streaming consumers.

The edge-index range [m0, m) is cut into batches which workers claim from a
shared cursor (dynamic load balancing).  Each worker owns a private
consumer context; contexts are merged once all batches are done.  Because
every edge is a pure function of its index, the merged result is identical
for every workers/batch_size combination, which the tests assert at both
the value level (counters) and the byte level (files).
"""

from __future__ import annotations

import enum
import multiprocessing
import time
import traceback
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import degreeseq
from .errors import GenerationError, ParameterError
from .generator import Edge, GenParams, Resolution, generate_block

DEFAULT_BATCH_SIZE = 1 << 16


class Granularity(enum.Enum):
    EDGE = "edge"
    NODE = "node"


@dataclass(frozen=True)
class Batch:
    lo: int
    hi: int
    granularity: Granularity = Granularity.EDGE


@dataclass(frozen=True)
class WorkerStats:
    worker_id: int
    batches: int
    edges: int
    probes: int
    seconds: float


@dataclass(frozen=True)
class RunStats:
    edges_emitted: int
    hash_probes: int
    elapsed: float
    per_worker: tuple[WorkerStats, ...]


class Consumer:
    """Streaming edge consumer contract.

    Workers call new_context once, then accept/accept_block for every edge
    of every batch they claim; finalize_context makes the context picklable
    for the trip back to the parent, and merge combines all contexts into
    the final result.  merge must be order-independent.
    """

    def new_context(self, worker_id: int) -> Any:
        return None

    def accept(self, ctx: Any, i: int, edge: Edge) -> None:
        raise NotImplementedError

    def accept_block(self, ctx: Any, lo: int, edges: np.ndarray) -> None:
        for k in range(edges.shape[0]):
            self.accept(ctx, lo + k, Edge(int(edges[k, 0]), int(edges[k, 1])))

    def finalize_context(self, ctx: Any) -> Any:
        return ctx

    def merge(self, contexts: Sequence[Any]) -> Any:
        raise NotImplementedError


class DiscardConsumer(Consumer):
    """Counts edges and drops them (pure streaming, no artifact)."""

    def new_context(self, worker_id: int) -> int:
        return 0

    def accept_block(self, ctx: int, lo: int, edges: np.ndarray) -> int:
        return ctx + edges.shape[0]

    def merge(self, contexts: Sequence[int]) -> int:
        return sum(contexts)


class CollectConsumer(Consumer):
    """Gathers all edges into one (m - m0, 2) array, in edge-index order.

    Test and verify helper; materializes the graph, so desk scale only.
    """

    def new_context(self, worker_id: int) -> list:
        return []

    def accept_block(self, ctx: list, lo: int, edges: np.ndarray) -> list:
        ctx.append((lo, edges.copy()))
        return ctx

    def merge(self, contexts: Sequence[list]) -> np.ndarray:
        chunks = sorted((c for ctx in contexts for c in ctx), key=lambda c: c[0])
        if not chunks:
            return np.empty((0, 2), dtype=np.uint64)
        return np.concatenate([arr for _, arr in chunks])


def _next_node_boundary(p: GenParams, lo: int) -> int:
    if p.d is not None:
        return lo + p.d
    v = degreeseq.node_of_edge_bisect(lo, p.prefix)
    return lo + p.degree_of(v)


def _round_down_to_node(p: GenParams, pos: int) -> int:
    if p.d is not None:
        return p.m0 + ((pos - p.m0) // p.d) * p.d
    k = int(np.searchsorted(p.prefix.W, np.uint64(pos), side="right")) - 1
    return int(p.prefix.W[k])


def plan_batches(
    p: GenParams, batch_size: int, granularity: Granularity | None = None
) -> list[Batch]:
    """Cover [m0, m) exactly once with half-open batches.

    Node granularity (forced whenever an option flag is set) rounds each
    boundary down to a node's first edge, advancing by at least one whole
    node so oversized nodes still make progress.
    """
    if batch_size < 1:
        raise ParameterError(f"batch_size must be >= 1, got {batch_size}")
    if granularity is None:
        node_gran = p.no_self_loops or p.no_parallel_edges
    else:
        node_gran = granularity is Granularity.NODE
    gran = Granularity.NODE if node_gran else Granularity.EDGE

    batches = []
    lo = p.m0
    while lo < p.m:
        hi = min(lo + batch_size, p.m)
        if node_gran and hi < p.m:
            hi = _round_down_to_node(p, hi)
            if hi <= lo:
                hi = min(_next_node_boundary(p, lo), p.m)
        batches.append(Batch(lo, hi, gran))
        lo = hi
    return batches


def _work_loop(
    worker_id: int,
    p: GenParams,
    consumer: Consumer,
    batches: list[Batch],
    claim,
    abort,
    resolution: Resolution,
) -> tuple[Any, WorkerStats]:
    start = time.perf_counter()
    ctx = consumer.new_context(worker_id)
    nbatches = edges = probes = 0
    while not (abort is not None and abort.is_set()):
        k = claim()
        if k >= len(batches):
            break
        b = batches[k]
        arr, pr = generate_block(b.lo, b.hi, p, resolution=resolution)
        ret = consumer.accept_block(ctx, b.lo, arr)
        if ret is not None:
            ctx = ret
        nbatches += 1
        edges += b.hi - b.lo
        probes += pr
    stats = WorkerStats(worker_id, nbatches, edges, probes, time.perf_counter() - start)
    return consumer.finalize_context(ctx), stats


def _worker_main(worker_id, p, consumer, batches, cursor, abort, resolution, out_q):
    try:
        result, stats = _work_loop(
            worker_id, p, consumer, batches, _mp_claim(cursor), abort, resolution
        )
        out_q.put(("done", worker_id, result, stats))
    except BaseException:
        abort.set()
        out_q.put(("error", worker_id, traceback.format_exc(), None))


def _mp_claim(cursor):
    def claim() -> int:
        with cursor.get_lock():
            k = cursor.value
            cursor.value = k + 1
            return k

    return claim


def run(
    p: GenParams,
    consumer: Consumer,
    workers: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    resolution: Resolution = "rank",
) -> tuple[Any, RunStats]:
    """Generate every edge exactly once and feed it to the consumer.

    Returns the merged consumer result and run statistics.  Worker failures
    abort the whole run with a diagnostic naming the failing worker and its
    traceback.
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    batches = plan_batches(p, batch_size)
    if p.degrees is not None and resolution == "rank":
        p.rank_bits  # build once pre-fork; children then share it read-only
    t0 = time.perf_counter()

    if workers == 1:
        counter = iter(range(len(batches) + 1))
        result, stats = _work_loop(
            0, p, consumer, batches, lambda: next(counter), None, resolution
        )
        results, per_worker = [result], [stats]
    else:
        from ._kernels import warmup

        warmup()  # compile in the parent so forked children share the code
        mp = multiprocessing.get_context("fork")
        cursor = mp.Value("q", 0)
        abort = mp.Event()
        out_q = mp.Queue()
        procs = [
            mp.Process(
                target=_worker_main,
                args=(w, p, consumer, batches, cursor, abort, resolution, out_q),
            )
            for w in range(workers)
        ]
        for pr in procs:
            pr.start()
        messages = [out_q.get() for _ in procs]
        for pr in procs:
            pr.join()
        errors = [msg for msg in messages if msg[0] == "error"]
        if errors:
            _, worker_id, tb, _ = errors[0]
            raise GenerationError(f"worker {worker_id} failed:\n{tb}")
        results = [msg[2] for msg in sorted(messages, key=lambda msg: msg[1])]
        per_worker = [msg[3] for msg in sorted(messages, key=lambda msg: msg[1])]

    merged = consumer.merge(results)
    stats = RunStats(
        edges_emitted=sum(ws.edges for ws in per_worker),
        hash_probes=sum(ws.probes for ws in per_worker),
        elapsed=time.perf_counter() - t0,
        per_worker=tuple(per_worker),
    )
    return merged, stats

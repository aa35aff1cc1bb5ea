"""Batch planning and parallel execution tests: coverage, determinism
across schedules, dynamic balancing, and failure propagation."""

from __future__ import annotations

import time

import numpy as np
import pytest

from helpers import TRIANGLE, ring_edges
from parba import oracle
from parba.driver import (
    Batch,
    CollectConsumer,
    Consumer,
    DiscardConsumer,
    Granularity,
    plan_batches,
    run,
)
from parba.errors import GenerationError, ParameterError
from parba.generator import GenParams

UNIFORM = GenParams(n=40, d=3, n0=3, seed_edges=TRIANGLE)  # m0=3, m=114


# ---------------------------------------------------------------------------
# plan_batches


def test_plan_batches_edge_granularity():
    p = GenParams(n=30, d=2)  # m = 60
    got = plan_batches(p, 30)
    assert got == [Batch(0, 30), Batch(30, 60)]
    got = plan_batches(p, 25)
    assert got == [Batch(0, 25), Batch(25, 50), Batch(50, 60)]


def test_plan_batches_starts_at_m0():
    assert plan_batches(UNIFORM, 1000) == [Batch(3, 114)]
    assert plan_batches(UNIFORM, 50)[0] == Batch(3, 53)


def test_plan_batches_node_granularity_uniform():
    p = GenParams(n=30, d=4, n0=3, seed_edges=TRIANGLE)  # m0=3, nodes own 4 edges
    got = plan_batches(p, 30, granularity=Granularity.NODE)
    # 3+30=33 rounds down to 3+28=31, a multiple of d past m0
    assert got[0] == Batch(3, 31, Granularity.NODE)
    assert all(((b.lo - 3) % 4 == 0) and (b.hi == p.m or (b.hi - 3) % 4 == 0) for b in got)


def test_plan_batches_node_granularity_degseq():
    degrees = np.array([4, 2, 3], dtype=np.uint64)
    p = GenParams(n=3, degrees=degrees)  # W = [0, 4, 6], m = 9
    got = plan_batches(p, 5, granularity=Granularity.NODE)
    assert got == [
        Batch(0, 4, Granularity.NODE),
        Batch(4, 9, Granularity.NODE),
    ]


def test_plan_batches_oversized_node_still_advances():
    degrees = np.array([10, 1], dtype=np.uint64)
    p = GenParams(n=2, degrees=degrees)
    got = plan_batches(p, 3, granularity=Granularity.NODE)
    assert got == [Batch(0, 10, Granularity.NODE), Batch(10, 11, Granularity.NODE)]


def test_plan_batches_node_granularity_forced_by_flags():
    p = GenParams(n=30, d=4, n0=3, seed_edges=TRIANGLE, no_self_loops=True)
    got = plan_batches(p, 30)
    assert all(b.granularity is Granularity.NODE for b in got)
    assert all((b.lo - 3) % 4 == 0 for b in got)


def test_plan_batches_validation():
    with pytest.raises(ParameterError):
        plan_batches(UNIFORM, 0)


def test_plan_batches_partition_property():
    rng = np.random.default_rng(40)
    for _ in range(20):
        n0 = int(rng.integers(0, 4))
        seed = ring_edges(n0) if n0 else None
        if rng.random() < 0.5:
            p = GenParams(n=int(rng.integers(n0 + 1, 80)), d=int(rng.integers(1, 6)),
                          n0=n0, seed_edges=seed)
        else:
            n = int(rng.integers(n0 + 1, 80))
            degrees = rng.integers(0, 6, size=n - n0).astype(np.uint64)
            p = GenParams(n=n, n0=n0, seed_edges=seed, degrees=degrees)
        gran = Granularity.NODE if rng.random() < 0.5 else Granularity.EDGE
        batches = plan_batches(p, int(rng.integers(1, 40)), granularity=gran)
        # exact cover of [m0, m), no gaps, no overlaps
        pos = p.m0
        for b in batches:
            assert b.lo == pos
            assert b.hi > b.lo
            pos = b.hi
        assert pos == p.m


# ---------------------------------------------------------------------------
# run


def test_run_matches_oracle_across_schedules():
    p = GenParams(n=800, d=2, n0=3, seed_edges=TRIANGLE)
    want = oracle.edge_list(oracle.bb_generate(p, engine="python"), p.m0)
    for workers in (1, 2, 4):
        for batch_size in (64, 1 << 16):
            got, stats = run(p, CollectConsumer(), workers=workers, batch_size=batch_size)
            assert np.array_equal(got, want)
            assert stats.edges_emitted == p.m - p.m0


def test_run_degree_sequence_and_resolutions():
    rng = np.random.default_rng(41)
    degrees = rng.integers(0, 5, size=300).astype(np.uint64)
    p = GenParams(n=303, n0=3, seed_edges=TRIANGLE, degrees=degrees)
    want = oracle.edge_list(oracle.bb_generate(p, engine="python"), p.m0)
    for resolution in ("rank", "bisect", "deferred"):
        got, _ = run(p, CollectConsumer(), workers=2, batch_size=100, resolution=resolution)
        assert np.array_equal(got, want)


def test_run_stats():
    result, stats = run(UNIFORM, DiscardConsumer(), workers=1, batch_size=10)
    assert result == UNIFORM.m - UNIFORM.m0 == 111
    assert stats.edges_emitted == 111
    assert stats.hash_probes > 0
    assert stats.elapsed > 0
    assert len(stats.per_worker) == 1
    ws = stats.per_worker[0]
    assert ws.batches == len(plan_batches(UNIFORM, 10)) == 12
    assert ws.edges == 111


def test_run_multiworker_stats_cover_all_batches():
    result, stats = run(UNIFORM, DiscardConsumer(), workers=3, batch_size=10)
    assert result == 111
    assert len(stats.per_worker) == 3
    assert sum(ws.batches for ws in stats.per_worker) == 12
    assert sum(ws.edges for ws in stats.per_worker) == 111
    assert [ws.worker_id for ws in stats.per_worker] == [0, 1, 2]


def test_run_validation():
    with pytest.raises(ParameterError):
        run(UNIFORM, DiscardConsumer(), workers=0)


class _ExplodingConsumer(Consumer):
    def new_context(self, worker_id):
        return None

    def accept_block(self, ctx, lo, edges):
        raise RuntimeError("synthetic consumer failure")

    def merge(self, contexts):
        return None


def test_run_propagates_worker_failure():
    with pytest.raises(GenerationError, match="worker .* failed") as exc:
        run(UNIFORM, _ExplodingConsumer(), workers=2, batch_size=10)
    assert "synthetic consumer failure" in str(exc.value)


def test_run_single_worker_failure_surfaces_directly():
    with pytest.raises(RuntimeError, match="synthetic consumer failure"):
        run(UNIFORM, _ExplodingConsumer(), workers=1)


class _PerEdgeSum(Consumer):
    """Exercises the default accept_block -> accept fan-out."""

    def new_context(self, worker_id):
        return {"sum": 0, "count": 0}

    def accept(self, ctx, i, edge):
        ctx["sum"] += edge.source + edge.target
        ctx["count"] += 1

    def merge(self, contexts):
        return (
            sum(c["sum"] for c in contexts),
            sum(c["count"] for c in contexts),
        )


def test_consumer_default_per_edge_path():
    p = GenParams(n=100, d=2)
    arr, _ = run(p, CollectConsumer(), workers=1)
    want = (int(arr.sum()), p.m)
    assert run(p, _PerEdgeSum(), workers=1, batch_size=17)[0] == want
    assert run(p, _PerEdgeSum(), workers=2, batch_size=17)[0] == want


class _BitmapConsumer(Consumer):
    """Marks every received edge index; proves exactly-once delivery."""

    def __init__(self, m0: int, m: int):
        self.m0 = m0
        self.m = m

    def new_context(self, worker_id):
        return np.zeros(self.m - self.m0, dtype=np.int64)

    def accept_block(self, ctx, lo, edges):
        ctx[lo - self.m0 : lo - self.m0 + edges.shape[0]] += 1
        return ctx

    def merge(self, contexts):
        total = np.zeros(self.m - self.m0, dtype=np.int64)
        for c in contexts:
            total += c
        return total


def test_every_edge_delivered_exactly_once():
    p = GenParams(n=500, d=3, n0=3, seed_edges=TRIANGLE)
    for workers in (1, 3):
        seen, _ = run(p, _BitmapConsumer(p.m0, p.m), workers=workers, batch_size=97)
        assert (seen == 1).all()


class _SleepyConsumer(Consumer):
    """Stalls on the first batch so the other worker must drain the rest."""

    def __init__(self, slow_lo: int):
        self.slow_lo = slow_lo

    def new_context(self, worker_id):
        return 0

    def accept_block(self, ctx, lo, edges):
        if lo == self.slow_lo:
            time.sleep(0.6)
        return ctx + 1

    def merge(self, contexts):
        return list(contexts)


def test_dynamic_load_balancing():
    p = GenParams(n=40, d=3, n0=3, seed_edges=TRIANGLE)  # 111 edges
    batches = plan_batches(p, 10)
    assert len(batches) == 12
    counts, stats = run(p, _SleepyConsumer(p.m0), workers=2, batch_size=10)
    assert sum(counts) == 12
    # whichever worker hit the sleeper lost the race for everything else
    assert max(counts) >= 10
    assert sum(ws.batches for ws in stats.per_worker) == 12

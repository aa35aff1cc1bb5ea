"""Command-line surface and file formats.

Subcommands: generate (run the parallel generator into a file or the
void), degrees (first-K degree CSV, optionally a power-law exponent fit),
verify (diff the parallel path against the sequential oracle), bench
(throughput, probe counts, and the sequential-fill comparison).

Binary edge lists are positional: edge i occupies byte offset 16*(i - m0)
as two little-endian unsigned 64-bit words, so concurrent workers writing
disjoint batches produce byte-identical files regardless of scheduling.
Text output is defined for single-worker runs only.
"""

from __future__ import annotations

import argparse
import enum
import os
import struct
import sys
import time
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from . import analytics, driver, oracle
from .degreeseq import read_degree_file
from .driver import DEFAULT_BATCH_SIZE, CollectConsumer, DiscardConsumer
from .errors import (
    GenerationError,
    InfeasibleTargetsError,
    ParameterError,
    SeedGraphFormatError,
)
from .generator import Edge, GenParams
from .hashing import HashConfig, HashKind

DEFAULT_FIRST_K = 10**5


class OutputFormat(enum.Enum):
    NONE = "none"
    BINARY = "binary"
    TEXT = "text"


def read_seed_graph(path: str) -> tuple[int, int, np.ndarray]:
    """Read 'u v' edge lines; blank lines and '#' comments are ignored.

    Returns (n0, m0, seed_edges) with n0 = 1 + max node ID and seed_edges
    flattened in file order.
    """
    flat: list[int] = []
    max_id = -1
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            s = raw.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            if len(parts) != 2:
                raise SeedGraphFormatError(path, line_no, f"expected 'u v', got {raw.rstrip()!r}")
            try:
                u, v = int(parts[0], 10), int(parts[1], 10)
            except ValueError:
                raise SeedGraphFormatError(path, line_no, f"expected 'u v', got {raw.rstrip()!r}") from None
            if u < 0 or v < 0:
                raise SeedGraphFormatError(path, line_no, "negative node ID")
            flat += (u, v)
            max_id = max(max_id, u, v)
    return max_id + 1, len(flat) // 2, np.array(flat, dtype=np.uint64)


def write_edges(
    stream: Iterable[tuple[int, Edge]],
    format: OutputFormat,
    path: str,
    m0: int = 0,
) -> int:
    """Write (edge index, Edge) pairs; returns the number of edges written.

    Binary writes are positional (index-addressed), text writes follow
    stream order, and NONE drains the stream without touching the disk.
    """
    count = 0
    if format is OutputFormat.NONE:
        for _ in stream:
            count += 1
        return count
    if format is OutputFormat.BINARY:
        fd = os.open(path, os.O_RDWR | os.O_CREAT | os.O_TRUNC, 0o644)
        try:
            for i, e in stream:
                _pwrite_all(fd, struct.pack("<QQ", e[0], e[1]), 16 * (i - m0))
                count += 1
        finally:
            os.close(fd)
        return count
    if format is OutputFormat.TEXT:
        with open(path, "w", encoding="utf-8") as fh:
            for _, e in stream:
                fh.write(f"{e[0]} {e[1]}\n")
                count += 1
        return count
    raise ParameterError(f"unknown output format {format!r}")


def _pwrite_all(fd: int, data: bytes, offset: int) -> None:
    view = memoryview(data)
    pos = offset
    try:
        while view:
            k = os.pwrite(fd, view, pos)
            pos += k
            view = view[k:]
    except OSError as e:
        raise GenerationError(f"write failed at byte offset {pos}: {e}") from e


class EdgeFileWriter(driver.Consumer):
    """Positional binary writer: edge i lands at byte offset 16*(i - m0).

    The file is opened and sized in the parent before workers fork, so all
    workers share the descriptor and write disjoint regions.
    """

    def __init__(self, path: str, m0: int, total_edges: int):
        self.m0 = m0
        self.fd = os.open(path, os.O_RDWR | os.O_CREAT | os.O_TRUNC, 0o644)
        os.ftruncate(self.fd, 16 * total_edges)

    def new_context(self, worker_id: int) -> int:
        return 0

    def accept_block(self, ctx: int, lo: int, edges: np.ndarray) -> int:
        data = edges.astype("<u8", copy=False).tobytes()
        _pwrite_all(self.fd, data, 16 * (lo - self.m0))
        return ctx + len(data)

    def merge(self, contexts) -> int:
        return sum(contexts)

    def close(self) -> None:
        os.close(self.fd)


class TextEdgeWriter(driver.Consumer):
    """Stream-order 'u v' lines; valid for single-worker runs only."""

    def __init__(self, fh: TextIO):
        self.fh = fh

    def new_context(self, worker_id: int) -> int:
        return 0

    def accept_block(self, ctx: int, lo: int, edges: np.ndarray) -> int:
        if edges.shape[0]:
            self.fh.write("\n".join(f"{u} {v}" for u, v in edges.tolist()) + "\n")
        return ctx + edges.shape[0]

    def merge(self, contexts) -> int:
        return sum(contexts)


@dataclass(frozen=True)
class CliConfig:
    """Parsed flags for one invocation, validated before any generation."""

    subcommand: str
    n: int | None = None
    d: int | None = None
    degree_file: str | None = None
    seed_graph_file: str | None = None
    n0: int | None = None
    no_self_loops: bool = False
    no_parallel_edges: bool = False
    hash_kind: str = "crc"
    hash_seed0: int = 0
    hash_seed1: int = 1
    workers: int = 1
    batch_size: int = DEFAULT_BATCH_SIZE
    output: str | None = None
    format: OutputFormat | None = None
    first_k: int | None = None
    xmin: int | None = None

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "CliConfig":
        fmt = getattr(ns, "format", None)
        return cls(
            subcommand=ns.subcommand,
            n=getattr(ns, "nodes", None),
            d=getattr(ns, "degree", None),
            degree_file=getattr(ns, "degrees_file", None),
            seed_graph_file=getattr(ns, "seed_graph", None),
            n0=getattr(ns, "n0", None),
            no_self_loops=getattr(ns, "no_self_loops", False),
            no_parallel_edges=getattr(ns, "no_parallel_edges", False),
            hash_kind=ns.hash,
            hash_seed0=ns.hash_seed0,
            hash_seed1=ns.hash_seed1,
            workers=getattr(ns, "workers", 1),
            batch_size=getattr(ns, "batch_size", DEFAULT_BATCH_SIZE),
            output=getattr(ns, "output", None),
            format=OutputFormat(fmt) if fmt is not None else None,
            first_k=getattr(ns, "first_k", None),
            xmin=getattr(ns, "xmin", None),
        )

    def resolved_format(self) -> OutputFormat:
        if self.format is not None:
            return self.format
        return OutputFormat.BINARY if self.output else OutputFormat.NONE

    def validate(self) -> GenParams:
        """Cross-field checks; returns the generation parameters."""
        if self.workers < 1:
            raise ParameterError(f"--workers must be >= 1, got {self.workers}")
        if self.batch_size < 1:
            raise ParameterError(f"--batch-size must be >= 1, got {self.batch_size}")
        if self.first_k is not None and self.first_k < 0:
            raise ParameterError(f"--first-k must be >= 0, got {self.first_k}")
        if self.xmin is not None and self.xmin < 1:
            raise ParameterError(f"--xmin must be >= 1, got {self.xmin}")

        fmt = self.resolved_format()
        if fmt in (OutputFormat.BINARY, OutputFormat.TEXT) and not self.output:
            raise ParameterError(f"--format {fmt.value} requires -o/--output")
        if fmt is OutputFormat.NONE and self.output and self.subcommand == "generate":
            raise ParameterError("--format none conflicts with -o/--output")
        if fmt is OutputFormat.TEXT and self.workers != 1:
            raise ParameterError("text output is defined for --workers 1 only")

        seed_edges = None
        n0 = 0
        if self.seed_graph_file:
            n0, _, seed_edges = read_seed_graph(self.seed_graph_file)
        if self.n0 is not None:
            if self.n0 < n0:
                raise ParameterError(
                    f"--n0 {self.n0} is below {n0}, the seed graph's implied node count"
                )
            n0 = self.n0

        degrees = None
        if self.degree_file is not None:
            if self.d is not None:
                raise ParameterError("-d/--degree and --degrees-file are mutually exclusive")
            degrees = read_degree_file(self.degree_file)
            n = n0 + len(degrees)
            if self.n is not None and self.n != n:
                raise ParameterError(
                    f"-n {self.n} is inconsistent with --degrees-file "
                    f"({len(degrees)} degrees after n0={n0} imply n={n})"
                )
        else:
            if self.d is None:
                raise ParameterError("one of -d/--degree and --degrees-file is required")
            if self.n is None:
                raise ParameterError("-n/--nodes is required with -d/--degree")
            n = self.n

        cfg = HashConfig(
            kind=HashKind(self.hash_kind), seed0=self.hash_seed0, seed1=self.hash_seed1
        )
        return GenParams(
            n=n,
            d=self.d,
            degrees=degrees,
            n0=n0,
            seed_edges=seed_edges,
            no_self_loops=self.no_self_loops,
            no_parallel_edges=self.no_parallel_edges,
            hash=cfg,
        )


def _cmd_generate(cfg: CliConfig) -> int:
    p = cfg.validate()
    fmt = cfg.resolved_format()
    from ._kernels import warmup

    warmup()
    if fmt is OutputFormat.BINARY:
        writer = EdgeFileWriter(cfg.output, p.m0, p.m - p.m0)
        try:
            _, stats = driver.run(p, writer, workers=cfg.workers, batch_size=cfg.batch_size)
        finally:
            writer.close()
    elif fmt is OutputFormat.TEXT:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            _, stats = driver.run(p, TextEdgeWriter(fh), workers=1, batch_size=cfg.batch_size)
    else:
        _, stats = driver.run(p, DiscardConsumer(), workers=cfg.workers, batch_size=cfg.batch_size)
    _print_run_stats("generated", stats)
    return 0


def _print_run_stats(verb: str, stats: driver.RunStats) -> None:
    rate = stats.edges_emitted / stats.elapsed if stats.elapsed > 0 else float("inf")
    per_edge = stats.hash_probes / stats.edges_emitted if stats.edges_emitted else 0.0
    print(
        f"{verb} {stats.edges_emitted} edges in {stats.elapsed:.3f} s "
        f"({rate:.4g} edges/s, {per_edge:.3f} probes/edge)"
    )


def _cmd_degrees(cfg: CliConfig) -> int:
    p = cfg.validate()
    K = cfg.first_k if cfg.first_k is not None else min(p.n, DEFAULT_FIRST_K)
    if K > p.n:
        raise ParameterError(f"--first-k {K} exceeds the node count {p.n}")
    need_full = cfg.xmin is not None
    counter, _ = analytics.degree_counts(
        p, K=p.n if need_full else K, workers=cfg.workers, batch_size=cfg.batch_size
    )
    head = counter if counter.K == K else analytics.DegreeCounter(K, counter.counts[:K])
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            analytics.write_degree_csv(head, fh)
    else:
        analytics.write_degree_csv(head, sys.stdout)
    if need_full:
        h = analytics.Histogram.from_degree_counts(counter)
        gamma = analytics.fit_exponent(h, cfg.xmin)
        line = f"gamma = {gamma:.4f} (discrete MLE, xmin = {cfg.xmin})"
        print(line, file=sys.stdout if cfg.output else sys.stderr)
    return 0


def _cmd_verify(cfg: CliConfig) -> int:
    p = cfg.validate()
    if p.no_self_loops or p.no_parallel_edges:
        raise ParameterError("verify compares against the plain-mode oracle only")
    if p.m > oracle.DEFAULT_CAP:
        raise ParameterError(
            f"verify materializes the oracle array; m = {p.m} exceeds the cap {oracle.DEFAULT_CAP}"
        )
    got, stats = driver.run(p, CollectConsumer(), workers=cfg.workers, batch_size=cfg.batch_size)
    want = oracle.edge_list(oracle.bb_generate(p, engine="python"), p.m0)
    if np.array_equal(got, want):
        print(f"PASS: {p.m - p.m0} edges identical to the sequential oracle")
        return 0
    bad = np.nonzero((got != want).any(axis=1))[0]
    i = int(bad[0]) + p.m0
    print(
        f"FAIL: {bad.size} of {p.m - p.m0} edges differ; first at edge {i}: "
        f"parallel {tuple(got[bad[0]])} vs oracle {tuple(want[bad[0]])}"
    )
    return 1


def _cmd_bench(cfg: CliConfig) -> int:
    """Report throughput; nothing here is asserted, it is hardware-dependent."""
    p = cfg.validate()
    from ._kernels import warmup

    warmup()
    _, stats1 = driver.run(p, DiscardConsumer(), workers=1, batch_size=cfg.batch_size)
    rate1 = stats1.edges_emitted / stats1.elapsed if stats1.elapsed > 0 else float("inf")
    _print_run_stats("single-worker:", stats1)

    if cfg.workers > 1:
        _, statsw = driver.run(
            p, DiscardConsumer(), workers=cfg.workers, batch_size=cfg.batch_size
        )
        ratew = statsw.edges_emitted / statsw.elapsed if statsw.elapsed > 0 else float("inf")
        print(
            f"{cfg.workers} workers: {statsw.edges_emitted} edges in {statsw.elapsed:.3f} s "
            f"({ratew:.4g} edges/s, speedup {ratew / rate1:.2f}x)"
        )

    if p.d is None or p.no_self_loops or p.no_parallel_edges:
        print("sequential fill: skipped (plain uniform-degree runs only)")
        return 0
    bench_edges = min(p.m, 10**7)
    n_bb = p.n0 + (bench_edges - p.m0) // p.d
    pb = GenParams(n=n_bb, d=p.d, n0=p.n0, seed_edges=p.seed_edges, hash=p.hash)
    oracle.bb_generate(pb, engine="compiled")  # compile before timing
    t0 = time.perf_counter()
    oracle.bb_generate(pb, engine="compiled")
    dt = time.perf_counter() - t0
    bb_rate = (pb.m - pb.m0) / dt if dt > 0 else float("inf")
    print(
        f"sequential fill: {pb.m - pb.m0} edges in {dt:.3f} s "
        f"({bb_rate:.4g} edges/s, {bb_rate / rate1:.2f}x the single-worker recompute rate)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parba",
        description="Deterministic, embarrassingly parallel preferential-attachment graphs",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("-n", "--nodes", type=int, help="total node count (including seed nodes)")
    family.add_argument("-d", "--degree", type=int, help="uniform per-node out-degree")
    family.add_argument("--degrees-file", help="text file, one degree per line for nodes n0..n-1")
    family.add_argument("--seed-graph", help="seed edge list, 'u v' per line")
    family.add_argument("--n0", type=int, help="override the seed node count (isolated seed nodes)")
    family.add_argument("--no-self-loops", action="store_true", help="avoid self-loops (needs a seed graph)")
    family.add_argument("--no-parallel-edges", action="store_true", help="reject duplicate targets per node (needs a seed graph)")
    family.add_argument("--hash", choices=[k.value for k in HashKind], default="crc", help="hash family (default: crc)")
    family.add_argument("--hash-seed0", type=int, default=0, help="first 32-bit CRC seed")
    family.add_argument("--hash-seed1", type=int, default=1, help="second 32-bit CRC seed")

    running = argparse.ArgumentParser(add_help=False)
    running.add_argument("--workers", type=int, default=1, help="worker process count")
    running.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE, help="edges per batch")

    g = sub.add_parser("generate", parents=[family, running], help="generate edges")
    g.add_argument("-o", "--output", help="output file path")
    g.add_argument("--format", choices=[f.value for f in OutputFormat], default=None,
                   help="output format (default: binary with -o, none otherwise)")

    dg = sub.add_parser("degrees", parents=[family, running], help="degree CSV for the first K nodes")
    dg.add_argument("-o", "--output", help="CSV path (default: stdout)")
    dg.add_argument("--first-k", type=int, default=None, help="node cutoff K (default: min(n, 100000))")
    dg.add_argument("--xmin", type=int, default=None, help="also fit the power-law exponent for degrees >= xmin")

    sub.add_parser("verify", parents=[family, running], help="diff the parallel path against the sequential oracle")
    sub.add_parser("bench", parents=[family, running], help="measure throughput and probe counts")
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig.from_namespace(ns)
    handlers = {
        "generate": _cmd_generate,
        "degrees": _cmd_degrees,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
    }
    try:
        return handlers[cfg.subcommand](cfg)
    except (ParameterError, SeedGraphFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (InfeasibleTargetsError, GenerationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

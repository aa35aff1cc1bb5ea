"""Streaming degree analytics: per-node tallies, histograms, exponent fit.

The canonical measurement is the degree of each of the first K nodes,
accumulated per worker and summed afterwards.  Self-loops contribute 2 to
their node's degree, so the total over all nodes is exactly 2m.  Seed
edges never flow through the generation stream; count_seed_edges folds
them in afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from . import driver
from .errors import ParameterError
from .generator import Edge, GenParams


@dataclass
class DegreeCounter:
    """Degree tallies for nodes 0..K-1."""

    K: int
    counts: np.ndarray

    @classmethod
    def zeros(cls, K: int) -> "DegreeCounter":
        if K < 0:
            raise ParameterError(f"K must be >= 0, got {K}")
        return cls(K=K, counts=np.zeros(K, dtype=np.int64))


def count_edge(ctx: DegreeCounter, e: Edge) -> None:
    if e.source < ctx.K:
        ctx.counts[e.source] += 1
    if e.target < ctx.K:
        ctx.counts[e.target] += 1


def count_block(counts: np.ndarray, edges: np.ndarray) -> None:
    """Vectorized count_edge over an (k, 2) block into a raw counts array."""
    ids = edges.ravel()
    ids = ids[ids < np.uint64(len(counts))].astype(np.int64)
    np.add.at(counts, ids, 1)


def count_seed_edges(ctx: DegreeCounter, seed_edges: np.ndarray) -> None:
    count_block(ctx.counts, np.asarray(seed_edges, dtype=np.uint64))


def merge(a: DegreeCounter, b: DegreeCounter) -> DegreeCounter:
    if a.K != b.K:
        raise ParameterError(f"cannot merge degree counters with K={a.K} and K={b.K}")
    return DegreeCounter(K=a.K, counts=a.counts + b.counts)


class DegreeCountConsumer(driver.Consumer):
    """Driver consumer producing a DegreeCounter over the first K nodes."""

    def __init__(self, K: int):
        if K < 0:
            raise ParameterError(f"K must be >= 0, got {K}")
        self.K = K

    def new_context(self, worker_id: int) -> np.ndarray:
        return np.zeros(self.K, dtype=np.int64)

    def accept(self, ctx: np.ndarray, i: int, edge: Edge) -> None:
        count_edge(DegreeCounter(self.K, ctx), edge)

    def accept_block(self, ctx: np.ndarray, lo: int, edges: np.ndarray) -> None:
        count_block(ctx, edges)

    def merge(self, contexts: Sequence[np.ndarray]) -> DegreeCounter:
        total = np.zeros(self.K, dtype=np.int64)
        for c in contexts:
            total += c
        return DegreeCounter(K=self.K, counts=total)


def degree_counts(
    p: GenParams,
    K: int | None = None,
    workers: int = 1,
    batch_size: int = driver.DEFAULT_BATCH_SIZE,
) -> tuple[DegreeCounter, driver.RunStats]:
    """Full-run degree counts for the first K nodes (default all n),
    seed edges included."""
    if K is None:
        K = p.n
    counter, stats = driver.run(
        p, DegreeCountConsumer(K), workers=workers, batch_size=batch_size
    )
    count_seed_edges(counter, p.seed_edges)
    return counter, stats


@dataclass(frozen=True)
class Histogram:
    """Sparse (degree value, node count) pairs, ascending by degree."""

    degrees: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_degree_counts(cls, counter: DegreeCounter) -> "Histogram":
        degrees, counts = np.unique(counter.counts, return_counts=True)
        return cls(degrees=degrees.astype(np.int64), counts=counts.astype(np.int64))

    @property
    def total_nodes(self) -> int:
        return int(self.counts.sum())

    @property
    def degree_sum(self) -> int:
        return int((self.degrees * self.counts).sum())


def fit_exponent(h: Histogram, xmin: int) -> float:
    """Discrete maximum-likelihood power-law exponent over degrees >= xmin:
    gamma = 1 + N / sum(ln(deg_i / (xmin - 0.5))).
    """
    if xmin < 1:
        raise ParameterError(f"xmin must be >= 1, got {xmin}")
    sel = h.degrees >= xmin
    n_tail = int(h.counts[sel].sum())
    if n_tail < 100:
        raise ParameterError(
            f"insufficient data: {n_tail} nodes with degree >= {xmin}, need >= 100"
        )
    if int(h.degrees[sel].max()) == xmin:
        raise ParameterError(
            f"all {n_tail} tail degrees equal xmin={xmin}; exponent is unbounded"
        )
    log_sum = float(np.sum(h.counts[sel] * np.log(h.degrees[sel] / (xmin - 0.5))))
    return 1.0 + n_tail / log_sum


@dataclass(frozen=True)
class BinRatio:
    lo: int
    hi: int
    geo_index: float
    mean_degree: float
    expected: float
    ratio: float


def expected_degree_check(
    counts: DegreeCounter, n: int, d: int, bins: int, lo: int = 1, hi: int | None = None
) -> list[BinRatio]:
    """Compare binned mean degrees against the d*sqrt(n/i) attachment law.

    Logarithmic bins over node index i in [lo, hi); index 0 is excluded
    (the law diverges there) and empty bins are skipped.  Each row reports
    mean observed degree / expected degree at the bin's geometric-mean i.
    """
    if hi is None:
        hi = counts.K
    if d < 1 or n < 1 or bins < 1:
        raise ParameterError("need d >= 1, n >= 1 and bins >= 1")
    lo = max(lo, 1)
    if lo >= hi:
        return []
    edges = np.unique(np.geomspace(lo, hi, bins + 1).round().astype(np.int64))
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        idx = np.arange(a, b)
        mean_deg = float(counts.counts[a:b].mean())
        geo = float(np.exp(np.mean(np.log(idx))))
        expected = d * math.sqrt(n / geo)
        out.append(
            BinRatio(
                lo=int(a),
                hi=int(b),
                geo_index=geo,
                mean_degree=mean_deg,
                expected=expected,
                ratio=mean_deg / expected,
            )
        )
    return out


def write_degree_csv(counter: DegreeCounter, fh: TextIO) -> None:
    fh.write("node,degree\n")
    for v in range(counter.K):
        fh.write(f"{v},{int(counter.counts[v])}\n")


def write_histogram_csv(h: Histogram, fh: TextIO) -> None:
    fh.write("degree,count\n")
    for deg, cnt in zip(h.degrees, h.counts):
        fh.write(f"{int(deg)},{int(cnt)}\n")

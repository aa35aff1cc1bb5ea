"""Deterministic, embarrassingly parallel preferential-attachment graphs.

Every edge of the graph is a pure function of its index and the family
parameters, recomputed on demand by walking a strictly decreasing hash
chain over the classic sequential edge array.  Workers generate disjoint
index ranges with no communication and byte-identical results; a sequential
oracle, streaming degree analytics, and a CLI round out the package.
"""

from .analytics import (
    DegreeCounter,
    Histogram,
    degree_counts,
    expected_degree_check,
    fit_exponent,
)
from .degreeseq import (
    PrefixIndex,
    RankBits,
    build_prefix,
    build_rank_bits,
    first_half_pos,
    node_of_edge,
    node_of_edge_bisect,
    read_degree_file,
    resolve_targets_deferred,
)
from .driver import (
    Batch,
    CollectConsumer,
    Consumer,
    DiscardConsumer,
    Granularity,
    RunStats,
    WorkerStats,
    plan_batches,
    run,
)
from .errors import (
    GenerationError,
    InfeasibleTargetsError,
    ParameterError,
    SeedGraphFormatError,
)
from .generator import (
    ChainResult,
    Edge,
    GenParams,
    edge_count,
    generate_block,
    generate_edge,
    generate_node_edges,
    resolve_chain,
)
from .hashing import HashConfig, HashKind, h_crc, h_simple, hash_value
from .oracle import bb_generate, edge_list

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "ChainResult",
    "CollectConsumer",
    "Consumer",
    "DegreeCounter",
    "DiscardConsumer",
    "Edge",
    "GenParams",
    "GenerationError",
    "Granularity",
    "HashConfig",
    "HashKind",
    "Histogram",
    "InfeasibleTargetsError",
    "ParameterError",
    "PrefixIndex",
    "RankBits",
    "RunStats",
    "SeedGraphFormatError",
    "WorkerStats",
    "bb_generate",
    "build_prefix",
    "build_rank_bits",
    "degree_counts",
    "edge_count",
    "edge_list",
    "expected_degree_check",
    "first_half_pos",
    "fit_exponent",
    "generate_block",
    "generate_edge",
    "generate_node_edges",
    "h_crc",
    "h_simple",
    "hash_value",
    "node_of_edge",
    "node_of_edge_bisect",
    "plan_batches",
    "read_degree_file",
    "resolve_chain",
    "resolve_targets_deferred",
    "run",
]

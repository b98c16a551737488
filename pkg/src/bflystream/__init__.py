"""Streaming butterfly (2x2 biclique) counting for bipartite edge streams."""

from .bench import (
    ExperimentConfig,
    ExperimentResult,
    MetricsRow,
    emit_csv,
    mape,
    read_csv,
    run_experiment,
)
from .errors import (
    BflyError,
    ConfigError,
    DuplicateEdgeError,
    GraphTooLargeError,
    MalformedLineError,
    MissingEdgeError,
    NoValidLevelError,
    TimestampRegressionError,
)
from .estimators import BernoulliEstimator, EstimatorParams, Fleet1, Fleet2, Fleet3
from .exact import (
    RunningExactCounter,
    count_butterflies_brute,
    count_butterflies_exact,
    count_per_edge,
    exact_running_count,
    max_per_edge,
)
from .graph import BipartiteAdjacency, Edge, Side, TimedEdge, VertexId
from .ingest import (
    EdgeStream,
    complete_biclique,
    load_konect,
    parse_konect,
    permute,
    planted_blocks,
    preprocess,
    random_stream,
    read_cache,
    synth_stream,
    write_cache,
)
from .windows import SeqWinEstimator, TimeWinEstimator

__version__ = "0.1.0"

__all__ = [
    "BernoulliEstimator",
    "BflyError",
    "BipartiteAdjacency",
    "ConfigError",
    "DuplicateEdgeError",
    "Edge",
    "EdgeStream",
    "EstimatorParams",
    "ExperimentConfig",
    "ExperimentResult",
    "Fleet1",
    "Fleet2",
    "Fleet3",
    "GraphTooLargeError",
    "MalformedLineError",
    "MetricsRow",
    "MissingEdgeError",
    "NoValidLevelError",
    "RunningExactCounter",
    "SeqWinEstimator",
    "Side",
    "TimeWinEstimator",
    "TimedEdge",
    "TimestampRegressionError",
    "VertexId",
    "complete_biclique",
    "count_butterflies_brute",
    "count_butterflies_exact",
    "count_per_edge",
    "emit_csv",
    "exact_running_count",
    "load_konect",
    "mape",
    "max_per_edge",
    "parse_konect",
    "permute",
    "planted_blocks",
    "preprocess",
    "random_stream",
    "read_cache",
    "read_csv",
    "run_experiment",
    "synth_stream",
    "write_cache",
]

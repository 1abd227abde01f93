"""Layered peeling partitions, low out-degree orientations, and
arboricity-dependent colorings with exact desk-scale verification."""

from .ampc import (
    FailedToProgress,
    GuessOutcome,
    PipelineConfig,
    PipelineResult,
    RoundLedger,
    guess_arboricity_pipeline,
    partition_pipeline,
    peel_pipeline,
    pipeline_report,
    shrink_report,
)
from .coingame import CoinGameState, LcaOutput, QueryLedger, lca_query, lca_sweep
from .coloring import (
    Coloring,
    ColoringResult,
    Orientation,
    arb_linial_full,
    arb_linial_step,
    color_pipeline_1,
    color_pipeline_2,
    color_pipeline_3,
    color_pipeline_large_alpha,
    derand_color,
    is_proper,
    kw_reduce,
    orient_by_partition,
    recolor_conflicts,
)
from .graph import (
    ArboricityCertificate,
    Graph,
    arboricity_exact_small,
    degree_tail_count,
    generate_forest_union,
    induced_subgraph,
    read_edge_list,
    write_edge_list,
)
from .partition import (
    INF,
    DependencySet,
    PartialBetaPartition,
    dependency_set,
    forwarding_set,
    induced_partition,
    min_merge,
    natural_partition,
    validate_partition,
)

__version__ = "0.1.0"

"""Recover causal-timescale graphs from a graph measured at a slower rate."""

from .graphs import (
    DirectedGraph,
    MixedGraph,
    SccDecomposition,
    canonical_key,
    graphs_equal,
    is_edge_subset,
    scc_decompose,
    undersample,
)
from .optimizer import (
    Optimum,
    WeightedHypothesis,
    discrepancy_cost,
    edge_errors,
    optimize,
    refine,
)
from .solver import (
    ClassMember,
    EquivalenceClass,
    SolveConfig,
    SolveStats,
    SoundnessError,
    solve,
    witness_rates,
)

__all__ = [
    "DirectedGraph",
    "MixedGraph",
    "SccDecomposition",
    "canonical_key",
    "graphs_equal",
    "is_edge_subset",
    "scc_decompose",
    "undersample",
    "ClassMember",
    "EquivalenceClass",
    "SolveConfig",
    "SolveStats",
    "SoundnessError",
    "solve",
    "witness_rates",
    "Optimum",
    "WeightedHypothesis",
    "discrepancy_cost",
    "edge_errors",
    "optimize",
    "refine",
]

__version__ = "0.1.0"

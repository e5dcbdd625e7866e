"""netclear: conservative compression of financial obligation networks.

The package models markets of mutual obligations as capacitated digraphs
and reduces gross exposure without moving anyone's net position, either by
a preference-driven cycle-clearing procedure or by the optimal
maximum-volume circulation found through minimum-mean cycle canceling.
A seeded generator and a batch harness support simulation studies, and a
CLI ties everything to CSV/JSON files.
"""

from .errors import (
    ClearingError,
    ConfigError,
    InternalInvariantError,
    ParameterError,
    ParseError,
    UnknownArcError,
    UnknownParticipantError,
    ValidationError,
)
from .generator import (
    RNG_ID,
    GenConfig,
    SimRow,
    SimSummary,
    derive_seed,
    generate_network,
    generate_preferences,
    run_simulation,
)
from .maxvol import (
    CanceledCycle,
    MaxVolStats,
    MeanCycleResult,
    ResidualArc,
    ResidualGraph,
    build_residual,
    cancel_cycle,
    compress_max_volume,
    karp_min_mean_cycle,
    max_volume_circulation,
    min_mean_over_residual,
)
from .network import (
    CirculationCheck,
    FlowAssignment,
    Network,
    Obligation,
    PositionSummary,
    apply_compression,
    decompose_circulation,
    is_circulation,
    is_feasible,
    tarjan_components,
)
from .preferential import (
    ClearingState,
    ClearingTrace,
    IterationRecord,
    PreferenceProfile,
    clear_cycles,
    find_functional_cycles,
    most_preferred_neighbours_graph,
    node_removal_fixpoint,
    preferential_compress,
)
from .report import CompressionReport, ParticipantReport, build_report

__version__ = "0.1.0"

__all__ = [
    "ClearingError",
    "ConfigError",
    "InternalInvariantError",
    "ParameterError",
    "ParseError",
    "UnknownArcError",
    "UnknownParticipantError",
    "ValidationError",
    "RNG_ID",
    "GenConfig",
    "SimRow",
    "SimSummary",
    "derive_seed",
    "generate_network",
    "generate_preferences",
    "run_simulation",
    "CanceledCycle",
    "MaxVolStats",
    "MeanCycleResult",
    "ResidualArc",
    "ResidualGraph",
    "build_residual",
    "cancel_cycle",
    "compress_max_volume",
    "karp_min_mean_cycle",
    "max_volume_circulation",
    "min_mean_over_residual",
    "CirculationCheck",
    "FlowAssignment",
    "Network",
    "Obligation",
    "PositionSummary",
    "apply_compression",
    "decompose_circulation",
    "is_circulation",
    "is_feasible",
    "tarjan_components",
    "ClearingState",
    "ClearingTrace",
    "IterationRecord",
    "PreferenceProfile",
    "clear_cycles",
    "find_functional_cycles",
    "most_preferred_neighbours_graph",
    "node_removal_fixpoint",
    "preferential_compress",
    "CompressionReport",
    "ParticipantReport",
    "build_report",
    "__version__",
]

"""Heat-semigroup controllability and observability on weighted graphs.

The package verifies, at finite scale, the interplay between graph
geometry and the heat equation: weak observability estimates with
explicit constants, Gramian-based minimal-energy control synthesis with
certified contraction targets, eigenfunction obstructions to exact null
control, two-sided necessity bounds, and Monte Carlo cross-validation
through the associated continuous-time random walk.
"""

from .covering import (
    CoveringMap,
    CoveringValidation,
    build_cyclic_cover,
    lemma_sets,
    lift_function,
    validate_covering,
)
from .control import (
    ControlResult,
    ControlSignal,
    Gramian,
    StabilizationReport,
    controlled_trajectory,
    gramian,
    hautus_obstruction,
    mode_invariance_check,
    stabilize,
    synth_control,
    verify_control,
)
from .families import FamilyResult, build_family, parity_subset
from .graph import (
    AssumptionReport,
    FullSetInradiusWarning,
    MetricKind,
    WeightedGraph,
    build_graph,
    covering_radius,
    distance,
    folner_ratio,
    graph_from_json,
    graph_to_json,
    inradius,
    load_graph_json,
    load_subset_json,
    max_ball_volume,
    validate_assumptions,
)
from .observability import (
    UPReport,
    WeakObsConstants,
    WeakObsVerification,
    exact_obs_constant,
    up_paper_bound,
    up_sharp_constant,
    up_sweep,
    verify_weak_obs,
    verify_weak_obs_multi,
    weak_obs_constants,
)
from .scenarios import (
    Scenario,
    ScenarioOutcome,
    TaskReport,
    emit_report,
    load_scenario,
    run_scenario,
)
from .spectral import (
    EnergyInterval,
    SpectralDecomposition,
    apply_laplacian,
    eigendecompose,
    op_norm_H_plus_1,
    semigroup_apply,
    spectral_projection,
    time_lr_norm,
)
from .stochastic import (
    CTMCPath,
    FarVertexReport,
    MCEstimate,
    NecessityReport,
    erlang_tail,
    far_vertex_sequence,
    fk_estimate,
    necessity_bounds_check,
    sample_ctmc_path,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "ControlResult",
    "ControlSignal",
    "CoveringMap",
    "CoveringValidation",
    "CTMCPath",
    "EnergyInterval",
    "FamilyResult",
    "FarVertexReport",
    "FullSetInradiusWarning",
    "Gramian",
    "MCEstimate",
    "MetricKind",
    "NecessityReport",
    "Scenario",
    "ScenarioOutcome",
    "SpectralDecomposition",
    "StabilizationReport",
    "TaskReport",
    "UPReport",
    "WeakObsConstants",
    "WeakObsVerification",
    "WeightedGraph",
    "apply_laplacian",
    "build_cyclic_cover",
    "build_family",
    "build_graph",
    "controlled_trajectory",
    "covering_radius",
    "distance",
    "eigendecompose",
    "emit_report",
    "erlang_tail",
    "exact_obs_constant",
    "far_vertex_sequence",
    "fk_estimate",
    "folner_ratio",
    "gramian",
    "graph_from_json",
    "graph_to_json",
    "hautus_obstruction",
    "inradius",
    "lemma_sets",
    "lift_function",
    "load_graph_json",
    "load_scenario",
    "load_subset_json",
    "max_ball_volume",
    "mode_invariance_check",
    "necessity_bounds_check",
    "op_norm_H_plus_1",
    "parity_subset",
    "run_scenario",
    "sample_ctmc_path",
    "semigroup_apply",
    "spectral_projection",
    "stabilize",
    "synth_control",
    "time_lr_norm",
    "up_paper_bound",
    "up_sharp_constant",
    "up_sweep",
    "validate_assumptions",
    "validate_covering",
    "verify_control",
    "verify_weak_obs",
    "verify_weak_obs_multi",
    "weak_obs_constants",
]

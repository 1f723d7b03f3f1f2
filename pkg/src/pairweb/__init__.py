"""pairweb: metrics and samplers for coalescing pairs of paths.

The package models ordered pairs of non-crossing space-time paths that
coalesce, equips them with a complete metric that sees coalescence
structure, and samples two path webs under it: diffusively rescaled
coalescing random walks on the even lattice, and coalescing Brownian
motions from finitely many points.  On top sit the classic observables
those webs compute: voter-model persistence, silo weight profiles, and
river-basin outputs.
"""

from .brownian import (
    EnsembleConfig,
    bridge_cross_prob,
    build_brownian_segment,
    pair_survival_times,
    sample_coalescing_ensemble,
)
from .errors import PairwebError
from .lattice import (
    ArrowField,
    LatticeSite,
    build_extended_slice,
    build_full_web,
    build_segment_web,
    build_slice_web,
    dual_arrow_field,
    field_from_table,
    sample_arrow_field,
    trace_walks,
    walk_from,
)
from .metrics import (
    MetricParams,
    coalescing_distance,
    hausdorff_distance,
    pair_distance,
    path_distance,
    profile_distance,
    profile_distance_bound,
)
from .observables import (
    DiagnosticsReport,
    WeightMeasure,
    bottom_weights,
    enclosed_bead_count,
    integrate_against,
    persistence_sup,
    river_outputs,
    slow_pair_diagnostics,
    voter_forward_persistence,
    voter_persistence_profile,
    weight_measure,
)
from .paths import CoalescingPair, PairSet, Path, coalescence_time, eval_path, make_pair
from .profiles import GapProfile, StandardProfile, gap_profile, standard_profile

__version__ = "0.1.0"

__all__ = [
    "ArrowField", "CoalescingPair", "DiagnosticsReport", "EnsembleConfig",
    "GapProfile", "LatticeSite", "MetricParams", "PairSet", "PairwebError",
    "Path", "StandardProfile", "WeightMeasure", "bottom_weights",
    "bridge_cross_prob", "build_brownian_segment", "build_extended_slice",
    "build_full_web", "build_segment_web", "build_slice_web",
    "coalescence_time", "coalescing_distance", "dual_arrow_field",
    "enclosed_bead_count", "eval_path", "field_from_table", "gap_profile",
    "hausdorff_distance", "integrate_against", "make_pair",
    "pair_distance", "pair_survival_times", "path_distance",
    "persistence_sup", "profile_distance", "profile_distance_bound",
    "river_outputs", "sample_arrow_field", "sample_coalescing_ensemble",
    "slow_pair_diagnostics", "standard_profile", "trace_walks",
    "voter_forward_persistence", "voter_persistence_profile", "walk_from",
    "weight_measure",
]

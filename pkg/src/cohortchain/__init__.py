"""Six-year graduation rate estimation from longitudinal student records.

An absorbing chain over year-of-study states pools complete and partial
cohorts into one graduation-rate estimate, with bootstrap percentile
confidence intervals and a synthetic-data generator for validation.
"""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, EstimateSummary, bootstrap, kde, percentile_ci
from .estimate import (
    EstimatorKind,
    MarkovFullEstimator,
    MarkovReducedEstimator,
    TraditionalEstimator,
    persistence_rates,
    sygr_markov_full,
    sygr_markov_reduced,
    sygr_traditional,
)
from .markov import (
    TransitionCounts,
    TransitionMatrix,
    build_matrix,
    matrix_power,
    pool_counts,
    sygr_markov,
    validate_structure,
)
from .records import (
    LaGroup,
    Outcome,
    StudentRecord,
    SubgroupSpec,
    Transition,
    cohort_slice,
    derive_transitions,
    filter_subgroup,
    la_truncate,
    parse_records,
)
from .states import AcademicState
from .synth import (
    GeneratorSpec,
    brute_force_sygr,
    generate_panel,
    generate_panel_with_log,
    random_transition_matrix,
    round_trip_counts,
)

__all__ = [
    "AcademicState",
    "BootstrapConfig",
    "EstimateSummary",
    "EstimatorKind",
    "GeneratorSpec",
    "LaGroup",
    "MarkovFullEstimator",
    "MarkovReducedEstimator",
    "Outcome",
    "StudentRecord",
    "SubgroupSpec",
    "TraditionalEstimator",
    "Transition",
    "TransitionCounts",
    "TransitionMatrix",
    "bootstrap",
    "brute_force_sygr",
    "build_matrix",
    "cohort_slice",
    "derive_transitions",
    "filter_subgroup",
    "generate_panel",
    "generate_panel_with_log",
    "kde",
    "la_truncate",
    "matrix_power",
    "parse_records",
    "percentile_ci",
    "persistence_rates",
    "pool_counts",
    "random_transition_matrix",
    "round_trip_counts",
    "sygr_markov",
    "sygr_markov_full",
    "sygr_markov_reduced",
    "sygr_traditional",
    "validate_structure",
]

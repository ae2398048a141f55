"""Gradient projection rotation toward the Varimax criterion, classic
pairwise rotation, population/sampling machinery, and the simulation grid
that measures how many random starts the multi-start rotation needs."""

from .errors import (
    DegenerateProjectionError,
    DegenerateVariableError,
    GprotError,
    InsufficientCasesError,
    InvalidCorrelationError,
    InvalidInputError,
    NumericalError,
    UndefinedCongruenceError,
    ZeroCommunalityError,
)
from .metrics import (
    Matching,
    align,
    match_components,
    mean_congruence,
    rmse_loadings,
    tucker_congruence,
)
from .multistart import (
    MultiStartResult,
    StartSpec,
    adaptive_rotate,
    multi_start_rotate,
    random_orthonormal,
)
from .normalize import kaiser_denormalize, kaiser_normalize
from .pairwise import PairwiseParams, pairwise_varimax
from .pca import correlation_matrix, pca_loadings
from .population import (
    PopulationModel,
    PopulationSpec,
    back_check_factor_loading,
    draw_sample,
    generate_population,
    load_population,
    population_cache_key,
    save_population,
)
from .rotation import (
    GprParams,
    RotationSolution,
    gpr_rotate,
    project_orthogonal,
    varimax_criterion,
    varimax_gradient,
)
from .study import (
    CellResult,
    Condition,
    ScanOutcome,
    StationarityReport,
    StationarityRow,
    StudyConfig,
    StudyResults,
    benchmark_scan,
    build_report,
    emit_reports,
    run_cell,
    run_study,
    stationarity_scan,
)

__version__ = "0.1.0"

__all__ = [
    "GprotError", "InvalidInputError", "NumericalError",
    "DegenerateProjectionError", "ZeroCommunalityError",
    "DegenerateVariableError", "InvalidCorrelationError",
    "UndefinedCongruenceError", "InsufficientCasesError",
    "GprParams", "RotationSolution", "varimax_criterion", "varimax_gradient",
    "project_orthogonal", "gpr_rotate",
    "kaiser_normalize", "kaiser_denormalize",
    "StartSpec", "MultiStartResult", "random_orthonormal",
    "multi_start_rotate", "adaptive_rotate",
    "correlation_matrix", "pca_loadings",
    "PopulationSpec", "PopulationModel", "generate_population",
    "back_check_factor_loading", "draw_sample", "population_cache_key",
    "save_population", "load_population",
    "Matching", "tucker_congruence", "match_components", "align",
    "mean_congruence", "rmse_loadings",
    "PairwiseParams", "pairwise_varimax",
    "StudyConfig", "Condition", "CellResult", "ScanOutcome",
    "StationarityRow", "StationarityReport", "StudyResults",
    "run_cell", "run_study", "stationarity_scan", "benchmark_scan",
    "build_report", "emit_reports",
    "__version__",
]

"""Cross-semantic transfer learning for high-dimensional linear regression."""

from .admm import (
    AdmmOptions,
    AdmmState,
    FactoredSystem,
    PooledSystem,
    SolveResult,
    admm_solve,
    build_factored_system,
    d_apply,
    dt_apply,
    objective_value,
    soft_threshold,
)
from .data import Dataset, validate_dataset
from .estimators import CSTLRegressor
from .lasso import LassoConfig, LassoFit, lasso_cv, lasso_fit
from .oracle import OracleFit, oracle_fit, oracle_fit_reference
from .simulate import (
    ScenarioInstance,
    ScenarioSpec,
    gen_ar1_gaussian,
    make_scenario,
    pairwise_difference_summary,
    run_replications,
)
from .structure import TransferStructure, build_transfer_structure
from .tuning import (
    EvalReport,
    FitResult,
    TuningGrid,
    bic,
    bic_surface,
    degrees_of_freedom,
    grid_search_cstl,
    mse,
    sse,
)
from .weights import WeightScheme, ideal_weight_scheme, scad_derivative, scad_weight_scheme

__version__ = "0.1.0"

__all__ = [
    "AdmmOptions",
    "AdmmState",
    "CSTLRegressor",
    "Dataset",
    "EvalReport",
    "FactoredSystem",
    "FitResult",
    "LassoConfig",
    "LassoFit",
    "OracleFit",
    "PooledSystem",
    "ScenarioInstance",
    "ScenarioSpec",
    "SolveResult",
    "TransferStructure",
    "TuningGrid",
    "WeightScheme",
    "admm_solve",
    "bic",
    "bic_surface",
    "build_factored_system",
    "build_transfer_structure",
    "d_apply",
    "degrees_of_freedom",
    "dt_apply",
    "gen_ar1_gaussian",
    "grid_search_cstl",
    "ideal_weight_scheme",
    "lasso_cv",
    "lasso_fit",
    "make_scenario",
    "mse",
    "objective_value",
    "oracle_fit",
    "oracle_fit_reference",
    "pairwise_difference_summary",
    "run_replications",
    "scad_derivative",
    "scad_weight_scheme",
    "soft_threshold",
    "sse",
    "validate_dataset",
]

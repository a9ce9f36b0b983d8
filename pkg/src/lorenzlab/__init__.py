"""Lorenz-curve iteration, inequality-shaped risk measures, and portfolio tools."""

from .curves import (
    DEFAULT_GRID,
    GOLDEN,
    AnalyticFamily,
    MonotoneCurve,
    QuantileCurve,
    analytic_quantile,
    empirical_quantile,
    format_float,
    grid_curve,
    read_curve_csv,
    write_curve_csv,
)
from .data import (
    CleaningReport,
    PricePanel,
    ScenarioMatrix,
    clean_panel,
    compute_returns,
    copula_simulate,
    historical_scenarios,
    load_price_panel,
    read_scenarios_csv,
    take_every,
    write_prices_csv,
    write_scenarios_csv,
)
from .errors import (
    BadParameter,
    BadSpec,
    CrossCheckError,
    DataError,
    DimensionMismatch,
    EmptySample,
    InfeasibleTarget,
    LorenzLabError,
    NonPositiveMean,
    NumericError,
    TooManyAssets,
    UsageError,
)
from .iterate import (
    IterationTrace,
    alpha_sequence,
    envelope_check,
    envelope_violation,
    fixed_point_residual,
    limit_curve,
    run_iteration,
    self_similarity_residual,
    write_trace_csv,
)
from .lorenz import (
    LorenzCurve,
    dual_curve,
    generalized_lorenz,
    lorenz_transform,
    primal_inverse,
    reflected_inverse,
    reflected_transform,
    simple_reflect,
    truncate_generalized,
    unit_support,
)
from .portfolio import (
    FrontierPoint,
    FrontierResult,
    efficient_frontier,
    grid_oracle,
    min_risk,
    nelder_mead,
    portfolio_returns,
)
from .risk import (
    MEASURE_KINDS,
    RiskMeasureConfig,
    TargetCurveSpec,
    cvar,
    cvar_weights,
    extended_gini,
    gini,
    gmd,
    gmd_pairwise,
    gmd_weights,
    gs_measure,
    mad,
    measure_report,
    measure_value,
    variance,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticFamily",
    "BadParameter",
    "BadSpec",
    "CleaningReport",
    "CrossCheckError",
    "DEFAULT_GRID",
    "DataError",
    "DimensionMismatch",
    "EmptySample",
    "FrontierPoint",
    "FrontierResult",
    "GOLDEN",
    "InfeasibleTarget",
    "IterationTrace",
    "LorenzCurve",
    "LorenzLabError",
    "MEASURE_KINDS",
    "MonotoneCurve",
    "NonPositiveMean",
    "NumericError",
    "PricePanel",
    "QuantileCurve",
    "RiskMeasureConfig",
    "ScenarioMatrix",
    "TargetCurveSpec",
    "TooManyAssets",
    "UsageError",
    "alpha_sequence",
    "analytic_quantile",
    "clean_panel",
    "compute_returns",
    "copula_simulate",
    "cvar",
    "cvar_weights",
    "dual_curve",
    "efficient_frontier",
    "empirical_quantile",
    "envelope_check",
    "envelope_violation",
    "extended_gini",
    "fixed_point_residual",
    "format_float",
    "generalized_lorenz",
    "gini",
    "gmd",
    "gmd_pairwise",
    "gmd_weights",
    "grid_curve",
    "grid_oracle",
    "gs_measure",
    "historical_scenarios",
    "limit_curve",
    "load_price_panel",
    "lorenz_transform",
    "mad",
    "measure_report",
    "measure_value",
    "min_risk",
    "nelder_mead",
    "portfolio_returns",
    "primal_inverse",
    "read_curve_csv",
    "read_scenarios_csv",
    "reflected_inverse",
    "reflected_transform",
    "run_iteration",
    "self_similarity_residual",
    "simple_reflect",
    "take_every",
    "truncate_generalized",
    "unit_support",
    "variance",
    "write_curve_csv",
    "write_prices_csv",
    "write_scenarios_csv",
    "write_trace_csv",
]

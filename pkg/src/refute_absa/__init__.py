"""Refutation-validated sentiment/return association analysis.

Turns daily aspect-level sentiment counts and equity prices into lagged
OLS + Newey-West estimates, gates every estimate through placebo, random
common cause, subset-stability and bootstrap refutation tests, and reports
the surviving associations as a validation matrix with plots.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateDesignError,
    GenerationError,
    InsufficientDataError,
    InvalidLagError,
    ParseError,
    RefuteAbsaError,
    UnstableTestError,
    ValidationError,
)
from .estimator import (
    EstimationResult,
    ModelSpec,
    bartlett_weights,
    build_design,
    estimate,
    hac_covariance,
    hac_lag_length,
    ols_fit,
)
from .ingest import (
    RawSentimentPanel,
    ReturnPanel,
    TradingCalendar,
    load_prices,
    load_sentiment,
)
from .refuter import (
    RefutationConfig,
    RefutationReport,
    bootstrap_ci_test,
    placebo_test,
    random_common_cause_test,
    refute_all,
    subset_stability_test,
)
from .signals import SentimentPanel, activity, build_panels, net_ratio, z_normalize

__all__ = [
    "ConfigError",
    "DegenerateDesignError",
    "GenerationError",
    "InsufficientDataError",
    "InvalidLagError",
    "ParseError",
    "RefuteAbsaError",
    "UnstableTestError",
    "ValidationError",
    "EstimationResult",
    "ModelSpec",
    "bartlett_weights",
    "build_design",
    "estimate",
    "hac_covariance",
    "hac_lag_length",
    "ols_fit",
    "RawSentimentPanel",
    "ReturnPanel",
    "TradingCalendar",
    "load_prices",
    "load_sentiment",
    "RefutationConfig",
    "RefutationReport",
    "bootstrap_ci_test",
    "placebo_test",
    "random_common_cause_test",
    "refute_all",
    "subset_stability_test",
    "SentimentPanel",
    "activity",
    "build_panels",
    "net_ratio",
    "z_normalize",
    "__version__",
]

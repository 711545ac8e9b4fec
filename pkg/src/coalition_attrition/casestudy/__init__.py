"""The crypto-versus-traditional market case study."""

from pathlib import Path

from .counterfactual import (
    CounterfactualResult,
    CounterfactualSpec,
    Lever,
    apply_counterfactual,
    counterfactual_run,
)
from .pipeline import (
    DEFAULT_COALITIONS,
    EFFORT_FLOOR,
    PUBLISHED_MOMENTS,
    CaseScenario,
    StageDecision,
    YearlyShares,
    build_scenario,
    published_estimates,
    two_stage_decision,
    yearly_share_series,
)
from .prices import (
    PriceSeries,
    ResilienceEstimate,
    ReturnStats,
    compute_returns,
    estimate_resilience,
    load_price_csv,
    return_stats,
    sharpe_resilience,
)

FIXTURE_DIR = Path(__file__).with_name("data")

__all__ = [
    "DEFAULT_COALITIONS",
    "EFFORT_FLOOR",
    "FIXTURE_DIR",
    "PUBLISHED_MOMENTS",
    "CaseScenario",
    "CounterfactualResult",
    "CounterfactualSpec",
    "Lever",
    "PriceSeries",
    "ResilienceEstimate",
    "ReturnStats",
    "StageDecision",
    "YearlyShares",
    "apply_counterfactual",
    "build_scenario",
    "compute_returns",
    "counterfactual_run",
    "estimate_resilience",
    "load_price_csv",
    "return_stats",
    "sharpe_resilience",
    "published_estimates",
    "two_stage_decision",
    "yearly_share_series",
]

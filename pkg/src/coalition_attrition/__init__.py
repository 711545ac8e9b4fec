"""Coalition contests with attrition: payoffs, equilibrium solvers,
cooperative baselines and a market case study."""

__version__ = "0.1.0"

from .errors import GameError, InvariantViolation, SchemaError
from .model import (
    Coalition,
    CostKind,
    EffortProfile,
    PlayerParams,
    Scenario,
    SubCoalition,
    coalition_power,
    expected_payoff,
    intra_shares,
    payoff,
    select_coalition,
    subcoalition_payoff,
    win_probabilities,
)
from .scenario_file import parse_game, parse_scenario

__all__ = [
    "Coalition",
    "CostKind",
    "EffortProfile",
    "GameError",
    "InvariantViolation",
    "PlayerParams",
    "Scenario",
    "SchemaError",
    "SubCoalition",
    "coalition_power",
    "expected_payoff",
    "intra_shares",
    "parse_game",
    "parse_scenario",
    "payoff",
    "select_coalition",
    "subcoalition_payoff",
    "win_probabilities",
]

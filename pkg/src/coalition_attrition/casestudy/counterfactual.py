"""Re-solve the game after scaling one lever and report what moved."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ..coopgame import EnduranceSpec
from ..equilibrium import SolverConfig, solve_two_layer
from ..errors import DegenerateProfile, InvariantViolation, UnknownPlayer, UnknownSelector
from ..model import EffortProfile, Scenario, intra_shares
from .pipeline import StageDecision, two_stage_decision


class Lever(str, Enum):
    REWARD = "reward"
    COST = "cost"
    EFFECTIVENESS = "effectiveness"
    RESILIENCE = "resilience"


@dataclass(frozen=True)
class CounterfactualSpec:
    """Scale ``target`` by ``multiplier`` for the selected ids.

    Selector ids may name coalitions (all members) or players; an empty
    selector means every coalition.
    """

    target: Lever
    selector: tuple = ()
    multiplier: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", Lever(self.target))
        object.__setattr__(self, "selector", tuple(self.selector))
        if not (math.isfinite(self.multiplier) and self.multiplier > 0):
            raise InvariantViolation(f"multiplier must be > 0, got {self.multiplier}")


@dataclass(frozen=True)
class Outcome:
    efforts: dict
    win_probabilities: dict
    shares: dict
    converged: bool
    stage_one: StageDecision

    def to_dict(self) -> dict:
        return {
            "efforts": self.efforts,
            "win_probabilities": self.win_probabilities,
            "shares": self.shares,
            "converged": self.converged,
            "stage_one": {
                "chosen": self.stage_one.chosen,
                "endurance": self.stage_one.endurance,
                "shares": self.stage_one.shares,
            },
        }


@dataclass(frozen=True)
class CounterfactualResult:
    baseline: Outcome
    perturbed: Outcome
    deltas: dict
    winner_changed: bool

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.to_dict(),
            "perturbed": self.perturbed.to_dict(),
            "deltas": self.deltas,
            "winner_changed": self.winner_changed,
        }


def _resolve(scenario: Scenario, selector: Sequence) -> tuple[set, set]:
    """Selected coalition ids and player ids."""
    coalition_ids = {c.id for c in scenario.coalitions}
    if not selector:
        return coalition_ids, set(scenario.player_ids)
    coalitions, players = set(), set()
    for item in selector:
        if item in coalition_ids:
            coalitions.add(item)
            players.update(scenario.coalition(item).member_ids)
        elif item in scenario.player_ids:
            players.add(item)
        else:
            raise UnknownSelector(f"{item!r} names no coalition or player")
    return coalitions, players


def apply_counterfactual(
    scenario: Scenario, profile: EffortProfile, spec: CounterfactualSpec
) -> tuple[Scenario, EffortProfile]:
    coalitions, players = _resolve(scenario, spec.selector)
    k = spec.multiplier
    if spec.target is Lever.RESILIENCE:
        return scenario, EffortProfile({pid: t * k if pid in players else t for pid, t in profile.efforts.items()})
    if spec.target is Lever.REWARD:
        if not coalitions:
            raise UnknownSelector("reward counterfactuals need coalition ids")
        new = tuple(c.replace(reward=c.reward * k) if c.id in coalitions else c for c in scenario.coalitions)
        return Scenario(new), profile
    field_name = "c" if spec.target is Lever.COST else "a"
    new = tuple(
        c.replace(
            members=tuple(
                p.with_(**{field_name: getattr(p, field_name) * k}) if p.id in players else p for p in c.members
            )
        )
        for c in scenario.coalitions
    )
    return Scenario(new), profile


def _outcome(scenario: Scenario, profile: EffortProfile, endurance: EnduranceSpec, config: SolverConfig) -> Outcome:
    reports = solve_two_layer(scenario, config)
    efforts, probs, shares = {}, {}, {}
    for coalition in scenario.coalitions:
        report = reports[coalition.id]
        efforts.update(report.efforts.as_dict())
        probs[coalition.id] = report.win_probability
        try:
            shares.update(intra_shares(report.efforts, coalition))
        except DegenerateProfile:
            shares.update({pid: None for pid in coalition.member_ids})
    converged = all(r.converged for r in reports.values())
    return Outcome(efforts, probs, shares, converged, two_stage_decision(scenario, profile, endurance))


def _diff(after: dict, before: dict) -> dict:
    return {k: (after[k] - before[k]) if after[k] is not None and before[k] is not None else None for k in before}


def counterfactual_run(
    scenario: Scenario,
    profile: EffortProfile,
    spec: CounterfactualSpec,
    config: SolverConfig | None = None,
    endurance: EnduranceSpec | None = None,
) -> CounterfactualResult:
    """Solve baseline and perturbed games and compare them.

    Solved quantities come from the two-layer equilibrium; the stage-one
    market choice uses the observed ``profile``.
    """
    config = config or SolverConfig()
    endurance = endurance or EnduranceSpec()
    try:
        profile.check_covers(scenario)
    except InvariantViolation as exc:
        raise UnknownPlayer(str(exc)) from None
    base = _outcome(scenario, profile, endurance, config)
    new_scenario, new_profile = apply_counterfactual(scenario, profile, spec)
    pert = _outcome(new_scenario, new_profile, endurance, config)
    deltas = {
        "efforts": _diff(pert.efforts, base.efforts),
        "win_probabilities": _diff(pert.win_probabilities, base.win_probabilities),
        "shares": _diff(pert.shares, base.shares),
        "endurance": _diff(pert.stage_one.endurance, base.stage_one.endurance),
    }
    return CounterfactualResult(base, pert, deltas, pert.stage_one.chosen != base.stage_one.chosen)

"""From resilience estimates to a game, a market choice and asset shares."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Sequence

from ..coopgame import EnduranceSpec, endurance_index
from ..errors import DuplicateAsset, EmptyYear, InsufficientData, UnassignedAsset, ZeroVolatility
from ..model import Coalition, EffortProfile, PlayerParams, Scenario, intra_shares, select_coalition
from .prices import (
    PriceSeries,
    ResilienceEstimate,
    ReturnKind,
    ReturnStats,
    estimate_resilience,
    sharpe_resilience,
)

EFFORT_FLOOR = 1e-6

Attractiveness = Literal["mean-return", "uniform"]

# published 2018-2023 daily moments: (mean return, volatility, printed mean/volatility ratio)
PUBLISHED_MOMENTS = {
    "brent": (0.0093, 0.0919, 0.1007),
    "solana": (0.0043, 0.0535, 0.0803),
    "bitcoin": (0.0027, 0.0401, 0.0685),
    "ethereum": (0.0013, 0.0264, 0.0494),
    "copper": (0.0007, 0.0153, 0.0435),
    "gold": (0.0002, 0.0096, 0.0234),
}

DEFAULT_COALITIONS = {
    "bitcoin": "crypto",
    "ethereum": "crypto",
    "solana": "crypto",
    "gold": "traditional",
    "copper": "traditional",
    "brent": "traditional",
}


@dataclass(frozen=True)
class CaseScenario:
    scenario: Scenario
    profile: EffortProfile
    clamped: tuple[str, ...]
    attractiveness: str
    estimates: Mapping[str, ResilienceEstimate] = field(default_factory=dict)


def _attractiveness(members: Sequence[ResilienceEstimate], rule: Attractiveness, floor: float) -> list[float]:
    if rule == "uniform":
        return [1.0 / len(members)] * len(members)
    if rule == "mean-return":
        raw = [max(e.stats.mean, floor) for e in members]
        total = sum(raw)
        return [r / total for r in raw]
    raise ValueError(f"unknown attractiveness rule {rule!r}")


def build_scenario(
    estimates: Iterable[ResilienceEstimate],
    coalition_map: Mapping[str, str],
    attractiveness: Attractiveness = "mean-return",
    rewards: Mapping[str, float] | float = 1.0,
    cost_coeff: float = 1.0,
    floor: float = EFFORT_FLOOR,
) -> CaseScenario:
    """Turn per-asset estimates into a scenario and an observed effort profile.

    Efforts are the Sharpe ratios floored at ``floor`` (negative ratios are
    clamped and listed in ``clamped``). Coalitions appear in the order their
    ids first occur in ``coalition_map``.
    """
    by_asset: dict[str, ResilienceEstimate] = {}
    for est in estimates:
        if est.asset_id in by_asset:
            raise DuplicateAsset(f"asset {est.asset_id!r} estimated twice")
        if est.asset_id not in coalition_map:
            raise UnassignedAsset(f"asset {est.asset_id!r} is not assigned to a coalition")
        by_asset[est.asset_id] = est

    used = {coalition_map[a] for a in by_asset}
    coalition_ids = [cid for cid in dict.fromkeys(coalition_map.values()) if cid in used]
    efforts, clamped, coalitions = {}, [], []
    for cid in coalition_ids:
        members = [e for a, e in by_asset.items() if coalition_map[a] == cid]
        weights = _attractiveness(members, attractiveness, floor)
        players = []
        for est, a in zip(members, weights):
            players.append(PlayerParams(est.asset_id, a, cost_coeff))
            if est.sharpe < floor:
                clamped.append(est.asset_id)
            efforts[est.asset_id] = max(est.sharpe, floor)
        reward = rewards[cid] if isinstance(rewards, Mapping) else float(rewards)
        coalitions.append(Coalition(cid, tuple(players), reward))
    return CaseScenario(Scenario(tuple(coalitions)), EffortProfile(efforts), tuple(clamped), attractiveness, by_asset)


def published_estimates(ratio: Literal["printed", "computed"] = "printed") -> list[ResilienceEstimate]:
    """Resilience estimates built from the published table.

    ``ratio="printed"`` keeps the ratios as published; ``"computed"``
    recomputes mean/std from the rounded moments, which differs in the third
    decimal place.
    """
    if ratio not in ("printed", "computed"):
        raise ValueError(f"unknown ratio source {ratio!r}")
    window = (dt.date(2018, 1, 1), dt.date(2023, 12, 31))
    out = []
    for asset, (mean, std, printed) in PUBLISHED_MOMENTS.items():
        stats = ReturnStats(mean, std, None)
        sharpe = printed if ratio == "printed" else sharpe_resilience(stats)
        out.append(ResilienceEstimate(asset, sharpe, window, stats))
    return out


@dataclass(frozen=True)
class StageDecision:
    chosen: str
    endurance: dict
    shares: dict


def two_stage_decision(scenario: Scenario, profile: EffortProfile, spec: EnduranceSpec | None = None) -> StageDecision:
    """Pick the coalition with the highest endurance, then split within it."""
    spec = spec or EnduranceSpec()
    endurance = {
        c.id: endurance_index(spec, [profile[p.id] for p in c.members], [p.a for p in c.members])
        for c in scenario.coalitions
    }
    chosen = select_coalition(endurance, [c.id for c in scenario.coalitions])
    shares = intra_shares(profile, scenario.coalition(chosen))
    return StageDecision(chosen, endurance, shares)


@dataclass(frozen=True)
class YearlyShares:
    shares: dict  # year -> {asset: share}
    excluded: dict  # year -> [assets without usable data]
    clamped: dict  # year -> [assets floored at EFFORT_FLOOR]


def yearly_share_series(
    series: Mapping[str, PriceSeries],
    years: Iterable[int],
    coalition_map: Mapping[str, str],
    coalition_id: str,
    attractiveness: Attractiveness = "mean-return",
    floor: float = EFFORT_FLOOR,
    return_kind: ReturnKind = "simple",
    ddof: int = 1,
) -> YearlyShares:
    """Within-coalition shares recomputed on each calendar year's prices.

    An asset without enough data in a year (fewer than three prices, or flat
    prices) is left out of that year and the others are renormalized.
    """
    assets = [a for a in series if coalition_map.get(a) == coalition_id]
    shares, excluded, clamped = {}, {}, {}
    for year in years:
        start, end = dt.date(year, 1, 1), dt.date(year, 12, 31)
        estimates, missing = [], []
        for asset in assets:
            try:
                estimates.append(estimate_resilience(series[asset], start, end, return_kind, ddof))
            except (InsufficientData, ZeroVolatility):
                missing.append(asset)
        if not estimates:
            raise EmptyYear(f"no asset of {coalition_id!r} has data in {year}")
        case = build_scenario(estimates, {e.asset_id: coalition_id for e in estimates}, attractiveness, floor=floor)
        shares[year] = intra_shares(case.profile, case.scenario.coalition(coalition_id))
        excluded[year] = missing
        clamped[year] = list(case.clamped)
    return YearlyShares(shares, excluded, clamped)

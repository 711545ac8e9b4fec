"""Domain types and the static payoff formulas of the coalition contest.

A scenario partitions players into coalitions. Inside a coalition each member
receives a share of the coalition prize proportional to its effective effort
``t_i * a_i``; coalitions win the outer contest with probability proportional
to their power ``sum(t_j * a_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterator, Mapping, Sequence

from .errors import (
    DegenerateProfile,
    DegenerateScenario,
    EmptyCandidates,
    InvariantViolation,
    NegativeEffort,
    UnknownPlayer,
)

PlayerId = Hashable
CoalitionId = Hashable


class CostKind(str, Enum):
    QUADRATIC = "quadratic"
    LINEAR = "linear"
    POWER = "power"


@dataclass(frozen=True)
class PlayerParams:
    """A player's effectiveness ``a`` and effort cost ``c * t**p``."""

    id: PlayerId
    a: float
    c: float
    cost_kind: CostKind = CostKind.QUADRATIC
    exponent: float = 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "cost_kind", CostKind(self.cost_kind))
        if not (math.isfinite(self.a) and self.a > 0):
            raise InvariantViolation(f"player {self.id!r}: effectiveness a must be > 0, got {self.a}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise InvariantViolation(f"player {self.id!r}: cost coefficient c must be > 0, got {self.c}")
        if self.cost_kind is CostKind.POWER:
            if not (math.isfinite(self.exponent) and self.exponent >= 1):
                raise InvariantViolation(
                    f"player {self.id!r}: power-law exponent must be >= 1, got {self.exponent}"
                )
        else:
            # keep the exponent consistent with the kind so equality/hashing is meaningful
            object.__setattr__(self, "exponent", 2.0 if self.cost_kind is CostKind.QUADRATIC else 1.0)

    def cost(self, t: float) -> float:
        return cost(self, t)

    def marginal_cost(self, t: float) -> float:
        if t < 0:
            raise NegativeEffort(f"effort must be >= 0, got {t}")
        p = self.exponent
        if p == 1.0:
            return self.c
        return self.c * p * t ** (p - 1.0)

    def max_useful_effort(self, prize: float) -> float:
        """Effort at which cost alone exhausts ``prize``; best responses never exceed it."""
        if prize <= 0:
            return 0.0
        return (prize / self.c) ** (1.0 / self.exponent)

    def with_(self, **changes) -> "PlayerParams":
        values = {
            "id": self.id,
            "a": self.a,
            "c": self.c,
            "cost_kind": self.cost_kind,
            "exponent": self.exponent,
        }
        values.update(changes)
        return PlayerParams(**values)


@dataclass(frozen=True)
class SubCoalition:
    """A branch ``G_l`` of a coalition with its own slice of the prize."""

    id: Hashable
    members: tuple[PlayerId, ...]
    reward: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise InvariantViolation(f"sub-coalition {self.id!r} has no members")
        if not (math.isfinite(self.reward) and self.reward >= 0):
            raise InvariantViolation(f"sub-coalition {self.id!r}: reward must be >= 0")


@dataclass(frozen=True)
class Coalition:
    id: CoalitionId
    members: tuple[PlayerParams, ...]
    reward: float
    sub_coalitions: tuple[SubCoalition, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "sub_coalitions", tuple(self.sub_coalitions))
        if not self.members:
            raise InvariantViolation(f"coalition {self.id!r} has no members")
        if not (math.isfinite(self.reward) and self.reward >= 0):
            raise InvariantViolation(f"coalition {self.id!r}: reward must be >= 0, got {self.reward}")
        ids = [p.id for p in self.members]
        if len(set(ids)) != len(ids):
            raise InvariantViolation(f"coalition {self.id!r} lists a member twice")
        seen: set = set()
        for branch in self.sub_coalitions:
            stray = [m for m in branch.members if m not in ids]
            if stray:
                raise InvariantViolation(
                    f"sub-coalition {branch.id!r} has members outside coalition {self.id!r}: {stray}"
                )
            overlap = seen.intersection(branch.members)
            if overlap:
                raise InvariantViolation(
                    f"sub-coalitions of {self.id!r} overlap on {sorted(map(str, overlap))}"
                )
            seen.update(branch.members)
        branch_total = sum(b.reward for b in self.sub_coalitions)
        if self.sub_coalitions and branch_total > self.reward * (1 + 1e-12):
            raise InvariantViolation(
                f"coalition {self.id!r}: branch rewards {branch_total} exceed coalition reward {self.reward}"
            )

    @property
    def member_ids(self) -> tuple[PlayerId, ...]:
        return tuple(p.id for p in self.members)

    def member(self, player_id: PlayerId) -> PlayerParams:
        for p in self.members:
            if p.id == player_id:
                return p
        raise UnknownPlayer(f"player {player_id!r} is not a member of coalition {self.id!r}")

    def branch(self, branch_id: Hashable) -> SubCoalition:
        for b in self.sub_coalitions:
            if b.id == branch_id:
                return b
        raise UnknownPlayer(f"coalition {self.id!r} has no sub-coalition {branch_id!r}")

    def replace(self, **changes) -> "Coalition":
        values = {
            "id": self.id,
            "members": self.members,
            "reward": self.reward,
            "sub_coalitions": self.sub_coalitions,
        }
        values.update(changes)
        return Coalition(**values)


@dataclass(frozen=True)
class Scenario:
    coalitions: tuple[Coalition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coalitions", tuple(self.coalitions))
        if not self.coalitions:
            raise InvariantViolation("scenario has no coalitions")
        cids = [c.id for c in self.coalitions]
        if len(set(cids)) != len(cids):
            raise InvariantViolation("duplicate coalition ids")
        owner: dict = {}
        for coalition in self.coalitions:
            for pid in coalition.member_ids:
                if pid in owner:
                    raise InvariantViolation(
                        f"player {pid!r} belongs to both {owner[pid]!r} and {coalition.id!r} "
                        "(coalitions must be disjoint: S_i ∩ S_j = ∅)"
                    )
                owner[pid] = coalition.id

    @property
    def players(self) -> tuple[PlayerParams, ...]:
        return tuple(p for c in self.coalitions for p in c.members)

    @property
    def player_ids(self) -> tuple[PlayerId, ...]:
        return tuple(p.id for p in self.players)

    def coalition(self, coalition_id: CoalitionId) -> Coalition:
        for c in self.coalitions:
            if c.id == coalition_id:
                return c
        raise UnknownPlayer(f"no coalition {coalition_id!r} in scenario")

    def coalition_of(self, player_id: PlayerId) -> Coalition:
        for c in self.coalitions:
            if player_id in c.member_ids:
                return c
        raise UnknownPlayer(f"player {player_id!r} is in no coalition")

    def player(self, player_id: PlayerId) -> PlayerParams:
        return self.coalition_of(player_id).member(player_id)

    def replace_coalition(self, coalition: Coalition) -> "Scenario":
        return Scenario(tuple(coalition if c.id == coalition.id else c for c in self.coalitions))


@dataclass(frozen=True)
class EffortProfile:
    """Immutable map from player id to a nonnegative effort."""

    efforts: Mapping[PlayerId, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for pid, t in dict(self.efforts).items():
            t = float(t)
            if not math.isfinite(t):
                raise InvariantViolation(f"effort of {pid!r} is not finite")
            if t < 0:
                raise NegativeEffort(f"effort of {pid!r} is negative: {t}")
            clean[pid] = t
        object.__setattr__(self, "efforts", clean)

    def __getitem__(self, player_id: PlayerId) -> float:
        try:
            return self.efforts[player_id]
        except KeyError:
            raise UnknownPlayer(f"profile has no effort for {player_id!r}") from None

    def __iter__(self) -> Iterator[PlayerId]:
        return iter(self.efforts)

    def __len__(self) -> int:
        return len(self.efforts)

    def with_effort(self, player_id: PlayerId, t: float) -> "EffortProfile":
        changed = dict(self.efforts)
        changed[player_id] = t
        return EffortProfile(changed)

    def as_dict(self) -> dict:
        return dict(self.efforts)

    def check_covers(self, scenario: Scenario) -> None:
        """Raise unless the profile's domain is exactly the scenario's player set."""
        expected = set(scenario.player_ids)
        got = set(self.efforts)
        if expected != got:
            raise InvariantViolation(
                f"profile domain mismatch: missing {sorted(map(str, expected - got))}, "
                f"extra {sorted(map(str, got - expected))}"
            )


def cost(params: PlayerParams, t: float) -> float:
    if t < 0:
        raise NegativeEffort(f"effort must be >= 0, got {t}")
    if params.cost_kind is CostKind.QUADRATIC:
        return params.c * t * t
    if params.cost_kind is CostKind.LINEAR:
        return params.c * t
    return params.c * t**params.exponent


def coalition_power(profile: EffortProfile, coalition: Coalition) -> float:
    return math.fsum(profile[p.id] * p.a for p in coalition.members)


def intra_shares(profile: EffortProfile, coalition: Coalition) -> dict:
    weights = {p.id: profile[p.id] * p.a for p in coalition.members}
    total = math.fsum(weights.values())
    if total <= 0:
        raise DegenerateProfile(
            f"coalition {coalition.id!r}: total effective effort is zero, shares are undefined"
        )
    return {pid: w / total for pid, w in weights.items()}


def win_probabilities(profile: EffortProfile, scenario: Scenario) -> dict:
    powers = {c.id: coalition_power(profile, c) for c in scenario.coalitions}
    total = math.fsum(powers.values())
    if total <= 0:
        raise DegenerateScenario("total power of all coalitions is zero")
    return {cid: pw / total for cid, pw in powers.items()}


def payoff(profile: EffortProfile, coalition: Coalition, player_id: PlayerId) -> float:
    """Net payoff conditional on the coalition winning: ``share * R - cost``."""
    player = coalition.member(player_id)
    share = intra_shares(profile, coalition)[player_id]
    return share * coalition.reward - cost(player, profile[player_id])


def expected_payoff(
    profile: EffortProfile,
    scenario: Scenario,
    coalition: Coalition,
    player_id: PlayerId,
) -> float:
    """Payoff discounted by the coalition's win probability."""
    player = coalition.member(player_id)
    p_win = win_probabilities(profile, scenario)[coalition.id]
    share = intra_shares(profile, coalition)[player_id]
    return p_win * share * coalition.reward - cost(player, profile[player_id])


def subcoalition_payoff(
    profile: EffortProfile,
    coalition: Coalition,
    branch_id: Hashable,
    player_id: PlayerId,
) -> float:
    """Payoff inside a sub-coalition.

    The branch wins its slice with probability equal to its power over the
    power of all branches of the same coalition.
    """
    branch = coalition.branch(branch_id)
    if player_id not in branch.members:
        raise UnknownPlayer(f"player {player_id!r} is not in sub-coalition {branch_id!r}")
    player = coalition.member(player_id)

    def power_of(members: Sequence[PlayerId]) -> float:
        return math.fsum(profile[m] * coalition.member(m).a for m in members)

    branch_power = power_of(branch.members)
    if branch_power <= 0:
        raise DegenerateProfile(f"sub-coalition {branch_id!r} has zero effective effort")
    all_branches = math.fsum(power_of(b.members) for b in coalition.sub_coalitions)
    p_win = branch_power / all_branches
    share = profile[player_id] * player.a / branch_power
    return p_win * share * branch.reward - cost(player, profile[player_id])


def select_coalition(candidates: Mapping[CoalitionId, float], order: Sequence[CoalitionId] | None = None):
    """Argmax over candidate payoffs; ties go to the earliest id in ``order``.

    ``order`` defaults to the mapping's own iteration order, which for a
    scenario-built dict is scenario order.
    """
    if not candidates:
        raise EmptyCandidates("no candidate coalitions")
    keys = list(order) if order is not None else list(candidates)
    keys = [k for k in keys if k in candidates] + [k for k in candidates if k not in keys]
    best = keys[0]
    for k in keys[1:]:
        if candidates[k] > candidates[best]:
            best = k
    return best

"""Cooperative-game baselines and coalition endurance aggregators.

Characteristic functions are stored as a dense array indexed by bitmask:
bit ``i`` set means player ``i`` (0-based) is in the coalition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    InvariantViolation,
    LengthMismatch,
    MissingEffectiveness,
    MissingSubsetValue,
    TooManyPlayers,
)

MAX_EXACT_PLAYERS = 20


def mask_of(members: Iterable[int]) -> int:
    m = 0
    for i in members:
        m |= 1 << i
    return m


def members_of(mask: int) -> tuple[int, ...]:
    mask = int(mask)
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass(frozen=True)
class CharacteristicGame:
    n: int
    v: np.ndarray

    def __post_init__(self) -> None:
        if self.n > MAX_EXACT_PLAYERS:
            raise TooManyPlayers(f"exact methods support at most {MAX_EXACT_PLAYERS} players, got {self.n}")
        if self.n < 1:
            raise InvariantViolation("a game needs at least one player")
        v = np.asarray(self.v, dtype=float)
        if v.shape != (1 << self.n,):
            raise MissingSubsetValue(f"need {1 << self.n} subset values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise MissingSubsetValue("subset values must be finite")
        if v[0] != 0:
            raise InvariantViolation("v(empty set) must be 0")
        v.flags.writeable = False
        object.__setattr__(self, "v", v)

    @classmethod
    def from_function(cls, n: int, value: Callable[[tuple[int, ...]], float]) -> "CharacteristicGame":
        if n > MAX_EXACT_PLAYERS:
            raise TooManyPlayers(f"exact methods support at most {MAX_EXACT_PLAYERS} players, got {n}")
        v = np.array([0.0] + [value(members_of(m)) for m in range(1, 1 << n)])
        return cls(n, v)

    @classmethod
    def from_mapping(cls, n: int, values: Mapping[frozenset, float]) -> "CharacteristicGame":
        """Build from ``{frozenset(members): value}``; the empty set may be omitted."""
        if n > MAX_EXACT_PLAYERS:
            raise TooManyPlayers(f"exact methods support at most {MAX_EXACT_PLAYERS} players, got {n}")
        v = np.full(1 << n, np.nan)
        v[0] = 0.0
        for members, value in values.items():
            if any(not 0 <= i < n for i in members):
                raise InvariantViolation(f"subset {sorted(members)} names a player outside 0..{n - 1}")
            v[mask_of(members)] = value
        if np.isnan(v).any():
            missing = [members_of(m) for m in np.flatnonzero(np.isnan(v))[:5]]
            raise MissingSubsetValue(f"no value for subsets such as {missing}")
        return cls(n, v)

    @property
    def grand(self) -> float:
        return float(self.v[-1])

    def value(self, members: Iterable[int]) -> float:
        return float(self.v[mask_of(members)])


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[1 << i : 1 << (i + 1)] = counts[: 1 << i] + 1
    return counts


def shapley_value(game: CharacteristicGame) -> np.ndarray:
    """Exact Shapley value by enumerating every subset not containing each player."""
    n = game.n
    masks = np.arange(1 << n)
    size = _popcounts(n)
    fact = [math.factorial(k) for k in range(n + 1)]
    weight_by_size = np.array([fact[s] * fact[n - s - 1] / fact[n] if s < n else 0.0 for s in range(n + 1)])
    phi = np.empty(n)
    for i in range(n):
        without = masks[(masks >> i & 1) == 0]
        marginal = game.v[without | (1 << i)] - game.v[without]
        phi[i] = math.fsum(weight_by_size[size[without]] * marginal)
    return phi


@dataclass(frozen=True)
class CoreCheck:
    in_core: bool
    efficient: bool
    worst_violating_subset: tuple[int, ...] | None
    worst_violation: float


def core_check(game: CharacteristicGame, allocation: Sequence[float], tol: float = 1e-9) -> CoreCheck:
    """Check efficiency and every coalition's secession constraint.

    The reported subset is the proper coalition whose value exceeds its
    allocation by the most; ``None`` when no such coalition exists.
    """
    x = np.asarray(allocation, dtype=float)
    if x.shape != (game.n,):
        raise LengthMismatch(f"allocation has {x.size} entries for {game.n} players")
    n = game.n
    masks = np.arange(1 << n)
    # allocation sums over every subset, built up one bit at a time
    sums = np.zeros(1 << n)
    for i in range(n):
        sums[1 << i : 1 << (i + 1)] = sums[: 1 << i] + x[i]
    efficient = bool(abs(sums[-1] - game.grand) <= tol)
    shortfall = game.v - sums
    proper = masks[1:-1] if n > 1 else masks[:0]
    worst = None
    worst_violation = 0.0
    if proper.size:
        k = int(proper[np.argmax(shortfall[proper])])
        if shortfall[k] > tol:
            worst, worst_violation = members_of(k), float(shortfall[k])
    return CoreCheck(efficient and worst is None, efficient, worst, worst_violation)


class EnduranceKind(str, Enum):
    WEIGHTED_SUM = "weighted-sum"
    VARIANCE_PENALIZED = "variance"
    WEAKEST_LINK = "weakest-link"


@dataclass(frozen=True)
class EnduranceSpec:
    """How a coalition aggregates member efforts into one endurance number.

    Weighted-sum weights are normalized to sum to one; ``None`` means equal
    weights for whatever number of members is passed in.
    """

    kind: EnduranceKind = EnduranceKind.WEIGHTED_SUM
    weights: tuple[float, ...] | None = None
    gamma: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EnduranceKind(self.kind))
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise InvariantViolation(f"gamma must be >= 0, got {self.gamma}")
        if self.weights is not None:
            w = [float(x) for x in self.weights]
            if not w or any(not math.isfinite(x) or x < 0 for x in w):
                raise InvariantViolation("weights must be nonnegative and nonempty")
            total = math.fsum(w)
            if total <= 0:
                raise InvariantViolation("weights must not all be zero")
            object.__setattr__(self, "weights", tuple(x / total for x in w))


def endurance_index(
    spec: EnduranceSpec,
    efforts: Sequence[float],
    effectiveness: Sequence[float] | None = None,
) -> float:
    t = np.asarray(efforts, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise LengthMismatch("efforts must be a nonempty vector")
    if spec.kind is EnduranceKind.WEIGHTED_SUM:
        if spec.weights is None:
            return math.fsum(t) / t.size
        if len(spec.weights) != t.size:
            raise LengthMismatch(f"{len(spec.weights)} weights for {t.size} efforts")
        return math.fsum(w * x for w, x in zip(spec.weights, t))
    if spec.kind is EnduranceKind.WEAKEST_LINK:
        return float(t.min())
    if effectiveness is None:
        raise MissingEffectiveness("variance-penalized endurance needs effectiveness weights")
    a = np.asarray(effectiveness, dtype=float)
    if a.shape != t.shape:
        raise LengthMismatch(f"{a.size} effectiveness values for {t.size} efforts")
    variance = float(np.var(t))  # population variance
    return math.fsum(a * t) * math.exp(-spec.gamma * variance)

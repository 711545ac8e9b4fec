from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from ..errors import GridTooCoarse, InvalidConfig
from ..model import Coalition, EffortProfile


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the pure, mixed and two-layer solvers.

    ``max_iter`` bounds the damped best-response loop, ``fp_rounds`` the
    fictitious-play loop. ``mixed_tol`` is the fictitious-play stopping
    threshold on exploitability, relative to the prize.
    """

    max_iter: int = 10_000
    tol: float = 1e-10
    damping: float = 0.5
    grid_size: int = 201
    t_max: float | None = None
    seed: int = 0
    fp_rounds: int = 200_000
    mixed_tol: float = 1e-4
    check_every: int = 500
    mc_draws: int = 100_000
    cycle_window: int = 50

    def __post_init__(self) -> None:
        if not (isinstance(self.max_iter, int) and self.max_iter > 0):
            raise InvalidConfig(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise InvalidConfig(f"tol must be > 0, got {self.tol!r}")
        if not (0 < self.damping <= 1):
            raise InvalidConfig(f"damping must lie in (0, 1], got {self.damping!r}")
        if not isinstance(self.grid_size, int) or self.grid_size < 2:
            raise GridTooCoarse(f"grid_size must be an integer >= 2, got {self.grid_size!r}")
        if self.t_max is not None and not (math.isfinite(self.t_max) and self.t_max > 0):
            raise InvalidConfig(f"t_max must be > 0, got {self.t_max!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (isinstance(self.fp_rounds, int) and self.fp_rounds > 0):
            raise InvalidConfig("fp_rounds must be a positive integer")
        if not (math.isfinite(self.mixed_tol) and self.mixed_tol > 0):
            raise InvalidConfig("mixed_tol must be > 0")
        if not (isinstance(self.check_every, int) and self.check_every > 0):
            raise InvalidConfig("check_every must be a positive integer")
        if not (isinstance(self.mc_draws, int) and self.mc_draws > 0):
            raise InvalidConfig("mc_draws must be a positive integer")
        if not (isinstance(self.cycle_window, int) and self.cycle_window >= 2):
            raise InvalidConfig("cycle_window must be an integer >= 2")

    def replace(self, **changes) -> "SolverConfig":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return SolverConfig(**values)

    def resolve_t_max(self, coalitions: Iterable[Coalition]) -> float:
        """Upper end of the effort range.

        Defaults to ``2 * sqrt(R_max / c_min)``, raised if needed so that no
        player's unconstrained best response (at most ``cost^-1(R)``) is cut off.
        """
        if self.t_max is not None:
            return float(self.t_max)
        coalitions = list(coalitions)
        r_max = max(c.reward for c in coalitions)
        players = [p for c in coalitions for p in c.members]
        if r_max <= 0:
            return 1.0
        c_min = min(p.c for p in players)
        bound = 2.0 * math.sqrt(r_max / c_min)
        return max(bound, max(p.max_useful_effort(r_max) for p in players))

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass(frozen=True)
class MixedStrategy:
    grid: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if grid.ndim != 1 or grid.shape != probs.shape:
            raise InvalidConfig("grid and probs must be 1-D arrays of equal length")
        if grid.size >= 2 and not np.all(np.diff(grid) > 0):
            raise InvalidConfig("grid must be strictly ascending")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise InvalidConfig("probs must be nonnegative and sum to 1")
        grid.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "probs", probs)

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    def mean(self) -> float:
        return float(self.grid @ self.probs)

    def total_variation(self, other: "MixedStrategy") -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())

    def to_dict(self) -> dict:
        return {"grid": self.grid.tolist(), "probs": self.probs.tolist()}


class ReportKind(str, Enum):
    PURE_CONVERGED = "pure-converged"
    PURE_CYCLE = "pure-cycle-detected"
    MIXED = "mixed"


@dataclass
class EquilibriumReport:
    kind: ReportKind
    residual: float
    exploitability: float
    iterations: int
    converged: bool
    efforts: EffortProfile | None = None
    strategies: Mapping[object, MixedStrategy] | None = None
    win_probability: float | None = None
    trace: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {
            "kind": self.kind.value,
            "converged": self.converged,
            "residual": self.residual,
            "exploitability": self.exploitability,
            "iterations": self.iterations,
        }
        if self.efforts is not None:
            out["efforts"] = {str(k): v for k, v in self.efforts.as_dict().items()}
        if self.strategies is not None:
            out["strategies"] = {str(k): s.to_dict() for k, s in self.strategies.items()}
        if self.win_probability is not None:
            out["win_probability"] = self.win_probability
        if self.trace:
            out["trace"] = [[r, e] for r, e in self.trace]
        return out

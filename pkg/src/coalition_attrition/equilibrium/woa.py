"""The classic two-player war of attrition used as a benchmark.

Both players pay their own persistence time until one quits; the survivor
takes the prize ``V``, ties split it. The symmetric equilibrium quits at an
exponentially distributed time with mean ``V``.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidConfig, InvalidPrize, NegativeEffort
from .mixed import MatrixGame, _report, fictitious_play
from .types import EquilibriumReport, SolverConfig


def _check_prize(V: float) -> None:
    if not (math.isfinite(V) and V > 0):
        raise InvalidPrize(f"prize V must be > 0, got {V}")


def woa_cdf(V: float, t: float) -> float:
    _check_prize(V)
    if t < 0:
        raise NegativeEffort(f"time must be >= 0, got {t}")
    return -math.expm1(-t / V)


def woa_quantile(V: float, u):
    """Inverse of :func:`woa_cdf` for ``u`` in [0, 1)."""
    _check_prize(V)
    return -V * np.log1p(-np.asarray(u, dtype=float))


def woa_sample(V: float, count: int, seed: int) -> list[float]:
    _check_prize(V)
    if count < 1:
        raise InvalidConfig(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return woa_quantile(V, rng.random(count)).tolist()


def woa_payoff_matrix(V: float, grid: np.ndarray) -> np.ndarray:
    """``A[k, l]``: payoff of quitting at ``grid[k]`` when the rival quits at ``grid[l]``."""
    _check_prize(V)
    mine = np.asarray(grid, dtype=float)[:, None]
    theirs = np.asarray(grid, dtype=float)[None, :]
    return np.where(mine > theirs, V - theirs, np.where(mine < theirs, -mine, V / 2.0 - mine))


def solve_woa_fp(V: float, config: SolverConfig | None = None) -> EquilibriumReport:
    """Fictitious play on the discretized symmetric war of attrition.

    The grid spans ``[0, config.t_max]`` (default ``5 * V``).
    """
    _check_prize(V)
    config = config or SolverConfig()
    t_max = config.t_max if config.t_max is not None else 5.0 * V
    grid = np.linspace(0.0, t_max, config.grid_size)
    A = woa_payoff_matrix(V, grid)
    game = MatrixGame(grid, A, A)
    avg, rounds, expl, converged, trace = fictitious_play(
        game, config.fp_rounds, V, config.mixed_tol, config.check_every
    )
    return _report(("p1", "p2"), grid, avg, rounds, expl, converged, trace)


def cdf_sup_distance(strategy_cdf: np.ndarray, grid: np.ndarray, V: float) -> float:
    """Sup distance between a grid CDF and the exponential equilibrium CDF."""
    exact = -np.expm1(-np.asarray(grid) / V)
    return float(np.max(np.abs(np.asarray(strategy_cdf) - exact)))

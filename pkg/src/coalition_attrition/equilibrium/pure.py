"""Pure-strategy equilibria of the effort contest.

Every solver here reduces to the same best-response problem. A player with
effectiveness ``a``, prize ``R`` and rival effective effort ``B`` maximizes

    R * t*a / (t*a + B) - cost(t)

Inside a coalition ``B`` is the teammates' effective effort. With the
expected payoff of the two-layer game the coalition's win probability times
the share collapses to ``t*a / total_power``, so ``B`` is everyone else's
effective effort across all coalitions and ``R`` is the player's own
coalition prize.
"""

from __future__ import annotations

import math
from typing import Literal, Sequence

import numpy as np

from ..errors import DegenerateProfile, DegenerateScenario, InvalidConfig, UnsupportedCost
from ..model import (
    Coalition,
    CostKind,
    EffortProfile,
    PlayerParams,
    Scenario,
    expected_payoff,
    intra_shares,
    payoff,
    win_probabilities,
)
from .search import golden_section_max, maximize_concave
from .types import EquilibriumReport, ReportKind, SolverConfig


def foc_residuals(profile: EffortProfile, coalition: Coalition) -> dict:
    """Marginal payoff of each member under quadratic costs; zero at an interior equilibrium."""
    for p in coalition.members:
        if p.cost_kind is not CostKind.QUADRATIC:
            raise UnsupportedCost(f"player {p.id!r}: FOC residuals need quadratic cost")
    weights = {p.id: profile[p.id] * p.a for p in coalition.members}
    total = math.fsum(weights.values())
    if total <= 0:
        raise DegenerateProfile(f"coalition {coalition.id!r}: total effective effort is zero")
    R = coalition.reward
    return {
        p.id: p.a * R * (total - weights[p.id]) / total**2 - 2.0 * p.c * profile[p.id]
        for p in coalition.members
    }


def contest_payoff(player: PlayerParams, prize: float, rivals: float, t: float) -> float:
    own = t * player.a
    total = own + rivals
    if total <= 0:
        # lone zero-effort player: limit of the share as t -> 0+
        return prize
    return prize * own / total - player.cost(t)


def best_response(player: PlayerParams, prize: float, rivals: float, t_max: float, tol: float) -> float:
    """Payoff-maximizing effort in [0, t_max] against rival effective effort ``rivals``."""
    if prize <= 0 or rivals <= 0:
        # no prize, or a sure share for any t > 0: effort only costs
        return 0.0
    a = player.a

    def f(t: float) -> float:
        return contest_payoff(player, prize, rivals, t)

    def df(t: float) -> float:
        return prize * a * rivals / (t * a + rivals) ** 2 - player.marginal_cost(t)

    return maximize_concave(f, df, 0.0, t_max, tol=tol)


def _damped_iteration(
    players: Sequence[PlayerParams],
    prizes: np.ndarray,
    config: SolverConfig,
    t_max: float,
) -> tuple[np.ndarray, int, ReportKind, float]:
    """Jacobi best-response iteration with damping and cycle detection.

    All players share one pool of effective effort; player ``i`` faces
    ``B_i = sum_j a_j t_j - a_i t_i``.
    """
    a = np.array([p.a for p in players])
    t = np.full(len(players), t_max / 10.0)
    recent: list[tuple[int, ...]] = []
    last_key: tuple[int, ...] | None = None
    step = math.inf
    for it in range(1, config.max_iter + 1):
        weighted = a * t
        total = math.fsum(weighted)
        br = np.array(
            [
                best_response(p, prizes[i], max(total - weighted[i], 0.0), t_max, config.tol)
                for i, p in enumerate(players)
            ]
        )
        new = t + config.damping * (br - t)
        step = float(np.max(np.abs(new - t)))
        t = new
        if step < config.tol:
            return t, it, ReportKind.PURE_CONVERGED, step
        key = tuple(int(round(x / 1e-8)) for x in t)
        # a converging sequence repeats its immediate predecessor; a cycle revisits an older iterate
        if key != last_key and key in recent:
            return t, it, ReportKind.PURE_CYCLE, step
        last_key = key
        recent.append(key)
        if len(recent) > config.cycle_window:
            recent.pop(0)
    return t, config.max_iter, ReportKind.PURE_CYCLE, step


def _pure_exploitability(players, prizes, t, t_max, tol) -> float:
    a = np.array([p.a for p in players])
    weighted = a * t
    total = math.fsum(weighted)
    gain = 0.0
    for i, p in enumerate(players):
        rivals = max(total - weighted[i], 0.0)
        br = best_response(p, prizes[i], rivals, t_max, tol)
        current = contest_payoff(p, prizes[i], rivals, t[i])
        gain = max(gain, contest_payoff(p, prizes[i], rivals, br) - current)
    return gain


def solve_pure_br(scenario: Scenario, coalition_id, config: SolverConfig | None = None) -> EquilibriumReport:
    """Damped best-response dynamics for the conditional payoff of one coalition."""
    config = config or SolverConfig()
    if not isinstance(config, SolverConfig):
        raise InvalidConfig("config must be a SolverConfig")
    coalition = scenario.coalition(coalition_id)
    players = coalition.members
    prizes = np.full(len(players), coalition.reward)
    t_max = config.resolve_t_max([coalition])
    t, iterations, kind, step = _damped_iteration(players, prizes, config, t_max)
    return EquilibriumReport(
        kind=kind,
        residual=step,
        exploitability=_pure_exploitability(players, prizes, t, t_max, config.tol),
        iterations=iterations,
        converged=kind is ReportKind.PURE_CONVERGED,
        efforts=EffortProfile(dict(zip(coalition.member_ids, t.tolist()))),
    )


def solve_two_layer(scenario: Scenario, config: SolverConfig | None = None) -> dict:
    """Joint fixed point where everyone best-responds to the expected payoff.

    Each player accounts for its own effect on the coalition win
    probability. Returns one report per coalition, in scenario order.
    """
    config = config or SolverConfig()
    if not isinstance(config, SolverConfig):
        raise InvalidConfig("config must be a SolverConfig")
    players = scenario.players
    prizes = np.array([scenario.coalition_of(p.id).reward for p in players])
    t_max = config.resolve_t_max(scenario.coalitions)
    t, iterations, kind, _ = _damped_iteration(players, prizes, config, t_max)
    profile = EffortProfile(dict(zip(scenario.player_ids, t.tolist())))

    try:
        probs = win_probabilities(profile, scenario)
    except DegenerateScenario:
        probs = {c.id: None for c in scenario.coalitions}

    # per-coalition step and exploitability, measured from the final profile
    a = np.array([p.a for p in players])
    weighted = a * t
    total = math.fsum(weighted)
    reports = {}
    offset = 0
    for coalition in scenario.coalitions:
        idx = range(offset, offset + len(coalition.members))
        offset += len(coalition.members)
        steps, gains = [], []
        for i in idx:
            rivals = max(total - weighted[i], 0.0)
            br = best_response(players[i], prizes[i], rivals, t_max, config.tol)
            steps.append(config.damping * abs(br - t[i]))
            gains.append(
                contest_payoff(players[i], prizes[i], rivals, br)
                - contest_payoff(players[i], prizes[i], rivals, t[i])
            )
        reports[coalition.id] = EquilibriumReport(
            kind=kind,
            residual=max(steps),
            exploitability=max(0.0, max(gains)),
            iterations=iterations,
            converged=kind is ReportKind.PURE_CONVERGED,
            efforts=EffortProfile({pid: profile[pid] for pid in coalition.member_ids}),
            win_probability=probs[coalition.id],
        )
    return reports


def verify_pure_ne(
    profile: EffortProfile,
    scenario: Scenario,
    coalition_id,
    grid_size: int = 1001,
    t_max: float | None = None,
    payoff_kind: Literal["conditional", "expected"] = "conditional",
) -> float:
    """Largest unilateral deviation gain found by scanning an effort grid.

    Payoffs are evaluated through the model formulas directly, so this is
    independent of the solvers' reduced form. The best grid point is polished
    by golden-section search between its neighbours. A value at or below the
    caller's tolerance certifies an approximate equilibrium.
    """
    if grid_size < 2:
        raise InvalidConfig("grid_size must be >= 2")
    coalition = scenario.coalition(coalition_id)
    if t_max is None:
        pool = scenario.coalitions if payoff_kind == "expected" else [coalition]
        t_max = SolverConfig().resolve_t_max(pool)
        t_max = max(t_max, max(profile[p] for p in coalition.member_ids))
    grid = np.linspace(0.0, t_max, grid_size)

    def value(prof: EffortProfile, pid) -> float:
        if payoff_kind == "expected":
            return expected_payoff(prof, scenario, coalition, pid)
        return payoff(prof, coalition, pid)

    # baseline must be defined; a degenerate profile has no payoff to improve on
    if payoff_kind == "expected":
        win_probabilities(profile, scenario)
    intra_shares(profile, coalition)

    best_gain = 0.0
    for pid in coalition.member_ids:
        base = value(profile, pid)

        def dev(t: float, pid=pid) -> float:
            try:
                return value(profile.with_effort(pid, t), pid)
            except (DegenerateProfile, ArithmeticError):
                return -math.inf

        scores = np.array([dev(float(t)) for t in grid])
        k = int(np.argmax(scores))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid_size - 1)]
        x, _, _ = golden_section_max(dev, float(lo), float(hi), tol=1e-12)
        top = max(scores[k], dev(x))
        best_gain = max(best_gain, top - base)
    return float(best_gain)


def candidate_payoffs(
    scenario: Scenario,
    profile: EffortProfile,
    player_id,
    payoff_kind: Literal["conditional", "expected"] = "expected",
    t_max: float | None = None,
    tol: float = 1e-10,
) -> dict:
    """What ``player_id`` would earn in each coalition, holding everyone else's effort.

    The player is moved into each candidate coalition and best-responds
    there. ``conditional`` assumes that coalition wins; ``expected``
    discounts by its win probability.
    """
    player = scenario.player(player_id)
    if t_max is None:
        t_max = SolverConfig().resolve_t_max(scenario.coalitions)
    others = {pid: profile[pid] * scenario.player(pid).a for pid in scenario.player_ids if pid != player_id}
    out = {}
    for coalition in scenario.coalitions:
        if payoff_kind == "expected":
            rivals = math.fsum(others.values())
        else:
            rivals = math.fsum(others[m] for m in coalition.member_ids if m != player_id)
        br = best_response(player, coalition.reward, rivals, t_max, tol)
        out[coalition.id] = contest_payoff(player, coalition.reward, rivals, br)
    return out

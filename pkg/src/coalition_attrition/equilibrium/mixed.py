"""Mixed equilibria of discretized effort games via fictitious play.

A discretized game is described by a *payoff oracle*: given every player's
current mixed strategy on the shared grid, it returns each player's expected
payoff for every pure grid action. Fictitious play and exploitability only
talk to the oracle.
"""

from __future__ import annotations

from typing import Mapping, Protocol, Sequence

import numpy as np

from ..errors import GridMismatch, GridTooCoarse, InvalidConfig
from ..model import Coalition, PlayerParams, Scenario
from .types import EquilibriumReport, MixedStrategy, ReportKind, SolverConfig

EXACT_MAX_MEMBERS = 3


class PayoffOracle(Protocol):
    grid: np.ndarray
    n_players: int

    def payoff_vectors(self, strategies: Sequence[np.ndarray]) -> list[np.ndarray]: ...


class MatrixGame:
    """Two-player game given by explicit payoff matrices ``A[i][k, l]``."""

    def __init__(self, grid: np.ndarray, row: np.ndarray, col: np.ndarray):
        self.grid = np.asarray(grid, dtype=float)
        self.n_players = 2
        self.row = np.asarray(row, dtype=float)  # row[k, l]: player 0 plays k, player 1 plays l
        self.col = np.asarray(col, dtype=float)  # col[l, k]: player 1 plays l, player 0 plays k

    def payoff_vectors(self, strategies):
        return [self.row @ strategies[1], self.col @ strategies[0]]


def _contest_utility(player: PlayerParams, prize: float, n_members: int, grid: np.ndarray, rivals: np.ndarray):
    """``u[k, m]``: payoff of effort ``grid[k]`` against rival effective effort ``rivals[m]``."""
    own = grid[:, None] * player.a
    total = own + rivals[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        share = np.where(total > 0, own / np.where(total > 0, total, 1.0), 1.0 / n_members)
    cost = np.array([player.cost(float(t)) for t in grid])
    return prize * share - cost[:, None]


class ContestGame:
    """Intra-coalition contest on an effort grid.

    Payoffs depend on opponents only through their summed effective effort,
    so expectations are taken over that sum. For up to three members the
    distribution of the sum is enumerated exactly; beyond that it is sampled
    with fixed seeded draws (common random numbers across rounds). When every
    member sits at zero effort the prize is split equally.
    """

    def __init__(self, coalition: Coalition, grid: np.ndarray, seed: int = 0, mc_draws: int = 100_000):
        self.coalition = coalition
        self.grid = np.asarray(grid, dtype=float)
        self.n_players = len(coalition.members)
        self.exact = self.n_players <= EXACT_MAX_MEMBERS
        self.prize = coalition.reward
        n = self.n_players
        G = self.grid.size
        if self.exact:
            self._support = []
            for i, player in enumerate(coalition.members):
                opponents = [p for j, p in enumerate(coalition.members) if j != i]
                sums = np.zeros(1)
                for opp in opponents:
                    sums = (sums[:, None] + opp.a * self.grid[None, :]).ravel()
                # identical sums collapse so the utility matrix stays small
                values, inverse = np.unique(np.round(sums, 12), return_inverse=True)
                util = _contest_utility(player, self.prize, n, self.grid, values)
                self._support.append((inverse.ravel(), values.size, util))
        else:
            rng = np.random.default_rng(seed)
            # one column of draws per player, shared by all of that player's rivals
            uniforms = rng.random((n, mc_draws))
            self._order = np.argsort(uniforms, axis=1, kind="stable")
            self._sorted_u = np.take_along_axis(uniforms, self._order, axis=1)
            step = self.grid[1] - self.grid[0] if G > 1 else 0.0
            uniform = G > 1 and self.grid[0] == 0.0 and np.allclose(np.diff(self.grid), step, rtol=1e-12, atol=0)
            self._lattice = []
            for i, player in enumerate(coalition.members):
                opp_a = {p.a for j, p in enumerate(coalition.members) if j != i}
                if uniform and len(opp_a) == 1:
                    # rival sums live on the lattice a*h*k, k = 0..(n-1)(G-1): precompute utilities there
                    (a,) = opp_a
                    values = a * step * np.arange((n - 1) * (G - 1) + 1)
                    self._lattice.append(_contest_utility(player, self.prize, n, self.grid, values))
                else:
                    self._lattice.append(None)
        self._G = G

    def _sample_indices(self, strategies) -> list[np.ndarray]:
        """Inverse-CDF grid indices of every player's fixed draws under its strategy."""
        out = []
        for j, s in enumerate(strategies):
            cdf = np.cumsum(s)
            cdf[-1] = 1.0
            # draws are presorted, so the grid index is a step function of rank
            cuts = np.searchsorted(self._sorted_u[j], cdf, side="right")
            by_rank = np.repeat(np.arange(self._G), np.diff(cuts, prepend=0))
            k = np.empty(self._sorted_u.shape[1], dtype=np.int64)
            k[self._order[j]] = by_rank
            out.append(k)
        return out

    def payoff_vectors(self, strategies):
        n = self.n_players
        out = []
        if not self.exact:
            sampled = self._sample_indices(strategies)
            total = np.sum(sampled, axis=0)
        for i, player in enumerate(self.coalition.members):
            opp_strats = [strategies[j] for j in range(n) if j != i]
            if self.exact:
                inverse, m, util = self._support[i]
                joint = np.ones(1)
                for s in opp_strats:
                    joint = (joint[:, None] * s[None, :]).ravel()
                weights = np.bincount(inverse, weights=joint, minlength=m)
                out.append(util @ weights)
            else:
                idx = sampled[:i] + sampled[i + 1 :]
                lattice = self._lattice[i]
                if lattice is not None:
                    counts = np.bincount(total - sampled[i], minlength=lattice.shape[1])
                    out.append(lattice @ (counts / counts.sum()))
                else:
                    sums = np.zeros(self._sorted_u.shape[1])
                    for opp, k in zip(
                        (p for j, p in enumerate(self.coalition.members) if j != i), idx
                    ):
                        sums += opp.a * self.grid[k]
                    values, counts = np.unique(sums, return_counts=True)
                    util = _contest_utility(player, self.prize, n, self.grid, values)
                    out.append(util @ (counts / counts.sum()))
        return out


def _exploitability(oracle: PayoffOracle, strategies: Sequence[np.ndarray]) -> float:
    vectors = oracle.payoff_vectors(strategies)
    gaps = [float(v.max() - s @ v) for v, s in zip(vectors, strategies)]
    return max(0.0, max(gaps))


def fictitious_play(
    oracle: PayoffOracle,
    rounds: int,
    scale: float,
    tol: float,
    check_every: int,
) -> tuple[list[np.ndarray], int, float, bool, list[tuple[int, float]]]:
    """Simultaneous fictitious play from uniform beliefs.

    Each round every player best-responds to the others' empirical averages
    (ties go to the lowest grid index), so identical players stay identical.
    Stops once exploitability of the averages is at most ``tol * scale``.
    """
    G = oracle.grid.size
    n = oracle.n_players
    avg = [np.full(G, 1.0 / G) for _ in range(n)]
    trace: list[tuple[int, float]] = []
    expl = _exploitability(oracle, avg)
    trace.append((0, expl))
    r = 0
    while r < rounds:
        vectors = oracle.payoff_vectors(avg)
        r += 1
        w = 1.0 / (r + 1)
        for i in range(n):
            k = int(np.argmax(vectors[i]))
            avg[i] *= 1.0 - w
            avg[i][k] += w
        if r % check_every == 0 or r == rounds:
            for s in avg:
                s /= s.sum()
            expl = _exploitability(oracle, avg)
            trace.append((r, expl))
            if expl <= tol * scale:
                return avg, r, expl, True, trace
    return avg, r, expl, expl <= tol * scale, trace


def _grid(config: SolverConfig, coalitions) -> np.ndarray:
    if config.grid_size < 2:
        raise GridTooCoarse("grid_size must be >= 2")
    return np.linspace(0.0, config.resolve_t_max(coalitions), config.grid_size)


def _report(ids, grid, avg, rounds, expl, converged, trace) -> EquilibriumReport:
    strategies = {pid: MixedStrategy(grid, s) for pid, s in zip(ids, avg)}
    return EquilibriumReport(
        kind=ReportKind.MIXED,
        residual=expl,
        exploitability=expl,
        iterations=rounds,
        converged=converged,
        strategies=strategies,
        trace=trace,
    )


def solve_mixed_fp(scenario: Scenario, coalition_id, config: SolverConfig | None = None) -> EquilibriumReport:
    config = config or SolverConfig()
    if not isinstance(config, SolverConfig):
        raise InvalidConfig("config must be a SolverConfig")
    coalition = scenario.coalition(coalition_id)
    grid = _grid(config, [coalition])
    oracle = ContestGame(coalition, grid, seed=config.seed, mc_draws=config.mc_draws)
    scale = coalition.reward if coalition.reward > 0 else 1.0
    avg, rounds, expl, converged, trace = fictitious_play(
        oracle, config.fp_rounds, scale, config.mixed_tol, config.check_every
    )
    return _report(coalition.member_ids, grid, avg, rounds, expl, converged, trace)


def exploitability(
    strategies: Mapping[object, MixedStrategy],
    scenario: Scenario,
    coalition_id,
    config: SolverConfig | None = None,
) -> float:
    """Largest gain any member gets by switching to its best grid action."""
    config = config or SolverConfig()
    coalition = scenario.coalition(coalition_id)
    missing = [pid for pid in coalition.member_ids if pid not in strategies]
    if missing:
        raise GridMismatch(f"no strategy for members {missing}")
    ordered = [strategies[pid] for pid in coalition.member_ids]
    grid = ordered[0].grid
    for s in ordered[1:]:
        if s.grid.shape != grid.shape or not np.array_equal(s.grid, grid):
            raise GridMismatch("strategies are not defined on a common grid")
    oracle = ContestGame(coalition, grid, seed=config.seed, mc_draws=config.mc_draws)
    return _exploitability(oracle, [np.array(s.probs) for s in ordered])

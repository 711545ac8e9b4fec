"""Pure, mixed and two-layer equilibrium solvers."""

from .mixed import ContestGame, MatrixGame, exploitability, fictitious_play, solve_mixed_fp
from .pure import best_response, candidate_payoffs, foc_residuals, solve_pure_br, solve_two_layer, verify_pure_ne
from .replicator import replicator_dynamics, replicator_step
from .search import golden_section_max
from .types import EquilibriumReport, MixedStrategy, ReportKind, SolverConfig
from .woa import cdf_sup_distance, solve_woa_fp, woa_cdf, woa_payoff_matrix, woa_quantile, woa_sample

__all__ = [
    "ContestGame",
    "EquilibriumReport",
    "MatrixGame",
    "MixedStrategy",
    "ReportKind",
    "SolverConfig",
    "best_response",
    "candidate_payoffs",
    "cdf_sup_distance",
    "exploitability",
    "fictitious_play",
    "foc_residuals",
    "golden_section_max",
    "replicator_dynamics",
    "replicator_step",
    "solve_mixed_fp",
    "solve_pure_br",
    "solve_two_layer",
    "solve_woa_fp",
    "verify_pure_ne",
    "woa_cdf",
    "woa_payoff_matrix",
    "woa_quantile",
    "woa_sample",
]

"""Deterministic Lipschitz global optimization over box domains.

Diagonal partitioning: the objective is sampled only at the two ends of
each box's main diagonal.  Boxes are scored by an optimistic lower-bound
characteristic built from adaptively estimated Lipschitz constants
(either tuned per box or taken from a single global estimate), the best
box is subdivided (bisection or a full 2^n split), and the search stops
once the chosen box's diagonal falls below a fraction of the domain
diagonal.
"""

from .engine import (
    Estimator,
    SolveStatus,
    SolverConfig,
    SolverResult,
    SolverState,
    Strategy,
    solve,
)
from .geometry import DiagonalBox, bisect, diag_norm, partition_2n, place_on_diagonal
from .problems import ProblemSpec, evaluate, get_problem, reference_optimum

__all__ = [
    "DiagonalBox",
    "Estimator",
    "ProblemSpec",
    "SolveStatus",
    "SolverConfig",
    "SolverResult",
    "SolverState",
    "Strategy",
    "bisect",
    "diag_norm",
    "evaluate",
    "get_problem",
    "partition_2n",
    "place_on_diagonal",
    "reference_optimum",
    "solve",
]

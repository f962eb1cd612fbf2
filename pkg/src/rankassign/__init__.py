"""Ranked-assignment solvers and benchmark harness for gated cost matrices."""

from .cost_model import (
    Assignment,
    CostMatrix,
    RankedSolution,
    assignment_cost,
    enumerate_assignments,
    is_valid_assignment,
    validate_cost_matrix,
)
from .exact import murty_k_best, solve_linear
from .gibbs import GibbsConfig, gibbs_sample
from .graphify import BipartiteGraph, line_features, normalize_graph, to_bipartite
from .metrics import kappa, penalized_mean_cost, rank_accuracy, wp_score
from .postproc import PredictionMatrix, column_to_dense, greedy_post_process

__all__ = [
    "Assignment",
    "BipartiteGraph",
    "CostMatrix",
    "GibbsConfig",
    "PredictionMatrix",
    "RankedSolution",
    "assignment_cost",
    "column_to_dense",
    "enumerate_assignments",
    "gibbs_sample",
    "greedy_post_process",
    "is_valid_assignment",
    "kappa",
    "line_features",
    "murty_k_best",
    "normalize_graph",
    "penalized_mean_cost",
    "rank_accuracy",
    "solve_linear",
    "to_bipartite",
    "validate_cost_matrix",
    "wp_score",
]

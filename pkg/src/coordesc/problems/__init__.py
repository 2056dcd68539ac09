"""Application problems with their coordinate updates, caches and greedy scores."""
from .base import GS_RULES, CoordinateProblem, l1_gs_scores, rel_drift
from .lasso import (LassoProblem, continuation_schedule, continuation_solve, lasso_coordinate_step,
                    lasso_gradient_map, lasso_gs_scores)
from .least_squares import LeastSquaresProblem, ls_coordinate_step
from .logistic import (LogisticProblem, logistic_gs_scores, logistic_newton_step,
                       logistic_objective_direct, newton_direction)
from .nmf import NmfProblem, nmf_column_step, nmf_gs_scores, nmf_normalize
from .quadratic import FiniteSumQuadratic, QuadraticProblem, demo_quadratic
from .rotated import RotatedL1Problem, alternating_minimization, rotated_l1_coord_min
from .svm import SvmDualProblem, svm_coordinate_step, svm_gs_scores

__all__ = [
    "GS_RULES", "CoordinateProblem", "l1_gs_scores", "rel_drift",
    "LassoProblem", "continuation_schedule", "continuation_solve", "lasso_coordinate_step",
    "lasso_gradient_map", "lasso_gs_scores",
    "LeastSquaresProblem", "ls_coordinate_step",
    "LogisticProblem", "logistic_gs_scores", "logistic_newton_step", "logistic_objective_direct",
    "newton_direction",
    "NmfProblem", "nmf_column_step", "nmf_gs_scores", "nmf_normalize",
    "FiniteSumQuadratic", "QuadraticProblem", "demo_quadratic",
    "RotatedL1Problem", "alternating_minimization", "rotated_l1_coord_min",
    "SvmDualProblem", "svm_coordinate_step", "svm_gs_scores",
]

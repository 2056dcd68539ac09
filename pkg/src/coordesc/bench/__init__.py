"""Instance generators, reference solvers, the experiment runner and CSV records."""
from .generators import LassoInstance, NmfInstance, gen_lasso, gen_least_squares, gen_logistic, gen_nmf, gen_svm
from .instances import load_instance, save_instance
from .oracle import brute_prox_oracle
from .proxcheck import PAIR_CASES, inclusion_residual, run_prox_checks
from .records import COLUMNS, ConvergenceRecord, aggregate, export_records, load_records
from .reference import ReferenceSolution, reference_solve
from .runner import ExperimentConfig, build_problem, reference_point, run_experiment, run_trial

__all__ = [
    "LassoInstance", "NmfInstance", "gen_lasso", "gen_least_squares", "gen_logistic", "gen_nmf", "gen_svm",
    "load_instance", "save_instance", "brute_prox_oracle", "PAIR_CASES", "inclusion_residual",
    "run_prox_checks", "COLUMNS", "ConvergenceRecord", "aggregate", "export_records", "load_records",
    "ReferenceSolution", "reference_solve", "ExperimentConfig", "build_problem", "reference_point",
    "run_experiment", "run_trial",
]

"""Experiment driver: builds instances, runs trials, records per-epoch metrics."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DivergenceError, UnsupportedReferenceError
from ..problems import (LassoProblem, NmfProblem, QuadraticProblem, RotatedL1Problem, continuation_schedule,
                        demo_quadratic)
from ..schemes import BlockUpdater, SchemeConfig
from ..selection import make_rule, next_index, trial_seed
from . import generators
from .records import ConvergenceRecord, export_records
from .reference import reference_solve

#: relative slack allowed when asserting that an update did not increase the objective
DESCENT_SLACK = 1e-12

PROBLEM_KINDS = ("lasso", "least_squares", "nmf", "logistic", "svm", "quadratic", "rotated")


@dataclass
class ExperimentConfig:
    """One experiment: a problem family, an index rule and a scheme.

    ``tolerance`` is the reference-solver accuracy and, when
    ``stop_at_tolerance`` is set, the early-stopping threshold on the
    stationarity measure. ``continuation`` (LASSO only) is the ladder ratio
    ``eta``; each stage runs until the stationarity measure reaches
    ``tolerance``.
    """

    problem: str = "lasso"
    params: dict = field(default_factory=dict)
    rule: str = "cyclic"
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    epochs: int = 100
    seed: int = 0
    tolerance: float = 1e-10
    trials: int = 1
    output_path: str | None = None
    continuation: float | None = None
    lambda0: float = 1.0
    stop_at_tolerance: bool = False
    check_descent: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEM_KINDS:
            raise ConfigurationError(f"unknown problem {self.problem!r}; expected one of {PROBLEM_KINDS}")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.tolerance > 0:
            raise ConfigurationError("tolerance must be positive")
        if self.continuation is not None and self.problem != "lasso":
            raise ConfigurationError("continuation is only defined for LASSO")


def build_problem(kind: str, params: dict | None = None, seed: int = 0):
    """Instantiate a problem family from generator parameters."""
    params = dict(params or {})
    if kind == "lasso":
        return generators.gen_lasso(seed=seed, **params).problem
    if kind == "least_squares":
        p = params.pop("p", 200)
        n = params.pop("n", 100)
        s = params.pop("s", n)
        return generators.gen_least_squares(p, n, s, seed=seed)
    if kind == "nmf":
        return generators.gen_nmf(seed=seed, **params).problem
    if kind == "logistic":
        return generators.gen_logistic(seed=seed, **params)
    if kind == "svm":
        return generators.gen_svm(seed=seed, **params)
    if kind == "quadratic":
        return demo_quadratic(**params)
    if kind == "rotated":
        eps = params.pop("epsilon", math.pi / 4)
        return RotatedL1Problem(eps, **params)
    raise ConfigurationError(f"unknown problem {kind!r}")


def reference_point(problem, tol: float = 1e-10):
    """Reference minimiser used for ``dist_to_ref``; ``None`` when no reference exists."""
    if isinstance(problem, RotatedL1Problem):
        return np.zeros(2)
    if isinstance(problem, QuadraticProblem):
        return problem.minimizer()
    try:
        return reference_solve(problem, tol).point
    except UnsupportedReferenceError:
        return None


def _distance(problem, ref) -> float:
    if isinstance(problem, NmfProblem):
        return problem.relative_error()
    if ref is None:
        return math.nan
    return float(np.linalg.norm(problem.get_point() - ref))


def _lasso_metrics_at(problem: LassoProblem, lam: float):
    """Objective and gradient-map norm of the target problem while a continuation stage is active."""
    cur = problem.lam
    problem.lam = lam
    try:
        return problem.objective(), problem.stationarity()
    finally:
        problem.lam = cur


def run_trial(problem, rule_state, updater, epochs: int, ref=None, stop_tol: float | None = None,
              check_descent: bool = False, schedule=None, stage_tol: float = 1e-6,
              metadata: dict | None = None) -> ConvergenceRecord:
    """Run ``epochs`` epochs of ``s`` coordinate updates and record metrics after each.

    ``schedule`` (LASSO only) is a continuation ladder; the reported objective
    and stationarity always refer to its last value.
    """
    s = problem.n_blocks
    rec = ConvergenceRecord(metadata=dict(metadata or {}))
    target = schedule[-1] if schedule else None
    stage = 0
    if schedule:
        problem.set_lambda(schedule[0])

    def metrics():
        if schedule:
            obj, st = _lasso_metrics_at(problem, target)
        else:
            obj, st = problem.objective(), problem.stationarity()
        return obj, st

    obj, st = metrics()
    rec.append(0, obj, st, _distance(problem, ref), problem.flops.total, 0)
    elapsed = 0
    is_nmf = isinstance(problem, NmfProblem)
    for epoch in range(1, epochs + 1):
        if schedule and stage < len(schedule) - 1 and problem.stationarity() <= stage_tol:
            stage += 1
            problem.set_lambda(schedule[stage])
        prev = problem.objective() if check_descent else None
        t0 = time.perf_counter_ns()
        for _ in range(s):
            i = next_index(rule_state, problem)
            updater(i)
            if check_descent:
                cur = problem.objective()
                if cur > prev + DESCENT_SLACK * max(1.0, abs(prev)):
                    raise DivergenceError(
                        f"objective increased from {prev!r} to {cur!r} at epoch {epoch} (block {i})")
                prev = cur
        if is_nmf:
            problem.normalize()
        elapsed += time.perf_counter_ns() - t0
        obj, st = metrics()
        if not math.isfinite(obj):
            raise DivergenceError(f"objective became {obj} at epoch {epoch}; rule={rule_state.label}")
        rec.append(epoch, obj, st, _distance(problem, ref), problem.flops.total, elapsed)
        if stop_tol is not None and st <= stop_tol and (not schedule or stage == len(schedule) - 1):
            break
    return rec


def run_experiment(config: ExperimentConfig, reference=None) -> list[ConvergenceRecord]:
    """Run ``config.trials`` trials on one instance and return their records.

    The instance is generated from ``config.seed``; trial ``t`` seeds its
    index rule with ``seed XOR t``. When ``output_path`` is set the per-epoch
    mean across trials is written there as CSV.
    """
    base = build_problem(config.problem, config.params, config.seed)
    ref = reference if reference is not None else reference_point(base, config.tolerance)
    schedule = None
    if config.continuation is not None:
        schedule = continuation_schedule(config.lambda0, config.continuation, base.lam)
    meta = {
        "problem": config.problem,
        "params": ";".join(f"{k}:{v}" for k, v in sorted(config.params.items())),
        "rule": config.rule,
        "scheme": config.scheme.scheme,
        "epochs": config.epochs,
        "seed": config.seed,
        "tolerance": config.tolerance,
        "continuation": config.continuation,
    }
    if ref is not None and not isinstance(base, NmfProblem):
        meta["reference_objective"] = repr(base.objective(ref))
    records = []
    for t in range(config.trials):
        problem = build_problem(config.problem, config.params, config.seed)
        lipschitz = None
        if config.rule.lower() == "importance":
            lipschitz = problem.block_lipschitz()
        rule = make_rule(config.rule, problem.n_blocks, seed=trial_seed(config.seed, t), lipschitz=lipschitz)
        updater = BlockUpdater(problem, config.scheme)
        rec = run_trial(problem, rule, updater, config.epochs, ref=ref,
                        stop_tol=config.tolerance if config.stop_at_tolerance else None,
                        check_descent=config.check_descent, schedule=schedule,
                        stage_tol=config.tolerance, metadata=dict(meta, trial=t))
        records.append(rec)
    if config.output_path:
        export_records(records, config.output_path)
    return records

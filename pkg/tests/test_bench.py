import time

import numpy as np
import pytest

from coordesc.bench import (ConvergenceRecord, ExperimentConfig, aggregate, brute_prox_oracle, export_records,
                            gen_lasso, gen_logistic, gen_nmf, gen_svm, load_instance, load_records,
                            reference_solve, run_experiment, save_instance)
from coordesc.errors import (ConfigurationError, FileError, InvalidCountError, InvalidRankError,
                             InvalidSupportError, OracleFailureError, UnsupportedReferenceError)
from coordesc.problems import LassoProblem, RotatedL1Problem
from coordesc.prox import shrink


# -- generators -------------------------------------------------------------------
def test_gen_lasso_shapes_and_determinism():
    a, b = gen_lasso(seed=7), gen_lasso(seed=7)
    assert a.problem.A.shape == (50, 100)
    assert np.count_nonzero(a.x_planted) == 10
    assert np.array_equal(a.problem.A, b.problem.A) and np.array_equal(a.problem.b, b.problem.b)
    exact = gen_lasso(sigma=0.0, seed=1)
    assert np.array_equal(exact.problem.b, exact.problem.A @ exact.x_planted)
    with pytest.raises(InvalidSupportError):
        gen_lasso(k=101)


def test_gen_nmf_planted_exact():
    inst = gen_nmf(seed=3)
    p = inst.problem
    assert p.M.shape == (200, 100) and p.X.shape == (200, 5) and p.Y.shape == (100, 5)
    assert np.linalg.norm(p.M - inst.X_planted @ inst.Y_planted.T) == 0.0
    assert inst.X_planted.min() > 0 and inst.X_planted.max() <= 1
    assert np.array_equal(gen_nmf(seed=3).problem.M, p.M)
    with pytest.raises(InvalidRankError):
        gen_nmf(r=0)
    with pytest.raises(InvalidRankError):
        gen_nmf(m=3, n=4, r=5)


def test_gen_logistic_balanced():
    p = gen_logistic(m=100, seed=2)
    assert p.X.shape == (100, 2)
    assert np.sum(p.y == 1) == np.sum(p.y == -1) == 50
    with pytest.raises(InvalidCountError):
        gen_logistic(m=7)


def test_gen_svm_q_properties_and_speed():
    t0 = time.perf_counter()
    p = gen_svm(seed=1)
    assert time.perf_counter() - t0 < 1.0
    assert np.abs(p.Q - p.Q.T).max() == 0.0
    np.testing.assert_allclose(np.diag(p.Q), np.sum(p.X ** 2, axis=1), rtol=1e-12)
    assert np.linalg.eigvalsh(p.Q).min() >= -1e-8 * np.linalg.norm(p.Q, 2)
    with pytest.raises(InvalidCountError):
        gen_svm(m=5)


# -- reference solver -----------------------------------------------------------
def test_reference_identity_lasso():
    ref = reference_solve(LassoProblem(np.eye(2), np.array([2.0, 0.1]), 1.0), 1e-10)
    np.testing.assert_allclose(ref.point, [1.0, 0.0], atol=1e-10)
    # closed form: shrink(b, 1/lambda)
    np.testing.assert_allclose(ref.point, [shrink(2.0, 1.0), shrink(0.1, 1.0)], atol=1e-10)


def test_reference_beats_planted_and_meets_tolerance():
    inst = gen_lasso(seed=0)
    ref = reference_solve(inst.problem, 1e-10)
    assert ref.converged and ref.stationarity <= 1e-10
    assert ref.objective <= inst.problem.objective(inst.x_planted)


def test_reference_extrapolation_toggle_agrees():
    # overdetermined, so the minimiser is unique and well conditioned
    inst = gen_lasso(m=60, n=10, k=5, seed=2, lam=1.0)
    tol = 1e-9
    a = reference_solve(inst.problem, tol, extrapolation=True)
    b = reference_solve(inst.problem, tol, extrapolation=False)
    assert a.converged and b.converged
    assert np.linalg.norm(a.point - b.point) <= 10 * tol


def test_reference_logistic_and_svm_converge():
    assert reference_solve(gen_logistic(seed=0), 1e-9).converged
    assert reference_solve(gen_svm(m=100, n=10, seed=0), 1e-9).converged


def test_reference_rejects_nonconvex():
    with pytest.raises(UnsupportedReferenceError):
        reference_solve(gen_nmf(m=10, n=8, r=2).problem)
    with pytest.raises(UnsupportedReferenceError):
        reference_solve(RotatedL1Problem(np.pi / 4))


# -- grid oracle ----------------------------------------------------------------
def test_oracle_examples():
    y = np.array([0.7, -1.3])
    np.testing.assert_allclose(brute_prox_oracle(lambda p: 0.0, y), y, atol=1e-6)
    assert brute_prox_oracle(lambda p: abs(p[0]), np.array([3.0]))[0] == pytest.approx(2.0, abs=1e-6)
    assert brute_prox_oracle(lambda p: abs(p[0]) + 0.5 * p[0] ** 2, np.array([3.0]))[0] == pytest.approx(1.0, abs=1e-6)


def test_oracle_failure():
    with pytest.raises(OracleFailureError):
        brute_prox_oracle(lambda p: np.inf, np.array([0.0]))


# -- runner and records ---------------------------------------------------------
def test_config_preconditions():
    with pytest.raises(ConfigurationError):
        ExperimentConfig(epochs=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(trials=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(tolerance=0.0)


def test_deterministic_rule_trials_identical():
    cfg = ExperimentConfig(problem="logistic", rule="cyclic", epochs=5, trials=2)
    a, b = run_experiment(cfg)
    strip = lambda rec: [r[:5] for r in rec.rows]
    assert strip(a) == strip(b)


def test_objective_nonincreasing_for_deterministic_rules():
    for kind, rule in [("svm", "cyclic"), ("logistic", "GS_q"), ("nmf", "GS_r")]:
        params = {"m": 60, "n": 5} if kind == "svm" else ({"m": 30, "n": 20, "r": 3} if kind == "nmf" else {})
        rec, = run_experiment(ExperimentConfig(problem=kind, params=params, rule=rule, epochs=20,
                                               check_descent=True))
        obj = rec.column("objective")
        assert np.all(np.diff(obj) <= 1e-12 * np.maximum(1, np.abs(obj[:-1])))
        d = rec.column("dist_to_ref")
        assert d[-1] <= d[0]


def test_export_contract(tmp_path):
    cfg = ExperimentConfig(problem="lasso", rule="random", epochs=4, trials=2, seed=3,
                           output_path=str(tmp_path / "a.csv"))
    recs = run_experiment(cfg)
    text = (tmp_path / "a.csv").read_text()
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert body[0] == "epoch,objective,grad_map_norm,dist_to_ref,flops,elapsed_ns"
    assert len(body) - 1 == 4 + 1
    assert "# reference_objective=" in text and "# trials=2" in text
    export_records(recs, tmp_path / "b.csv")
    export_records(recs, tmp_path / "c.csv")
    assert (tmp_path / "b.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()
    back = load_records(tmp_path / "b.csv")
    np.testing.assert_allclose(back.column("objective"), aggregate(recs).column("objective"), rtol=1e-15)


def test_mean_aggregation():
    r1, r2 = ConvergenceRecord(), ConvergenceRecord()
    for r, v in ((r1, 1.0), (r2, 3.0)):
        r.append(0, 10.0, 0.0, 0.0, 0, 0)
        r.append(1, v, 0.0, 0.0, 0, 0)
    assert aggregate([r1, r2]).rows[1][1] == 2.0


def test_record_invariants():
    r = ConvergenceRecord()
    r.append(0, 1.0, 0, 0, 0, 0)
    with pytest.raises(ConfigurationError):
        r.append(0, 1.0, 0, 0, 0, 0)
    with pytest.raises(ConfigurationError):
        r.append(1, float("nan"), 0, 0, 0, 0)


def test_export_to_bad_path_raises_file_error(tmp_path):
    r = ConvergenceRecord()
    r.append(0, 1.0, 0, 0, 0, 0)
    with pytest.raises(FileError):
        export_records(r, tmp_path)  # a directory cannot be written as a file


@pytest.mark.parametrize("make", [lambda: gen_lasso(m=5, n=7, k=2).problem, lambda: gen_nmf(m=6, n=5, r=2).problem,
                                  lambda: gen_logistic(m=10), lambda: gen_svm(m=10, n=3)])
def test_instance_roundtrip(tmp_path, make):
    p = make()
    save_instance(p, tmp_path / "i.csv")
    q = load_instance(tmp_path / "i.csv")
    assert type(q) is type(p)
    assert q.objective() == pytest.approx(p.objective(), rel=1e-15)

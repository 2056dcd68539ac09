"""Acceptance checks. Each test logs one PASS/FAIL line (shown in the terminal summary)."""
import math
import statistics
import time

import numpy as np

from coordesc.bench import gen_lasso, gen_least_squares, gen_logistic, gen_nmf, gen_svm, reference_solve
from coordesc.bench.proxcheck import run_prox_checks
from coordesc.numeric import cf_ratio
from coordesc.problems import (FiniteSumQuadratic, NmfProblem, RotatedL1Problem, alternating_minimization,
                               continuation_schedule, demo_quadratic)
from coordesc.schemes import (BlockUpdater, GradientTable, SchemeConfig, coordinate_argmin_step, run_stochastic,
                              saga_estimate, svrg_estimate)
from coordesc.selection import make_rule, next_index

DESCENT_SLACK = 1e-12
SEEDS = range(20)


def _run(problem, rule, epochs, *, stop=None, schedule=None, stage_tol=1e-6, check_descent=False,
         feasible=None, on_epoch=None):
    """Epoch loop shared by the experiment checks.

    ``stop(problem)`` is evaluated after every epoch and ends the run when it
    returns True; the return value is the number of epochs used (``inf`` when
    the budget ran out). With a continuation ``schedule`` the stopping test is
    only applied in the final stage. ``feasible`` runs after every update and
    ``on_epoch`` after every epoch.
    """
    s = problem.n_blocks
    upd = BlockUpdater(problem, SchemeConfig())
    stage = 0
    if schedule:
        problem.set_lambda(schedule[0])
    for epoch in range(1, epochs + 1):
        if schedule and stage < len(schedule) - 1 and problem.stationarity() <= stage_tol:
            stage += 1
            problem.set_lambda(schedule[stage])
        prev = problem.objective() if check_descent else None
        for _ in range(s):
            i = next_index(rule, problem)
            upd(i)
            if check_descent:
                cur = problem.objective()
                if cur > prev + DESCENT_SLACK * max(1.0, abs(prev)):
                    raise AssertionError(f"objective rose from {prev!r} to {cur!r} at epoch {epoch}")
                prev = cur
            if feasible is not None:
                feasible(problem)
        if hasattr(problem, "normalize"):
            problem.normalize()
        if on_epoch is not None:
            on_epoch(problem)
        final_stage = not schedule or stage == len(schedule) - 1
        if stop is not None and final_stage and stop(problem):
            return epoch
    return math.inf


# ------------------------------------------------------------------------------------------
def test_c1_summative_prox(acceptance):
    t0 = time.perf_counter()
    results = run_prox_checks(n_grid=500, n_inclusion=500, seed=0)
    elapsed = time.perf_counter() - t0
    worst_err = max(r.oracle_error for r in results)
    worst_inc = max(r.inclusion_residual for r in results)
    ok = worst_err <= 1e-5 and worst_inc <= 1e-8 and elapsed <= 30 and len(results) == 5
    acceptance(1, "summative prox equals composition", ok,
               f"pairs={[r.name for r in results]} oracle sup-err={worst_err:.1e} (<=1e-5) "
               f"inclusion={worst_inc:.1e} (<=1e-8) time={elapsed:.1f}s (<=30)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c2_lasso(acceptance):
    t0 = time.perf_counter()
    target = 1e3
    schedule = continuation_schedule(1.0, 10.0, target)
    # (a) deterministic rules reach grad-map <= 1e-6 within 500 epochs, never increasing the objective
    epochs_needed = {}
    for rule in ("cyclic", "shuffled", "GS_s", "GS_r", "GS_q"):
        p = gen_lasso(seed=0).problem
        epochs_needed[rule] = _run(p, make_rule(rule, p.n_blocks, seed=0), 500, schedule=schedule,
                                   stop=lambda q: q.stationarity() <= 1e-6, check_descent=True)
    conv_ok = all(e <= 500 for e in epochs_needed.values())
    # without continuation, plain cyclic from zero (reported, see the notes)
    p = gen_lasso(seed=0).problem
    plain = _run(p, make_rule("cyclic", p.n_blocks), 500, stop=lambda q: q.stationarity() <= 1e-6)

    # (b) median epochs to dist_to_ref <= 1e-4 over 20 instances: each GS rule vs uniform random
    med = {}
    per_rule = {r: [] for r in ("GS_s", "GS_r", "GS_q", "random")}
    for seed in SEEDS:
        ref = reference_solve(gen_lasso(seed=seed).problem, 1e-10).point
        for rule in per_rule:
            p = gen_lasso(seed=seed).problem
            per_rule[rule].append(_run(p, make_rule(rule, p.n_blocks, seed=seed), 500, schedule=schedule,
                                       stop=lambda q: np.linalg.norm(q.x - ref) <= 1e-4))
    for rule, vals in per_rule.items():
        med[rule] = statistics.median(vals)
    order_ok = all(med[g] < med["random"] for g in ("GS_s", "GS_r", "GS_q"))
    elapsed = time.perf_counter() - t0
    ok = conv_ok and order_ok and elapsed <= 20
    acceptance(2, "LASSO m=50 n=100 lambda=1e3", ok,
               f"epochs to grad-map<=1e-6 (continuation eta=10): {epochs_needed}, objective nonincreasing; "
               f"plain cyclic without continuation: {plain}; median epochs to dist<=1e-4: {med}; "
               f"time={elapsed:.1f}s (<=20)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c3_rotated_l1_stall(acceptance):
    t0 = time.perf_counter()
    p = RotatedL1Problem(math.pi / 4, point=(1.0, 1.0))
    stall_ok = True
    for _ in range(50):
        hist = alternating_minimization(p, 1)
        stall_ok &= tuple(p.get_point()) == (1.0, 1.0) and abs(hist[-1] - math.sqrt(2)) <= 1e-12
    stays = tuple(float(v) for v in p.get_point())
    q = RotatedL1Problem(math.pi / 10, point=(8.0, -6.0))
    hist2 = alternating_minimization(q, 200)
    sweeps = next((k for k, v in enumerate(hist2) if v <= 1e-6), math.inf)
    elapsed = time.perf_counter() - t0
    ok = stall_ok and sweeps <= 200 and elapsed <= 1.0
    acceptance(3, "rotated l1 stall", ok,
               f"eps=pi/4 stays at {stays} with objective sqrt2 over 50 sweeps; "
               f"eps=pi/10 reaches <=1e-6 at sweep {sweeps} (<=200); time={elapsed * 1e3:.1f}ms (<=1000)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c4_quadratic_demo(acceptance):
    t0 = time.perf_counter()
    p = demo_quadratic()
    x1 = float(coordinate_argmin_step(p, 0)[0])
    y1 = float(coordinate_argmin_step(p, 1)[0])
    sweeps = 1
    while np.linalg.norm(p.get_point()) > 1e-8 and sweeps < 60:
        coordinate_argmin_step(p, 0)
        coordinate_argmin_step(p, 1)
        sweeps += 1
    elapsed = time.perf_counter() - t0
    half_ok = abs(x1 - 18 / 7) <= 1e-12 and abs(y1 + 27 / 28) <= 1e-12
    ok = half_ok and np.linalg.norm(p.get_point()) <= 1e-8 and elapsed <= 0.1
    acceptance(4, "quadratic demo 7x^2+6xy+8y^2", ok,
               f"half-steps x={x1!r} y={y1!r}; |(x,y)|<=1e-8 after {sweeps} sweeps (<=60); "
               f"time={elapsed * 1e3:.1f}ms (<=100)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c5_variance_reduction(acceptance):
    t0 = time.perf_counter()
    finals = {"svrg": [], "saga": [], "sgd": []}
    for seed in range(5):
        prob = FiniteSumQuadratic.random(50, dim=1, seed=seed)
        finals["svrg"].append(run_stochastic(prob, SchemeConfig(scheme="stochastic_prox_linear", vr_mode="svrg",
                                                                update_period=1), 100, seed=seed)[-1])
        finals["saga"].append(run_stochastic(prob, SchemeConfig(scheme="stochastic_prox_linear", vr_mode="saga"),
                                             100, seed=seed)[-1])
        finals["sgd"].append(run_stochastic(prob, SchemeConfig(scheme="stochastic_prox_linear"), 100,
                                            seed=seed)[-1])
    rate_ok = max(finals["svrg"]) <= 1e-10 and max(finals["saga"]) <= 1e-10 and min(finals["sgd"]) > 1e-4

    # unbiasedness: averaging the estimators over every sample index recovers the full gradient
    prob = FiniteSumQuadratic.random(50, dim=1, seed=0)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        stale, x = rng.normal(size=1), rng.normal(size=1)
        full = prob.full_gradient(x)
        base = GradientTable.from_problem(prob, stale)
        saga = np.mean([saga_estimate(GradientTable(base.table.copy()), j, prob.sample_gradient(j, x))
                        for j in range(50)], axis=0)
        base.refresh_anchor(prob, stale)
        svrg = np.mean([svrg_estimate(base, j, prob.sample_gradient(j, x)) for j in range(50)], axis=0)
        worst = max(worst, float(np.abs(saga - full).max()), float(np.abs(svrg - full).max()))
    elapsed = time.perf_counter() - t0
    ok = rate_ok and worst <= 1e-12 and elapsed <= 10
    acceptance(5, "variance reduction m=50", ok,
               f"final gaps over 5 seeds: SVRG max={max(finals['svrg']):.1e} SAGA max={max(finals['saga']):.1e} "
               f"(<=1e-10), SGD min={min(finals['sgd']):.1e} (>1e-4); estimator bias={worst:.1e} (<=1e-12); "
               f"time={elapsed:.1f}s (<=10)")
    assert ok


# ------------------------------------------------------------------------------------------
def _cf(problem, s, full_step, rng):
    """Average coordinate-update flops over one epoch divided by one full update's flops."""
    problem.flops.reset()
    for i in rng.permutation(s):
        problem.update(int(i))
    coord = problem.flops.copy()
    problem.flops.reset()
    full_step()
    full = problem.flops.copy()
    return cf_ratio(coord, full) / s


def _drift(problem, s, rng):
    for i in rng.integers(0, s, size=1000):
        problem.update(int(i))
    return problem.cache_drift()


def test_c6_cf_ratios(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    out = {}
    ls = gen_least_squares(1000, 1000, 100, seed=0)
    alpha = 1.0 / ls.lipschitz_global
    out["least_squares"] = (_cf(ls, 100, lambda: ls.full_step(alpha), rng), 100, _drift(ls, 100, rng))
    la = gen_lasso(m=50, n=1000, k=10, seed=0).problem
    out["lasso"] = (_cf(la, 1000, la.full_step, rng), 1000, _drift(la, 1000, rng))
    lg = gen_logistic(m=500, n=100, seed=0)
    out["logistic"] = (_cf(lg, 100, lg.full_step, rng), 100, _drift(lg, 100, rng))
    sv = gen_svm(m=500, n=50, seed=0)
    out["svm"] = (_cf(sv, 500, sv.full_step, rng), 500, _drift(sv, 500, rng))
    elapsed = time.perf_counter() - t0
    ok = all(r <= 4.0 / s and d <= 1e-8 for r, s, d in out.values()) and elapsed <= 30
    detail = "; ".join(f"{k}: ratio={r:.2e} (<= 4/s={4.0 / s:.0e}) drift={d:.1e}" for k, (r, s, d) in out.items())
    acceptance(6, "coordinate-friendly flop ratios", ok, f"{detail}; time={elapsed:.1f}s (<=30)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c7_nmf(acceptance):
    t0 = time.perf_counter()
    finals = {}

    def nonneg(q):
        if q.X.min() < 0 or q.Y.min() < 0:
            raise AssertionError("negative factor entry")

    for rule in ("cyclic", "shuffled", "random", "GS_s", "GS_r", "GS_q"):
        p = gen_nmf(m=200, n=100, r=5, seed=0).problem
        trace = []
        _run(p, make_rule(rule, p.n_blocks, seed=0), 300, check_descent=True, feasible=nonneg,
             on_epoch=lambda q: trace.append(q.objective()))
        obj_ok = all(b <= a + DESCENT_SLACK * max(1.0, a) for a, b in zip(trace, trace[1:]))
        finals[rule] = (p.relative_error(), obj_ok)
    elapsed = time.perf_counter() - t0
    ok = all(e <= 5e-2 and o for e, o in finals.values()) and elapsed <= 60
    acceptance(7, "NMF 200x100 rank 5", ok,
               "relative error after 300 epochs: "
               + ", ".join(f"{k}={e:.1e}" for k, (e, _) in finals.items())
               + f" (<=5e-2); nonnegative and nonincreasing throughout; time={elapsed:.1f}s (<=60)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c8_logistic_and_svm(acceptance):
    t0 = time.perf_counter()
    rules = ("cyclic", "shuffled", "random", "GS_s", "GS_r", "GS_q")

    def box_ok(q):
        if q.alpha.min() < 0 or q.alpha.max() > q.C:
            raise AssertionError("SVM iterate left the box")

    logi, svm = {}, {}
    for rule in rules:
        p = gen_logistic(seed=0)
        logi[rule] = _run(p, make_rule(rule, p.n_blocks, seed=0), 1000, stop=lambda q: q.stationarity() <= 1e-6)
        p = gen_svm(seed=0)
        svm[rule] = _run(p, make_rule(rule, p.n_blocks, seed=0), 1000, stop=lambda q: q.stationarity() <= 1e-6,
                         feasible=box_ok)
    conv_ok = all(e <= 1000 for e in logi.values()) and all(e <= 1000 for e in svm.values())

    # recorded orderings, medians over 20 seeds
    lc, lr, sq, sr = [], [], [], []
    for seed in SEEDS:
        for rule, bucket in (("cyclic", lc), ("random", lr)):
            p = gen_logistic(seed=seed)
            bucket.append(_run(p, make_rule(rule, p.n_blocks, seed=seed), 1000,
                               stop=lambda q: q.stationarity() <= 1e-6))
        for rule, bucket in (("GS_q", sq), ("random", sr)):
            p = gen_svm(seed=seed)
            bucket.append(_run(p, make_rule(rule, p.n_blocks, seed=seed), 1000,
                               stop=lambda q: q.stationarity() <= 1e-6))
    lmed = (statistics.median(lc), statistics.median(lr))
    smed = (statistics.median(sq), statistics.median(sr))
    elapsed = time.perf_counter() - t0
    ok = conv_ok and elapsed <= 60
    acceptance(8, "logistic m=100 and SVM m=500 n=50", ok,
               f"epochs to <=1e-6: logistic {logi}, SVM {svm} (<=1000), SVM box kept; "
               f"recorded: logistic cyclic<=random median {lmed[0]} vs {lmed[1]} "
               f"[{'holds' if lmed[0] <= lmed[1] else 'does not hold'}], "
               f"SVM GS_q<=random median {smed[0]} vs {smed[1]} "
               f"[{'holds' if smed[0] <= smed[1] else 'does not hold'}]; time={elapsed:.1f}s (<=60)")
    assert ok


# ------------------------------------------------------------------------------------------
def test_c9_gradient_checks(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst_log = worst_nmf = 0.0
    h = 1e-5
    for k in range(100):
        p = gen_logistic(seed=k, C=float(rng.uniform(0.5, 5.0)))
        w = rng.normal(size=p.n)
        p.set_point(w)
        j = int(rng.integers(p.n))
        fp, fpp = p.derivatives(j)
        e = np.zeros(p.n)
        e[j] = h
        f = p.smooth_value
        fd1 = (f(w + e) - f(w - e)) / (2 * h)
        # the second derivative is checked through central differences of the first
        gp = lambda v: p.gradient(v)[j]
        fd2 = (gp(w + e) - gp(w - e)) / (2 * h)
        worst_log = max(worst_log, abs(fp - fd1) / max(1.0, abs(fd1)), abs(fpp - fd2) / max(1.0, abs(fd2)))
    for k in range(100):
        m, n, r = (int(v) for v in rng.integers(2, 9, size=3))
        M = rng.random((m, n))
        # keep entries away from the nonnegativity boundary so +-h stays feasible
        X, Y = 0.01 + rng.random((m, r)), 0.01 + rng.random((n, r))
        p = NmfProblem(M, X, Y)
        side = "X" if k % 2 == 0 else "Y"
        j = int(rng.integers(r))
        g = p.partial_gradient(side, j)
        own = X if side == "X" else Y
        fd = np.empty(own.shape[0])
        for t in range(own.shape[0]):
            plus, minus = own.copy(), own.copy()
            plus[t, j] += h
            minus[t, j] -= h
            pt = (plus, Y) if side == "X" else (X, plus)
            mt = (minus, Y) if side == "X" else (X, minus)
            fd[t] = (p.objective(pt) - p.objective(mt)) / (2 * h)
        worst_nmf = max(worst_nmf, float(np.abs(g - fd).max() / max(1.0, np.abs(fd).max())))
    elapsed = time.perf_counter() - t0
    ok = worst_log <= 1e-5 and worst_nmf <= 1e-5 and elapsed <= 5
    acceptance(9, "finite-difference gradient checks", ok,
               f"logistic f'/f'' worst rel err={worst_log:.1e}, NMF partial gradient worst rel err={worst_nmf:.1e} "
               f"(<=1e-5) on 100 points each; time={elapsed:.2f}s (<=5)")
    assert ok

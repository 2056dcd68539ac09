"""High-accuracy reference solutions from accelerated full proximal gradient."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError, UnsupportedReferenceError
from ..numeric import spectral_norm_sq
from ..problems import (LassoProblem, LeastSquaresProblem, LogisticProblem, NmfProblem, QuadraticProblem,
                        RotatedL1Problem, SvmDualProblem)
from ..prox import shrink


@dataclass
class ReferenceSolution:
    point: np.ndarray
    objective: float
    stationarity: float
    iterations: int
    converged: bool


def _accelerated(grad, prox, stat, L, x0, tol, max_iter, extrapolation):
    """FISTA with gradient-based adaptive restart, stopped on ``stat(x) <= tol``."""
    x = np.array(x0, dtype=float)
    y = x.copy()
    t = 1.0
    step = 1.0 / L
    for it in range(1, max_iter + 1):
        x_new = prox(y - step * grad(y), step)
        if not np.all(np.isfinite(x_new)):
            raise DivergenceError("reference solver produced a non-finite iterate")
        if extrapolation:
            if (y - x_new) @ (x_new - x) > 0:
                # momentum points uphill: restart
                t = 1.0
                y = x_new.copy()
            else:
                t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
                y = x_new + ((t - 1.0) / t_new) * (x_new - x)
                t = t_new
        else:
            y = x_new
        x = x_new
        if it % 10 == 0 or it == max_iter:
            s = stat(x)
            if s <= tol:
                return x, s, it, True
    return x, stat(x), max_iter, False


def reference_solve(problem, tol: float = 1e-10, extrapolation: bool = True,
                    max_iter: int = 500_000) -> ReferenceSolution:
    """Solve a convex problem to stationarity ``tol`` with full (non-coordinate) steps.

    The stationarity measure is the problem's own: the gradient map with the
    global constant for LASSO and logistic regression, the unit-step projected
    gradient for the SVM dual and the gradient norm for smooth quadratics.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if isinstance(problem, (NmfProblem, RotatedL1Problem)):
        raise UnsupportedReferenceError(
            f"{type(problem).__name__} is not handled by the convex reference solver")

    if isinstance(problem, LassoProblem):
        A, b, lam = problem.A, problem.b, problem.lam
        L = problem.lipschitz_global

        def grad(x):
            return lam * (A.T @ (A @ x - b))

        def prox(z, t):
            return shrink(z, t)

        def stat(x):
            return float(np.linalg.norm(x - shrink(x - grad(x) / L, 1.0 / L)))

        def obj(x):
            return problem.objective(x)

        x0 = np.zeros(problem.n)
    elif isinstance(problem, LogisticProblem):
        Z, C = problem.Z, problem.C
        L = problem.lipschitz_global

        def grad(x):
            tt = -(Z @ x)
            return -C * (Z.T @ np.exp(tt - np.logaddexp(0.0, tt)))

        def prox(z, t):
            return shrink(z, t)

        def stat(x):
            return float(np.linalg.norm(x - shrink(x - grad(x) / L, 1.0 / L)))

        def obj(x):
            return problem.objective(x)

        x0 = np.zeros(problem.n)
    elif isinstance(problem, SvmDualProblem):
        Q, C = problem.Q, problem.C
        L = float(np.linalg.eigvalsh(Q)[-1])

        def grad(a):
            return Q @ a - 1.0

        def prox(z, t):
            return np.clip(z, 0.0, C)

        def stat(a):
            return float(np.linalg.norm(a - np.clip(a - grad(a), 0.0, C)))

        def obj(a):
            return problem.objective(a)

        x0 = np.zeros(problem.m)
    elif isinstance(problem, (LeastSquaresProblem, QuadraticProblem)):
        if isinstance(problem, LeastSquaresProblem):
            H, c = problem.gram, problem.Atb
            L = spectral_norm_sq(problem.A)
        else:
            H, c = problem.H, problem.c
            L = float(np.linalg.eigvalsh(H)[-1])

        def grad(x):
            return H @ x - c

        def prox(z, t):
            return z

        def stat(x):
            return float(np.linalg.norm(grad(x)))

        def obj(x):
            return problem.objective(x)

        x0 = np.zeros(H.shape[0])
    else:
        raise UnsupportedReferenceError(f"no reference solver for {type(problem).__name__}")

    if not L > 0:
        raise UnsupportedReferenceError("smooth part has zero curvature")
    x, s, iters, ok = _accelerated(grad, prox, stat, L, x0, tol, max_iter, extrapolation)
    return ReferenceSolution(x, obj(x), s, iters, ok)

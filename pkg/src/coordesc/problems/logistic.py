"""Sparse logistic regression ``||w||_1 + C sum log(1 + exp(-y_i w^T x_i))``."""
from __future__ import annotations

import numpy as np

from ..errors import CacheError, ShapeError, UnsupportedSchemeError
from ..numeric import FlopCounter, spectral_norm_sq
from ..prox import l1, shrink
from .base import GS_RULES, CoordinateProblem, l1_gs_scores

ARMIJO_SIGMA = 0.01
ARMIJO_BETA = 0.5
ARMIJO_MAX_TRIALS = 30
CURVATURE_FLOOR = 1e-12


class LogisticProblem(CoordinateProblem):
    """Coordinate Newton solver state for sparse logistic regression.

    ``self.e`` caches ``exp(-y_i w^T x_i)`` for every sample and ``self.loss``
    caches ``sum log1p(e)``; both are updated multiplicatively after each
    coordinate step so that one step costs ``O(m)``.
    """

    def __init__(self, X, y, C: float = 1.0, w0=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ShapeError(f"X {X.shape} and y {y.shape} are incompatible")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if not C > 0:
            raise ValueError("C must be positive")
        self.X, self.y, self.C = X, y, float(C)
        self.m, self.n = X.shape
        self.n_blocks = self.n
        # column-major copies so that a coordinate touches contiguous memory
        self.Z = np.asfortranarray(y[:, None] * X)
        self.X2 = np.asfortranarray(X * X)
        self.w = np.zeros(self.n) if w0 is None else np.array(w0, dtype=float)
        self.flops = FlopCounter()
        self._L = None
        self.init_cache()

    # -- caches ------------------------------------------------------------
    def init_cache(self) -> None:
        self.e = np.exp(-(self.Z @ self.w))
        self.loss = float(np.sum(np.log1p(self.e)))

    def cache_drift(self) -> float:
        fresh = np.exp(-(self.Z @ self.w))
        return float(np.max(np.abs(self.e - fresh) / fresh))

    @property
    def lipschitz_global(self) -> float:
        """``(C/4) ||X||_2^2``, the curvature bound of the logistic loss."""
        if self._L is None:
            self._L = 0.25 * self.C * spectral_norm_sq(self.X)
        return self._L

    def block_lipschitz(self) -> np.ndarray:
        return 0.25 * self.C * np.sum(self.X2, axis=0)

    # -- objective and derivatives -----------------------------------------
    def smooth_value(self, point=None) -> float:
        if point is None:
            return self.C * self.loss
        return self.C * float(np.sum(np.logaddexp(0.0, -(self.Z @ point))))

    def objective(self, point=None) -> float:
        if point is None:
            return float(np.abs(self.w).sum()) + self.C * self.loss
        w = np.asarray(point, dtype=float)
        if w.shape != (self.n,):
            raise ShapeError(f"point has shape {w.shape}, expected ({self.n},)")
        return float(np.abs(w).sum()) + self.smooth_value(w)

    def _q(self) -> np.ndarray:
        # q_i = e_i / (1 + e_i) = 1 - sigmoid(y_i w^T x_i)
        return self.e / (1.0 + self.e)

    def derivatives(self, j: int, q=None) -> tuple[float, float]:
        """First and second partial derivatives of the smooth part along ``j``."""
        if q is None:
            q = self._q()
            self.flops.elementwise(self.m, 2)
        fp = -self.C * float(self.Z[:, j] @ q)
        fpp = self.C * float(self.X2[:, j] @ (q * (1.0 - q)))
        self.flops.dot(self.m)
        self.flops.elementwise(self.m, 2)
        self.flops.dot(self.m)
        self.flops.scalar(2)
        return fp, fpp

    def gradient(self, point=None) -> np.ndarray:
        if point is None:
            q = self._q()
        else:
            t = -(self.Z @ np.asarray(point, dtype=float))
            q = np.exp(t - np.logaddexp(0.0, t))
        return -self.C * (self.Z.T @ q)

    full_gradient = gradient

    @property
    def regularizer(self):
        return l1(1.0)

    # -- block access ------------------------------------------------------
    def get_point(self):
        return self.w.copy()

    def set_point(self, point):
        self.w = np.array(point, dtype=float)
        self.init_cache()

    def get_block(self, i):
        return self.w[i:i + 1].copy()

    def set_block(self, i, value):
        v = float(np.asarray(value).reshape(-1)[0])
        delta = v - self.w[i]
        if delta != 0.0:
            self.w[i] = v
            self.e *= np.exp(-delta * self.Z[:, i])
            self.loss = float(np.sum(np.log1p(self.e)))
        self.flops.elementwise(self.m, 3)
        self.flops.transcendental(2 * self.m)
        self.flops.add("vecvec", self.m - 1)

    def block_gradient(self, i, block=None):
        if block is None:
            return np.array([self.derivatives(i)[0]])
        old = self.get_block(i)
        self.set_block(i, block)
        try:
            return np.array([self.derivatives(i)[0]])
        finally:
            self.set_block(i, old)

    def block_regularizer(self, i):
        return l1(1.0)

    def update(self, i):
        logistic_newton_step(self, i)

    # -- greedy scores and stationarity ------------------------------------
    def scores(self, rule):
        if rule in GS_RULES:
            return logistic_gs_scores(self, rule)
        raise UnsupportedSchemeError(f"logistic problem has no {rule} scores")

    def gradient_map(self, L: float | None = None) -> np.ndarray:
        L = self.lipschitz_global if L is None else L
        g = self.gradient()
        return self.w - shrink(self.w - g / L, 1.0 / L)

    def stationarity(self) -> float:
        return float(np.linalg.norm(self.gradient_map()))

    def full_step(self) -> None:
        """One full prox-gradient step with step ``1/L``; flop-counted."""
        m, n = self.m, self.n
        L = self.lipschitz_global
        t = self.Z @ self.w
        self.flops.matvec(m, n)
        e = np.exp(-t)
        q = e / (1.0 + e)
        self.flops.transcendental(m)
        self.flops.elementwise(m, 3)
        g = -self.C * (self.Z.T @ q)
        self.flops.matvec(n, m)
        self.flops.elementwise(n)
        z = self.w - g / L
        self.flops.elementwise(n, 2)
        self.w = shrink(z, 1.0 / L)
        self.flops.prox(n)
        self.init_cache()


def newton_direction(fp: float, fpp: float, wj: float) -> float:
    """Minimiser of ``|w_j + d| - |w_j| + fp d + fpp/2 d^2`` over ``d``."""
    fpp = max(fpp, CURVATURE_FLOOR)
    if fp + 1.0 <= fpp * wj:
        return -(fp + 1.0) / fpp
    if fp - 1.0 >= fpp * wj:
        return -(fp - 1.0) / fpp
    return -wj


def logistic_newton_step(p: LogisticProblem, j: int) -> float:
    """One coordinate Newton step with Armijo backtracking; returns the accepted step length.

    A zero direction returns 0 without touching the cache.
    """
    if p.e is None:
        raise CacheError("exponential cache not initialised")
    m = p.m
    fp, fpp = p.derivatives(j)
    wj = p.w[j]
    d = newton_direction(fp, fpp, wj)
    p.flops.scalar(6)
    if d == 0.0:
        return 0.0
    base = abs(wj)
    delta_model = fp * d + abs(wj + d) - base
    zj = p.Z[:, j]
    alpha = 1.0
    for _ in range(ARMIJO_MAX_TRIALS):
        e_new = p.e * np.exp(-alpha * d * zj)
        loss_new = float(np.sum(np.log1p(e_new)))
        p.flops.elementwise(m, 2)
        p.flops.transcendental(2 * m)
        p.flops.add("vecvec", m - 1)
        gain = abs(wj + alpha * d) - base + p.C * (loss_new - p.loss)
        p.flops.scalar(8)
        if gain <= ARMIJO_SIGMA * alpha * delta_model:
            p.w[j] = wj + alpha * d
            p.e = e_new
            p.loss = loss_new
            return alpha
        alpha *= ARMIJO_BETA
    # no acceptable step: leave the coordinate unchanged (objective cannot increase)
    return 0.0


def logistic_gs_scores(p: LogisticProblem, rule: str) -> np.ndarray:
    """Greedy scores from the cached exponentials; GS-q is selected by argmin.

    GS-r and GS-q use the global constant ``(C/4) ||X||^2``.
    """
    if p.e is None:
        raise CacheError("exponential cache not initialised")
    q = p._q()
    g = -p.C * (p.Z.T @ q)
    p.flops.elementwise(p.m, 2)
    p.flops.matvec(p.n, p.m)
    p.flops.elementwise(p.n)
    L = p.lipschitz_global if rule != "GS_s" else 1.0
    return l1_gs_scores(p.w, g, L, rule)


def logistic_objective_direct(X, y, C, w) -> float:
    """Objective evaluated from scratch with a numerically stable softplus."""
    X = np.asarray(X, dtype=float)
    t = -(np.asarray(y, dtype=float) * (X @ np.asarray(w, dtype=float)))
    return float(np.abs(w).sum()) + C * float(np.sum(np.logaddexp(0.0, t)))


__all__ = ["LogisticProblem", "newton_direction", "logistic_newton_step", "logistic_gs_scores",
           "logistic_objective_direct", "ARMIJO_SIGMA", "ARMIJO_BETA", "ARMIJO_MAX_TRIALS"]

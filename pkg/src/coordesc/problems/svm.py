"""Dual of the bias-free linear SVM: ``1/2 a^T Q a - 1^T a`` over the box ``[0, C]^m``."""
from __future__ import annotations

import numpy as np

from ..errors import CacheError, DegenerateDiagonalError, ShapeError, UnsupportedSchemeError
from ..numeric import FlopCounter
from ..prox import box
from .base import GS_RULES, CoordinateProblem, rel_drift

DIAGONAL_FLOOR = 1e-12


class SvmDualProblem(CoordinateProblem):
    """Projected coordinate descent on the SVM dual with a maintained ``Q alpha``."""

    def __init__(self, X, y, C: float = 1.0, alpha0=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ShapeError(f"X {X.shape} and y {y.shape} are incompatible")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if not C > 0:
            raise ValueError("C must be positive")
        self.X, self.y, self.C = X, y, float(C)
        Z = y[:, None] * X
        self.Q = Z @ Z.T
        self.diag = np.diag(self.Q).copy()
        self.m = self.Q.shape[0]
        self.n_blocks = self.m
        self.alpha = np.zeros(self.m) if alpha0 is None else np.clip(np.array(alpha0, dtype=float), 0.0, self.C)
        self.flops = FlopCounter()
        self.init_cache()

    @classmethod
    def from_q(cls, Q, C: float = 1.0, alpha0=None):
        """Build directly from a symmetric PSD ``Q`` (used for hand-made examples)."""
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ShapeError("Q must be square")
        obj = cls.__new__(cls)
        obj.X = obj.y = None
        obj.C = float(C)
        obj.Q = Q
        obj.diag = np.diag(Q).copy()
        obj.m = Q.shape[0]
        obj.n_blocks = obj.m
        obj.alpha = np.zeros(obj.m) if alpha0 is None else np.clip(np.array(alpha0, dtype=float), 0.0, obj.C)
        obj.flops = FlopCounter()
        obj.init_cache()
        return obj

    # -- caches ------------------------------------------------------------
    def init_cache(self) -> None:
        self.Qa = self.Q @ self.alpha

    def cache_drift(self) -> float:
        return rel_drift(self.Qa, self.Q @ self.alpha)

    def block_lipschitz(self) -> np.ndarray:
        return self.diag.copy()

    # -- objective ---------------------------------------------------------
    def objective(self, point=None) -> float:
        if point is None:
            return float(0.5 * self.alpha @ self.Qa - self.alpha.sum())
        a = np.asarray(point, dtype=float)
        if a.shape != (self.m,):
            raise ShapeError(f"point has shape {a.shape}, expected ({self.m},)")
        if np.any(a < 0) or np.any(a > self.C):
            return float("inf")
        return float(0.5 * a @ self.Q @ a - a.sum())

    def gradient(self, point=None) -> np.ndarray:
        if point is None:
            return self.Qa - 1.0
        return self.Q @ np.asarray(point, dtype=float) - 1.0

    def primal_w(self) -> np.ndarray:
        """``w = sum_i alpha_i y_i x_i`` (only when built from samples)."""
        if self.X is None:
            raise ShapeError("problem was built from Q alone")
        return self.X.T @ (self.alpha * self.y)

    # -- block access ------------------------------------------------------
    def get_point(self):
        return self.alpha.copy()

    def set_point(self, point):
        self.alpha = np.array(point, dtype=float)
        self.init_cache()

    def get_block(self, i):
        return self.alpha[i:i + 1].copy()

    def set_block(self, i, value):
        v = float(np.asarray(value).reshape(-1)[0])
        delta = v - self.alpha[i]
        if delta != 0.0:
            self.alpha[i] = v
            self.Qa += delta * self.Q[i]
        self.flops.scalar(1)
        self.flops.axpy(self.m)

    def block_gradient(self, i, block=None):
        g = self.Qa[i] - 1.0
        if block is not None:
            g += self.diag[i] * (float(np.asarray(block).reshape(-1)[0]) - self.alpha[i])
        self.flops.scalar(1)
        return np.array([g])

    def block_regularizer(self, i):
        return box(0.0, self.C)

    def update(self, i):
        svm_coordinate_step(self, i)

    # -- greedy scores and stationarity ------------------------------------
    def scores(self, rule):
        if rule in GS_RULES:
            return svm_gs_scores(self, rule)
        raise UnsupportedSchemeError(f"SVM dual has no {rule} scores")

    def projected_gradient(self) -> np.ndarray:
        """``alpha - clip(alpha - grad, 0, C)``, zero exactly at dual optima."""
        return self.alpha - np.clip(self.alpha - (self.Qa - 1.0), 0.0, self.C)

    def stationarity(self) -> float:
        return float(np.linalg.norm(self.projected_gradient()))

    def full_step(self) -> None:
        """One full projected gradient step with step ``1/max_i Q_ii``; flop-counted."""
        m = self.m
        g = self.Q @ self.alpha - 1.0
        self.flops.matvec(m, m)
        self.flops.elementwise(m)
        step = 1.0 / float(self.diag.max())
        self.alpha = np.clip(self.alpha - step * g, 0.0, self.C)
        self.flops.axpy(m)
        self.flops.prox(m)
        self.init_cache()


def svm_coordinate_step(p: SvmDualProblem, i: int) -> float:
    """Clipped coordinate step ``alpha_i - ((Q alpha)_i - 1)/Q_ii``; returns the new value."""
    if p.Qa is None:
        raise CacheError("Q alpha cache not initialised")
    qii = p.diag[i]
    if qii <= DIAGONAL_FLOOR:
        raise DegenerateDiagonalError(f"Q[{i},{i}] = {qii:.3e}; sample {i} has no features")
    old = p.alpha[i]
    new = min(max(old - (p.Qa[i] - 1.0) / qii, 0.0), p.C)
    p.flops.scalar(3)
    p.flops.prox(1)
    delta = new - old
    if delta != 0.0:
        p.alpha[i] = new
        p.Qa += delta * p.Q[i]  # Q is symmetric; the row is contiguous
    p.flops.scalar(1)
    p.flops.axpy(p.m)
    return new


def svm_gs_scores(p: SvmDualProblem, rule: str) -> np.ndarray:
    """Greedy scores with per-coordinate ``L_j = Q_jj``; GS-q is selected by argmin."""
    if p.Qa is None:
        raise CacheError("Q alpha cache not initialised")
    g = p.Qa - 1.0
    a = p.alpha
    p.flops.elementwise(p.m)
    if rule == "GS_s":
        at_lo = a == 0.0
        at_hi = a == p.C
        s = np.where(at_lo, np.minimum(g, 0.0), np.where(at_hi, np.maximum(g, 0.0), g))
        return np.abs(s)
    if np.any(p.diag <= DIAGONAL_FLOOR):
        raise DegenerateDiagonalError("Q has a (numerically) zero diagonal entry")
    d = np.clip(a - g / p.diag, 0.0, p.C) - a
    p.flops.elementwise(p.m, 4)
    if rule == "GS_r":
        return np.abs(d)
    if rule == "GS_q":
        return g * d + 0.5 * p.diag * d * d
    raise UnsupportedSchemeError(f"SVM dual has no {rule} scores")

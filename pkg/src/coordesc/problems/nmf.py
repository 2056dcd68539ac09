"""Nonnegative matrix factorisation by projected column updates."""
from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError, UnsupportedSchemeError
from ..numeric import FlopCounter
from ..prox import nonneg
from .base import GS_RULES, CoordinateProblem

SAFEGUARD_EPS = 1e-12


class NmfProblem(CoordinateProblem):
    """``1/2 ||M - X Y^T||_F^2`` subject to ``X, Y >= 0``.

    Blocks are the ``2r`` factor columns: indices ``0..r-1`` address columns
    of ``X`` and ``r..2r-1`` columns of ``Y``. ``safeguard_events`` counts
    steps whose opposite column was (nearly) zero.
    """

    def __init__(self, M, X, Y, eps: float = SAFEGUARD_EPS):
        M = np.asarray(M, dtype=float)
        X = np.array(X, dtype=float)
        Y = np.array(Y, dtype=float)
        if M.ndim != 2 or X.shape[0] != M.shape[0] or Y.shape[0] != M.shape[1] or X.shape[1] != Y.shape[1]:
            raise ShapeError(f"M {M.shape}, X {X.shape}, Y {Y.shape} are incompatible")
        if np.any(M < 0):
            raise ValueError("M must be entrywise nonnegative")
        self.M = M
        self.X, self.Y = X, Y
        self.m, self.n = M.shape
        self.r = X.shape[1]
        self.n_blocks = 2 * self.r
        self.eps = eps
        self.norm_M = float(np.linalg.norm(M))
        self.safeguard_events = 0
        self.flops = FlopCounter()
        self.greedy_side = "X"

    def _side(self, i):
        return ("X", i) if i < self.r else ("Y", i - self.r)

    def objective(self, point=None) -> float:
        X, Y = (self.X, self.Y) if point is None else point
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.shape != self.X.shape or Y.shape != self.Y.shape:
            raise ShapeError("factor shapes do not match the problem")
        if np.any(X < 0) or np.any(Y < 0):
            return math.inf
        R = self.M - X @ Y.T
        return 0.5 * float(np.sum(R * R))

    def relative_error(self) -> float:
        return float(np.linalg.norm(self.M - self.X @ self.Y.T)) / self.norm_M

    def get_point(self):
        return self.X.copy(), self.Y.copy()

    def set_point(self, point):
        self.X, self.Y = (np.array(a, dtype=float) for a in point)

    def get_block(self, i):
        side, j = self._side(i)
        return (self.X if side == "X" else self.Y)[:, j].copy()

    def set_block(self, i, value):
        side, j = self._side(i)
        (self.X if side == "X" else self.Y)[:, j] = value

    def partial_gradient(self, side: str, j: int) -> np.ndarray:
        """``X (Y^T Y_j) - M Y_j`` for an X column, symmetrically for Y."""
        if side == "X":
            own, opp, data = self.X, self.Y, self.M
        else:
            own, opp, data = self.Y, self.X, self.M.T
        v = opp[:, j]
        p, q = data.shape
        self.flops.matvec(self.r, opp.shape[0])
        self.flops.matvec(own.shape[0], self.r)
        self.flops.matvec(p, q)
        self.flops.elementwise(p)
        return own @ (opp.T @ v) - data @ v

    def step_size(self, side: str, j: int) -> float:
        opp = self.Y if side == "X" else self.X
        nrm = float(opp[:, j] @ opp[:, j])
        self.flops.dot(opp.shape[0])
        if nrm < self.eps:
            self.safeguard_events += 1
            return 1.0 / self.eps
        return 1.0 / nrm

    def block_gradient(self, i, block=None):
        side, j = self._side(i)
        if block is None:
            return self.partial_gradient(side, j)
        old = self.get_block(i)
        self.set_block(i, block)
        try:
            return self.partial_gradient(side, j)
        finally:
            self.set_block(i, old)

    def block_regularizer(self, i):
        return nonneg()

    def block_lipschitz(self):
        return np.concatenate([np.sum(self.Y ** 2, axis=0), np.sum(self.X ** 2, axis=0)])

    def update(self, i):
        side, j = self._side(i)
        nmf_column_step(self, side, j)

    def scores(self, rule):
        """Scores over all ``2r`` blocks with the inactive factor masked out.

        Greedy selection alternates between the factors: one call picks an X
        column, the next a Y column. The masked side gets the worst possible
        score for the rule's sense.
        """
        if rule not in GS_RULES:
            raise UnsupportedSchemeError(f"NMF has no {rule} scores")
        side = self.greedy_side
        self.greedy_side = "Y" if side == "X" else "X"
        worst = np.inf if rule == "GS_q" else -np.inf
        out = np.full(self.n_blocks, worst)
        sl = slice(0, self.r) if side == "X" else slice(self.r, 2 * self.r)
        out[sl] = nmf_gs_scores(self, side, rule)
        return out

    def projected_gradient(self):
        gx = (self.X @ self.Y.T - self.M) @ self.Y
        gy = (self.X @ self.Y.T - self.M).T @ self.X
        gx = np.where(self.X == 0, np.minimum(gx, 0.0), gx)
        gy = np.where(self.Y == 0, np.minimum(gy, 0.0), gy)
        return gx, gy

    def stationarity(self) -> float:
        gx, gy = self.projected_gradient()
        return float(math.hypot(np.linalg.norm(gx), np.linalg.norm(gy)))

    def normalize(self) -> list[int]:
        return nmf_normalize(self)

    def full_step(self) -> None:
        """Full projected gradient step on both factors; flop-counted."""
        m, n, r = self.m, self.n, self.r
        R = self.X @ self.Y.T - self.M
        self.flops.add("matvec", m * n * (2 * r - 1) + m * n)
        gx = R @ self.Y
        gy = R.T @ self.X
        self.flops.add("matvec", m * r * (2 * n - 1) + n * r * (2 * m - 1))
        ex = 1.0 / max(float(np.sum(self.Y ** 2, axis=0).max()), self.eps)
        ey = 1.0 / max(float(np.sum(self.X ** 2, axis=0).max()), self.eps)
        self.X = np.maximum(self.X - ex * gx, 0.0)
        self.Y = np.maximum(self.Y - ey * gy, 0.0)
        self.flops.elementwise(m * r + n * r, 2)
        self.flops.prox(m * r + n * r)


def nmf_column_step(p: NmfProblem, side: str, j: int) -> np.ndarray:
    """Projected gradient step on one factor column with step ``1/||opposite column||^2``."""
    own = p.X if side == "X" else p.Y
    eta = p.step_size(side, j)
    g = p.partial_gradient(side, j)
    new = np.maximum(own[:, j] - eta * g, 0.0)
    p.flops.axpy(own.shape[0])
    p.flops.prox(own.shape[0])
    own[:, j] = new
    return new


def nmf_normalize(p: NmfProblem) -> list[int]:
    """Rescale X columns to unit norm and Y columns inversely; returns zero columns left alone."""
    norms = np.linalg.norm(p.X, axis=0)
    zero_cols = [int(j) for j in np.flatnonzero(norms == 0.0)]
    ok = norms > 0
    p.X[:, ok] /= norms[ok]
    p.Y[:, ok] *= norms[ok]
    return zero_cols


def nmf_gs_scores(p: NmfProblem, side: str, rule: str) -> np.ndarray:
    """Column scores for one factor. GS-q is selected by argmin.

    GS-q uses the column model ``g^T d + 1/(2 eta) ||d||^2`` with the
    column's own step ``eta``.
    """
    own = p.X if side == "X" else p.Y
    out = np.empty(p.r)
    for j in range(p.r):
        g = p.partial_gradient(side, j)
        col = own[:, j]
        if rule == "GS_s":
            out[j] = np.linalg.norm(np.where(col == 0, np.minimum(g, 0.0), g))
            continue
        eta = p.step_size(side, j)
        d = np.maximum(col - eta * g, 0.0) - col
        if rule == "GS_r":
            out[j] = np.linalg.norm(d)
        elif rule == "GS_q":
            out[j] = g @ d + 0.5 / eta * (d @ d)
        else:
            raise UnsupportedSchemeError(f"NMF has no {rule} scores")
    return out

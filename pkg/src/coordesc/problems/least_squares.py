"""Least squares ``1/2 ||Ax - b||^2`` with a maintained ``A^T A x`` cache."""
from __future__ import annotations

import math

import numpy as np

from ..errors import CacheError, InvalidStepError, ShapeError, UnsupportedSchemeError
from ..numeric import BlockPartition, FlopCounter, make_block_partition, spectral_norm_sq
from ..prox import zero
from .base import CoordinateProblem, rel_drift


class LeastSquaresProblem(CoordinateProblem):
    """Block gradient descent on least squares.

    ``A^T A`` and ``A^T b`` are precomputed once; the cache ``M = A^T A x``
    is updated with one block column product per coordinate step, so a block
    of size ``n/s`` costs ``O(n^2/s)``.
    """

    def __init__(self, A, b, n_blocks: int | None = None, x0=None, step: float | None = None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise ShapeError(f"A {A.shape} and b {b.shape} are incompatible")
        self.A, self.b = A, b
        n = A.shape[1]
        self.partition: BlockPartition = make_block_partition(n, n_blocks or n)
        self.n_blocks = self.partition.n_blocks
        self.gram = A.T @ A
        self.Atb = A.T @ b
        self.x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
        self.M = None
        self.flops = FlopCounter()
        self._L = None
        self.step = step
        self.init_cache()

    def init_cache(self) -> None:
        self.M = self.gram @ self.x

    @property
    def lipschitz_global(self) -> float:
        if self._L is None:
            self._L = spectral_norm_sq(self.A)
        return self._L

    def objective(self, point=None) -> float:
        x = self.x if point is None else np.asarray(point, dtype=float)
        if x.shape != (self.A.shape[1],):
            raise ShapeError(f"point has shape {x.shape}")
        r = self.A @ x - self.b
        return 0.5 * float(r @ r)

    def get_point(self):
        return self.x.copy()

    def set_point(self, point):
        self.x = np.array(point, dtype=float)
        self.init_cache()

    def get_block(self, i):
        return self.x[self.partition.block(i)].copy()

    def set_block(self, i, value):
        sl = self.partition.block(i)
        delta = np.asarray(value, dtype=float) - self.x[sl]
        self.x[sl] = value
        self.M += self.gram[:, sl] @ delta
        n, k = self.gram.shape[0], sl.stop - sl.start
        self.flops.elementwise(k)
        self.flops.matvec(n, k)
        self.flops.elementwise(n)

    def block_gradient(self, i, block=None):
        if self.M is None:
            raise CacheError("cache not initialised")
        sl = self.partition.block(i)
        g = self.M[sl] - self.Atb[sl]
        self.flops.elementwise(sl.stop - sl.start)
        if block is not None:
            g = g + self.gram[sl, sl] @ (np.asarray(block) - self.x[sl])
        return g

    def block_regularizer(self, i):
        return zero()

    def block_lipschitz(self):
        return np.array([np.linalg.eigvalsh(self.gram[self.partition.block(i), self.partition.block(i)]).max()
                         for i in range(self.n_blocks)])

    def block_argmin(self, i, prox_weight=0.0):
        sl = self.partition.block(i)
        if math.isinf(prox_weight):
            return self.x[sl].copy()
        G = self.gram[sl, sl]
        rhs = self.Atb[sl] - self.M[sl] + G @ self.x[sl] + prox_weight * self.x[sl]
        return np.linalg.solve(G + prox_weight * np.eye(G.shape[0]), rhs)

    def update(self, i):
        alpha = self.step or 1.0 / self.lipschitz_global
        ls_coordinate_step(self, i, alpha)

    def full_step(self, alpha: float) -> None:
        """One full gradient step, counted for coordinate-friendliness comparisons."""
        n = self.gram.shape[0]
        g = self.gram @ self.x - self.Atb
        self.flops.matvec(n, n)
        self.flops.elementwise(n)
        self.x = self.x - alpha * g
        self.flops.axpy(n)
        self.M = self.gram @ self.x

    def gradient(self, point=None):
        x = self.x if point is None else point
        return self.gram @ x - self.Atb

    def scores(self, rule):
        g = self.M - self.Atb
        norms = np.array([np.linalg.norm(g[self.partition.block(i)]) for i in range(self.n_blocks)])
        if rule == "GS":
            return norms
        if rule == "GSL":
            return norms / np.sqrt(self.block_lipschitz())
        raise UnsupportedSchemeError(f"least squares has no {rule} scores")

    def stationarity(self) -> float:
        return float(np.linalg.norm(self.M - self.Atb))

    def cache_drift(self) -> float:
        return rel_drift(self.M, self.gram @ self.x)


def ls_coordinate_step(p: LeastSquaresProblem, i: int, alpha: float) -> np.ndarray:
    """Block gradient step on block ``i`` using the cached ``A^T A x``; returns the new block."""
    if alpha <= 0:
        raise InvalidStepError("step size must be positive")
    if p.M is None:
        raise CacheError("cache not initialised")
    sl = p.partition.block(i)
    g = p.block_gradient(i)
    new = p.x[sl] - alpha * g
    p.flops.axpy(sl.stop - sl.start)
    p.set_block(i, new)
    return new

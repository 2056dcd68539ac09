"""Smooth quadratics: the two-variable demo and finite sums of quadratics."""
from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError, UnsupportedSchemeError
from ..numeric import BlockPartition, FlopCounter, make_block_partition
from ..prox import zero
from .base import CoordinateProblem


class QuadraticProblem(CoordinateProblem):
    """``f(x) = 1/2 x^T H x - c^T x`` with ``H`` symmetric positive definite."""

    def __init__(self, H, c=None, x0=None, partition: BlockPartition | None = None):
        H = np.asarray(H, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ShapeError("H must be square")
        self.H = H
        n = H.shape[0]
        self.c = np.zeros(n) if c is None else np.asarray(c, dtype=float)
        self.partition = partition or make_block_partition(n, n)
        self.n_blocks = self.partition.n_blocks
        self.x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
        self.flops = FlopCounter()

    def objective(self, point=None) -> float:
        x = self.x if point is None else np.asarray(point, dtype=float)
        if x.shape != self.c.shape:
            raise ShapeError(f"point has shape {x.shape}, expected {self.c.shape}")
        return float(0.5 * x @ self.H @ x - self.c @ x)

    def gradient(self, point=None) -> np.ndarray:
        x = self.x if point is None else point
        return self.H @ x - self.c

    def get_point(self):
        return self.x.copy()

    def set_point(self, point) -> None:
        self.x = np.array(point, dtype=float)

    def get_block(self, i):
        return self.x[self.partition.block(i)].copy()

    def set_block(self, i, value):
        self.x[self.partition.block(i)] = value

    def block_gradient(self, i, block=None):
        sl = self.partition.block(i)
        x = self.x
        if block is not None:
            x = x.copy()
            x[sl] = block
        return self.H[sl] @ x - self.c[sl]

    def block_regularizer(self, i):
        return zero()

    def block_lipschitz(self):
        return np.array([np.linalg.eigvalsh(self.H[self.partition.block(i), self.partition.block(i)]).max()
                         for i in range(self.n_blocks)])

    def block_argmin(self, i, prox_weight=0.0):
        sl = self.partition.block(i)
        if math.isinf(prox_weight):
            return self.x[sl].copy()
        Hii = self.H[sl, sl]
        x = self.x
        rhs = self.c[sl] - self.H[sl] @ x + Hii @ x[sl] + prox_weight * x[sl]
        return np.linalg.solve(Hii + prox_weight * np.eye(Hii.shape[0]), rhs)

    def update(self, i):
        self.set_block(i, self.block_argmin(i))

    def scores(self, rule):
        g = self.gradient()
        parts = [g[self.partition.block(i)] for i in range(self.n_blocks)]
        norms = np.array([np.linalg.norm(p) for p in parts])
        if rule == "GS":
            return norms
        if rule == "GSL":
            return norms / np.sqrt(self.block_lipschitz())
        if rule == "MBI":
            out = np.empty(self.n_blocks)
            for i in range(self.n_blocks):
                trial = self.x.copy()
                trial[self.partition.block(i)] = self.block_argmin(i)
                out[i] = self.objective(trial)
            return out
        raise UnsupportedSchemeError(f"quadratic problem has no {rule} scores")

    def stationarity(self) -> float:
        return float(np.linalg.norm(self.gradient()))

    def minimizer(self) -> np.ndarray:
        return np.linalg.solve(self.H, self.c)


def demo_quadratic(x0=(8.0, -6.0)) -> QuadraticProblem:
    """``7x^2 + 6xy + 8y^2`` started from ``x0``."""
    return QuadraticProblem([[14.0, 6.0], [6.0, 16.0]], x0=x0)


class FiniteSumQuadratic:
    """``f(x) = (1/m) sum_j a_j/2 ||x - c_j||^2`` for stochastic-gradient tests.

    Sample ``j`` has gradient ``a_j (x - c_j)`` and Lipschitz constant ``a_j``.
    """

    def __init__(self, a, c):
        self.a = np.asarray(a, dtype=float)
        c = np.asarray(c, dtype=float)
        self.c = c.reshape(len(self.a), -1)
        self.n_samples = len(self.a)
        self.dim = self.c.shape[1]
        self.flops = FlopCounter()

    @classmethod
    def random(cls, m: int, dim: int = 1, seed: int = 0, a_range=(1.0, 2.0)):
        from ..selection import make_rng
        rng = make_rng(seed)
        a = rng.uniform(*a_range, size=m)
        c = rng.normal(size=(m, dim))
        return cls(a, c)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(self.dim)
        diff = x - self.c
        return float(np.mean(0.5 * self.a * np.sum(diff * diff, axis=1)))

    def sample_gradient(self, j: int, x) -> np.ndarray:
        self.flops.elementwise(self.dim, 2)
        return self.a[j] * (np.asarray(x, dtype=float).reshape(self.dim) - self.c[j])

    def full_gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(self.dim)
        return np.mean(self.a[:, None] * (x - self.c), axis=0)

    def minimizer(self) -> np.ndarray:
        return (self.a @ self.c) / self.a.sum()

    @property
    def lipschitz(self) -> np.ndarray:
        return self.a.copy()

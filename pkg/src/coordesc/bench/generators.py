"""Seeded synthetic instances for the experiments.

Every generator draws from a Philox stream seeded with ``seed`` only, so the
same arguments always give bit-identical data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidCountError, InvalidRankError, InvalidSupportError
from ..problems import LassoProblem, LeastSquaresProblem, LogisticProblem, NmfProblem, SvmDualProblem
from ..selection import make_rng


@dataclass
class LassoInstance:
    problem: LassoProblem
    x_planted: np.ndarray


@dataclass
class NmfInstance:
    problem: NmfProblem
    X_planted: np.ndarray
    Y_planted: np.ndarray


def gen_lasso(m: int = 50, n: int = 100, k: int = 10, sigma: float = 1e-4, seed: int = 0,
              lam: float = 1e3) -> LassoInstance:
    """Gaussian ``A``, a ``k``-sparse planted signal with ``N(0, 2)`` nonzeros, and ``b = A x + noise``.

    ``N(0, 2)`` is read as variance 2, so nonzeros have standard deviation ``sqrt(2)``.
    """
    if not 0 <= k <= n:
        raise InvalidSupportError(f"support size {k} must lie in [0, {n}]")
    if m < 1 or n < 1:
        raise InvalidCountError("m and n must be positive")
    rng = make_rng(seed)
    # same memory layout the problem stores, so b == problem.A @ x bit for bit
    A = np.asfortranarray(rng.standard_normal((m, n)))
    support = rng.permutation(n)[:k]
    x = np.zeros(n)
    x[support] = np.sqrt(2.0) * rng.standard_normal(k)
    noise = rng.standard_normal(m)
    b = A @ x + sigma * noise if sigma != 0 else A @ x
    return LassoInstance(LassoProblem(A, b, lam), x)


def gen_least_squares(p: int, n: int, s: int, seed: int = 0) -> LeastSquaresProblem:
    """Gaussian least squares with ``s`` equal blocks (used for flop-ratio checks)."""
    if p < 1 or n < 1:
        raise InvalidCountError("dimensions must be positive")
    rng = make_rng(seed)
    A = rng.standard_normal((p, n))
    b = rng.standard_normal(p)
    return LeastSquaresProblem(A, b, n_blocks=s)


def _unit_open_uniform(rng, shape) -> np.ndarray:
    # Generator.random is on [0, 1); reflect to (0, 1]
    return 1.0 - rng.random(shape)


def gen_nmf(m: int = 200, n: int = 100, r: int = 5, seed: int = 0) -> NmfInstance:
    """Planted ``M = X* Y*^T`` with uniform (0, 1] factors and a normalised uniform start."""
    if r < 1:
        raise InvalidRankError("rank must be at least 1")
    if r > min(m, n):
        raise InvalidRankError(f"rank {r} exceeds min(m, n) = {min(m, n)}")
    rng = make_rng(seed)
    Xs = _unit_open_uniform(rng, (m, r))
    Ys = _unit_open_uniform(rng, (n, r))
    M = Xs @ Ys.T
    X0 = _unit_open_uniform(rng, (m, r))
    Y0 = _unit_open_uniform(rng, (n, r))
    prob = NmfProblem(M, X0, Y0)
    prob.normalize()
    return NmfInstance(prob, Xs, Ys)


def _two_gaussians(m: int, n: int, separation: float, rng) -> tuple[np.ndarray, np.ndarray]:
    if m < 2 or m % 2:
        raise InvalidCountError(f"sample count must be even and >= 2, got {m}")
    if n < 1:
        raise InvalidCountError("feature count must be positive")
    half = m // 2
    shift = np.zeros(n)
    shift[0] = separation / 2.0
    pos = rng.standard_normal((half, n)) + shift
    neg = rng.standard_normal((half, n)) - shift
    X = np.vstack([pos, neg])
    y = np.concatenate([np.ones(half), -np.ones(half)])
    return X, y


def gen_logistic(m: int = 100, separation: float = 2.0, seed: int = 0, C: float = 1.0,
                 n: int = 2) -> LogisticProblem:
    """Two unit-covariance Gaussians centred at ``(+-separation/2, 0, ..., 0)``; the plane by default."""
    X, y = _two_gaussians(m, n, separation, make_rng(seed))
    return LogisticProblem(X, y, C)


def gen_svm(m: int = 500, n: int = 50, separation: float = 6.0, seed: int = 0, C: float = 1.0) -> SvmDualProblem:
    """The two-Gaussian construction in ``n`` dimensions, assembled into the dual ``Q``."""
    X, y = _two_gaussians(m, n, separation, make_rng(seed))
    return SvmDualProblem(X, y, C)

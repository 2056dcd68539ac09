"""LASSO ``||x||_1 + lam/2 ||Ax - b||^2`` by coordinate prox-linear steps."""
from __future__ import annotations

import math

import numpy as np

from ..errors import (CacheError, DegenerateColumnError, InvalidContinuationError, ShapeError,
                      UnsupportedSchemeError)
from ..numeric import FlopCounter, spectral_norm_sq
from ..prox import l1, shrink
from .base import GS_RULES, CoordinateProblem, l1_gs_scores, rel_drift


class LassoProblem(CoordinateProblem):
    """Coordinate LASSO with the residual ``Ax - b`` maintained in ``self.r``.

    With ``A`` short and fat, ``A^T A`` is never formed; a coordinate step
    costs two length-``m`` vector operations.
    """

    def __init__(self, A, b, lam: float, x0=None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise ShapeError(f"A {A.shape} and b {b.shape} are incompatible")
        if not lam > 0:
            raise ValueError("lambda must be positive")
        self.A = np.asfortranarray(A)
        self.b = b
        self.lam = float(lam)
        self.m, self.n = A.shape
        self.n_blocks = self.n
        self.col_norms_sq = np.einsum("ij,ij->j", A, A)
        self.x = np.zeros(self.n) if x0 is None else np.array(x0, dtype=float)
        self.flops = FlopCounter()
        self._L = None
        self.r = None
        self.init_cache()

    # -- caches ------------------------------------------------------------
    def init_cache(self) -> None:
        self.r = self.A @ self.x - self.b

    def cache_drift(self) -> float:
        return rel_drift(self.r, self.A @ self.x - self.b)

    @property
    def lipschitz_global(self) -> float:
        """``lam * ||A^T A||``; the norm comes from power iteration, computed once."""
        if self._L is None:
            self._L = spectral_norm_sq(self.A)
        return self.lam * self._L

    def set_lambda(self, lam: float) -> None:
        if not lam > 0:
            raise ValueError("lambda must be positive")
        self.lam = float(lam)

    def block_lipschitz(self) -> np.ndarray:
        return self.lam * self.col_norms_sq

    # -- objective ---------------------------------------------------------
    def objective(self, point=None) -> float:
        if point is None:
            if self.r is None:
                raise CacheError("residual cache not initialised")
            return float(np.abs(self.x).sum() + 0.5 * self.lam * (self.r @ self.r))
        x = np.asarray(point, dtype=float)
        if x.shape != (self.n,):
            raise ShapeError(f"point has shape {x.shape}, expected ({self.n},)")
        r = self.A @ x - self.b
        return float(np.abs(x).sum() + 0.5 * self.lam * (r @ r))

    def gradient(self, point=None) -> np.ndarray:
        """Gradient of the smooth part ``lam * A^T (Ax - b)``."""
        if point is None:
            return self.lam * (self.A.T @ self.r)
        return self.lam * (self.A.T @ (self.A @ point - self.b))

    full_gradient = gradient

    @property
    def regularizer(self):
        return l1(1.0)

    # -- block access ------------------------------------------------------
    def get_point(self):
        return self.x.copy()

    def set_point(self, point):
        self.x = np.array(point, dtype=float)
        self.init_cache()

    def get_block(self, i):
        return self.x[i:i + 1].copy()

    def set_block(self, i, value):
        v = float(np.asarray(value).reshape(-1)[0])
        delta = v - self.x[i]
        if delta != 0.0:
            self.x[i] = v
            self.r += delta * self.A[:, i]
        self.flops.scalar(1)
        self.flops.axpy(self.m)

    def block_gradient(self, i, block=None):
        c = float(self.A[:, i] @ self.r)
        self.flops.dot(self.m)
        if block is not None:
            c += self.col_norms_sq[i] * (float(np.asarray(block).reshape(-1)[0]) - self.x[i])
        return np.array([self.lam * c])

    def block_regularizer(self, i):
        return l1(1.0)

    def block_argmin(self, i, prox_weight=0.0):
        # the smooth part is exactly quadratic along a coordinate with curvature L_i
        if math.isinf(prox_weight):
            return self.get_block(i)
        Li = self.lam * self.col_norms_sq[i]
        if Li == 0.0:
            raise DegenerateColumnError(f"column {i} of A is zero")
        g = self.lam * float(self.A[:, i] @ self.r)
        t = Li + prox_weight
        return np.array([shrink(self.x[i] - g / t, 1.0 / t)])

    def update(self, i):
        lasso_coordinate_step(self, i)

    # -- greedy scores and stationarity ------------------------------------
    def scores(self, rule):
        if rule in GS_RULES:
            return lasso_gs_scores(self, rule)
        if rule == "MBI":
            g = self.gradient()
            Lj = self.block_lipschitz()
            z = self.x - g / Lj
            d = np.sign(z) * np.maximum(np.abs(z) - 1.0 / Lj, 0.0) - self.x
            return self.objective() + d * g + 0.5 * Lj * d * d + np.abs(self.x + d) - np.abs(self.x)
        raise UnsupportedSchemeError(f"LASSO has no {rule} scores")

    def stationarity(self) -> float:
        return float(np.linalg.norm(lasso_gradient_map(self, self.lipschitz_global)))

    def full_step(self) -> None:
        """One full prox-gradient step with step ``1/L``; flop-counted."""
        m, n = self.m, self.n
        L = self.lipschitz_global
        r = self.A @ self.x - self.b
        self.flops.matvec(m, n)
        self.flops.elementwise(m)
        g = self.lam * (self.A.T @ r)
        self.flops.matvec(n, m)
        self.flops.elementwise(n)
        z = self.x - g / L
        self.flops.elementwise(n, 2)
        self.x = shrink(z, 1.0 / L)
        self.flops.prox(n)
        self.init_cache()


def lasso_coordinate_step(p: LassoProblem, i: int) -> float:
    """Exact prox-linear step on coordinate ``i`` with step ``1/(lam ||A_i||^2)``.

    Returns the new coordinate value; the residual cache is updated in place.
    """
    if p.r is None:
        raise CacheError("residual cache not initialised")
    cn = p.col_norms_sq[i]
    if cn == 0.0:
        raise DegenerateColumnError(f"column {i} of A is zero")
    a = p.A[:, i]
    c = float(a @ p.r)
    p.flops.dot(p.m)
    old = p.x[i]
    new = shrink(old - c / cn, 1.0 / (p.lam * cn))
    p.flops.scalar(4)
    p.flops.prox(1)
    delta = new - old
    if delta != 0.0:
        p.x[i] = new
        p.r += delta * a
    p.flops.scalar(1)
    p.flops.axpy(p.m)
    return new


def lasso_gs_scores(p: LassoProblem, rule: str) -> np.ndarray:
    """Per-coordinate greedy scores; GS-q is selected by argmin, the rest by argmax."""
    if p.r is None:
        raise CacheError("residual cache not initialised")
    g = p.lam * (p.A.T @ p.r)
    p.flops.matvec(p.n, p.m)
    p.flops.elementwise(p.n)
    L = p.lipschitz_global if rule != "GS_s" else 1.0
    return l1_gs_scores(p.x, g, L, rule)


def lasso_gradient_map(p: LassoProblem, L: float, regularized: bool = True, point=None) -> np.ndarray:
    """``x - prox_{|.|/L}(x - grad f(x)/L)``; with ``regularized=False`` the prox is dropped."""
    x = p.x if point is None else np.asarray(point, dtype=float)
    g = p.gradient(None if point is None else x)
    z = x - g / L
    if not regularized:
        return x - z
    return x - shrink(z, 1.0 / L)


def continuation_schedule(lambda0: float, eta: float, lambda_target: float) -> list[float]:
    """Geometric ladder ``lambda0, eta*lambda0, ...`` ending exactly at ``lambda_target``."""
    if not eta > 1:
        raise InvalidContinuationError(f"eta must exceed 1, got {eta}")
    if not (lambda0 > 0 and lambda_target > 0):
        raise InvalidContinuationError("regularisation parameters must be positive")
    if lambda0 > lambda_target:
        raise InvalidContinuationError("lambda0 must not exceed the target")
    ladder = [float(lambda0)]
    while ladder[-1] < lambda_target:
        nxt = ladder[-1] * eta
        if nxt >= lambda_target * (1 - 1e-12):
            ladder.append(float(lambda_target))
        else:
            ladder.append(nxt)
    ladder[-1] = float(lambda_target)
    return ladder


def continuation_solve(p: LassoProblem, schedule, tol: float = 1e-6, max_sweeps: int = 1000,
                       rule=None) -> list[int]:
    """Warm-started sweeps along ``schedule``; returns the epochs spent per stage.

    Each stage runs until the gradient map drops to ``tol``. ``max_sweeps``
    caps the total over all stages. ``rule`` is an index-rule state (cyclic
    when omitted); one sweep is ``n`` coordinate updates.
    """
    from ..selection import cyclic, next_index
    rule = cyclic(p.n) if rule is None else rule
    used = []
    total = 0
    for lam in schedule:
        p.set_lambda(lam)
        sweeps = 0
        while total < max_sweeps and p.stationarity() > tol:
            for _ in range(p.n):
                lasso_coordinate_step(p, next_index(rule, p))
            sweeps += 1
            total += 1
        used.append(sweeps)
    return used

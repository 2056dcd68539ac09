"""Coordinate update schemes and stochastic gradient estimators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigurationError, DivergenceError, EmptyBatchError, InvalidStepError, InvalidWeightError,
                     NoAnchorError, ShapeError, UnsupportedSchemeError)
from .prox import prox_apply
from .selection import make_rng

SCHEMES = ("exact_min", "proximal_point", "prox_linear", "prox_linear_extrapolated",
           "stochastic_prox_linear")
STEP_POLICIES = ("fixed", "block_lipschitz_reciprocal", "armijo")
VR_MODES = ("none", "sag", "saga", "svrg")


@dataclass
class SchemeConfig:
    """Which update to apply and with what constants.

    ``step`` is the fixed step for ``step_policy="fixed"`` and the proximal
    weight for ``proximal_point``. ``native=True`` lets a problem use its own
    tuned update (e.g. the coordinate Newton step for logistic regression)
    instead of the generic prox-linear formula.
    """

    scheme: str = "prox_linear"
    step_policy: str = "block_lipschitz_reciprocal"
    step: float | None = None
    omega: float = 0.0
    vr_mode: str = "none"
    update_period: int = 1
    batch_size: int = 1
    sigma: float = 0.01
    backtrack: float = 0.5
    max_trials: int = 30
    native: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.step_policy not in STEP_POLICIES:
            raise ConfigurationError(f"unknown step policy {self.step_policy!r}")
        if self.vr_mode not in VR_MODES:
            raise ConfigurationError(f"unknown variance-reduction mode {self.vr_mode!r}")
        if self.omega < 0:
            raise InvalidWeightError(f"extrapolation weight must be >= 0, got {self.omega}")
        if self.step_policy == "fixed" and not (self.step is not None and self.step > 0):
            raise InvalidStepError("a fixed step policy needs a positive step")
        if self.scheme == "proximal_point" and self.step is not None and self.step < 0:
            raise InvalidWeightError("proximal weight must be nonnegative")
        if not 0 < self.sigma < 1:
            raise ConfigurationError("Armijo sigma must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise ConfigurationError("backtrack factor must lie in (0, 1)")
        if self.max_trials < 1 or self.batch_size < 1 or self.update_period < 1:
            raise ConfigurationError("max_trials, batch_size and update_period must be >= 1")


# -- deterministic block updates ------------------------------------------------
def coordinate_argmin_step(problem, i: int, prox_weight: float = 0.0) -> np.ndarray:
    """Exact (optionally proximal) minimisation over block ``i``; writes and returns the block."""
    if prox_weight < 0:
        raise InvalidWeightError("proximal weight must be nonnegative")
    new = np.asarray(problem.block_argmin(i, prox_weight), dtype=float)
    problem.set_block(i, new)
    return new


def prox_linear_step(problem, i: int, alpha: float, grad=None) -> np.ndarray:
    """``prox_{alpha r_i}(x_i - alpha grad_i f(x))``; writes and returns the block.

    ``grad`` overrides the block gradient, which is how stochastic estimates
    are plugged in.
    """
    if not alpha > 0:
        raise InvalidStepError(f"step must be positive, got {alpha}")
    xi = problem.get_block(i)
    g = problem.block_gradient(i) if grad is None else np.asarray(grad, dtype=float)
    if g.shape != xi.shape:
        raise ShapeError(f"gradient shape {g.shape} does not match block shape {xi.shape}")
    new = np.asarray(prox_apply(problem.block_regularizer(i), xi - alpha * g, alpha), dtype=float)
    problem.flops.axpy(xi.size)
    problem.flops.prox(xi.size)
    problem.set_block(i, new)
    return new


def extrapolate(x_cur, x_prev, omega: float) -> np.ndarray:
    """``x_cur + omega (x_cur - x_prev)``."""
    if omega < 0:
        raise InvalidWeightError(f"extrapolation weight must be >= 0, got {omega}")
    x_cur = np.asarray(x_cur, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if x_cur.shape != x_prev.shape:
        raise ShapeError("blocks must have the same shape")
    return x_cur + omega * (x_cur - x_prev)


def extrapolated_prox_linear_step(problem, i: int, alpha: float, omega: float, x_prev) -> np.ndarray:
    """Prox-linear step taken from the extrapolated block ``x_i + omega (x_i - x_prev)``."""
    if not alpha > 0:
        raise InvalidStepError(f"step must be positive, got {alpha}")
    xi = problem.get_block(i)
    xhat = extrapolate(xi, x_prev, omega)
    g = problem.block_gradient(i, xhat)
    new = np.asarray(prox_apply(problem.block_regularizer(i), xhat - alpha * g, alpha), dtype=float)
    problem.flops.axpy(2 * xi.size)
    problem.flops.prox(xi.size)
    problem.set_block(i, new)
    return new


class BlockUpdater:
    """Applies the configured scheme to a problem, keeping per-block history for extrapolation."""

    def __init__(self, problem, config: SchemeConfig):
        if config.scheme == "stochastic_prox_linear":
            raise UnsupportedSchemeError("stochastic schemes run through run_stochastic")
        self.problem = problem
        self.config = config
        self.prev: dict[int, np.ndarray] = {}
        self._lipschitz = None

    def _step(self, i: int) -> float:
        cfg = self.config
        if cfg.step_policy == "fixed":
            return float(cfg.step)
        if cfg.step_policy == "armijo":
            raise UnsupportedSchemeError("Armijo steps are only available through the native logistic update")
        if self._lipschitz is None:
            self._lipschitz = np.atleast_1d(np.asarray(self.problem.block_lipschitz(), dtype=float))
        L = float(self._lipschitz[i])
        if not L > 0:
            raise InvalidStepError(f"block {i} has nonpositive Lipschitz constant {L}")
        return 1.0 / L

    def __call__(self, i: int) -> None:
        cfg, p = self.config, self.problem
        if cfg.native and cfg.scheme == "prox_linear":
            p.update(i)
        elif cfg.scheme == "exact_min":
            coordinate_argmin_step(p, i, 0.0)
        elif cfg.scheme == "proximal_point":
            coordinate_argmin_step(p, i, cfg.step if cfg.step is not None else 1.0)
        elif cfg.scheme == "prox_linear":
            prox_linear_step(p, i, self._step(i))
        else:
            cur = p.get_block(i)
            prev = self.prev.get(i, cur)
            extrapolated_prox_linear_step(p, i, self._step(i), cfg.omega, prev)
            self.prev[i] = cur


# -- stochastic gradients ---------------------------------------------------------
def minibatch_gradient(problem, point, sample_set) -> np.ndarray:
    """Mean of the per-sample gradients over ``sample_set``."""
    idx = list(sample_set)
    if not idx:
        raise EmptyBatchError("mini-batch is empty")
    m = problem.n_samples
    for j in idx:
        if not 0 <= j < m:
            raise IndexError(f"sample index {j} out of range for {m} samples")
    total = problem.sample_gradient(idx[0], point).astype(float)
    for j in idx[1:]:
        total = total + problem.sample_gradient(j, point)
    return total / len(idx)


@dataclass
class GradientTable:
    """Stored per-sample gradients with an incrementally maintained mean.

    ``anchor_point``/``anchor_grads``/``anchor_average`` serve SVRG; the
    ``table``/``running_average`` pair serves SAG and SAGA.
    """

    table: np.ndarray
    running_average: np.ndarray = field(default=None)
    anchor_point: np.ndarray | None = None
    anchor_grads: np.ndarray | None = None
    anchor_average: np.ndarray | None = None

    def __post_init__(self):
        self.table = np.array(self.table, dtype=float)
        if self.table.ndim == 1:
            self.table = self.table[:, None]
        if self.table.shape[0] < 1:
            raise ConfigurationError("gradient table needs at least one sample")
        if self.running_average is None:
            self.running_average = self.table.mean(axis=0)

    @property
    def sample_count(self) -> int:
        return self.table.shape[0]

    @classmethod
    def from_problem(cls, problem, point) -> "GradientTable":
        grads = np.array([problem.sample_gradient(j, point) for j in range(problem.n_samples)])
        return cls(grads)

    def _check(self, j: int) -> None:
        if not 0 <= j < self.sample_count:
            raise IndexError(f"sample index {j} out of range for {self.sample_count} samples")

    def replace(self, j: int, new_grad) -> None:
        new_grad = np.asarray(new_grad, dtype=float).reshape(self.table.shape[1])
        self.running_average = self.running_average + (new_grad - self.table[j]) / self.sample_count
        self.table[j] = new_grad

    def drift(self) -> float:
        return float(np.abs(self.running_average - self.table.mean(axis=0)).max())

    def refresh_anchor(self, problem, point) -> None:
        """Recompute all anchor gradients at ``point`` (the SVRG full pass)."""
        self.anchor_point = np.array(point, dtype=float)
        self.anchor_grads = np.array([problem.sample_gradient(j, point) for j in range(problem.n_samples)],
                                     dtype=float).reshape(self.sample_count, -1)
        self.anchor_average = self.anchor_grads.mean(axis=0)


def sag_estimate(table: GradientTable, j: int, new_grad) -> np.ndarray:
    """``(new - old_j)/m + mean``, then store ``new`` in slot ``j``."""
    table._check(j)
    new_grad = np.asarray(new_grad, dtype=float).reshape(table.table.shape[1])
    est = (new_grad - table.table[j]) / table.sample_count + table.running_average
    table.replace(j, new_grad)
    return est


def saga_estimate(table: GradientTable, j: int, new_grad) -> np.ndarray:
    """``new - old_j + mean``, then store ``new`` in slot ``j``."""
    table._check(j)
    new_grad = np.asarray(new_grad, dtype=float).reshape(table.table.shape[1])
    est = new_grad - table.table[j] + table.running_average
    table.replace(j, new_grad)
    return est


def svrg_estimate(table: GradientTable, j: int, grad_at_x, grad_at_anchor=None) -> np.ndarray:
    """``grad_j(x) - grad_j(anchor) + anchor mean``.

    When ``grad_at_anchor`` is omitted the stored anchor gradient is used.
    """
    if table.anchor_average is None:
        raise NoAnchorError("SVRG needs an anchor; call refresh_anchor first")
    table._check(j)
    if grad_at_anchor is None:
        grad_at_anchor = table.anchor_grads[j]
    dim = table.anchor_average.shape[0]
    return (np.asarray(grad_at_x, dtype=float).reshape(dim)
            - np.asarray(grad_at_anchor, dtype=float).reshape(dim) + table.anchor_average)


def run_stochastic(problem, config: SchemeConfig, epochs: int, seed: int = 0, x0=None) -> list[float]:
    """Stochastic gradient descent on a finite sum; returns ``f(x) - f(x*)`` after each epoch.

    An epoch is ``m`` steps. Without variance reduction the step decays as
    ``alpha0 / (1 + k/m)``; with SAG/SAGA/SVRG it stays constant. The default
    ``alpha0`` is ``1/(2 Lbar)`` with ``Lbar`` the mean sample constant.
    """
    if epochs < 1:
        raise ConfigurationError("epochs must be >= 1")
    rng = make_rng(seed)
    m = problem.n_samples
    x = np.zeros(problem.dim) if x0 is None else np.array(x0, dtype=float).reshape(problem.dim)
    alpha0 = config.step if config.step is not None else 1.0 / (2.0 * float(np.mean(problem.lipschitz)))
    f_star = problem.objective(problem.minimizer())
    mode = config.vr_mode
    table = None
    if mode in ("sag", "saga"):
        table = GradientTable.from_problem(problem, x)
    elif mode == "svrg":
        table = GradientTable(np.zeros((m, problem.dim)))
        table.refresh_anchor(problem, x)
    gaps = [problem.objective(x) - f_star]
    k = 0
    for epoch in range(epochs):
        if mode == "svrg" and epoch > 0 and epoch % config.update_period == 0:
            table.refresh_anchor(problem, x)
        for _ in range(m):
            batch = rng.integers(0, m, size=config.batch_size)
            if mode == "none":
                g = minibatch_gradient(problem, x, batch)
                alpha = alpha0 / (1.0 + k / m)
            else:
                parts = []
                for j in batch:
                    j = int(j)
                    gj = problem.sample_gradient(j, x)
                    if mode == "sag":
                        parts.append(sag_estimate(table, j, gj))
                    elif mode == "saga":
                        parts.append(saga_estimate(table, j, gj))
                    else:
                        parts.append(svrg_estimate(table, j, gj))
                g = np.mean(parts, axis=0)
                alpha = alpha0
            x = x - alpha * g
            k += 1
        gap = problem.objective(x) - f_star
        if not math.isfinite(gap):
            raise DivergenceError(f"stochastic run diverged at epoch {epoch + 1}")
        gaps.append(gap)
    return gaps

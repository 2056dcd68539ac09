"""Randomised checks that composed proxes of eligible sums are exact."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..prox import SummativePair, box, group_l2, l1, nonneg, prox_apply, prox_summative, quadratic, tv1d
from ..selection import make_rng
from ..subdiff import membership_residual
from .oracle import brute_prox_oracle

# equal neighbours of a TV prox output may differ by rounding; treat them as tied
TV_TIE_TOL = 1e-10


@dataclass
class PairCase:
    name: str
    make: object          # callable(rng) -> SummativePair with random weights
    max_dim: int          # largest dimension used in the inclusion check


@dataclass
class PairResult:
    name: str
    oracle_error: float
    inclusion_residual: float
    grid_cases: int
    inclusion_cases: int


def _w(rng):
    return float(rng.uniform(0.1, 2.0))


PAIR_CASES = (
    PairCase("l1+l2", lambda rng: SummativePair(l1(_w(rng)), group_l2(_w(rng)), "homogeneous_plus_l2"), 8),
    PairCase("nonneg+l2", lambda rng: SummativePair(nonneg(), group_l2(_w(rng)), "homogeneous_plus_l2"), 8),
    PairCase("tv+l1", lambda rng: SummativePair(tv1d(_w(rng)), l1(_w(rng)), "tv_plus_monotone"), 8),
    PairCase("tv+box", lambda rng: SummativePair(
        tv1d(_w(rng)), box(-float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.2, 2.0))), "tv_plus_monotone"), 8),
    PairCase("l1+quadratic", lambda rng: SummativePair(l1(_w(rng)), quadratic(_w(rng)), "scalar_abs_plus_smooth"), 1),
)


def _fast_value(pair: SummativePair):
    """Vectorised ``first + second`` for the kinds used in the suite."""
    def part(r, P):
        k = r.kind
        if k == "l1":
            return r.weight * np.abs(P).sum(axis=1)
        if k == "group_l2":
            return r.weight * np.linalg.norm(P, axis=1)
        if k == "nonneg":
            return np.where(np.all(P >= 0, axis=1), 0.0, np.inf)
        if k == "box":
            return np.where(np.all((P >= r.lo) & (P <= r.hi), axis=1), 0.0, np.inf)
        if k == "tv1d":
            return r.weight * np.abs(np.diff(P, axis=1)).sum(axis=1)
        if k == "quadratic":
            return 0.5 * r.weight * np.sum(P * P, axis=1)
        return np.array([r.value(p) for p in P])

    def h(P):
        return part(pair.first, P) + part(pair.second, P)
    return h


def inclusion_residual(pair: SummativePair, y) -> float:
    """Certificate that ``z = prox_second(prox_first(y))`` solves the joint prox.

    With ``u = prox_first(y)`` the pieces ``y - u`` and ``u - z`` must lie in
    the subdifferentials of ``first`` and ``second`` at ``z``; they sum to ``y - z``.
    """
    y = np.asarray(y, dtype=float)
    u = prox_apply(pair.first, y, 1.0)
    z = prox_apply(pair.second, u, 1.0)
    atol = TV_TIE_TOL if pair.first.kind == "tv1d" else 0.0
    r1 = membership_residual(pair.first, z, y - u, atol=atol)
    r2 = membership_residual(pair.second, z, u - z, atol=atol)
    return max(r1, r2)


def run_prox_checks(n_grid: int = 500, n_inclusion: int = 500, seed: int = 0,
                    grid=(-6.0, 6.0, 41), refinements: int = 7) -> list[PairResult]:
    """Compare composed proxes with the grid oracle (dimension <= 2) and the inclusion certificate."""
    results = []
    for case_no, case in enumerate(PAIR_CASES):
        rng = make_rng(seed * 1000 + case_no)
        err = 0.0
        for _ in range(n_grid):
            pair = case.make(rng)
            dim = 1 if case.max_dim == 1 else int(rng.integers(1, 3))
            y = rng.uniform(-4.0, 4.0, size=dim)
            z = np.atleast_1d(prox_summative(pair, y))
            ref = brute_prox_oracle(_fast_value(pair), y, grid=grid, refinements=refinements, vectorized=True)
            err = max(err, float(np.abs(z - ref).max()))
        res = 0.0
        for _ in range(n_inclusion):
            pair = case.make(rng)
            dim = int(rng.integers(1, case.max_dim + 1))
            y = rng.normal(scale=2.0, size=dim)
            res = max(res, inclusion_residual(pair, y))
        results.append(PairResult(case.name, err, res, n_grid, n_inclusion))
    return results

"""Grid-search prox oracle for low-dimensional checks."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import ConfigurationError, OracleFailureError

#: half-width (in cells of the previous grid) of each refinement window
REFINE_HALF_WIDTH = 2


def brute_prox_oracle(h, y, grid=(-10.0, 10.0, 201), refinements: int = 6,
                      vectorized: bool = False) -> np.ndarray:
    """Minimise ``h(x) + 1/2 ||x - y||^2`` over a box grid, then zoom in repeatedly.

    ``grid = (lo, hi, steps)`` describes each coordinate's initial grid. Each
    refinement re-grids a window of ``REFINE_HALF_WIDTH`` cells around the
    current best point with the same number of steps. ``h`` maps an
    ``(n,)`` array to a float, or an ``(N, n)`` array to ``N`` values when
    ``vectorized`` is set.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = y.size
    if n > 2:
        raise ConfigurationError("grid oracle supports at most two dimensions")
    lo, hi, steps = grid
    steps = int(steps)
    if steps < 3 or not hi > lo:
        raise ConfigurationError("grid needs hi > lo and at least three steps")

    def evaluate(points):
        if vectorized:
            hv = np.asarray(h(points), dtype=float)
        else:
            hv = np.array([h(p) for p in points], dtype=float)
        return hv + 0.5 * np.sum((points - y) ** 2, axis=1)

    axes = [np.linspace(lo, hi, steps)] * n
    cell = (hi - lo) / (steps - 1)
    best = None
    for level in range(refinements + 1):
        pts = np.array(list(itertools.product(*axes))) if n > 1 else axes[0][:, None]
        vals = evaluate(pts)
        vals = np.where(np.isfinite(vals), vals, np.inf)
        if not np.isfinite(vals).any():
            raise OracleFailureError("objective is not finite anywhere on the grid")
        best = pts[int(np.argmin(vals))]
        if level == refinements:
            break
        half = REFINE_HALF_WIDTH * cell
        axes = [np.linspace(b - half, b + half, steps) for b in best]
        cell = 2 * half / (steps - 1)
    return best.copy()

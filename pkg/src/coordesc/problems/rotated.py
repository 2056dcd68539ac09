"""The rotated ``|x| + 2|y|`` example on which exact coordinate minimisation can stall."""
from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError, UnsupportedSchemeError
from ..numeric import FlopCounter
from .base import CoordinateProblem

_AXES = {"x": 0, "y": 1}


class RotatedL1Problem(CoordinateProblem):
    """``f(x, y) = |c x + s y| + 2 |c y - s x|`` with ``c, s = cos(eps), sin(eps)``.

    The function is convex and minimised only at the origin, yet for
    ``eps = pi/4`` every point ``(b, b)`` is coordinatewise optimal.
    """

    def __init__(self, epsilon: float, point=(1.0, 1.0)):
        self.epsilon = float(epsilon)
        self.c = math.cos(self.epsilon)
        self.s = math.sin(self.epsilon)
        self.point = np.array(point, dtype=float)
        if self.point.shape != (2,):
            raise ShapeError("point must have two entries")
        self.n_blocks = 2
        self.flops = FlopCounter()

    def rotated(self, point=None) -> tuple[float, float]:
        x, y = self.point if point is None else point
        return self.c * x + self.s * y, self.c * y - self.s * x

    def objective(self, point=None) -> float:
        if point is not None and np.shape(point) != (2,):
            raise ShapeError("point must have two entries")
        u, v = self.rotated(point)
        return float(abs(u) + 2.0 * abs(v))

    def get_point(self):
        return self.point.copy()

    def set_point(self, point):
        self.point = np.array(point, dtype=float)

    def get_block(self, i):
        return self.point[i:i + 1].copy()

    def set_block(self, i, value):
        self.point[i] = float(np.asarray(value).reshape(-1)[0])

    def block_argmin(self, i, prox_weight=0.0):
        which = "x" if i == 0 else "y"
        return np.array([rotated_l1_coord_min(self, self.point, which, prox_weight)])

    def update(self, i):
        self.set_block(i, self.block_argmin(i))

    def scores(self, rule):
        raise UnsupportedSchemeError("the rotated example has no greedy scores")

    def stationarity(self) -> float:
        """Smallest subgradient norm. The rotation is orthogonal, so it equals the
        minimum-norm element of the subdifferential of ``|u| + 2|v|``."""
        u, v = self.rotated()
        tol = 1e-12 * max(1.0, float(np.abs(self.point).max()))
        return math.hypot(0.0 if abs(u) <= tol else 1.0, 0.0 if abs(v) <= tol else 2.0)


def _restriction(p: RotatedL1Problem, point, which: str):
    """Return ``(a1, b1, a2, b2)`` with ``f = |a1 t + b1| + 2 |a2 t + b2|`` along the free coordinate."""
    x, y = point
    c, s = p.c, p.s
    if which == "x":
        return c, s * y, -s, c * y
    return s, c * x, c, -s * x


def rotated_l1_coord_min(p: RotatedL1Problem, point, which: str, prox_weight: float = 0.0) -> float:
    """Exact minimiser of ``f`` along one coordinate, optionally with a proximal term.

    Candidates are the kinks of the two absolute values and, with a proximal
    weight, the stationary point of every linear piece. Ties go to the
    candidate nearest the current value.
    """
    if which not in _AXES:
        raise ValueError(f"which must be 'x' or 'y', got {which!r}")
    if prox_weight < 0:
        raise ValueError("prox_weight must be nonnegative")
    current = float(point[_AXES[which]])
    if math.isinf(prox_weight):
        return current
    a1, b1, a2, b2 = _restriction(p, point, which)
    cands = [current]
    for a, b in ((a1, b1), (a2, b2)):
        if a != 0.0:
            cands.append(-b / a)
    if prox_weight > 0:
        for s1 in (-1.0, 1.0):
            for s2 in (-1.0, 1.0):
                cands.append(current - (s1 * a1 + 2.0 * s2 * a2) / prox_weight)

    def value(t):
        return abs(a1 * t + b1) + 2.0 * abs(a2 * t + b2) + 0.5 * prox_weight * (t - current) ** 2

    best = min(cands, key=lambda t: (value(t), abs(t - current)))
    # values equal up to rounding count as ties
    vb = value(best)
    close = [t for t in cands if value(t) <= vb + 1e-15 * max(1.0, abs(vb))]
    return float(min(close, key=lambda t: abs(t - current)))


def alternating_minimization(p: RotatedL1Problem, sweeps: int, prox_weight: float = 0.0) -> list[float]:
    """Run ``sweeps`` x-then-y sweeps; returns the objective after each sweep."""
    history = []
    for _ in range(sweeps):
        p.point[0] = rotated_l1_coord_min(p, p.point, "x", prox_weight)
        p.point[1] = rotated_l1_coord_min(p, p.point, "y", prox_weight)
        history.append(p.objective())
    return history

"""Subdifferential membership residuals.

``membership_residual(r, x, g)`` returns a nonnegative number that is zero
exactly when ``g`` lies in the subdifferential of ``r`` at ``x``. For the
separable kinds it is the sup-norm distance to the set; for total variation it
is the largest violation of the cumulative-sum certificate.
"""
from __future__ import annotations

import numpy as np

from .prox import Regularizer


def _l1(x, g, w):
    res = np.where(x != 0, np.abs(g - w * np.sign(x)), np.maximum(np.abs(g) - w, 0.0))
    return float(res.max(initial=0.0))


def _interval(x, g, lo, hi):
    if np.any(x < lo) or np.any(x > hi):
        return np.inf
    at_lo = x == lo
    at_hi = x == hi
    res = np.abs(g)
    # normal cone of [lo, hi]: g <= 0 at lo, g >= 0 at hi, anything if lo == hi
    res = np.where(at_lo & ~at_hi, np.maximum(g, 0.0), res)
    res = np.where(at_hi & ~at_lo, np.maximum(-g, 0.0), res)
    res = np.where(at_lo & at_hi, 0.0, res)
    return float(res.max(initial=0.0))


def _group_l2(x, g, w):
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return max(float(np.linalg.norm(g)) - w, 0.0)
    return float(np.abs(g - w * x / nx).max(initial=0.0))


def _tv(x, g, w, atol=0.0):
    # g = w * D^T s with s_k in sign(x[k+1] - x[k]); cumulative sums give -w * s_k
    if x.size <= 1:
        return float(np.abs(g).max(initial=0.0))
    c = np.cumsum(g)
    worst = abs(c[-1])
    if w == 0.0:
        return float(max(worst, np.abs(c[:-1]).max(initial=0.0)))
    s = -c[:-1] / w
    dx = np.diff(x)
    viol = np.where(dx > atol, np.abs(s - 1.0) * w,
                    np.where(dx < -atol, np.abs(s + 1.0) * w, np.maximum(np.abs(s) - 1.0, 0.0) * w))
    return float(max(worst, viol.max(initial=0.0)))


def membership_residual(r: Regularizer, x, g, atol: float = 0.0) -> float:
    """How far ``g`` is from ``partial r(x)``; ``atol`` treats near-equal TV neighbours as tied."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = np.atleast_1d(np.asarray(g, dtype=float))
    k = r.kind
    if k == "zero":
        return float(np.abs(g).max(initial=0.0))
    if k == "l1":
        return _l1(x, g, r.weight)
    if k == "group_l2":
        return _group_l2(x, g, r.weight)
    if k == "box":
        return _interval(x, g, r.lo, r.hi)
    if k == "nonneg":
        return _interval(x, g, 0.0, np.inf)
    if k == "tv1d":
        return _tv(x, g, r.weight, atol)
    if k == "quadratic":
        return float(np.abs(g - r.weight * x).max(initial=0.0))
    if k == "elastic_net":
        return _l1(x, g - r.quad * x, r.weight)
    raise ValueError(f"no subdifferential formula for {k!r}")

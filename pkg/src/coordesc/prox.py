"""Proximal operators for separable regularizers and summative compositions.

All operators evaluate ``argmin_x h(x) + 1/(2*t) ||x - y||^2`` for the
regularizer ``h`` and step ``t``. Inputs are copied, never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import IneligibleCompositionError, InvalidBoundsError, UnsupportedProxError

KINDS = ("zero", "l1", "group_l2", "box", "nonneg", "tv1d", "elastic_net", "quadratic")
ELIGIBILITY = ("homogeneous_plus_l2", "tv_plus_monotone", "scalar_abs_plus_smooth")


@dataclass(frozen=True)
class Regularizer:
    """Tagged description of a separable regularizer.

    ``weight`` is the multiplier (mu for l1, beta for group-l2 and TV, alpha
    for the l1 part of the elastic net, q for ``quadratic`` which is
    ``q/2 ||x||^2``). ``quad`` is the quadratic coefficient of the elastic net.
    ``lo``/``hi`` bound the box kind and may be infinite.
    """

    kind: str
    weight: float = 1.0
    lo: float = -math.inf
    hi: float = math.inf
    quad: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedProxError(f"unknown regularizer kind {self.kind!r}")
        if self.weight < 0 or self.quad < 0:
            raise ValueError("regularizer weights must be nonnegative")
        if self.kind == "box" and self.lo > self.hi:
            raise InvalidBoundsError(f"box bounds reversed: {self.lo} > {self.hi}")

    def value(self, x) -> float:
        """Extended-valued evaluation (``inf`` outside an indicator's domain)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = self.kind
        if k == "zero":
            return 0.0
        if k == "l1":
            return self.weight * float(np.abs(x).sum())
        if k == "group_l2":
            return self.weight * float(np.linalg.norm(x))
        if k == "box":
            return 0.0 if np.all((x >= self.lo) & (x <= self.hi)) else math.inf
        if k == "nonneg":
            return 0.0 if np.all(x >= 0) else math.inf
        if k == "tv1d":
            return self.weight * float(np.abs(np.diff(x)).sum())
        if k == "elastic_net":
            return self.weight * float(np.abs(x).sum()) + 0.5 * self.quad * float(x @ x)
        if k == "quadratic":
            return 0.5 * self.weight * float(x @ x)
        raise UnsupportedProxError(k)


def zero() -> Regularizer:
    return Regularizer("zero", 0.0)


def l1(weight: float = 1.0) -> Regularizer:
    return Regularizer("l1", weight)


def group_l2(weight: float = 1.0) -> Regularizer:
    return Regularizer("group_l2", weight)


def box(lo: float, hi: float) -> Regularizer:
    return Regularizer("box", 0.0, lo, hi)


def nonneg() -> Regularizer:
    return Regularizer("nonneg", 0.0)


def tv1d(weight: float = 1.0) -> Regularizer:
    return Regularizer("tv1d", weight)


def elastic_net(alpha: float = 1.0, quad: float = 1.0) -> Regularizer:
    return Regularizer("elastic_net", alpha, quad=quad)


def quadratic(weight: float = 1.0) -> Regularizer:
    return Regularizer("quadratic", weight)


def shrink(x, mu):
    """Soft thresholding ``sign(x) * max(|x| - mu, 0)``; scalar in, scalar out."""
    if mu < 0:
        raise ValueError("shrink threshold must be nonnegative")
    if np.ndim(x) == 0:
        x = float(x)
        if x > mu:
            return x - mu
        if x < -mu:
            return x + mu
        return 0.0
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - mu, 0.0)


def project_interval(x, lo, hi):
    if np.any(np.asarray(lo) > np.asarray(hi)):
        raise InvalidBoundsError(f"interval bounds reversed: {lo} > {hi}")
    if np.ndim(x) == 0 and np.ndim(lo) == 0 and np.ndim(hi) == 0:
        return min(max(float(x), lo), hi)
    return np.minimum(np.maximum(np.asarray(x, dtype=float), lo), hi)


def group_shrink(x, beta):
    """Prox of ``beta * ||x||_2``: scale ``x`` by ``max(0, 1 - beta/||x||)``."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    x = np.asarray(x, dtype=float)
    nrm = float(np.linalg.norm(x))
    if nrm <= beta or nrm == 0.0:
        return np.zeros_like(x)
    return x * ((nrm - beta) / nrm)


def prox_tv1d(y, beta):
    """Exact prox of ``beta * sum |x[i+1] - x[i]|``.

    Linear-time direct method (Condat 2013): sweep left to right keeping the
    admissible range ``[vmin, vmax]`` of the current segment value together
    with the running dual residuals, and emit a segment whenever the range
    would be violated.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if n <= 1 or beta == 0.0:
        return y.copy()
    lam = float(beta)
    out = np.empty(n)
    k = k0 = kplus = kminus = 0
    umin, umax = lam, -lam
    vmin, vmax = y[0] - lam, y[0] + lam
    while True:
        while k == n - 1:
            if umin < 0.0:
                out[k0:kminus + 1] = vmin
                k = k0 = kminus = kminus + 1
                vmin = y[k]
                umin = lam
                umax = vmin + umin - vmax
            elif umax > 0.0:
                out[k0:kplus + 1] = vmax
                k = k0 = kplus = kplus + 1
                vmax = y[k]
                umax = -lam
                umin = vmax + umax - vmin
            else:
                vmin += umin / (k - k0 + 1)
                out[k0:k + 1] = vmin
                return out
        umin += y[k + 1] - vmin
        if umin < -lam:
            out[k0:kminus + 1] = vmin
            k = k0 = kplus = kminus = kminus + 1
            vmin = y[k]
            vmax = vmin + 2 * lam
            umin, umax = lam, -lam
            continue
        umax += y[k + 1] - vmax
        if umax > lam:
            out[k0:kplus + 1] = vmax
            k = k0 = kplus = kminus = kplus + 1
            vmax = y[k]
            vmin = vmax - 2 * lam
            umin, umax = lam, -lam
            continue
        k += 1
        if umin >= lam:
            kminus = k
            vmin += (umin - lam) / (kminus - k0 + 1)
            umin = lam
        if umax <= -lam:
            kplus = k
            vmax += (umax + lam) / (kplus - k0 + 1)
            umax = -lam


def prox_elastic_net(y, alpha, quad):
    """Prox of ``alpha*|r| + quad/2 * r^2`` as ``shrink(y, alpha) / (1 + quad)``."""
    if alpha < 0 or quad < 0:
        raise ValueError("elastic net parameters must be nonnegative")
    return shrink(y, alpha) / (1.0 + quad)


def prox_apply(r: Regularizer, y, scale: float):
    """Evaluate ``prox_{scale * r}(y)``."""
    if scale <= 0:
        raise ValueError("prox scale must be positive")
    y = np.asarray(y, dtype=float)
    k = r.kind
    if k == "zero":
        return y.copy()
    if k == "l1":
        return np.asarray(shrink(y, scale * r.weight))
    if k == "group_l2":
        return group_shrink(y, scale * r.weight)
    if k == "box":
        return np.minimum(np.maximum(y, r.lo), r.hi)
    if k == "nonneg":
        return np.maximum(y, 0.0)
    if k == "tv1d":
        return prox_tv1d(np.atleast_1d(y), scale * r.weight).reshape(y.shape)
    if k == "elastic_net":
        return np.asarray(prox_elastic_net(y, scale * r.weight, scale * r.quad))
    if k == "quadratic":
        return y / (1.0 + scale * r.weight)
    raise UnsupportedProxError(f"no prox for kind {k!r}")


def _is_cone_box(r: Regularizer) -> bool:
    return r.kind == "box" and r.lo in (0.0, -math.inf) and r.hi in (0.0, math.inf)


def eligibility_check(first: Regularizer, second: Regularizer, eligibility: str) -> None:
    """Raise :class:`IneligibleCompositionError` unless the pair is structurally valid."""
    ok = False
    if eligibility == "homogeneous_plus_l2":
        ok = (first.kind in ("l1", "nonneg") or _is_cone_box(first)) and second.kind == "group_l2"
    elif eligibility == "tv_plus_monotone":
        ok = first.kind == "tv1d" and second.kind in ("l1", "group_l2", "box", "nonneg")
    elif eligibility == "scalar_abs_plus_smooth":
        ok = first.kind == "l1" and second.kind in ("quadratic", "zero")
    else:
        raise IneligibleCompositionError(f"unknown eligibility class {eligibility!r}")
    if not ok:
        raise IneligibleCompositionError(
            f"{first.kind} + {second.kind} is not a valid {eligibility} pair")


@dataclass(frozen=True)
class SummativePair:
    first: Regularizer
    second: Regularizer
    eligibility: str

    def __post_init__(self):
        eligibility_check(self.first, self.second, self.eligibility)

    def value(self, x) -> float:
        return self.first.value(x) + self.second.value(x)


def prox_summative(pair: SummativePair, y, scale: float = 1.0):
    """Prox of ``first + second`` computed as ``prox_second(prox_first(y))``."""
    eligibility_check(pair.first, pair.second, pair.eligibility)
    return prox_apply(pair.second, prox_apply(pair.first, y, scale), scale)

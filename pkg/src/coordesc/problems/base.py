"""Shared machinery for problem instances."""
from __future__ import annotations

import numpy as np

from ..errors import CacheError, UnsupportedSchemeError
from ..numeric import FlopCounter
from ..prox import Regularizer

# greedy rules that every nonsmooth application problem supplies scores for
GS_RULES = ("GS_s", "GS_r", "GS_q")


class CoordinateProblem:
    """Interface shared by every application problem.

    A problem owns its current point and whatever caches it maintains. The
    solver loop only needs :meth:`update`, :meth:`scores`, :meth:`objective`
    and :meth:`stationarity`; the generic update schemes additionally use the
    block accessors (:meth:`get_block`, :meth:`set_block`,
    :meth:`block_gradient`, :meth:`block_regularizer`).
    """

    n_blocks: int
    flops: FlopCounter

    # -- solver loop -------------------------------------------------------
    def objective(self, point=None) -> float:
        raise NotImplementedError

    def update(self, i: int) -> None:
        raise NotImplementedError

    def scores(self, rule: str) -> np.ndarray:
        raise UnsupportedSchemeError(f"{type(self).__name__} has no {rule} scores")

    def stationarity(self) -> float:
        raise NotImplementedError

    def block_lipschitz(self) -> np.ndarray:
        raise NotImplementedError

    # -- point access ------------------------------------------------------
    def get_point(self):
        raise NotImplementedError

    def set_point(self, point) -> None:
        raise NotImplementedError

    def get_block(self, i: int) -> np.ndarray:
        raise NotImplementedError

    def set_block(self, i: int, value) -> None:
        raise NotImplementedError

    def block_gradient(self, i: int, block=None) -> np.ndarray:
        raise UnsupportedSchemeError(f"{type(self).__name__} exposes no block gradient")

    def block_regularizer(self, i: int) -> Regularizer:
        raise UnsupportedSchemeError(f"{type(self).__name__} exposes no block regularizer")

    def block_argmin(self, i: int, prox_weight: float = 0.0) -> np.ndarray:
        raise UnsupportedSchemeError(f"{type(self).__name__} has no exact block minimizer")

    def cache_drift(self) -> float:
        """Relative mismatch between maintained and recomputed caches."""
        return 0.0

    def check_cache(self, rtol: float = 1e-8) -> None:
        drift = self.cache_drift()
        if not drift <= rtol:
            raise CacheError(f"cache drift {drift:.3e} exceeds {rtol:.1e}")


def rel_drift(kept, fresh) -> float:
    kept = np.asarray(kept, dtype=float)
    fresh = np.asarray(fresh, dtype=float)
    scale = 1.0 + float(np.abs(fresh).max(initial=0.0))
    return float(np.abs(kept - fresh).max(initial=0.0)) / scale


def l1_gs_scores(x, g, L, rule):
    """GS-s/GS-r/GS-q scores for ``f + ||x||_1`` given the smooth gradient ``g``.

    Shared by the LASSO and sparse logistic problems, whose score derivations
    differ only in how ``g`` is produced.
    """
    if rule == "GS_s":
        nz = x != 0
        return np.where(nz, np.abs(g + np.sign(x)), np.maximum(np.abs(g) - 1.0, 0.0))
    z = x - g / L
    step = np.sign(z) * np.maximum(np.abs(z) - 1.0 / L, 0.0)
    d = step - x
    if rule == "GS_r":
        return np.abs(d)
    if rule == "GS_q":
        return d * g + 0.5 * L * d * d + np.abs(x + d) - np.abs(x)
    raise UnsupportedSchemeError(f"unknown greedy rule {rule!r}")

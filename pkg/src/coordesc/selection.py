"""Index rules: cyclic and shuffled cycles, seeded sampling, greedy argmax."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigurationError, EmptyDomainError, InvalidDistributionError,
                     InvalidLipschitzError)

RULE_KINDS = ("cyclic", "shuffled_cyclic", "random", "greedy")
GREEDY_RULES = ("GS", "GSL", "MBI", "GS_s", "GS_r", "GS_q")
# rules whose score is a model value to be minimised rather than a magnitude
MIN_SENSE = {"MBI", "GS_q"}


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) so streams are reproducible per seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def trial_seed(base_seed: int, trial: int) -> int:
    return (int(base_seed) ^ int(trial)) & 0xFFFFFFFFFFFFFFFF


@dataclass
class IndexRuleState:
    """Mutable state of an index rule owned by one solve loop.

    ``draws`` counts generator draws so a stream position is identified by
    ``(rng_seed, draws)``.
    """

    kind: str
    s: int
    cursor: int = 0
    permutation: np.ndarray | None = None
    distribution: np.ndarray | None = None
    greedy_rule: str | None = None
    rng_seed: int = 0
    draws: int = 0
    _rng: np.random.Generator = field(default=None, repr=False)
    _cdf: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigurationError(f"unknown index rule kind {self.kind!r}")
        if self.s < 1:
            raise EmptyDomainError("index rule over an empty domain")
        self._rng = make_rng(self.rng_seed)
        if self.kind == "shuffled_cyclic" and self.permutation is None:
            self.permutation = self._rng.permutation(self.s)
            self.draws += 1
        if self.kind == "random":
            if self.distribution is None:
                self.distribution = np.full(self.s, 1.0 / self.s)
            self.distribution = np.asarray(self.distribution, dtype=float)
            _check_distribution(self.distribution)
            self._cdf = np.cumsum(self.distribution)
        if self.kind == "greedy" and self.greedy_rule not in GREEDY_RULES:
            raise ConfigurationError(f"unknown greedy rule {self.greedy_rule!r}")

    @property
    def label(self) -> str:
        return self.greedy_rule if self.kind == "greedy" else self.kind


def cyclic(s: int) -> IndexRuleState:
    return IndexRuleState("cyclic", s)


def shuffled(s: int, seed: int = 0) -> IndexRuleState:
    return IndexRuleState("shuffled_cyclic", s, rng_seed=seed)


def uniform(s: int, seed: int = 0) -> IndexRuleState:
    return IndexRuleState("random", s, rng_seed=seed)


def importance(L, alpha: float = 1.0, seed: int = 0) -> IndexRuleState:
    p = importance_distribution(L, alpha)
    return IndexRuleState("random", len(p), distribution=p, rng_seed=seed)


def greedy(s: int, rule: str) -> IndexRuleState:
    return IndexRuleState("greedy", s, greedy_rule=rule)


def next_cyclic(state: IndexRuleState, s: int | None = None) -> int:
    s = state.s if s is None else s
    if s < 1:
        raise EmptyDomainError("cyclic rule over an empty domain")
    i = state.cursor
    state.cursor = (state.cursor + 1) % s
    return i


def next_shuffled(state: IndexRuleState, s: int | None = None) -> int:
    s = state.s if s is None else s
    if s < 1:
        raise EmptyDomainError("shuffled rule over an empty domain")
    if state.permutation is None or len(state.permutation) != s:
        state.permutation = state._rng.permutation(s)
        state.draws += 1
        state.cursor = 0
    i = int(state.permutation[state.cursor])
    state.cursor += 1
    if state.cursor == s:
        state.cursor = 0
        state.permutation = state._rng.permutation(s)
        state.draws += 1
    return i


def _check_distribution(p: np.ndarray) -> None:
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistributionError("distribution must be a nonempty vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidDistributionError("distribution has negative or non-finite entries")
    if abs(p.sum() - 1.0) > 1e-12:
        raise InvalidDistributionError(f"distribution sums to {p.sum()!r}, not 1")


def importance_distribution(L, alpha: float) -> np.ndarray:
    """``p_j = L_j**alpha / sum_i L_i**alpha``."""
    L = np.asarray(L, dtype=float)
    if L.size == 0:
        raise EmptyDomainError("no Lipschitz constants given")
    if np.any(L <= 0):
        raise InvalidLipschitzError("Lipschitz constants must be positive")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    # normalise first so large constants and exponents do not overflow
    w = (L / L.max()) ** alpha
    return w / w.sum()


def sample_index(state: IndexRuleState) -> int:
    """Inverse-CDF draw from ``state.distribution``."""
    if state.kind != "random":
        raise ConfigurationError("sample_index needs a random rule")
    if state._cdf is None:
        _check_distribution(state.distribution)
        state._cdf = np.cumsum(state.distribution)
    u = state._rng.random()
    state.draws += 1
    j = int(np.searchsorted(state._cdf, u, side="right"))
    if j >= state.s:
        # cdf[-1] can fall a rounding error short of 1
        j = int(np.flatnonzero(state.distribution)[-1])
    return j


def greedy_argmax(scores, sense: str = "max") -> int:
    """Index of the largest (``sense='max'``) or smallest score, ties to the lowest index."""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise EmptyDomainError("greedy selection over no scores")
    if sense == "max":
        return int(np.argmax(scores))
    if sense == "min":
        return int(np.argmin(scores))
    raise ConfigurationError(f"sense must be 'max' or 'min', got {sense!r}")


def gsl_scores(grads, L) -> np.ndarray:
    """Lipschitz-scaled gradient norms ``|grad_j| / sqrt(L_j)``."""
    grads = np.asarray(grads, dtype=float)
    L = np.asarray(L, dtype=float)
    if grads.shape != L.shape:
        raise ValueError("gradient and Lipschitz vectors differ in length")
    if np.any(L <= 0):
        raise InvalidLipschitzError("Lipschitz constants must be positive")
    return np.abs(grads) / np.sqrt(L)


def essentially_cyclic_check(history, s: int, N: int) -> bool:
    """True iff every window of ``N`` consecutive indices covers ``range(s)``."""
    if N < s:
        raise ConfigurationError(f"window N={N} smaller than s={s} can never cover all indices")
    h = list(history)
    if len(h) < N:
        return False
    full = set(range(s))
    counts: dict[int, int] = {}
    for v in h[:N]:
        counts[v] = counts.get(v, 0) + 1
    if not full <= counts.keys():
        return False
    for k in range(N, len(h)):
        out = h[k - N]
        counts[out] -= 1
        if counts[out] == 0:
            del counts[out]
        counts[h[k]] = counts.get(h[k], 0) + 1
        if not full <= counts.keys():
            return False
    return True


def next_index(state: IndexRuleState, problem=None) -> int:
    """Draw the next index; greedy rules ask ``problem.scores(rule)``."""
    if state.kind == "cyclic":
        return next_cyclic(state)
    if state.kind == "shuffled_cyclic":
        return next_shuffled(state)
    if state.kind == "random":
        return sample_index(state)
    rule = state.greedy_rule
    return greedy_argmax(problem.scores(rule), "min" if rule in MIN_SENSE else "max")


def make_rule(name: str, s: int, seed: int = 0, lipschitz=None, alpha: float = 1.0) -> IndexRuleState:
    """Build a rule from a CLI-style name.

    Names: ``cyclic``, ``shuffled``, ``random`` (uniform), ``importance``
    (needs ``lipschitz``), or a greedy rule name such as ``GS_q``
    (``gs-q`` is accepted too).
    """
    key = name.strip()
    low = key.lower().replace("-", "_")
    if low == "cyclic":
        return cyclic(s)
    if low in ("shuffled", "shuffled_cyclic"):
        return shuffled(s, seed)
    if low in ("random", "uniform"):
        return uniform(s, seed)
    if low == "importance":
        if lipschitz is None:
            raise ConfigurationError("importance sampling needs Lipschitz constants")
        return importance(lipschitz, alpha, seed)
    canon = {r.lower(): r for r in GREEDY_RULES}
    if low in canon:
        return greedy(s, canon[low])
    raise ConfigurationError(f"unknown index rule {name!r}")

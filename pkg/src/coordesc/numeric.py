"""Block partitions, spectral norm estimation and flop accounting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidPartitionError, UndefinedRatioError

FLOP_CATEGORIES = ("matvec", "vecvec", "scalar", "transcendental", "prox")


@dataclass(frozen=True)
class BlockPartition:
    """Contiguous split of ``range(total)`` into nonempty blocks.

    ``boundaries`` holds ``s + 1`` strictly increasing offsets starting at 0
    and ending at ``total``; block ``i`` is ``range(boundaries[i],
    boundaries[i + 1])``.
    """

    total: int
    boundaries: tuple[int, ...]

    @property
    def n_blocks(self) -> int:
        return len(self.boundaries) - 1

    def block(self, i: int) -> slice:
        return slice(self.boundaries[i], self.boundaries[i + 1])

    def size(self, i: int) -> int:
        return self.boundaries[i + 1] - self.boundaries[i]

    def indices(self, i: int) -> list[int]:
        return list(range(self.boundaries[i], self.boundaries[i + 1]))

    def blocks(self) -> list[list[int]]:
        return [self.indices(i) for i in range(self.n_blocks)]

    def __len__(self) -> int:
        return self.n_blocks


def make_block_partition(n: int, s: int) -> BlockPartition:
    """Split ``n`` variables into ``s`` contiguous blocks.

    Sizes differ by at most one and the leading blocks absorb the remainder,
    so ``(5, 2)`` gives ``{0, 1, 2}, {3, 4}``.
    """
    if s < 1 or s > n:
        raise InvalidPartitionError(f"cannot split {n} variables into {s} nonempty blocks")
    base, extra = divmod(n, s)
    bounds = [0]
    for i in range(s):
        bounds.append(bounds[-1] + base + (1 if i < extra else 0))
    return BlockPartition(total=n, boundaries=tuple(bounds))


#: below this size the exact dense eigen-solver is used instead of power iteration
EXACT_SPECTRAL_LIMIT = 2000


def spectral_norm_sq(A, iters: int = 200, tol: float = 1e-10) -> float:
    """``||A||_2^2``, the largest eigenvalue of ``A^T A``.

    Exact (symmetric eigen-solver on the smaller Gram matrix) when the
    smaller dimension is at most ``EXACT_SPECTRAL_LIMIT``; otherwise power
    iteration from the all-ones vector, which can underestimate when the top
    two singular values are close.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if not np.any(A):
        return 0.0
    if min(A.shape) <= EXACT_SPECTRAL_LIMIT:
        G = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
        return float(np.linalg.eigvalsh(G)[-1])
    v = np.ones(A.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start vector in the null space; fall back to the heaviest column
            v = np.zeros(A.shape[1])
            v[np.argmax(np.sum(A * A, axis=0))] = 1.0
            continue
        new = float(v @ w)
        v = w / nw
        if abs(new - est) <= tol * max(new, 1e-300):
            est = new
            break
        est = new
    Av = A @ v
    return max(est, float(Av @ Av))


@dataclass
class FlopCounter:
    """Operation tallies at the level of whole vector/matrix operations.

    A ``p x n`` mat-vec counts ``p * (2n - 1)``; a length-``n`` dot product
    ``2n - 1``; an axpy ``2n``.
    """

    tallies: dict = field(default_factory=lambda: {c: 0 for c in FLOP_CATEGORIES})

    def add(self, category: str, count: int) -> None:
        if category not in self.tallies:
            raise KeyError(f"unknown flop category {category!r}")
        if count < 0:
            raise ValueError("flop counts are nonnegative")
        self.tallies[category] += int(count)

    # shorthands for the common shapes
    def matvec(self, rows: int, cols: int) -> None:
        self.add("matvec", rows * max(2 * cols - 1, 0))

    def dot(self, n: int) -> None:
        self.add("vecvec", max(2 * n - 1, 0))

    def axpy(self, n: int) -> None:
        self.add("vecvec", 2 * n)

    def elementwise(self, n: int, ops: int = 1) -> None:
        self.add("vecvec", n * ops)

    def scalar(self, ops: int = 1) -> None:
        self.add("scalar", ops)

    def transcendental(self, n: int) -> None:
        self.add("transcendental", n)

    def prox(self, n: int) -> None:
        self.add("prox", n)

    @property
    def total(self) -> int:
        return sum(self.tallies.values())

    def reset(self) -> None:
        for c in self.tallies:
            self.tallies[c] = 0

    def copy(self) -> "FlopCounter":
        return FlopCounter(dict(self.tallies))

    def __sub__(self, other: "FlopCounter") -> "FlopCounter":
        return FlopCounter({c: self.tallies[c] - other.tallies[c] for c in self.tallies})


def cf_ratio(counter_coord: FlopCounter, counter_full: FlopCounter) -> float:
    """Coordinate-update flops over full-update flops."""
    full = counter_full.total
    if full <= 0:
        raise UndefinedRatioError("full-update flop count is zero")
    return counter_coord.total / full

"""Choosing boundaries: greedy insertion, dynamic programming, iterative refinement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .scoring import Scorer, validate_segmentation


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class Segmentation:
    """Boundaries ``s_1 < ... < s_K = N``; segment k holds elements ``s_{k-1} <= i < s_k``."""

    boundaries: tuple[int, ...]
    n_elements: int

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        try:
            validate_segmentation(self.boundaries, self.n_elements)
        except ValueError as exc:
            raise SplitError(str(exc)) from None

    @property
    def k(self) -> int:
        return len(self.boundaries)

    def segments(self):
        starts = (0,) + self.boundaries[:-1]
        return list(zip(starts, self.boundaries))

    def labels(self) -> np.ndarray:
        """Segment id of every element."""
        out = np.empty(self.n_elements, dtype=np.int64)
        for idx, (a, b) in enumerate(self.segments()):
            out[a:b] = idx
        return out

    @classmethod
    def from_lengths(cls, lengths) -> "Segmentation":
        b = np.cumsum(lengths)
        return cls(tuple(int(x) for x in b), int(b[-1]))


@dataclass(frozen=True)
class SplitResult:
    segmentation: Segmentation
    cost: float
    iterations_used: int = 0
    converged: bool = True


def _check_k(N, K):
    if N < 1:
        raise SplitError("need at least one element")
    if not 1 <= K <= N:
        raise SplitError(f"K={K} must lie in [1, N={N}]")


def _result(scorer, bounds, iters=0, converged=True):
    seg = Segmentation(tuple(int(b) for b in bounds), scorer.n)
    return SplitResult(seg, scorer.cost(seg.boundaries), iters, converged)


def greedy_split(scorer: Scorer, N: int | None = None, K: int = 1) -> SplitResult:
    """Insert ``K - 1`` boundaries one at a time, each the best available."""
    N = scorer.n if N is None else N
    if N != scorer.n:
        raise SplitError(f"scorer covers {scorer.n} elements, asked for {N}")
    _check_k(N, K)
    bounds = kernels.greedy_boundaries(*scorer.arrays(), N, K)
    return _result(scorer, bounds)


def dp_split(scorer: Scorer, N: int | None = None, K: int = 1) -> SplitResult:
    """Best segmentation into ``K`` pieces by dynamic programming over prefixes.

    Optimal for additive scalar scorers. For the C99 ratio key the recurrence is
    applied as written, which is a heuristic there.
    """
    N = scorer.n if N is None else N
    if N != scorer.n:
        raise SplitError(f"scorer covers {scorer.n} elements, asked for {N}")
    _check_k(N, K)
    back = kernels.dp_backpointers(*scorer.arrays(), N, K)
    bounds = [N]
    n = N
    for k in range(K, 1, -1):
        n = int(back[k, n])
        bounds.append(n)
    return _result(scorer, bounds[::-1])


def refine(scorer: Scorer, start, max_iters: int = 20) -> SplitResult:
    """Move each interior boundary to its best spot between its neighbours.

    Sweeps left to right, applying moves immediately, until a sweep moves
    nothing or ``max_iters`` sweeps have run.
    """
    if isinstance(start, SplitResult):
        start = start.segmentation
    if not isinstance(start, Segmentation):
        start = Segmentation(tuple(start), scorer.n)
    if start.n_elements != scorer.n:
        raise SplitError("start segmentation does not match the scorer")
    if max_iters < 0:
        raise SplitError("max_iters must be >= 0")
    bounds, iters, converged = kernels.refine_boundaries(
        *scorer.arrays(), np.array(start.boundaries, dtype=np.int64), max_iters
    )
    return _result(scorer, bounds, int(iters), bool(converged))


def split(scorer: Scorer, K: int, method: str = "dp", max_iters: int = 20) -> SplitResult:
    if method == "greedy":
        return greedy_split(scorer, scorer.n, K)
    if method == "dp":
        return dp_split(scorer, scorer.n, K)
    if method == "refine":
        _check_k(scorer.n, K)
        start = kernels.greedy_boundaries(*scorer.arrays(), scorer.n, K)
        bounds, iters, converged = kernels.refine_boundaries(*scorer.arrays(), start, max_iters)
        return _result(scorer, bounds, int(iters), bool(converged))
    raise SplitError(f"unknown splitter {method!r}")


def warm_up():
    """Run every splitter once per scorer kind so JIT compilation is not timed later."""
    from .scoring import c99_scorer, cvs_scorer, euclidean_scorer

    V = np.random.default_rng(0).normal(size=(8, 3))
    for scorer in (euclidean_scorer(V), cvs_scorer(V), c99_scorer(V, r=3)):
        for method in ("greedy", "dp", "refine"):
            split(scorer, 3, method)

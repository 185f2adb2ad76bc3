"""Segment scores, their aggregation, and the scalar key that splitters minimize.

Three families are provided: C99 (ranked cosine similarity, a ``(beta, alpha)``
pair per segment), Euclidean (sum of squared deviations from the segment
mean) and CVS (content-vector log-likelihood proxy). All are arranged so that
a lower key is better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import C99, CVS, EUCLIDEAN

KIND_NAMES = {"euclidean": EUCLIDEAN, "cvs": CVS, "c99": C99}


class ScoringError(ValueError):
    pass


def cosine_matrix(V) -> np.ndarray:
    """Pairwise cosine similarity of the rows of ``V``."""
    V = np.asarray(V, dtype=float)
    norms = np.linalg.norm(V, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ScoringError(f"element {int(zero[0])} has a zero vector; cosine undefined")
    U = V / norms[:, None]
    A = U @ U.T
    A = 0.5 * (A + A.T)
    np.fill_diagonal(A, 1.0)
    return A


def rank_transform(A, r: int = 11, mode: str = "corrected") -> np.ndarray:
    """Replace each entry by the fraction of its ``r x r`` neighbours it strictly exceeds.

    ``mode="corrected"`` compares against every in-bounds neighbour except the
    centre and normalizes by that count. ``mode="literal"`` skips the centre's
    whole row and column in the count but still normalizes by all in-bounds
    neighbours, so its values never reach 1.
    """
    if r < 3 or r % 2 == 0:
        raise ScoringError(f"rank kernel size must be odd and >= 3, got {r}")
    if mode not in ("corrected", "literal"):
        raise ScoringError(f"unknown rank mode {mode!r}")
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ScoringError("rank transform needs a square matrix")
    return kernels.rank_transform_kernel(A, r, mode == "literal")


def summed_area(R) -> np.ndarray:
    """``(N+1, N+1)`` table with ``S[a, b] = R[:a, :b].sum()``."""
    R = np.asarray(R, dtype=float)
    S = np.zeros((R.shape[0] + 1, R.shape[1] + 1))
    S[1:, 1:] = R.cumsum(axis=0).cumsum(axis=1)
    return S


def prefix_sums(V):
    V = np.asarray(V, dtype=float)
    P = np.zeros((V.shape[0] + 1, V.shape[1]))
    np.cumsum(V, axis=0, out=P[1:])
    Q = np.zeros(V.shape[0] + 1)
    np.cumsum(np.einsum("ij,ij->i", V, V), out=Q[1:])
    return P, Q


@dataclass(frozen=True, eq=False)
class Scorer:
    """Immutable, precomputed scorer over ``n`` elements.

    ``segment_score(i, j)`` scores elements ``i..j-1``; values combine with
    ``aggregate`` and ``key`` maps an aggregate to the cost to minimize.
    """

    kind: int
    n: int
    P: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    rank_matrix: np.ndarray | None = None

    @property
    def name(self) -> str:
        return {v: k for k, v in KIND_NAMES.items()}[self.kind]

    @property
    def is_pair(self) -> bool:
        return self.kind == C99

    def _check(self, i, j):
        if not 0 <= i < j <= self.n:
            raise ScoringError(f"segment ({i}, {j}) outside 0 <= i < j <= {self.n}")

    def segment_score(self, i: int, j: int):
        self._check(i, j)
        v0, v1 = kernels.span_values(self.kind, self.P, self.Q, self.A, [i], [j])
        if self.is_pair:
            return float(v0[0]), float(v1[0])
        return float(v0[0])

    def aggregate(self, a, b):
        if self.is_pair:
            return a[0] + b[0], a[1] + b[1]
        return a + b

    def key(self, value) -> float:
        if self.is_pair:
            beta, alpha = value
            return -beta / alpha
        return float(value)

    def cost(self, boundaries) -> float:
        """Key of the aggregated score of a segmentation given by its boundaries."""
        b = np.asarray(boundaries, dtype=np.int64)
        starts = np.concatenate(([0], b[:-1]))
        v0, v1 = kernels.span_values(self.kind, self.P, self.Q, self.A, starts, b)
        return float(kernels.key_values(self.kind, v0.sum(), v1.sum()))

    def arrays(self):
        return self.kind, self.P, self.Q, self.A


_EMPTY2 = np.zeros((1, 1))
_EMPTY1 = np.zeros(1)


def c99_scorer(V, r: int = 11, use_rank: bool = True, rank_mode: str = "corrected") -> Scorer:
    A = cosine_matrix(V)
    R = rank_transform(A, r, rank_mode) if use_rank else A
    return Scorer(C99, R.shape[0], _EMPTY2, _EMPTY1, summed_area(R), R)


def euclidean_scorer(V) -> Scorer:
    V = np.asarray(V, dtype=float)
    P, Q = prefix_sums(V)
    return Scorer(EUCLIDEAN, V.shape[0], P, Q, _EMPTY2)


def cvs_scorer(V) -> Scorer:
    V = np.asarray(V, dtype=float)
    P, _ = prefix_sums(V)
    return Scorer(CVS, V.shape[0], P, _EMPTY1, _EMPTY2)


def make_scorer(name: str, V, r: int = 11, use_rank: bool = True, rank_mode: str = "corrected") -> Scorer:
    if name == "c99":
        return c99_scorer(V, r, use_rank, rank_mode)
    if name == "euclidean":
        return euclidean_scorer(V)
    if name == "cvs":
        return cvs_scorer(V)
    raise ScoringError(f"unknown scorer {name!r}")


def content_vector(V, i: int, j: int) -> np.ndarray:
    """Maximum-likelihood content vector of rows ``i..j-1``: signs of the sum over sqrt(D).

    A zero component sum counts as positive.
    """
    V = np.asarray(V, dtype=float)
    if not 0 <= i < j <= V.shape[0]:
        raise ScoringError(f"segment ({i}, {j}) outside 0 <= i < j <= {V.shape[0]}")
    total = V[i:j].sum(axis=0)
    return np.where(total >= 0, 1.0, -1.0) / np.sqrt(V.shape[1])


def validate_segmentation(boundaries, n: int):
    b = list(boundaries)
    if not b or b[-1] != n:
        raise ScoringError(f"segmentation must end at N={n}")
    if b[0] < 1 or any(y <= x for x, y in zip(b, b[1:])):
        raise ScoringError("boundaries must be strictly increasing and >= 1")


def total_cost(scorer: Scorer, boundaries) -> float:
    """Cost of a segmentation: key of the aggregate of its segment scores."""
    validate_segmentation(boundaries, scorer.n)
    return scorer.cost(boundaries)

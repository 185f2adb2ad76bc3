"""Pk and WindowDiff agreement between a reference and a hypothesis segmentation.

Probes pair the 0-based elements ``(a, a + k)`` for ``a = 0 .. N-k-1``. A
boundary ``s`` lies inside that probe when ``a < s <= a + k``; the terminal
boundary ``N`` never does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class EvalReport:
    pk: float
    wd: float
    k_used: int
    n_probes: int


def _bounds(seg):
    if hasattr(seg, "boundaries"):
        return tuple(seg.boundaries), seg.n_elements
    b = tuple(seg)
    return b, b[-1]


def default_k(ref) -> int:
    """One less than the nearest integer to half the mean reference segment length.

    Halves round away from zero; the result is at least 1.
    """
    b, n = _bounds(ref)
    K = len(b)
    return max(1, (n + K) // (2 * K) - 1)


def _window_counts(bounds, n, k):
    """Boundaries inside each probe window ``(a, a + k]`` for every probe start."""
    marks = np.zeros(n + 1, dtype=np.int64)
    for s in bounds:
        if s < n:
            marks[s] = 1
    c = np.concatenate(([0], np.cumsum(marks)))
    a = np.arange(n - k)
    return c[a + k + 1] - c[a + 1]


def _prepare(ref, hyp, k):
    rb, n = _bounds(ref)
    hb, nh = _bounds(hyp)
    if n != nh:
        raise MetricError(f"reference has {n} elements, hypothesis {nh}")
    if k is None:
        k = default_k(ref)
    if k < 1:
        raise MetricError("k must be >= 1")
    if n - k < 1:
        raise MetricError(f"no probes: N={n}, k={k}")
    return rb, hb, n, k


def pk(ref, hyp, k: int | None = None) -> float:
    rb, hb, n, k = _prepare(ref, hyp, k)
    r = _window_counts(rb, n, k) > 0
    h = _window_counts(hb, n, k) > 0
    return float(np.mean(r != h))


def window_diff(ref, hyp, k: int | None = None) -> float:
    rb, hb, n, k = _prepare(ref, hyp, k)
    return float(np.mean(_window_counts(rb, n, k) != _window_counts(hb, n, k)))


def evaluate(ref, hyp, k: int | None = None) -> EvalReport:
    rb, hb, n, k = _prepare(ref, hyp, k)
    return EvalReport(pk(ref, hyp, k), window_diff(ref, hyp, k), k, n - k)

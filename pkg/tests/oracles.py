"""Slow, obviously-correct reference implementations used as test oracles.

None of these share code with the package: they work from labels, explicit
loops and direct definitions instead of prefix sums or window counts.
"""

import itertools
import math

import numpy as np


def labels(boundaries):
    out = []
    prev = 0
    for idx, b in enumerate(boundaries):
        out.extend([idx] * (b - prev))
        prev = b
    return out


def brute_pk(ref, hyp, k):
    """Fraction of probes (a, a+k) where same-segment membership differs."""
    lr, lh = labels(ref), labels(hyp)
    n = len(lr)
    probes = [(lr[a] == lr[a + k]) != (lh[a] == lh[a + k]) for a in range(n - k)]
    return sum(probes) / len(probes)


def brute_wd(ref, hyp, k):
    """Fraction of windows whose count of boundaries s with a < s <= a+k differs."""
    n = ref[-1]
    inner_r = [s for s in ref if s < n]
    inner_h = [s for s in hyp if s < n]
    bad = 0
    for a in range(n - k):
        cr = sum(1 for s in inner_r if a < s <= a + k)
        ch = sum(1 for s in inner_h if a < s <= a + k)
        bad += cr != ch
    return bad / (n - k)


def brute_default_k(ref):
    n, K = ref[-1], len(ref)
    half = n / K / 2
    nearest = math.floor(half + 0.5)  # halves away from zero for positive values
    return max(1, nearest - 1)


def all_segmentations(n, K):
    for cuts in itertools.combinations(range(1, n), K - 1):
        yield cuts + (n,)


def euclidean_direct(V, i, j):
    seg = np.asarray(V[i:j], dtype=float)
    return float(((seg - seg.mean(axis=0)) ** 2).sum())


def cvs_direct(V, i, j):
    """Negated max over hypercube corners of the summed dot products."""
    V = np.asarray(V, dtype=float)
    D = V.shape[1]
    total = V[i:j].sum(axis=0)
    if D <= 10:
        best = max(float(total @ (np.array(c) / math.sqrt(D)))
                   for c in itertools.product((-1.0, 1.0), repeat=D))
    else:
        best = float(np.abs(total).sum() / math.sqrt(D))
    return -best


def rank_direct(A, r, literal=False):
    """Per-entry loop over the r x r block, skipping out-of-bounds cells."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    h = r // 2
    out = np.zeros_like(A)
    for i in range(n):
        for j in range(n):
            smaller = total = 0
            for l in range(i - h, i + h + 1):
                for m in range(j - h, j + h + 1):
                    if not (0 <= l < n and 0 <= m < n) or (l, m) == (i, j):
                        continue
                    total += 1
                    if literal and (l == i or m == j):
                        continue
                    smaller += A[i, j] > A[l, m]
            out[i, j] = smaller / total if total else 0.0
    return out


def c99_direct(R, boundaries):
    beta = alpha = 0.0
    prev = 0
    for b in boundaries:
        beta += float(R[prev:b, prev:b].sum())
        alpha += (b - prev) ** 2
        prev = b
    return -beta / alpha


def segmentation_cost(score, boundaries):
    """Additive cost from a per-segment score callable."""
    prev = 0
    total = 0.0
    for b in boundaries:
        total += score(prev, b)
        prev = b
    return total


def exhaustive_best(score, n, K):
    costs = {seg: segmentation_cost(score, seg) for seg in all_segmentations(n, K)}
    best = min(costs.values())
    winners = [s for s, c in costs.items() if c == best]
    return best, winners, costs

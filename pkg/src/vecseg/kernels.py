"""Inner loops of scoring and splitting.

Every kernel exists twice: an explicit-loop version compiled with numba, and a
vectorized numpy version. ``USE_NUMBA`` (see ``_jit``) decides which one the
public names point at; both stay importable for benchmarking and tests.

Scorers are passed as plain arrays so the loops never touch Python objects:

* ``kind``: EUCLIDEAN, CVS or C99
* ``P``: ``(N+1, D)`` prefix sums of element rows (EUCLIDEAN, CVS)
* ``Q``: ``(N+1,)`` prefix sums of squared row norms (EUCLIDEAN)
* ``A``: ``(N+1, N+1)`` summed-area table of the rank matrix (C99)

A segment value is a pair ``(v0, v1)``; scalar scorers leave ``v1 = 0``.
Aggregation is componentwise addition; the key is ``v0`` for scalar scorers
and ``-v0 / v1`` for C99. Lower keys win and ties go to the leftmost index.
"""

import numpy as np

from ._jit import USE_NUMBA, njit

EUCLIDEAN = 0
CVS = 1
C99 = 2


# --------------------------------------------------------------------- loops

@njit
def _span(kind, P, Q, A, i, j):
    if kind == C99:
        L = j - i
        return A[j, j] - A[i, j] - A[j, i] + A[i, i], float(L * L)
    D = P.shape[1]
    s = 0.0
    if kind == CVS:
        for d in range(D):
            s += abs(P[j, d] - P[i, d])
        return -s / np.sqrt(D), 0.0
    for d in range(D):
        x = P[j, d] - P[i, d]
        s += x * x
    v = Q[j] - Q[i] - s / (j - i)
    # a lone element deviates from nothing; keep prefix-sum rounding out of it
    if v < 0.0 or j - i == 1:
        v = 0.0
    return v, 0.0


@njit
def _key(kind, v0, v1):
    if kind == C99:
        return -v0 / v1
    return v0


@njit
def _dp_loop(kind, P, Q, A, N, K):
    S0 = np.full((K + 1, N + 1), np.inf)
    S1 = np.zeros((K + 1, N + 1))
    back = np.full((K + 1, N + 1), -1, dtype=np.int64)
    c0 = np.empty(N + 1)
    c1 = np.empty(N + 1)
    for n in range(1, N + 1):
        kmax = min(n, K)
        if n < N:
            kmax = min(kmax, K - 1)
        kmin = K if n == N else 1
        if kmin > kmax:
            continue
        lmin = 0 if kmin == 1 else kmin - 1
        for l in range(lmin, n):
            c0[l], c1[l] = _span(kind, P, Q, A, l, n)
        for k in range(kmin, kmax + 1):
            if k == 1:
                S0[1, n] = c0[0]
                S1[1, n] = c1[0]
                back[1, n] = 0
                continue
            best = np.inf
            arg = -1
            b0 = 0.0
            b1 = 0.0
            for l in range(k - 1, n):
                if back[k - 1, l] < 0:
                    continue
                v0 = S0[k - 1, l] + c0[l]
                v1 = S1[k - 1, l] + c1[l]
                key = _key(kind, v0, v1)
                if key < best:
                    best = key
                    arg = l
                    b0 = v0
                    b1 = v1
            S0[k, n] = b0
            S1[k, n] = b1
            back[k, n] = arg
    return back


@njit
def _greedy_loop(kind, P, Q, A, N, K):
    # left[i] = score(a, i) and right[i] = score(i, b) for the segment (a, b)
    # holding i; inserting a boundary only invalidates one side of each.
    isb = np.zeros(N + 1, dtype=np.bool_)
    isb[0] = True
    isb[N] = True
    t0, t1 = _span(kind, P, Q, A, 0, N)
    L0 = np.zeros(N + 1)
    L1 = np.zeros(N + 1)
    R0 = np.zeros(N + 1)
    R1 = np.zeros(N + 1)
    d0 = np.zeros(N + 1)
    d1 = np.zeros(N + 1)
    for i in range(1, N):
        L0[i], L1[i] = _span(kind, P, Q, A, 0, i)
        R0[i], R1[i] = _span(kind, P, Q, A, i, N)
        d0[i] = L0[i] + R0[i] - t0
        d1[i] = L1[i] + R1[i] - t1
    for _ in range(K - 1):
        best = np.inf
        arg = -1
        for i in range(1, N):
            if isb[i]:
                continue
            key = _key(kind, t0 + d0[i], t1 + d1[i])
            if key < best:
                best = key
                arg = i
        if arg < 0:
            break
        t0 += d0[arg]
        t1 += d1[arg]
        isb[arg] = True
        a = arg - 1
        while not isb[a]:
            a -= 1
        b = arg + 1
        while not isb[b]:
            b += 1
        wl0, wl1 = L0[arg], L1[arg]
        wr0, wr1 = R0[arg], R1[arg]
        for i in range(a + 1, arg):
            R0[i], R1[i] = _span(kind, P, Q, A, i, arg)
            d0[i] = L0[i] + R0[i] - wl0
            d1[i] = L1[i] + R1[i] - wl1
        for i in range(arg + 1, b):
            L0[i], L1[i] = _span(kind, P, Q, A, arg, i)
            d0[i] = L0[i] + R0[i] - wr0
            d1[i] = L1[i] + R1[i] - wr1
    out = np.empty(K, dtype=np.int64)
    c = 0
    for i in range(1, N + 1):
        if isb[i]:
            out[c] = i
            c += 1
    return out[:c]


@njit
def _refine_loop(kind, P, Q, A, bounds, max_iters):
    s = bounds.copy()
    K = s.shape[0]
    if K == 1:
        return s, 0, True
    scalar = kind != C99
    last_lo = np.full(K, -1, dtype=np.int64)
    last_hi = np.full(K, -1, dtype=np.int64)
    iters = 0
    converged = False
    while iters < max_iters:
        iters += 1
        moved = False
        for k in range(K - 1):
            lo = 0 if k == 0 else s[k - 1]
            hi = s[k + 1]
            # scalar costs: optimum depends only on the two fixed neighbours
            if scalar and last_lo[k] == lo and last_hi[k] == hi:
                continue
            r0 = 0.0
            r1 = 0.0
            if not scalar:
                prev = 0
                for m in range(K):
                    if m != k and m != k + 1:
                        x0, x1 = _span(kind, P, Q, A, prev, s[m])
                        r0 += x0
                        r1 += x1
                    prev = s[m]
            best = np.inf
            arg = s[k]
            for l in range(lo + 1, hi):
                x0, x1 = _span(kind, P, Q, A, lo, l)
                y0, y1 = _span(kind, P, Q, A, l, hi)
                key = _key(kind, r0 + x0 + y0, r1 + x1 + y1)
                if key < best:
                    best = key
                    arg = l
            last_lo[k] = lo
            last_hi[k] = hi
            if arg != s[k]:
                s[k] = arg
                moved = True
        if not moved:
            converged = True
            break
    return s, iters, converged


@njit
def _rank_loop(A, r, literal):
    N = A.shape[0]
    h = r // 2
    R = np.zeros((N, N))
    for i in range(N):
        for j in range(N):
            lo_l = max(0, i - h)
            hi_l = min(N, i + h + 1)
            lo_m = max(0, j - h)
            hi_m = min(N, j + h + 1)
            cnt = 0
            tot = 0
            a = A[i, j]
            for l in range(lo_l, hi_l):
                for m in range(lo_m, hi_m):
                    if l == i and m == j:
                        continue
                    tot += 1
                    if literal and (l == i or m == j):
                        continue
                    if a > A[l, m]:
                        cnt += 1
            if tot > 0:
                R[i, j] = cnt / tot
    return R


# --------------------------------------------------------------------- numpy

def span_values(kind, P, Q, A, i, j):
    """Vectorized segment values for index arrays ``i < j``."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if kind == C99:
        L = (j - i).astype(float)
        return A[j, j] - A[i, j] - A[j, i] + A[i, i], L * L
    diff = P[j] - P[i]
    if kind == CVS:
        return -np.abs(diff).sum(axis=-1) / np.sqrt(P.shape[1]), np.zeros(i.shape)
    v = Q[j] - Q[i] - (diff * diff).sum(axis=-1) / (j - i)
    return np.where(j - i == 1, 0.0, np.maximum(v, 0.0)), np.zeros(i.shape)


def key_values(kind, v0, v1):
    if kind == C99:
        # masked-out candidates may carry alpha == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            return -v0 / v1
    return v0


def _dp_numpy(kind, P, Q, A, N, K):
    S0 = np.full((K + 1, N + 1), np.inf)
    S1 = np.zeros((K + 1, N + 1))
    back = np.full((K + 1, N + 1), -1, dtype=np.int64)
    for n in range(1, N + 1):
        kmax = min(n, K) if n == N else min(n, K - 1)
        kmin = K if n == N else 1
        if kmin > kmax:
            continue
        ls = np.arange(n)
        c0, c1 = span_values(kind, P, Q, A, ls, np.full(n, n))
        for k in range(kmin, kmax + 1):
            if k == 1:
                S0[1, n], S1[1, n], back[1, n] = c0[0], c1[0], 0
                continue
            cand = np.arange(k - 1, n)
            ok = back[k - 1, cand] >= 0
            if not ok.any():
                continue
            cand = cand[ok]
            v0 = S0[k - 1, cand] + c0[cand]
            v1 = S1[k - 1, cand] + c1[cand]
            best = int(np.argmin(key_values(kind, v0, v1)))
            S0[k, n], S1[k, n], back[k, n] = v0[best], v1[best], cand[best]
    return back


def _greedy_numpy(kind, P, Q, A, N, K):
    isb = np.zeros(N + 1, dtype=bool)
    isb[[0, N]] = True
    t0, t1 = (float(x[0]) for x in span_values(kind, P, Q, A, np.array([0]), np.array([N])))
    inner = np.arange(1, N)
    L0 = np.zeros(N + 1)
    L1 = np.zeros(N + 1)
    R0 = np.zeros(N + 1)
    R1 = np.zeros(N + 1)
    L0[inner], L1[inner] = span_values(kind, P, Q, A, np.zeros_like(inner), inner)
    R0[inner], R1[inner] = span_values(kind, P, Q, A, inner, np.full_like(inner, N))
    d0 = L0 + R0 - t0
    d1 = L1 + R1 - t1
    for _ in range(K - 1):
        keys = key_values(kind, t0 + d0, t1 + d1)
        keys[isb] = np.inf
        if not np.isfinite(keys).any():
            break
        arg = int(np.argmin(keys))
        t0 += d0[arg]
        t1 += d1[arg]
        isb[arg] = True
        bpos = np.flatnonzero(isb)
        at = int(np.searchsorted(bpos, arg))
        a, b = int(bpos[at - 1]), int(bpos[at + 1])
        wl0, wl1, wr0, wr1 = L0[arg], L1[arg], R0[arg], R1[arg]
        left = np.arange(a + 1, arg)
        if left.size:
            R0[left], R1[left] = span_values(kind, P, Q, A, left, np.full_like(left, arg))
            d0[left] = L0[left] + R0[left] - wl0
            d1[left] = L1[left] + R1[left] - wl1
        right = np.arange(arg + 1, b)
        if right.size:
            L0[right], L1[right] = span_values(kind, P, Q, A, np.full_like(right, arg), right)
            d0[right] = L0[right] + R0[right] - wr0
            d1[right] = L1[right] + R1[right] - wr1
    return np.flatnonzero(isb[1:]) + 1


def _refine_numpy(kind, P, Q, A, bounds, max_iters):
    s = np.array(bounds, dtype=np.int64)
    K = len(s)
    if K == 1:
        return s, 0, True
    scalar = kind != C99
    last = [None] * K
    iters = 0
    converged = False
    while iters < max_iters:
        iters += 1
        moved = False
        for k in range(K - 1):
            lo = 0 if k == 0 else int(s[k - 1])
            hi = int(s[k + 1])
            if scalar and last[k] == (lo, hi):
                continue
            r0 = r1 = 0.0
            if not scalar:
                starts = np.concatenate(([0], s[:-1]))
                keep = np.ones(K, dtype=bool)
                keep[[k, k + 1]] = False
                v0, v1 = span_values(kind, P, Q, A, starts[keep], s[keep])
                r0, r1 = v0.sum(), v1.sum()
            ls = np.arange(lo + 1, hi)
            x0, x1 = span_values(kind, P, Q, A, np.full(ls.shape, lo), ls)
            y0, y1 = span_values(kind, P, Q, A, ls, np.full(ls.shape, hi))
            arg = int(ls[np.argmin(key_values(kind, r0 + x0 + y0, r1 + x1 + y1))])
            last[k] = (lo, hi)
            if arg != s[k]:
                s[k] = arg
                moved = True
        if not moved:
            converged = True
            break
    return s, iters, converged


def _rank_numpy(A, r, literal):
    N = A.shape[0]
    h = r // 2
    padded = np.full((N + 2 * h, N + 2 * h), np.nan)
    padded[h:h + N, h:h + N] = A
    cnt = np.zeros((N, N))
    tot = np.zeros((N, N))
    for dl in range(-h, h + 1):
        for dm in range(-h, h + 1):
            if dl == 0 and dm == 0:
                continue
            shifted = padded[h + dl:h + dl + N, h + dm:h + dm + N]
            valid = ~np.isnan(shifted)
            tot += valid
            if literal and (dl == 0 or dm == 0):
                continue
            with np.errstate(invalid="ignore"):
                cnt += valid & (A > shifted)
    return np.divide(cnt, tot, out=np.zeros((N, N)), where=tot > 0)


# ------------------------------------------------------------------ dispatch

def _as_int_array(bounds):
    return np.ascontiguousarray(bounds, dtype=np.int64)


if USE_NUMBA:
    def dp_backpointers(kind, P, Q, A, N, K):
        return _dp_loop(kind, P, Q, A, N, K)

    def greedy_boundaries(kind, P, Q, A, N, K):
        return _greedy_loop(kind, P, Q, A, N, K)

    def refine_boundaries(kind, P, Q, A, bounds, max_iters):
        return _refine_loop(kind, P, Q, A, _as_int_array(bounds), max_iters)

    def rank_transform_kernel(A, r, literal):
        return _rank_loop(np.ascontiguousarray(A, dtype=float), r, literal)
else:
    dp_backpointers = _dp_numpy
    greedy_boundaries = _greedy_numpy
    refine_boundaries = _refine_numpy

    def rank_transform_kernel(A, r, literal):
        return _rank_numpy(np.asarray(A, dtype=float), r, literal)

LOOP_KERNELS = {
    "dp": _dp_loop, "greedy": _greedy_loop, "refine": _refine_loop, "rank": _rank_loop,
}
NUMPY_KERNELS = {
    "dp": _dp_numpy, "greedy": _greedy_numpy, "refine": _refine_numpy, "rank": _rank_numpy,
}

"""Compiled loop kernels against their vectorized numpy twins.

    python benchmarks/bench_kernels.py [--n 70] [--dim 50] [--k 10] [--repeats 20]

Prints per-kernel best-of-N timings for both paths and checks that they agree.
VECSEG_DISABLE_JIT only changes which table the library dispatches to; this
script calls both tables directly.
"""

import argparse
import time

import numpy as np

from vecseg import kernels
from vecseg._jit import USE_NUMBA
from vecseg.scoring import c99_scorer, cosine_matrix, cvs_scorer, euclidean_scorer


def best_of(fn, repeats):
    fn()  # compile / warm caches
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b)) or np.allclose(a, b)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=70, help="elements per document")
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--k", type=int, default=10, help="segments")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    V = rng.normal(size=(args.n, args.dim))
    N, K = args.n, args.k
    loop, vec = kernels.LOOP_KERNELS, kernels.NUMPY_KERNELS

    print(f"numba compiled loops: {USE_NUMBA}   N={N} D={args.dim} K={K}")
    print(f"{'kernel':<22} {'loops ms':>10} {'numpy ms':>10} {'speedup':>8}  agree")
    rows = []
    for name, scorer in (("euclidean", euclidean_scorer(V)), ("cvs", cvs_scorer(V)),
                         ("c99", c99_scorer(V, r=11))):
        arrays = scorer.arrays()
        start = kernels.greedy_boundaries(*arrays, N, K)
        cases = {
            "dp": lambda f: f(*arrays, N, K),
            "greedy": lambda f: f(*arrays, N, K),
            "refine": lambda f: f(*arrays, start.copy(), 20),
        }
        for kname, call in cases.items():
            tl, ol = best_of(lambda: call(loop[kname]), args.repeats)
            tn, on = best_of(lambda: call(vec[kname]), args.repeats)
            rows.append((f"{kname}/{name}", tl, tn, same(ol, on)))
    A = cosine_matrix(V)
    for literal in (False, True):
        tl, ol = best_of(lambda: loop["rank"](A, 11, literal), args.repeats)
        tn, on = best_of(lambda: vec["rank"](A, 11, literal), args.repeats)
        rows.append((f"rank/{'literal' if literal else 'corrected'}", tl, tn, same(ol, on)))

    for label, tl, tn, ok in rows:
        print(f"{label:<22} {1e3 * tl:>10.3f} {1e3 * tn:>10.3f} {tn / tl:>8.1f}  {'yes' if ok else 'NO'}")
    return 0 if all(r[3] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())

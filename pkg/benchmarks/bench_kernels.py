"""Benchmark: compiled kernel core vs pure-Python fallback.

Times the two hot loops (SGD training pass, greedy re-ranking) on synthetic
workloads shaped like the real pipeline, checks that both backends agree,
and prints a speedup table.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from calibrec._kernels import _pyfallback

try:
    from calibrec._kernels import _core
except ImportError:
    _core = None


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def sgd_workload(n_ratings, n_users, n_items, n_factors, seed=0):
    rng = np.random.default_rng(seed)
    users = rng.integers(0, n_users, n_ratings).astype(np.int64)
    items = rng.integers(0, n_items, n_ratings).astype(np.int64)
    ratings = rng.uniform(1.0, 5.0, n_ratings)
    order = rng.permutation(n_ratings).astype(np.int64)

    def state():
        r = np.random.default_rng(seed + 1)
        return (
            np.zeros(n_users),
            np.zeros(n_items),
            np.ascontiguousarray(r.normal(0, 0.1, (n_users, n_factors))),
            np.ascontiguousarray(r.normal(0, 0.1, (n_items, n_factors))),
        )

    def run(mod):
        bu, bi, pu, qi = state()
        mod.sgd_epoch(users, items, ratings, order, 3.5, bu, bi, pu, qi, 0.005, 0.02)
        return bu, bi, pu, qi

    return run


def greedy_workload(n_users, n_cand, n_genres, n_select, lam=0.5, seed=0):
    rng = np.random.default_rng(seed)
    problems = []
    for _ in range(n_users):
        scores = np.sort(rng.uniform(2.0, 5.0, n_cand))[::-1].copy()
        props = np.zeros((n_cand, n_genres))
        for i in range(n_cand):
            carried = rng.choice(n_genres, size=int(rng.integers(1, 4)), replace=False)
            props[i, carried] = 1.0 / len(carried)
        pref = rng.uniform(0.0, 1.0, n_genres)
        problems.append((scores, props, pref))

    def run(mod):
        out = []
        for scores, props, pref in problems:
            out.append(mod.greedy_rerank(scores, props, pref, lam, 0.01,
                                         n_select, 0, True, 1e-5))
        return out

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads (for CI smoke runs)")
    args = parser.parse_args()

    if _core is None:
        print("compiled core not built; run `python setup.py build_ext --inplace`")
        return 1

    if args.quick:
        cases = [
            ("sgd_epoch 50k ratings, 32 factors", sgd_workload(50_000, 1000, 800, 32)),
            ("greedy 50 users x 100 cand x N=10", greedy_workload(50, 100, 18, 10)),
        ]
    else:
        cases = [
            ("sgd_epoch 200k ratings, 32 factors", sgd_workload(200_000, 4000, 3000, 32)),
            ("sgd_epoch 200k ratings, 128 factors", sgd_workload(200_000, 4000, 3000, 128)),
            ("greedy 200 users x 100 cand x N=10, G=18", greedy_workload(200, 100, 18, 10)),
            ("greedy 200 users x 100 cand x N=10, G=28", greedy_workload(200, 100, 28, 10)),
        ]

    print(f"{'workload':45s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
    for name, run in cases:
        fast = run(_core)
        slow = run(_pyfallback)
        agree = all(
            np.array_equal(np.asarray(a), np.asarray(b)) for a, b in zip(fast, slow)
        )
        t_fast = time_call(run, _core)
        t_slow = time_call(run, _pyfallback, repeats=1)
        marker = "" if agree else "  (MISMATCH!)"
        print(f"{name:45s} {t_fast:9.3f}s {t_slow:9.3f}s {t_slow / t_fast:7.1f}x{marker}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Time the numba kernels against their numpy / plain-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Both variants are imported side by side from ``factorgap.kernels``, so the
``FACTORGAP_DISABLE_NUMBA`` flag does not matter here.  Compile time is
excluded by a warm-up call.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from factorgap import kernels as K
from factorgap.alpha import FactoringInstance, alpha_encode
from factorgap.families import random_strict_3cnf


def best_of(fn, repeat):
    fn()  # warm-up (numba compilation, caches)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    nv_enum = 14 if quick else 18
    F_enum = random_strict_3cnf(nv_enum, 4 * nv_enum, seed=1)
    F_big = random_strict_3cnf(2000, 8500, seed=2)
    F_bb = random_strict_3cnf(16 if quick else 22, 110 if quick else 150, seed=3)
    F_sat = alpha_encode(FactoringInstance(143 if quick else 899, 12 if quick else 30))
    rng = np.random.default_rng(0)
    batch = np.zeros((256, F_big.num_vars + 1), dtype=np.uint8)
    batch[:, 1:] = rng.integers(0, 2, size=(256, F_big.num_vars))

    def bb(impl, F):
        nv = F.num_vars
        off, oc, op = F.occurrences
        order = np.arange(1, nv + 1, dtype=np.int64)
        first = np.zeros(nv + 1, dtype=np.uint8)
        vals = np.zeros(nv + 1, dtype=np.uint8)
        unsat = F.num_clauses - K._count_satisfied_nb(F.matrix, vals)
        return lambda: impl(F.matrix, nv, off, oc, op, order, first, unsat, vals.copy(), 10 ** 9)

    def greedy(impl, F):
        off, oc, op = F.occurrences
        order = np.arange(1, F.num_vars + 1, dtype=np.int64)
        return lambda: impl(F.matrix, F.num_vars, off, oc, op, order)

    def dpll(impl, F):
        off, oc, op = F.occurrences
        return lambda: impl(F.matrix, F.num_vars, off, oc, op, 10 ** 9)

    yield (f"count_satisfied_batch 256 x {F_big.num_clauses}",
           lambda: K._count_satisfied_batch_nb(F_big.matrix, batch),
           lambda: K._count_satisfied_batch_numpy(F_big.matrix, batch))
    yield (f"max_sat_enumerate {nv_enum} vars",
           lambda: K._max_sat_enumerate_nb(F_enum.matrix, nv_enum),
           lambda: K._max_sat_enumerate_numpy(F_enum.matrix, nv_enum))
    yield (f"branch_and_bound {F_bb.num_vars} vars {F_bb.num_clauses} clauses",
           bb(K._branch_and_bound_nb, F_bb), bb(K._branch_and_bound_loop, F_bb))
    yield (f"greedy_conditional {F_big.num_clauses} clauses",
           greedy(K._greedy_nb, F_big), greedy(K._greedy_loop, F_big))
    yield (f"dpll alpha image {F_sat.num_vars} vars",
           dpll(K._dpll_nb, F_sat), dpll(K._dpll_loop, F_sat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()
    print(f"{'kernel':48s} {'numba s':>10s} {'fallback s':>11s} {'speedup':>8s}")
    for name, fast, slow in cases(args.quick):
        t_fast = best_of(fast, args.repeat)
        t_slow = best_of(slow, args.repeat)
        print(f"{name:48s} {t_fast:10.4f} {t_slow:11.4f} {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()

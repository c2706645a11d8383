#!/usr/bin/env python3
"""Benchmark the numba kernel build against the pure-numpy build.

Times the three hot scans on a realistic decoding workload and checks that
both builds return bitwise-identical answers. Run from the repo root:

    python benchmarks/bench_decoders.py [--m 128] [--trials 20]

Setting MMVSR_PURE_NUMPY=1 changes which build the package itself dispatches
to; this script always times both explicitly.
"""

import argparse
import itertools
import math
import time

import numpy as np

from mmvsr import kernels
from mmvsr.backend import USING_NUMBA, backend_name
from mmvsr.model import SignalValueMatrix, ProblemConfig, generate_instance, derive_rng
from mmvsr.nets import build_net


def time_call(fn, *args, repeats):
    best = math.inf
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m", type=int, default=128)
    parser.add_argument("--n", type=int, default=12)
    parser.add_argument("--trials", type=int, default=10, help="timing repeats")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    w = SignalValueMatrix(np.array([[2.0, 2.0], [-2.0, 2.0]]))
    cfg = ProblemConfig(
        m=args.m, n=args.n, sigma_a_sq=10.0, sigma_z_sq=1.0, epsilon=0.4, seed=args.seed
    )
    inst = generate_instance(w, cfg, derive_rng(args.seed))
    A, Y = inst.A, inst.Y
    gram = A.T @ A
    cross = A.T @ Y
    ynorm2 = float((Y * Y).sum())
    subsets = np.array(list(itertools.combinations(range(args.m), 2)), dtype=np.int64)

    perms = np.array(list(itertools.permutations(range(2))), dtype=np.int64)
    w_perms = np.ascontiguousarray(w.entries[perms])
    row_dots = np.ascontiguousarray(np.einsum("pab,pcb->pac", w_perms, w_perms))

    nets = [build_net(2, 2.9, 0.4) for _ in range(2)]
    points = np.vstack([q.points for q in nets])
    offsets = np.array([0, len(nets[0]), len(nets[0]) + len(nets[1])], dtype=np.int64)

    cases = [
        ("ml_scan", (gram, cross, ynorm2, subsets), kernels.ml_scan_numpy, kernels.ml_scan_loops),
        (
            "matched_scan",
            (gram, cross, ynorm2, subsets, w_perms, row_dots),
            kernels.matched_scan_numpy,
            kernels.matched_scan_loops,
        ),
        (
            "net_scan",
            (gram, cross, ynorm2, subsets, points, offsets),
            kernels.net_scan_numpy,
            kernels.net_scan_loops,
        ),
    ]

    print(f"package dispatch: {backend_name()}   (numba available: {USING_NUMBA})")
    print(f"m={args.m} n={args.n} k=2 l=2: {len(subsets)} candidate supports, "
          f"net sizes {[len(q) for q in nets]}")
    if USING_NUMBA:
        for _, call_args, _, loops in cases:
            loops(*call_args)  # JIT warmup outside the timed region
    print(f"{'kernel':<14}{'numpy (ms)':>12}{'loops (ms)':>12}{'speedup':>10}  identical")
    for name, call_args, numpy_fn, loops_fn in cases:
        t_np, out_np = time_call(numpy_fn, *call_args, repeats=args.trials)
        t_lp, out_lp = time_call(loops_fn, *call_args, repeats=args.trials)
        if isinstance(out_np, tuple):
            same = all(np.array_equal(a, b) for a, b in zip(out_np, out_lp))
        else:
            same = np.array_equal(out_np, out_lp)
        print(
            f"{name:<14}{t_np*1e3:>12.3f}{t_lp*1e3:>12.3f}{t_np/t_lp:>10.2f}  {same}"
        )


if __name__ == "__main__":
    main()

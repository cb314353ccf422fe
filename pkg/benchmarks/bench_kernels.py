"""Time the compiled kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py --sizes 2000,20000,100000 --csv bench.csv

Each row reports the best of ``--repeat`` wall-clock timings for one
kernel, backend and graph size. Compilation happens in a warm-up call
that is not timed.
"""
import argparse
import csv
import sys
import time

import numpy as np

from dkcore import _loops, _vec, kernels
from dkcore._accel import HAS_NUMBA
from dkcore.engine import _ArrayState
from dkcore.graph import Graph
from dkcore.hosted import HostState, assign_hosts


def random_graph(n, avg_degree, seed):
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, rng.integers(0, n, (n * avg_degree // 2, 2)))


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def peel(mod, g):
    return lambda: mod.core_numbers(g.indptr, g.indices)


def sync_rounds(accel, g):
    """Run the synchronous one-to-one protocol to quiescence."""
    def go():
        kernels.ACCEL = accel
        st = _ArrayState(g)
        order = np.arange(g.n, dtype=np.int64)
        while kernels.one_to_one_round(g, st, order, False, False):
            pass
    return go


def fixpoint(mod, g):
    s = HostState(0, g, assign_hosts(g.n, 1))
    est0 = s.est.copy()

    def go():
        est = est0.copy()
        mod.improve_passes(s.n_owned, s.indptr, s.indices, est, np.zeros(s.n_owned, bool),
                           np.zeros(s.n_owned, bool))
    return go


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2000,20000,100000")
    ap.add_argument("--degree", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default="-")
    args = ap.parse_args(argv)
    if not HAS_NUMBA:
        print("numba unavailable or disabled; timing the numpy path only", file=sys.stderr)

    rows = []
    saved = kernels.ACCEL
    try:
        for n in (int(s) for s in args.sizes.split(",")):
            g = random_graph(n, args.degree, args.seed)
            cases = [
                ("peel", "numpy", peel(_vec, g)),
                ("sync_rounds", "numpy", sync_rounds(False, g)),
                ("improve_passes", "numpy", fixpoint(_vec, g)),
            ]
            if HAS_NUMBA:
                cases += [
                    ("peel", "numba", peel(_loops, g)),
                    ("sync_rounds", "numba", sync_rounds(True, g)),
                    ("improve_passes", "numba", fixpoint(_loops, g)),
                ]
            for kernel, backend, fn in cases:
                rows.append((kernel, backend, g.n, g.m, best_of(fn, args.repeat)))
    finally:
        kernels.ACCEL = saved

    out = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kernel", "backend", "n", "m", "seconds"])
    for kernel, backend, n, m, sec in sorted(rows):
        w.writerow([kernel, backend, n, m, f"{sec:.6f}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()

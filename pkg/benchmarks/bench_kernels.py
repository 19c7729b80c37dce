"""Backend spread for the rank-array kernels.

Builds verification-shaped workloads (clean inputs that force a full scan,
and corrupted copies with a planted violation), checks that every backend
returns identical answers, then times them.  Run:

    python benchmarks/bench_kernels.py [--n 400] [--rows 200] [--repeats 5]
"""

import argparse
import time
from statistics import median

import numpy as np

from quasiord._kernels import (HAS_NUMBA, first_trans_violation,
                               leq_pair_counts, scan_add_prefix,
                               scan_mult_consecutive)

BACKENDS = ("pure", "numpy") + (("numba",) if HAS_NUMBA else ())


def _time(fn, repeats):
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return median(runs)


def _workloads(n, rows, rng):
    # a total preorder with ties, like a catalog oracle over a universe
    base_rank = np.sort(rng.integers(0, n // 3, size=n)).astype(np.int32)
    order = np.arange(n, dtype=np.int32)

    leq = (base_rank[:, None] <= base_rank[None, :])
    leq_bad = leq.copy()
    leq_bad[n // 2, n // 3] = not leq_bad[n // 2, n // 3]

    # multiplication transfer: each row a tie-respecting monotone image
    trip = np.empty((rows, n), dtype=np.int32)
    for r in range(rows):
        trip[r] = base_rank // (r % 3 + 1)
    trip_bad = trip.copy()
    trip_bad[rows // 2, n // 2] += n

    # addition transfer: ultrametric-style row maxima
    sums = np.maximum(base_rank[:, None], base_rank[None, :]) \
        .astype(np.int32)
    sums_bad = sums.copy()
    sums_bad[n // 3, n - 1] = -1

    pair_rows = rng.integers(0, n, size=(rows, n)).astype(np.int32)
    return {
        "transitivity (clean)": (first_trans_violation, (leq,)),
        "transitivity (violation)": (first_trans_violation, (leq_bad,)),
        "mult scan (clean)": (scan_mult_consecutive,
                              (trip, order, base_rank, False)),
        "mult scan (violation)": (scan_mult_consecutive,
                                  (trip_bad, order, base_rank, False)),
        "add prefix scan (clean)": (scan_add_prefix,
                                    (sums, order, base_rank, False)),
        "add prefix scan (violation)": (scan_add_prefix,
                                        (sums_bad, order, base_rank, False)),
        "pair counts": (leq_pair_counts, (pair_rows,)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400,
                    help="universe size (matrix side)")
    ap.add_argument("--rows", type=int, default=200,
                    help="product rows for the scan kernels")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    work = _workloads(args.n, args.rows, rng)
    print(f"n={args.n} rows={args.rows} repeats={args.repeats} "
          f"backends={', '.join(BACKENDS)}")

    width = max(len(k) for k in work)
    header = f"{'kernel':<{width}}  " + "".join(f"{b:>12}" for b in BACKENDS)
    print(header)
    print("-" * len(header))
    for name, (fn, fargs) in work.items():
        results = {}
        for b in BACKENDS:
            got = fn(*fargs, override=b)
            results[b] = got.tolist() if isinstance(got, np.ndarray) else got
        if len({repr(v) for v in results.values()}) != 1:
            raise SystemExit(f"{name}: backends disagree: {results}")
        cells = []
        for b in BACKENDS:
            if b == "numba":
                fn(*fargs, override=b)  # JIT warmup outside the clock
            ms = _time(lambda: fn(*fargs, override=b), args.repeats) * 1e3
            cells.append(f"{ms:>10.2f}ms")
        print(f"{name:<{width}}  " + "".join(cells))
    print("all backends returned identical answers")


if __name__ == "__main__":
    main()

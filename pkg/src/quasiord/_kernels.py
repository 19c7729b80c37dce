"""Hot integer-rank kernels with numba, numpy, and pure-Python backends.

The verification engine reduces every exhaustive axiom pass to comparisons
of small int32 rank arrays; exact ring arithmetic never enters these loops.
The backend is selected by the QUASIORD_KERNELS environment variable:
``auto`` (default: numba when importable, else numpy), ``numba``, ``numpy``
or ``pure``.  All backends return bit-identical results, including which
violation is reported first; the test suite asserts this and
benchmarks/bench_kernels.py measures the spread.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap if not (args and callable(args[0])) else args[0]


_ENV = "QUASIORD_KERNELS"
_VALID = ("auto", "numba", "numpy", "pure")


def backend(override=None):
    """Resolve the active backend name."""
    choice = override or os.environ.get(_ENV, "auto")
    if choice not in _VALID:
        raise ValueError(f"{_ENV} must be one of {_VALID}, got {choice!r}")
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return choice


# ---------------------------------------------------------------------------
# kernel 1: first transitivity violation of a boolean relation matrix
# canonical order: smallest i, then smallest j with leq[i,j], then smallest k
# ---------------------------------------------------------------------------

@njit(cache=False)
def _trans_numba(leq):  # pragma: no cover - exercised via dispatch
    n = leq.shape[0]
    for i in range(n):
        for j in range(n):
            if leq[i, j]:
                for k in range(n):
                    if leq[j, k] and not leq[i, k]:
                        return i, j, k
    return -1, -1, -1


def _trans_numpy(leq):
    n = leq.shape[0]
    b = leq.astype(bool)
    for i in range(n):
        row = b[i]
        js = np.nonzero(row)[0]
        if js.size == 0:
            continue
        # reachable in two steps from i, per intermediate j in order
        viol_any = b[js] & ~row
        hits = viol_any.any(axis=1)
        if hits.any():
            j = js[int(np.argmax(hits))]
            k = int(np.argmax(b[j] & ~row))
            return int(i), int(j), int(k)
    return -1, -1, -1


def _trans_pure(leq):
    n = len(leq)
    rows = []
    for i in range(n):
        acc = 0
        for k in range(n - 1, -1, -1):
            acc = (acc << 1) | int(leq[i][k])
        rows.append(acc)
    full = (1 << n) - 1
    for i in range(n):
        row = rows[i]
        rest = row
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            bad = rows[j] & ~row & full
            if bad:
                k = (bad & -bad).bit_length() - 1
                return i, j, k
    return -1, -1, -1


def first_trans_violation(leq, override=None):
    """First (i, j, k) with i<=j, j<=k but not i<=k, or None."""
    leq = np.ascontiguousarray(leq, dtype=np.uint8)
    mode = backend(override)
    if mode == "numba":
        out = _trans_numba(leq)
    elif mode == "numpy":
        out = _trans_numpy(leq)
    else:
        out = _trans_pure(leq.tolist())
    return None if out[0] < 0 else (int(out[0]), int(out[1]), int(out[2]))


# ---------------------------------------------------------------------------
# kernel 2: consecutive-pair multiplication scan (QR2/QR3/O2)
# trip_rank[c, u] is the key rank of (product c) * (universe element u);
# order lists universe indices sorted by the base quasi-ordering.
# QR2 mode: ties must map to equal ranks, non-ties to nondecreasing ranks.
# QR3 mode: only strict boundaries are checked and must strictly increase.
# canonical order: smallest row, then smallest position.
# ---------------------------------------------------------------------------

@njit(cache=False)
def _scan23_numba(trip_rank, order, base_rank, strict_only):  # pragma: no cover
    m, n = trip_rank.shape
    for r in range(m):
        for t in range(n - 1):
            a = order[t]
            b = order[t + 1]
            tie = base_rank[a] == base_rank[b]
            ka = trip_rank[r, a]
            kb = trip_rank[r, b]
            if strict_only:
                if not tie and ka >= kb:
                    return r, t
            else:
                if tie:
                    if ka != kb:
                        return r, t
                elif ka > kb:
                    return r, t
    return -1, -1


def _scan23_numpy(trip_rank, order, base_rank, strict_only):
    k = trip_rank[:, order]
    a, b = k[:, :-1], k[:, 1:]
    br = base_rank[order]
    tie = br[:-1] == br[1:]
    if strict_only:
        viol = (~tie) & (a >= b)
    else:
        viol = np.where(tie, a != b, a > b)
    idx = np.argwhere(viol)
    if idx.size == 0:
        return -1, -1
    return int(idx[0, 0]), int(idx[0, 1])


def _scan23_pure(trip_rank, order, base_rank, strict_only):
    m = len(trip_rank)
    n = len(order)
    for r in range(m):
        row = trip_rank[r]
        for t in range(n - 1):
            a, b = order[t], order[t + 1]
            tie = base_rank[a] == base_rank[b]
            ka, kb = row[a], row[b]
            if strict_only:
                if not tie and ka >= kb:
                    return r, t
            else:
                if tie:
                    if ka != kb:
                        return r, t
                elif ka > kb:
                    return r, t
    return -1, -1


def scan_mult_consecutive(trip_rank, order, base_rank, strict_only,
                          override=None):
    """First (row, position) violating the multiplication transfer, or None."""
    trip_rank = np.ascontiguousarray(trip_rank, dtype=np.int32)
    order = np.ascontiguousarray(order, dtype=np.int32)
    base_rank = np.ascontiguousarray(base_rank, dtype=np.int32)
    mode = backend(override)
    if mode == "numba":
        out = _scan23_numba(trip_rank, order, base_rank, strict_only)
    elif mode == "numpy":
        out = _scan23_numpy(trip_rank, order, base_rank, strict_only)
    else:
        out = _scan23_pure(trip_rank.tolist(), order.tolist(),
                           base_rank.tolist(), strict_only)
    return None if out[0] < 0 else (int(out[0]), int(out[1]))


# ---------------------------------------------------------------------------
# kernel 3: per-z prefix-max addition scan (QR4/O4)
# sum_rank[z, t] is the key rank of u_t + u_z.  For each z, walking the
# universe in base order, every eligible y must have sum rank equal to the
# running maximum over its closed prefix (all x with x <= y).
# distinct_class=True restricts eligible y to classes different from z's.
# canonical order: smallest z (universe index), then earliest position; the
# reported x is the earliest strict attainer of the prefix maximum.
# ---------------------------------------------------------------------------

@njit(cache=False)
def _scan4_numba(sum_rank, order, base_rank, distinct_class):  # pragma: no cover
    n = order.shape[0]
    for z in range(n):
        t = 0
        best = -1
        best_at = -1
        while t < n:
            g = t
            while g < n and base_rank[order[g]] == base_rank[order[t]]:
                g += 1
            for s in range(t, g):
                v = sum_rank[z, order[s]]
                if v > best:
                    best = v
                    best_at = order[s]
            for s in range(t, g):
                y = order[s]
                if distinct_class and base_rank[y] == base_rank[z]:
                    continue
                if sum_rank[z, y] < best:
                    return z, y, best_at
            t = g
    return -1, -1, -1


def _scan4_row_numpy(srow, order, group_start, eligible_sorted):
    s = srow[order]
    grp_id = np.cumsum(group_start) - 1
    starts = np.nonzero(group_start)[0]
    # running prefix max including the whole current group
    group_max = np.maximum.reduceat(s, starts)
    incl = np.maximum.accumulate(group_max)[grp_id]
    viol = eligible_sorted & (s < incl)
    if not viol.any():
        return None
    t = int(np.argmax(viol))
    m = incl[t]
    nxt = grp_id[t] + 1
    limit = int(starts[nxt]) if nxt < len(starts) else len(order)
    # earliest attainer of the prefix max within y's closed prefix
    x_pos = int(np.argmax(s[:limit] == m))
    return t, int(order[x_pos])


def _scan4_numpy(sum_rank, order, base_rank, distinct_class):
    n = order.shape[0]
    br_sorted = base_rank[order]
    group_start = np.empty(n, dtype=bool)
    group_start[0] = True
    group_start[1:] = br_sorted[1:] != br_sorted[:-1]
    for z in range(n):
        if distinct_class:
            eligible = br_sorted != base_rank[z]
        else:
            eligible = np.ones(n, dtype=bool)
        hit = _scan4_row_numpy(sum_rank[z], order, group_start, eligible)
        if hit is not None:
            t, x = hit
            return z, int(order[t]), x
    return -1, -1, -1


def _scan4_pure(sum_rank, order, base_rank, distinct_class):
    n = len(order)
    for z in range(n):
        t = 0
        best = -1
        best_at = -1
        while t < n:
            g = t
            while g < n and base_rank[order[g]] == base_rank[order[t]]:
                g += 1
            for s in range(t, g):
                v = sum_rank[z][order[s]]
                if v > best:
                    best = v
                    best_at = order[s]
            for s in range(t, g):
                y = order[s]
                if distinct_class and base_rank[y] == base_rank[z]:
                    continue
                if sum_rank[z][y] < best:
                    return z, y, best_at
            t = g
    return -1, -1, -1


def scan_add_prefix(sum_rank, order, base_rank, distinct_class,
                    override=None):
    """First (z, y, x) violating the addition transfer, or None."""
    sum_rank = np.ascontiguousarray(sum_rank, dtype=np.int32)
    order = np.ascontiguousarray(order, dtype=np.int32)
    base_rank = np.ascontiguousarray(base_rank, dtype=np.int32)
    mode = backend(override)
    if mode == "numba":
        out = _scan4_numba(sum_rank, order, base_rank, distinct_class)
    elif mode == "numpy":
        out = _scan4_numpy(sum_rank, order, base_rank, distinct_class)
    else:
        out = _scan4_pure(sum_rank.tolist(), order.tolist(),
                          base_rank.tolist(), distinct_class)
    return None if out[0] < 0 else (int(out[0]), int(out[1]), int(out[2]))


# ---------------------------------------------------------------------------
# pair-count helper: number of (x, y) with row rank of x <= row rank of y,
# summed per row.  Used for exact hypothesis-tuple accounting.
# ---------------------------------------------------------------------------

def leq_pair_counts(rank_rows, override=None):
    """int64 vector: per row, #{(x, y) : rank[x] <= rank[y]}."""
    rank_rows = np.ascontiguousarray(rank_rows, dtype=np.int32)
    mode = backend(override)
    if mode == "pure":
        out = []
        for row in rank_rows.tolist():
            s = sorted(row)
            n = len(s)
            total = 0
            start = 0
            for t in range(n):
                if t and s[t] != s[t - 1]:
                    start = t
                total += n - start
            out.append(total)
        return np.asarray(out, dtype=np.int64)
    s = np.sort(rank_rows, axis=1)
    n = s.shape[1]
    idx = np.arange(n)
    new_run = np.empty(s.shape, dtype=bool)
    new_run[:, 0] = True
    new_run[:, 1:] = s[:, 1:] != s[:, :-1]
    starts = np.maximum.accumulate(np.where(new_run, idx, 0), axis=1)
    return (n - starts).sum(axis=1, dtype=np.int64)

"""Scalar loop kernels over CSR arrays, compiled with numba when enabled.

All arrays are int64 except the boolean masks. A directed slot ``p`` in
``indptr[u]:indptr[u+1]`` belongs to node ``u`` and points at
``indices[p]``; ``rev[p]`` is the slot of the same edge seen from the
other endpoint.
"""
import numpy as np

from ._accel import jit

# Stands in for +inf in estimate arrays; larger than any degree.
INF = np.int64(2**62)


@jit
def hindex_slots(est, lo, hi, cap):
    # Largest i in [1, cap] with at least i of est[lo:hi] (clipped to cap) >= i.
    count = np.zeros(cap + 1, np.int64)
    for p in range(lo, hi):
        j = est[p]
        if j > cap:
            j = cap
        if j >= 1:
            count[j] += 1
    for i in range(cap, 1, -1):
        count[i - 1] += count[i]
    i = cap
    while i > 1 and count[i] < i:
        i -= 1
    return i


@jit
def hindex_gather(est, indices, lo, hi, cap):
    # Same as hindex_slots, reading est[indices[p]].
    count = np.zeros(cap + 1, np.int64)
    for p in range(lo, hi):
        j = est[indices[p]]
        if j > cap:
            j = cap
        if j >= 1:
            count[j] += 1
    for i in range(cap, 1, -1):
        count[i - 1] += count[i]
    i = cap
    while i > 1 and count[i] < i:
        i -= 1
    return i


@jit
def core_numbers(indptr, indices):
    """Bucket peeling (Batagelj-Zaversnik), O(N + M)."""
    n = indptr.shape[0] - 1
    deg = np.empty(n, np.int64)
    md = 0
    for u in range(n):
        deg[u] = indptr[u + 1] - indptr[u]
        if deg[u] > md:
            md = deg[u]
    bins = np.zeros(md + 1, np.int64)
    for u in range(n):
        bins[deg[u]] += 1
    start = 0
    for d in range(md + 1):
        num = bins[d]
        bins[d] = start
        start += num
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    # stable in node id, so ties peel lowest id first
    for u in range(n):
        pos[u] = bins[deg[u]]
        vert[pos[u]] = u
        bins[deg[u]] += 1
    for d in range(md, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for i in range(n):
        v = vert[i]
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bins[du] += 1
                deg[u] -= 1
    return deg


@jit
def _absorb(u, indptr, core, est, dirty, changed):
    dirty[u] = False
    lo = indptr[u]
    hi = indptr[u + 1]
    if hi == lo:
        return
    t = hindex_slots(est, lo, hi, core[u])
    if t < core[u]:
        core[u] = t
        changed[u] = True


@jit
def _mark(u, optimized, indptr, core, est, sent, outbox):
    c = core[u]
    for p in range(indptr[u], indptr[u + 1]):
        if optimized and not (c < est[p] and c < sent[p]):
            continue
        outbox[p] = True


@jit
def _deliver(u, indptr, indices, rev, core, est, sent, dirty, outbox, sent_count):
    c = core[u]
    msgs = 0
    for p in range(indptr[u], indptr[u + 1]):
        if not outbox[p]:
            continue
        outbox[p] = False
        msgs += 1
        sent[p] = c
        q = rev[p]
        if c < est[q]:
            est[q] = c
            dirty[indices[p]] = True
    sent_count[u] += msgs
    return msgs


@jit
def round_step(order, immediate, optimized, indptr, indices, rev, core, est, sent,
               dirty, changed, sent_count, outbox):
    """One post-initial round of the one-to-one protocol; returns messages sent.

    With ``immediate`` each node absorbs and emits in turn, so later nodes
    see earlier emissions of the same round. Otherwise every node absorbs
    the previous round's messages first and all sends are decided before
    any is delivered.
    """
    msgs = 0
    if immediate:
        for u in order:
            if dirty[u]:
                _absorb(u, indptr, core, est, dirty, changed)
            if changed[u]:
                _mark(u, optimized, indptr, core, est, sent, outbox)
                changed[u] = False
                msgs += _deliver(u, indptr, indices, rev, core, est, sent, dirty, outbox, sent_count)
        return msgs
    for u in order:
        if dirty[u]:
            _absorb(u, indptr, core, est, dirty, changed)
    for u in order:
        if changed[u]:
            _mark(u, optimized, indptr, core, est, sent, outbox)
    for u in order:
        if changed[u]:
            changed[u] = False
            msgs += _deliver(u, indptr, indices, rev, core, est, sent, dirty, outbox, sent_count)
    return msgs


@jit
def improve_passes(n_owned, indptr, indices, est, changed, decreased):
    """Gauss-Seidel fixpoint of the capped h-index over owned nodes.

    ``est`` covers owned nodes (local ids ``0..n_owned-1``) followed by
    frontier nodes; ``indices`` holds local ids. Returns the pass count.
    """
    passes = 0
    again = True
    while again:
        again = False
        passes += 1
        for u in range(n_owned):
            lo = indptr[u]
            hi = indptr[u + 1]
            if hi == lo:
                continue
            t = hindex_gather(est, indices, lo, hi, est[u])
            if t < est[u]:
                est[u] = t
                changed[u] = True
                decreased[u] = True
                again = True
    return passes

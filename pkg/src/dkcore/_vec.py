"""Vectorized numpy counterparts of the bulk-synchronous kernels."""
import numpy as np


def segment_hindex(owner, vals, n):
    """Per-owner h-index of ``vals``; ``owner`` must be sorted ascending."""
    if owner.size == 0:
        return np.zeros(n, np.int64)
    order = np.lexsort((-vals, owner))
    so = owner[order]
    sv = vals[order]
    rank = np.arange(so.size, dtype=np.int64) - np.searchsorted(so, so, side="left") + 1
    return np.bincount(so, weights=(sv >= rank), minlength=n).astype(np.int64)


def core_numbers(indptr, indices):
    """Level peeling: strip every node of residual degree <= k, raise k, repeat."""
    n = indptr.size - 1
    deg = np.diff(indptr).astype(np.int64)
    owner = np.repeat(np.arange(n, dtype=np.int64), deg)
    core = np.zeros(n, np.int64)
    alive = np.ones(n, bool)
    k = 0
    while alive.any():
        k = max(k, int(deg[alive].min()))
        while True:
            rm = alive & (deg <= k)
            if not rm.any():
                break
            core[rm] = k
            alive[rm] = False
            hit = indices[rm[owner]]
            deg -= np.bincount(hit, minlength=n)
    return core


def sync_round(optimized, indptr, indices, rev, owner, core, est, sent, dirty, changed, sent_count):
    """Whole-graph version of ``_loops.round_step`` in synchronous mode."""
    n = core.size
    if dirty.any():
        smask = dirty[owner]
        own = owner[smask]
        h = segment_hindex(own, np.minimum(est[smask], core[own]), n)
        d = np.flatnonzero(dirty & (np.diff(indptr) > 0))
        t = h[d]
        dec = t < core[d]
        core[d[dec]] = t[dec]
        changed[d[dec]] = True
        dirty[:] = False
    if not changed.any():
        return 0
    smask = changed[owner]
    cval = core[owner]
    if optimized:
        smask &= (cval < est) & (cval < sent)
    p = np.flatnonzero(smask)
    val = cval[p]
    sent[p] = val
    sent_count += np.bincount(owner[p], minlength=n)
    q = rev[p]
    lower = val < est[q]
    est[q[lower]] = val[lower]
    dirty[indices[p[lower]]] = True
    changed[:] = False
    return int(p.size)


def improve_passes(n_owned, indptr, indices, est, changed, decreased):
    """Jacobi iteration to the same fixpoint as ``_loops.improve_passes``."""
    deg = np.diff(indptr)
    owner = np.repeat(np.arange(n_owned, dtype=np.int64), deg)
    live = np.flatnonzero(deg > 0)
    passes = 0
    while True:
        passes += 1
        cur = est[:n_owned]
        h = segment_hindex(owner, np.minimum(est[indices], cur[owner]), n_owned)
        dec = live[h[live] < cur[live]]
        if dec.size == 0:
            return passes
        est[dec] = h[dec]
        changed[dec] = True
        decreased[dec] = True

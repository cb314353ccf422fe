"""One-to-many protocol: hosts owning many nodes.

A host keeps estimates for its owned nodes and for the frontier (nodes of
other hosts adjacent to owned ones). After every external update it runs
the protocol internally to a fixpoint and then ships the owned estimates
that dropped, either as one broadcast batch or as per-host batches.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError
from .graph import Graph

POLICIES = ("broadcast", "p2p")


def assign_hosts(n: int, h: int) -> np.ndarray:
    """Default placement: node ``u`` lives on host ``u mod h``."""
    if h < 1:
        raise DomainError("need at least one host")
    return np.arange(n, dtype=np.int64) % h


class UpdateBatch(NamedTuple):
    origin: int
    entries: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.entries)


class Emission(NamedTuple):
    """What a host produced at a round boundary.

    ``batch`` carries every owned estimate that changed; ``deliveries``
    lists what actually goes out, as (destination host, batch) pairs.
    """
    batch: UpdateBatch
    deliveries: list[tuple[int, UpdateBatch]]


class HostState:
    """State of host ``id``: owned nodes, frontier cache and change flags.

    Estimates live in one array over local ids, owned nodes first (sorted)
    then frontier nodes (sorted); ``kernels.INF`` marks a frontier node
    nothing has been heard about.
    """

    def __init__(self, x: int, g: Graph, assignment: np.ndarray):
        self.id = x
        owned = np.flatnonzero(assignment == x)
        self.owned = owned
        self.n_owned = owned.size
        lo, hi = g.indptr[owned], g.indptr[owned + 1]
        nbr = np.concatenate([g.indices[a:b] for a, b in zip(lo, hi)]) if owned.size else np.zeros(0, np.int64)
        frontier = np.unique(nbr[assignment[nbr] != x])
        self.nodes = np.concatenate([owned, frontier])
        self.local = {int(u): i for i, u in enumerate(self.nodes.tolist())}
        self.indptr = np.zeros(self.n_owned + 1, np.int64)
        np.cumsum(hi - lo, out=self.indptr[1:])
        self.indices = np.searchsorted(self.nodes[: self.n_owned], nbr)
        # frontier entries are not in the sorted owned prefix; map them separately
        is_front = assignment[nbr] != x
        self.indices[is_front] = self.n_owned + np.searchsorted(frontier, nbr[is_front])
        self.est = np.full(self.nodes.size, kernels.INF, np.int64)
        self.est[: self.n_owned] = hi - lo
        self.changed = np.zeros(self.n_owned, bool)
        self.ignored = 0

        owner_rep = np.repeat(owned, hi - lo)
        cross = is_front
        links: dict[int, np.ndarray] = {}
        hosts = assignment[nbr[cross]]
        srcs = owner_rep[cross]
        for y in np.unique(hosts).tolist():
            links[int(y)] = np.unique(srcs[hosts == y])
        self.frontier_links = links

    @property
    def neighbor_hosts(self) -> list[int]:
        return sorted(self.frontier_links)

    @property
    def frontier(self) -> np.ndarray:
        return self.nodes[self.n_owned:]

    def estimate(self, u: int) -> float:
        """Known estimate of ``u`` (owned or frontier); inf when unheard."""
        v = self.est[self.local[u]]
        return float("inf") if v >= kernels.INF else int(v)

    def owned_estimates(self) -> dict[int, int]:
        return dict(zip(self.owned.tolist(), self.est[: self.n_owned].tolist()))

    def _changed_entries(self, mask=None) -> tuple[tuple[int, int], ...]:
        sel = self.changed if mask is None else self.changed & mask
        idx = np.flatnonzero(sel)
        return tuple(zip(self.owned[idx].tolist(), self.est[idx].tolist()))


def improve_estimate(s: HostState) -> set[int]:
    """Run the protocol among owned nodes until nothing drops.

    Every owned node whose estimate fell gets its change flag set; the
    returned set holds those nodes' global ids.
    """
    dec = kernels.improve_passes(s.n_owned, s.indptr, s.indices, s.est, s.changed)
    return set(s.owned[dec].tolist())


def host_init(x: int, g: Graph, assignment: np.ndarray, policy: str = "broadcast") -> tuple[HostState, Emission]:
    """Set up host ``x`` and produce its first batch with every owned estimate.

    The initial fixpoint's change flags are cleared because the first
    batch already carries those values.
    """
    s = HostState(x, g, assignment)
    improve_estimate(s)
    s.changed[:] = True
    em = host_round_emit(s, policy)
    return s, em


def host_on_receive(s: HostState, b: UpdateBatch) -> set[int]:
    """Lower cached estimates from ``b`` and re-run the internal fixpoint.

    Entries for nodes this host neither owns nor borders, and entries for
    its own nodes, are skipped and tallied in ``s.ignored``.
    """
    if b.origin == s.id:
        return set()
    lowered = False
    for v, k in b.entries:
        i = s.local.get(v)
        if i is None or i < s.n_owned:
            s.ignored += 1
            continue
        if k < s.est[i]:
            s.est[i] = k
            lowered = True
    if not lowered:
        return set()
    return improve_estimate(s)


def host_round_emit(s: HostState, policy: str) -> Emission:
    """Collect changed owned estimates and route them per ``policy``.

    ``broadcast`` sends the whole batch to every neighbor host;
    ``p2p`` sends host ``y`` only the changed nodes with an edge into it.
    All change flags are cleared.
    """
    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}")
    batch = UpdateBatch(s.id, s._changed_entries())
    deliveries = []
    if batch.entries:
        if policy == "broadcast":
            deliveries = [(y, batch) for y in s.neighbor_hosts]
        else:
            for y in s.neighbor_hosts:
                mask = np.zeros(s.n_owned, bool)
                mask[np.searchsorted(s.owned, s.frontier_links[y])] = True
                entries = s._changed_entries(mask)
                if entries:
                    deliveries.append((y, UpdateBatch(s.id, entries)))
    s.changed[:] = False
    return Emission(batch, deliveries)


def cross_host_entries(em: Emission, policy: str) -> int:
    """Overhead contribution: a broadcast batch counts its entries once."""
    if not em.deliveries:
        return 0
    if policy == "broadcast":
        return len(em.batch)
    return sum(len(b) for _, b in em.deliveries)


def format_batch(round_no: int, b: UpdateBatch) -> str:
    """Trace-dump lines ``round origin node estimate``."""
    return "".join(f"{round_no} {b.origin} {u} {k}\n" for u, k in b.entries)

"""Per-node state machine of the one-to-one protocol.

Each node keeps an upper bound ``core`` on its coreness, starting at its
degree, plus the latest estimate heard from every neighbor. Receiving a
lower neighbor estimate triggers :func:`compute_index`; a decrease is
announced at the next round boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .errors import DomainError, ProtocolError
from .graph import Graph


class Message(NamedTuple):
    sender: int
    estimate: int


def compute_index(est: Mapping[int, int], degree: int, k: int) -> int:
    """Largest ``i`` in ``[1, k]`` with at least ``i`` neighbor estimates ``>= i``.

    ``est`` holds the known estimates; the ``degree - len(est)`` neighbors
    missing from it count as +inf. Counts are bucketed at ``min(est, k)``,
    turned into suffix sums and scanned downward from ``k``.
    """
    if k < 1:
        raise DomainError(f"estimate cap must be >= 1, got {k}")
    count = [0] * (k + 1)
    count[k] = degree - len(est)
    for e in est.values():
        j = min(k, e)
        if j >= 1:
            count[j] += 1
    for i in range(k, 1, -1):
        count[i - 1] += count[i]
    i = k
    while i > 1 and count[i] < i:
        i -= 1
    return i


@dataclass
class NodeState:
    id: int
    neighbors: tuple[int, ...]
    core: int
    est: dict[int, int] = field(default_factory=dict)
    changed: bool = False
    sent_floor: dict[int, int] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    def on_receive(self, msg: Message) -> bool:
        """Absorb one estimate; True if ``core`` dropped."""
        v, k = msg
        if v not in self._neighbor_set:
            raise ProtocolError(f"node {self.id} got a message from non-neighbor {v}")
        if k >= self.est.get(v, k + 1):
            return False
        self.est[v] = k
        t = compute_index(self.est, self.degree, self.core)
        if t < self.core:
            self.core = t
            self.changed = True
            return True
        return False

    def round_emit(self, optimized: bool = False) -> list[tuple[int, Message]]:
        """Messages for this round as (recipient, message) pairs.

        The optimized filter skips neighbors whose last estimate, or the
        last value already sent to them, is not above ``core``.
        """
        if not self.changed:
            return []
        self.changed = False
        msg = Message(self.id, self.core)
        out = []
        for v in self.neighbors:
            if optimized:
                floor = min(self.est.get(v, msg.estimate + 1), self.sent_floor.get(v, msg.estimate + 1))
                if msg.estimate >= floor:
                    continue
                self.sent_floor[v] = msg.estimate
            out.append((v, msg))
        return out

    def __post_init__(self):
        self._neighbor_set = frozenset(self.neighbors)


def node_init(u: int, g: Graph) -> tuple[NodeState, list[tuple[int, Message]]]:
    """Fresh state with ``core = degree`` and its unconditional first broadcast."""
    nbrs = tuple(int(v) for v in g.neighbors(u))
    s = NodeState(id=u, neighbors=nbrs, core=len(nbrs))
    msg = Message(u, s.core)
    s.sent_floor = {v: s.core for v in nbrs}
    return s, [(v, msg) for v in nbrs]

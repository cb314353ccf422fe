"""Undirected simple graphs in CSR form, SNAP edge-list I/O and generators."""
from __future__ import annotations

import gzip
import io
import re
from functools import cached_property
from typing import IO, Iterable

import numpy as np

from .errors import DomainError, ParseError

_NODES_HEADER = re.compile(r"#.*\bnodes:\s*(\d+)", re.IGNORECASE)


class Graph:
    """Immutable undirected simple graph on node ids ``0..n-1``.

    Adjacency is stored as CSR (``indptr``, ``indices``) with each row
    sorted ascending. ``labels[u]`` is the external id of ``u`` when the
    graph came from a file.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, labels: tuple[str, ...] | None = None):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        self.n = self.indptr.size - 1
        self.m = self.indices.size // 2
        if labels is not None and len(labels) != self.n:
            raise ValueError("labels must have one entry per node")
        self.labels = labels

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> Graph:
        """Build from (u, v) pairs; self-loops dropped, duplicates collapsed."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if n == 0:
            if arr.size:
                raise ValueError("edge endpoint outside [0, n)")
            return cls(np.zeros(1, np.int64), np.zeros(0, np.int64), labels)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint outside [0, n)")
        a = np.minimum(arr[:, 0], arr[:, 1])
        b = np.maximum(arr[:, 0], arr[:, 1])
        keep = a != b
        codes = np.unique(a[keep] * n + b[keep])
        a, b = codes // n, codes % n
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        order = np.argsort(src * n + dst, kind="stable")
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst[order], labels)

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.flags.writeable = False
        return d

    @cached_property
    def owner(self) -> np.ndarray:
        """Source node of every directed slot."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    @cached_property
    def rev(self) -> np.ndarray:
        """``rev[p]`` is the slot of the reverse direction of slot ``p``."""
        key = self.owner * self.n + self.indices
        return np.searchsorted(key, self.indices * self.n + self.owner).astype(np.int64)

    @cached_property
    def label_index(self) -> dict[str, int]:
        if self.labels is None:
            return {str(u): u for u in range(self.n)}
        return {lab: u for u, lab in enumerate(self.labels)}

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    @property
    def adjacency(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in self.neighbors(u)) for u in range(self.n)]

    def edges(self) -> np.ndarray:
        """(M, 2) array of edges with u < v, sorted by (u, v)."""
        mask = self.owner < self.indices
        return np.stack([self.owner[mask], self.indices[mask]], axis=1)

    def check(self) -> None:
        """Full scan of the structural invariants; raises AssertionError."""
        assert self.indptr[0] == 0 and np.all(np.diff(self.indptr) >= 0)
        assert self.indices.size == 2 * self.m
        assert not np.any(self.owner == self.indices), "self-loop"
        for u in range(self.n):
            row = self.neighbors(u)
            assert np.all(np.diff(row) > 0), f"row {u} not strictly sorted"
        assert np.array_equal(self.owner[self.rev], self.indices), "asymmetric adjacency"
        assert int(self.degrees.sum()) == 2 * self.m

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_edge_list(source, mode: str = "undirected", nodes: int | None = None) -> Graph:
    """Read a SNAP-style edge list.

    ``source`` is text or an iterable of lines. In ``"undirected"`` mode
    each line is an edge; in ``"symmetrize"`` mode each line is an arc
    and contributes the undirected edge over its endpoints. Both collapse
    duplicates and drop self-loops, so they agree on the resulting graph.

    External ids are numbered in order of first appearance, except when a
    ``# Nodes: N`` header is present and every token is a canonical
    integer in ``[0, N)``: then tokens are used as ids directly and the
    header's ``N`` sets the node count. ``nodes`` pads the id space with
    isolated nodes.
    """
    if mode not in ("undirected", "symmetrize"):
        raise DomainError(f"unknown mode {mode!r}")
    header_n = None
    pairs = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hit = _NODES_HEADER.match(line)
            if hit and header_n is None:
                header_n = int(hit.group(1))
            continue
        tok = line.split()
        if len(tok) != 2:
            raise ParseError(f"expected two node tokens, got {len(tok)}", lineno)
        pairs.append(tok)

    def canonical_int(t):
        return t.isdigit() and str(int(t)) == t and int(t) < header_n

    if header_n is not None and all(canonical_int(a) and canonical_int(b) for a, b in pairs):
        n = header_n
        edges = [(int(a), int(b)) for a, b in pairs]
        labels = [str(u) for u in range(n)]
    else:
        index: dict[str, int] = {}
        edges = [(index.setdefault(a, len(index)), index.setdefault(b, len(index))) for a, b in pairs]
        n = len(index)
        labels = list(index)

    if nodes is not None:
        if nodes < n:
            raise ParseError(f"node override {nodes} is below the {n} nodes present")
        used = set(labels)
        for u in range(n, nodes):
            lab = str(u)
            while lab in used:
                lab = "_" + lab
            used.add(lab)
            labels.append(lab)
        n = nodes
    return Graph.from_edges(n, edges, tuple(labels))


def read_edge_list(path, mode: str = "undirected", nodes: int | None = None) -> Graph:
    """Open ``path`` (``-`` for stdin, ``.gz`` transparently) and parse it."""
    import sys

    if str(path) == "-":
        return parse_edge_list(sys.stdin, mode, nodes)
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_edge_list(fh, mode, nodes)


def write_edge_list(g: Graph, out: IO[str], use_labels: bool = False) -> None:
    """Write ``u<TAB>v`` lines sorted by (u, v), u < v, under a size header."""
    out.write(f"# Nodes: {g.n} Edges: {g.m}\n")
    name = g.label if use_labels else str
    for u, v in g.edges().tolist():
        out.write(f"{name(u)}\t{name(v)}\n")


def format_edge_list(g: Graph, use_labels: bool = False) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf, use_labels)
    return buf.getvalue()


def gen_worst_case(n: int) -> Graph:
    """Hub-and-polygon family whose synchronous run takes exactly n - 1 rounds.

    With nodes numbered 1..n: node n links to every node but n - 3, node i
    links to i + 1 for i < n - 1, and n - 3 links to n - 1. Returned ids
    are shifted down by one.
    """
    if n < 5:
        raise DomainError("worst-case family needs n >= 5")
    edges = [(n, i) for i in range(1, n) if i != n - 3]
    edges += [(i, i + 1) for i in range(1, n - 1)]
    edges.append((n - 3, n - 1))
    return Graph.from_edges(n, [(a - 1, b - 1) for a, b in edges])


def gen_chain(n: int) -> Graph:
    if n < 1:
        raise DomainError("chain needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_random(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p).

    Uses numpy's PCG64 (``default_rng(seed)``): one uniform double per
    pair, pairs enumerated as in ``np.triu_indices(n, 1)``; the pair is an
    edge when the draw is below ``p``. PCG64 streams are identical across
    platforms, so the same arguments always give the same graph.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"edge probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, np.stack([iu[keep], iv[keep]], axis=1))

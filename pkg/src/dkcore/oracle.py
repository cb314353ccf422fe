"""Centralized coreness, the locality check, and decomposition statistics.

A coreness map is an int64 array indexed by node id.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Mapping

import numpy as np

from . import kernels
from .errors import ParseError
from .graph import Graph


def coreness_exact(g: Graph) -> np.ndarray:
    """Coreness of every node by minimum-degree peeling in O(N + M)."""
    return np.asarray(kernels.core_numbers(g.indptr, g.indices), dtype=np.int64)


def as_coreness(g: Graph, c) -> np.ndarray:
    """Normalize a node->coreness mapping or sequence to an array over g."""
    if isinstance(c, Mapping):
        missing = [u for u in range(g.n) if u not in c]
        if missing:
            raise ValueError(f"coreness map misses nodes {missing[:10]}")
        return np.array([c[u] for u in range(g.n)], dtype=np.int64)
    arr = np.asarray(c, dtype=np.int64)
    if arr.shape != (g.n,):
        raise ValueError(f"coreness map covers {arr.size} nodes, graph has {g.n}")
    return arr


def verify_locality(g: Graph, c) -> list[int]:
    """Nodes violating the locality characterization of coreness.

    Node ``u`` with ``c[u] = k`` passes when at least ``k`` neighbors have
    ``c >= k`` and at most ``k`` have ``c >= k + 1``. An empty list means
    the map is consistent.
    """
    c = as_coreness(g, c)
    own = g.owner
    cu = c[own]
    cv = c[g.indices]
    at_least = np.bincount(own, weights=cv >= cu, minlength=g.n)
    above = np.bincount(own, weights=cv >= cu + 1, minlength=g.n)
    bad = (at_least < c) | (above > c)
    return np.flatnonzero(bad).tolist()


@dataclass(frozen=True)
class DecompositionStats:
    n: int
    m: int
    k_max: int
    k_avg: Fraction
    delta_min: int
    delta_max: int
    K: int

    @property
    def k_avg_str(self) -> str:
        return f"{float(self.k_avg):.2f}"

    def line(self) -> str:
        return f"{self.n} {self.m} {self.k_max} {self.k_avg_str} {self.K}"


def stats(g: Graph, c) -> DecompositionStats:
    c = as_coreness(g, c)
    if g.n == 0:
        return DecompositionStats(0, 0, 0, Fraction(0), 0, 0, 0)
    deg = g.degrees
    dmin = int(deg.min())
    return DecompositionStats(
        n=g.n,
        m=g.m,
        k_max=int(c.max()),
        k_avg=Fraction(int(c.sum()), g.n),
        delta_min=dmin,
        delta_max=int(deg.max()),
        K=int(np.count_nonzero(deg == dmin)),
    )


def write_coreness(g: Graph, c, out: IO[str]) -> None:
    """``node<TAB>coreness`` per node in id order, after a size header."""
    c = as_coreness(g, c)
    k_max = int(c.max()) if g.n else 0
    out.write(f"# N={g.n} M={g.m} k_max={k_max}\n")
    for u, k in enumerate(c.tolist()):
        out.write(f"{g.label(u)}\t{k}\n")


def format_coreness(g: Graph, c) -> str:
    buf = io.StringIO()
    write_coreness(g, c, buf)
    return buf.getvalue()


def parse_coreness(source, g: Graph) -> np.ndarray:
    """Read a coreness file back into an array over ``g``'s node ids."""
    if isinstance(source, str):
        source = io.StringIO(source)
    index = g.label_index
    out = np.full(g.n, -1, np.int64)
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) != 2:
            raise ParseError("expected 'node<TAB>coreness'", lineno)
        if tok[0] not in index:
            raise ParseError(f"unknown node {tok[0]!r}", lineno)
        try:
            out[index[tok[0]]] = int(tok[1])
        except ValueError:
            raise ParseError(f"bad coreness value {tok[1]!r}", lineno) from None
    missing = np.flatnonzero(out < 0)
    if missing.size:
        raise ParseError(f"coreness file misses {missing.size} node(s), e.g. {g.label(int(missing[0]))!r}")
    return out

"""Round scheduler for both protocols, run metrics and the bounds checker.

Round 1 is the initial broadcast. In every later round a participant
first absorbs what was sent to it and then emits if its estimate dropped.
Under the ``sync`` schedule all absorption happens before any emission,
so round ``r`` sees exactly the messages of round ``r - 1``. Under
``random`` participants are visited in a seeded random order and see
emissions of participants visited earlier in the same round.

A run stops at the first round without emissions (centralized quiescence)
or after ``max_rounds`` rounds (fixed-round mode). ``exec_time_rounds``
counts the rounds that emitted, including the last one whose messages
change nothing.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, InvariantViolation
from .graph import Graph
from .hosted import (
    POLICIES,
    assign_hosts,
    cross_host_entries,
    host_init,
    host_on_receive,
    host_round_emit,
)
from .oracle import as_coreness, coreness_exact
from .protocol import node_init

SCHEDULES = ("sync", "random")


@dataclass(frozen=True)
class TraceRow:
    round: int
    avg_error: float
    max_error: int
    messages: int


@dataclass
class PerCoreTable:
    """Fraction of each k-shell still wrong at the sampled rounds."""
    rounds: list[int]
    shells: dict[int, tuple[int, list[float]]]

    def to_dict(self):
        return {
            "rounds": self.rounds,
            "shells": [
                {"k": k, "shell_size": size, "fractions": fr}
                for k, (size, fr) in sorted(self.shells.items())
            ],
        }

    def write_csv(self, out: IO[str]) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k", "shell_size", *(f"t{t}" for t in self.rounds)])
        for k, (size, fr) in sorted(self.shells.items()):
            w.writerow([k, size, *(f"{f:.6f}" for f in fr)])


@dataclass
class RunReport:
    exec_time_rounds: int
    update_messages: int
    initial_messages: int
    final_coreness: np.ndarray
    error_trace: list[TraceRow]
    per_core_completion: PerCoreTable
    overhead_per_node: float | None
    converged: bool
    # per-node send totals (one-to-one only); not part of the serialized report
    messages_per_node: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "exec_time_rounds": self.exec_time_rounds,
            "update_messages": self.update_messages,
            "initial_messages": self.initial_messages,
            "final_coreness": self.final_coreness.tolist(),
            "error_trace": [vars(r) for r in self.error_trace],
            "per_core_completion": self.per_core_completion.to_dict(),
            "overhead_per_node": self.overhead_per_node,
            "converged": self.converged,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def write_trace_csv(self, out: IO[str]) -> None:
        out.write("round,avg_error,max_error,messages\n")
        for r in self.error_trace:
            out.write(f"{r.round},{r.avg_error:.6f},{r.max_error},{r.messages}\n")

    def trace_csv(self) -> str:
        buf = io.StringIO()
        self.write_trace_csv(buf)
        return buf.getvalue()


@dataclass(frozen=True)
class BoundReport:
    bound_b1: int
    bound_b2: int
    bound_corollary: int
    bound_messages: int
    observed_T: int
    observed_updates: int
    all_satisfied: bool

    def to_dict(self) -> dict:
        return dict(vars(self))

    def lines(self) -> str:
        return "".join(f"{k}={str(v).lower() if isinstance(v, bool) else v}\n" for k, v in vars(self).items())


class _Recorder:
    """Per-round error snapshots plus the safety and monotonicity checks."""

    def __init__(self, g: Graph, oracle: np.ndarray, check: bool, observer=None):
        self.oracle = oracle
        self.check = check
        self.observer = observer
        self.n = g.n
        self.k_top = int(oracle.max()) if g.n else 0
        self.rows: list[TraceRow] = []
        self.wrong: list[np.ndarray] = []
        self.prev = None

    def record(self, r: int, est: np.ndarray, msgs: int) -> None:
        if self.observer is not None:
            self.observer(r, est.copy())
        err = est - self.oracle
        if self.check:
            if self.n and err.min() < 0:
                u = int(np.argmin(err))
                raise InvariantViolation(f"round {r}: node {u} estimate {est[u]} below coreness {self.oracle[u]}")
            if self.prev is not None and np.any(est > self.prev):
                u = int(np.argmax(est > self.prev))
                raise InvariantViolation(f"round {r}: node {u} estimate rose {self.prev[u]} -> {est[u]}")
        self.prev = est.copy()
        avg = float(err.mean()) if self.n else 0.0
        mx = int(err.max()) if self.n else 0
        self.rows.append(TraceRow(r, avg, mx, int(msgs)))
        self.wrong.append(np.bincount(self.oracle[err != 0], minlength=self.k_top + 1))

    def per_core(self, sample_rounds: Sequence[int] | None) -> PerCoreTable:
        last = len(self.wrong)
        rounds = list(range(1, last + 1)) if sample_rounds is None else [int(t) for t in sample_rounds]
        sizes = np.bincount(self.oracle, minlength=self.k_top + 1)
        shells = {}
        for k in np.flatnonzero(sizes).tolist():
            fr = []
            for t in rounds:
                if t < 1 or last == 0:
                    fr.append(1.0 if t < 1 else 0.0)
                    continue
                fr.append(float(self.wrong[min(t, last) - 1][k] / sizes[k]))
            shells[k] = (int(sizes[k]), fr)
        return PerCoreTable(rounds, shells)


class _ArrayState:
    def __init__(self, g: Graph):
        deg = g.degrees.astype(np.int64)
        self.core = deg.copy()
        self.est = np.full(g.indices.size, kernels.INF, np.int64)
        self.sent = np.empty(g.indices.size, np.int64)
        self.dirty = deg > 0
        self.changed = np.zeros(g.n, bool)
        self.sent_count = deg.copy()
        self.outbox = np.zeros(g.indices.size, bool)
        # the initial broadcast, delivered
        sval = deg[g.owner]
        self.sent[:] = sval
        self.est[g.rev] = sval


class _ReferenceState:
    """Drives :class:`~dkcore.protocol.NodeState` objects message by message."""

    def __init__(self, g: Graph):
        self.nodes = []
        self.inbox = [[] for _ in range(g.n)]
        self.sent_count = np.zeros(g.n, np.int64)
        for u in range(g.n):
            s, out = node_init(u, g)
            self.nodes.append(s)
            self._post(u, out)

    def _post(self, u, out):
        for v, msg in out:
            self.inbox[v].append(msg)
        self.sent_count[u] += len(out)
        return len(out)

    def _absorb(self, u):
        s = self.nodes[u]
        for msg in self.inbox[u]:
            s.on_receive(msg)
        self.inbox[u] = []

    def step(self, order, immediate, optimized):
        msgs = 0
        if immediate:
            for u in order:
                self._absorb(u)
                msgs += self._post(u, self.nodes[u].round_emit(optimized))
            return msgs
        for u in order:
            self._absorb(u)
        for u in order:
            msgs += self._post(u, self.nodes[u].round_emit(optimized))
        return msgs

    @property
    def core(self):
        return np.array([s.core for s in self.nodes], dtype=np.int64)


def _prepare(g, schedule, max_rounds, oracle):
    if schedule not in SCHEDULES:
        raise DomainError(f"unknown schedule {schedule!r}")
    oracle = coreness_exact(g) if oracle is None else as_coreness(g, oracle)
    max_rounds = g.n + 1 if max_rounds is None else int(max_rounds)
    if max_rounds < 1:
        raise DomainError("max_rounds must be >= 1")
    return oracle, max_rounds


def run_one_to_one(
    g: Graph,
    schedule: str = "sync",
    seed: int | None = None,
    optimized: bool = False,
    max_rounds: int | None = None,
    oracle=None,
    sample_rounds: Sequence[int] | None = None,
    backend: str = "array",
    check: bool = True,
    observer=None,
) -> RunReport:
    """Simulate the one-node-per-host protocol on ``g``.

    ``backend="array"`` runs the CSR kernels; ``"reference"`` pushes
    :class:`~dkcore.protocol.Message` objects through per-node states and
    must produce the same report. The oracle coreness is computed when
    not supplied, and every round is checked against it unless
    ``check=False``. ``observer(round, estimates)`` is called once per
    round with a copy of the per-node estimates.
    """
    oracle, max_rounds = _prepare(g, schedule, max_rounds, oracle)
    if backend == "array":
        st = _ArrayState(g)

        def step(order):
            return kernels.one_to_one_round(g, st, order, schedule == "random", optimized)

        def snapshot():
            return st.core.copy()
    elif backend == "reference":
        st = _ReferenceState(g)

        def step(order):
            return st.step(order.tolist(), schedule == "random", optimized)

        def snapshot():
            return st.core
    else:
        raise DomainError(f"unknown backend {backend!r}")

    rec = _Recorder(g, oracle, check, observer)
    rng = np.random.default_rng(seed)
    identity = np.arange(g.n, dtype=np.int64)
    initial = 2 * g.m
    rec.record(1, snapshot(), initial)
    T = 1 if initial else 0
    updates = 0
    converged = initial == 0
    r = 1
    while not converged and r < max_rounds:
        r += 1
        order = rng.permutation(g.n) if schedule == "random" else identity
        msgs = step(order)
        rec.record(r, snapshot(), msgs)
        if msgs == 0:
            converged = True
        else:
            T += 1
            updates += msgs
    final = snapshot()
    if check and converged and not np.array_equal(final, oracle):
        raise InvariantViolation("quiescent run ended away from the oracle coreness")
    return RunReport(
        exec_time_rounds=T,
        update_messages=updates,
        initial_messages=initial,
        final_coreness=final,
        error_trace=rec.rows,
        per_core_completion=rec.per_core(sample_rounds),
        overhead_per_node=None,
        converged=converged,
        messages_per_node=st.sent_count.copy(),
    )


def run_one_to_many(
    g: Graph,
    hosts: int,
    policy: str = "broadcast",
    schedule: str = "sync",
    seed: int | None = None,
    max_rounds: int | None = None,
    oracle=None,
    assignment: np.ndarray | None = None,
    sample_rounds: Sequence[int] | None = None,
    check: bool = True,
    batch_log: IO[str] | None = None,
    observer=None,
) -> RunReport:
    """Simulate ``hosts`` hosts, each owning many nodes.

    Message counters count estimate entries crossing host boundaries; a
    broadcast batch counts each of its entries once however many hosts
    receive it. A round is active when some host had changed estimates
    to report.
    """
    from .hosted import format_batch

    if policy not in POLICIES:
        raise DomainError(f"unknown policy {policy!r}")
    oracle, max_rounds = _prepare(g, schedule, max_rounds, oracle)
    if assignment is None:
        assignment = assign_hosts(g.n, hosts)
    else:
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.shape != (g.n,) or assignment.min(initial=0) < 0 or assignment.max(initial=0) >= hosts:
            raise DomainError("assignment must map every node to a host in [0, hosts)")

    states = []
    inbox: list[list] = [[] for _ in range(hosts)]
    est = np.empty(g.n, np.int64)

    def ship(r, em):
        if batch_log is not None and em.deliveries:
            batch_log.write(format_batch(r, em.batch))
        for y, b in em.deliveries:
            inbox[y].append(b)
        return cross_host_entries(em, policy)

    def absorb(x):
        for b in inbox[x]:
            host_on_receive(states[x], b)
        inbox[x] = []

    def snapshot():
        for s in states:
            est[s.owned] = s.est[: s.n_owned]
        return est.copy()

    initial = 0
    active = False
    ems = []
    for x in range(hosts):
        s, em = host_init(x, g, assignment, policy)
        states.append(s)
        ems.append(em)
    for em in ems:
        initial += ship(1, em)
        active |= bool(em.batch.entries)

    rec = _Recorder(g, oracle, check, observer)
    rec.record(1, snapshot(), initial)
    rng = np.random.default_rng(seed)
    T = 1 if active else 0
    updates = 0
    converged = not active
    r = 1
    while not converged and r < max_rounds:
        r += 1
        order = rng.permutation(hosts) if schedule == "random" else range(hosts)
        msgs = 0
        active = False
        if schedule == "random":
            for x in order:
                absorb(x)
                em = host_round_emit(states[x], policy)
                msgs += ship(r, em)
                active |= bool(em.batch.entries)
        else:
            for x in order:
                absorb(x)
            for x in order:
                em = host_round_emit(states[x], policy)
                msgs += ship(r, em)
                active |= bool(em.batch.entries)
        rec.record(r, snapshot(), msgs)
        if not active:
            converged = True
        else:
            T += 1
            updates += msgs
    final = snapshot()
    if check and converged and not np.array_equal(final, oracle):
        raise InvariantViolation("quiescent run ended away from the oracle coreness")
    return RunReport(
        exec_time_rounds=T,
        update_messages=updates,
        initial_messages=initial,
        final_coreness=final,
        error_trace=rec.rows,
        per_core_completion=rec.per_core(sample_rounds),
        overhead_per_node=(initial + updates) / g.n if g.n else 0.0,
        converged=converged,
    )


def check_bounds(g: Graph, oracle, report: RunReport) -> BoundReport:
    """Compare a synchronous plain one-to-one run against the analytic bounds.

    Execution time is bounded by one plus the total initial error, by N,
    and by N - K + 1 with K the number of minimum-degree nodes; post-initial
    update messages by the sum of squared degrees minus 2M.
    """
    oracle = as_coreness(g, oracle)
    deg = g.degrees.astype(np.int64)
    b1 = 1 + int((deg - oracle).sum())
    b2 = g.n
    K = int(np.count_nonzero(deg == deg.min())) if g.n else 0
    cor = g.n - K + 1
    bm = int((deg * deg).sum()) - 2 * g.m
    T = report.exec_time_rounds
    upd = report.update_messages
    ok = T <= b1 and T <= b2 and T <= cor and upd <= bm
    return BoundReport(b1, b2, cor, bm, T, upd, bool(ok))

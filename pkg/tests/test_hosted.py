import numpy as np
import pytest

from dkcore.errors import DomainError
from dkcore.graph import Graph, gen_chain
from dkcore.hosted import (
    HostState,
    UpdateBatch,
    assign_hosts,
    cross_host_entries,
    format_batch,
    host_init,
    host_on_receive,
    host_round_emit,
    improve_estimate,
)

from conftest import EXAMPLE_CORENESS


def parity(g):
    return np.array([int(lab) % 2 for lab in g.labels])


def lab(g, s):
    return {g.label(u): k for u, k in s.owned_estimates().items()}


def ids(g, labels):
    return {g.label_index[x] for x in labels}


def test_assign_hosts():
    assert assign_hosts(6, 2).tolist() == [0, 1, 0, 1, 0, 1]
    assert assign_hosts(6, 1).tolist() == [0] * 6
    assert assign_hosts(6, 6).tolist() == list(range(6))
    with pytest.raises(DomainError):
        assign_hosts(6, 0)


def test_single_host_reaches_coreness(example):
    s, em = host_init(0, example, assign_hosts(6, 1))
    assert lab(example, s) == EXAMPLE_CORENESS
    assert len(em.batch) == 6
    assert em.deliveries == []
    assert not s.changed.any()


def test_single_host_cascade(example):
    s = HostState(0, example, assign_hosts(6, 1))
    assert improve_estimate(s) == ids(example, "2345")
    assert s.changed.sum() == 4
    assert improve_estimate(s) == set()


def test_chain_of_three():
    s = HostState(0, gen_chain(3), assign_hosts(3, 1))
    assert improve_estimate(s) == {1}
    assert s.owned_estimates() == {0: 1, 1: 1, 2: 1}


def test_one_node_per_host(example):
    a = assign_hosts(6, 6)
    for u in range(6):
        s, em = host_init(u, example, a)
        assert em.batch.entries == ((u, example.degree(u)),)
        assert sorted(y for y, _ in em.deliveries) == sorted(example.neighbors(u).tolist())


def test_two_hosts_no_initial_change(example):
    a = parity(example)
    s = HostState(0, example, a)
    assert lab(example, s) == {"2": 3, "4": 3, "6": 1}
    assert improve_estimate(s) == set()
    assert {example.label(u) for u in s.frontier.tolist()} == {"1", "3", "5"}
    assert s.estimate(example.label_index["3"]) == float("inf")


def test_two_hosts_receive_cascade(example):
    a = parity(example)
    s, _ = host_init(1, example, a)
    assert lab(example, s) == {"1": 1, "3": 3, "5": 3}
    got = host_on_receive(s, UpdateBatch(0, ((example.label_index["2"], 2),)))
    assert got == ids(example, "35")
    assert lab(example, s) == {"1": 1, "3": 2, "5": 2}
    assert s.estimate(example.label_index["2"]) == 2


def test_stale_and_empty_batches(example):
    a = parity(example)
    s, _ = host_init(1, example, a)
    before = s.est.copy()
    n2 = example.label_index["2"]
    assert host_on_receive(s, UpdateBatch(0, ())) == set()
    host_on_receive(s, UpdateBatch(0, ((n2, 2),)))
    snap = s.est.copy()
    assert host_on_receive(s, UpdateBatch(0, ((n2, 2),))) == set()
    assert host_on_receive(s, UpdateBatch(0, ((n2, 3),))) == set()
    assert np.array_equal(s.est, snap)
    assert not np.array_equal(before, snap)


def test_foreign_and_owned_entries_ignored(example):
    a = parity(example)
    s, _ = host_init(1, example, a)
    n1, n6 = example.label_index["1"], example.label_index["6"]
    host_on_receive(s, UpdateBatch(0, ((n1, 0), (n6, 0))))
    assert s.ignored == 1  # node 1 is owned; node 6 borders node 5
    assert s.estimate(n6) == 0


def test_no_changes_no_batches(example):
    s, _ = host_init(0, example, parity(example))
    em = host_round_emit(s, "p2p")
    assert em.batch.entries == () and em.deliveries == []
    assert cross_host_entries(em, "p2p") == 0


def test_p2p_sends_only_boundary_nodes():
    g = gen_chain(6)
    a = np.array([0, 0, 0, 1, 1, 1])
    s = HostState(0, g, a)
    assert {y: v.tolist() for y, v in s.frontier_links.items()} == {1: [2]}
    s.changed[:] = True
    em = host_round_emit(s, "p2p")
    assert len(em.batch) == 3
    assert em.deliveries == [(1, UpdateBatch(0, ((2, 2),)))]
    assert cross_host_entries(em, "p2p") == 1


def test_broadcast_counts_entries_once():
    g = Graph.from_edges(3, [(0, 1), (0, 2)])
    a = np.array([0, 1, 2])
    s = HostState(0, g, a)
    s.changed[:] = True
    em = host_round_emit(s, "broadcast")
    assert [y for y, _ in em.deliveries] == [1, 2]
    assert cross_host_entries(em, "broadcast") == 1
    assert cross_host_entries(host_round_emit(HostState(0, g, a), "broadcast"), "broadcast") == 0


def test_unknown_policy(example):
    s = HostState(0, example, parity(example))
    with pytest.raises(DomainError):
        host_round_emit(s, "multicast")


def test_format_batch():
    assert format_batch(3, UpdateBatch(1, ((4, 2), (7, 1)))) == "3 1 4 2\n3 1 7 1\n"


def test_numpy_fixpoint_matches(numpy_backend, example):
    s = HostState(0, example, assign_hosts(6, 1))
    assert improve_estimate(s) == ids(example, "2345")
    assert lab(example, s) == EXAMPLE_CORENESS

import gzip
import io

import numpy as np
import pytest
from hypothesis import given, settings

from dkcore.errors import DomainError, ParseError
from dkcore.graph import (
    Graph,
    format_edge_list,
    gen_chain,
    gen_random,
    gen_worst_case,
    parse_edge_list,
    read_edge_list,
)
from dkcore.oracle import coreness_exact

from conftest import graphs


def test_two_edge_path():
    g = parse_edge_list(["0 1", "1 2"])
    assert (g.n, g.m, g.degree(1)) == (3, 2, 2)
    g.check()


def test_duplicates_and_self_loops_collapse():
    g = parse_edge_list(["# c", "a b", "b a", "a a"])
    assert (g.n, g.m) == (2, 1)
    assert g.labels == ("a", "b")


def test_example_degrees(example):
    assert [example.degree(example.label_index[str(i)]) for i in range(1, 7)] == [1, 3, 3, 3, 3, 1]
    assert example.m == 7


def test_symmetrize_agrees_with_undirected():
    text = "1 2\n2 1\n2 3\n3 3\n4 2\n"
    assert parse_edge_list(text, "symmetrize") == parse_edge_list(text)


def test_tabs_blank_lines_and_comments():
    g = parse_edge_list("# header\n\n0\t1\n  \n1\t2\n")
    assert (g.n, g.m) == (3, 2)


def test_empty_input():
    g = parse_edge_list("")
    assert (g.n, g.m) == (0, 0)
    g.check()


@pytest.mark.parametrize("line, lineno", [("1 2\n3\n", 2), ("1 2 3\n", 1), ("# x\n1 2\n\na b c\n", 4)])
def test_parse_error_reports_line(line, lineno):
    with pytest.raises(ParseError) as ei:
        parse_edge_list(line)
    assert ei.value.lineno == lineno
    assert str(ei.value).startswith(f"line {lineno}:")


def test_unknown_mode():
    with pytest.raises(DomainError):
        parse_edge_list("1 2", mode="directed")


def test_nodes_header_keeps_ids():
    g = parse_edge_list("# Nodes: 5 Edges: 1\n3 1\n")
    assert g.n == 5
    assert [int(v) for v in g.neighbors(3)] == [1]
    assert g.degree(0) == 0


def test_header_ignored_when_ids_do_not_fit():
    g = parse_edge_list("# Nodes: 2\n7 9\n")
    assert g.n == 2 and g.labels == ("7", "9")


def test_nodes_override_pads():
    g = parse_edge_list("0 1\n", nodes=4)
    assert g.n == 4 and g.m == 1
    assert g.labels == ("0", "1", "2", "3")
    with pytest.raises(ParseError):
        parse_edge_list("0 1\n1 2\n", nodes=2)


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(ValueError):
        Graph.from_edges(0, [(0, 0)])


def test_read_gzip_and_plain(tmp_path, example):
    text = format_edge_list(example, use_labels=True)
    plain = tmp_path / "g.txt"
    plain.write_text(text)
    packed = tmp_path / "g.txt.gz"
    with gzip.open(packed, "wt") as fh:
        fh.write(text)
    assert read_edge_list(plain) == read_edge_list(packed)
    assert read_edge_list(plain).labels == example.labels


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_write_parse_roundtrip(g):
    text = format_edge_list(g)
    back = parse_edge_list(text)
    assert back == g
    assert format_edge_list(back) == text
    g.check()


def test_rev_is_involution():
    g = gen_random(40, 0.2, 3)
    assert np.array_equal(g.rev[g.rev], np.arange(g.indices.size))


def test_worst_case_twelve():
    g = gen_worst_case(12)
    deg = g.degrees
    assert deg[11] == 10
    assert deg[0] == 2
    assert sorted(deg[1:11].tolist()) == [3] * 10
    assert np.count_nonzero(deg == deg.min()) == 1
    assert coreness_exact(g).tolist() == [2] * 12


def test_worst_case_five_has_seven_edges():
    # hub: 5-1, 5-3, 5-4; path: 1-2, 2-3, 3-4; extra: 2-4
    g = gen_worst_case(5)
    assert g.m == 7
    assert {tuple(e) for e in g.edges().tolist()} == {(0, 4), (2, 4), (3, 4), (0, 1), (1, 2), (2, 3), (1, 3)}


@pytest.mark.parametrize("n", range(5, 51))
def test_worst_case_shape(n):
    g = gen_worst_case(n)
    g.check()
    assert g.m == 2 * n - 3
    deg = g.degrees
    assert deg[n - 1] == n - 2
    assert np.count_nonzero(deg == 2) == 1


def test_worst_case_domain():
    with pytest.raises(DomainError):
        gen_worst_case(4)


def test_chain():
    assert (gen_chain(1).n, gen_chain(1).m) == (1, 0)
    assert gen_chain(4).degrees.tolist() == [1, 2, 2, 1]
    assert coreness_exact(gen_chain(3)).tolist() == [1, 1, 1]
    with pytest.raises(DomainError):
        gen_chain(0)


def test_random_extremes():
    assert gen_random(10, 0.0, 5).m == 0
    assert gen_random(5, 1.0, 5).m == 10


def test_random_deterministic():
    a = format_edge_list(gen_random(50, 0.2, 7))
    b = format_edge_list(gen_random(50, 0.2, 7))
    assert a == b
    assert a != format_edge_list(gen_random(50, 0.2, 8))


@pytest.mark.parametrize("n, p", [(-1, 0.5), (5, -0.1), (5, 1.5)])
def test_random_domain(n, p):
    with pytest.raises(DomainError):
        gen_random(n, p, 0)


def test_graph_is_read_only(example):
    with pytest.raises(ValueError):
        example.indices[0] = 3

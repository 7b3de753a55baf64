import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import model, random_small_model
from pptgen.model import split_parallel_edges
from pptgen.requirements import (
    convert_atomic,
    convert_sequence,
    edge_pair_requirements,
    enumerate_tdl_paths,
    make_requirements,
    select_relevant,
)

FIG2_PAIRS = ("1-2, 2-3, 2-4, 3-5, 3-6, 4-9, 4-11, 5-7, 6-8, 7-8, 8-9, 8-11, 9-10, 10-12, 11-13, 11-14, "
              "11-15, 12-13, 12-14, 12-15, 13-16, 14-19, 15-17, 16-18, 17-20, 18-20, 19-20, 20-21")  # fmt: skip


def walks_oracle(m, n):
    """Every n-tuple of edges, kept when consecutive edges meet head to tail."""
    out = set()
    for combo in itertools.product(m.edges, repeat=n):
        if all(a.target == b.source for a, b in zip(combo, combo[1:])):
            out.add(tuple(e.id for e in combo))
    return out


def node_path(m, edges):
    return tuple(m.path_nodes(edges))


def test_tdl1_is_every_edge(fig2):
    assert set(enumerate_tdl_paths(fig2, 1).paths) == {(e.id,) for e in fig2.edges}


def test_tdl2_matches_listed_pairs(fig2):
    want = {tuple(x.split("-")) for x in FIG2_PAIRS.split(", ")}
    got = set(enumerate_tdl_paths(fig2, 2).paths)
    assert len(got) == 28
    assert got == want


@pytest.mark.parametrize("n", [1, 2, 3])
def test_walks_match_oracle_fig2(fig2, n):
    assert set(enumerate_tdl_paths(fig2, n).paths) == walks_oracle(fig2, n)


def test_walks_repeat_edges_on_loops():
    m = model([("1", "s", "a"), ("2", "a", "a"), ("3", "a", "e")])
    assert ("2", "2") in enumerate_tdl_paths(m, 2).paths
    assert ("2", "2", "2") in enumerate_tdl_paths(m, 3).paths


def test_tdl_zero_rejected(fig2):
    with pytest.raises(ValueError):
        enumerate_tdl_paths(fig2, 0)


def test_select_tdl1(fig2):
    allp = enumerate_tdl_paths(fig2, 1)
    assert set(select_relevant(fig2, allp, 1, "high").paths) == {("11",), ("13",), ("14",), ("16",)}
    assert set(select_relevant(fig2, allp, 1, "medium").paths) == {("3",), ("6",), ("11",), ("13",), ("14",), ("16",)}


def test_select_tdl2_high(fig2):
    got = set(select_relevant(fig2, enumerate_tdl_paths(fig2, 2), 2, "high").paths)
    assert got == {("11", "13"), ("11", "14"), ("11", "15"), ("13", "16"), ("14", "19"), ("16", "18")}


def test_select_fallback_adds_uncovered_priority_edge():
    # edge 2 enters the end node, so no 2-walk starts with it
    m = model([("1", "s", "a"), ("2", "a", "e")], prios={"2": "high"})
    got = select_relevant(m, enumerate_tdl_paths(m, 2), 2, "high")
    assert got.paths == (("2",),)


def test_select_no_priority_edges_gives_empty(fig2):
    m = model([("1", "s", "e")])
    assert select_relevant(m, enumerate_tdl_paths(m, 1), 1, "medium").paths == ()


def test_atomic(fig2):
    hi = {("F", "I"), ("I", "J"), ("I", "L"), ("J", "M")}
    assert set(convert_atomic(fig2, "high").requirements) == hi
    assert set(convert_atomic(fig2, "medium").requirements) == hi | {("B", "C"), ("C", "E")}


def test_sequence(fig2):
    assert set(convert_sequence(fig2, "high").requirements) == {("F", "I", "J", "M"), ("F", "I", "L")}
    assert set(convert_sequence(fig2, "medium").requirements) == {("B", "C", "E"), ("F", "I", "J", "M"), ("F", "I", "L")}


def test_sequence_terminates_on_priority_cycle():
    m = model([("1", "s", "a"), ("2", "a", "b"), ("3", "b", "a"), ("4", "b", "e")], prios={"2": "high", "3": "high"})
    reqs = set(convert_sequence(m, "high").requirements)
    assert reqs == {("a", "b", "a"), ("b", "a", "b")}


def test_edge_pair_on_fig2(fig2):
    want = {node_path(fig2, tuple(x.split("-"))) for x in FIG2_PAIRS.split(", ")}
    assert set(edge_pair_requirements(fig2).requirements) == want


def test_make_requirements_checks_arguments(fig2):
    with pytest.raises(ValueError):
        make_requirements(fig2, "atomic")
    with pytest.raises(ValueError):
        make_requirements(fig2, "prime", "high")


@given(st.integers(0, 5000))
@settings(max_examples=80, deadline=None)
def test_edge_pair_count_is_sum_of_degree_products(seed):
    g, _ = split_parallel_edges(random_small_model(seed))
    expected = sum(len(g.in_edges[v]) * len(g.out_edges[v]) for v in g.nodes)
    assert len(edge_pair_requirements(g)) == expected

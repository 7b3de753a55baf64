import logging
from collections import Counter

import pytest

from conftest import T_R1H, T_R1M, T_R2H, T_R2M, model, random_small_model
from pptgen.errors import InfeasibleError
from pptgen.model import is_subpath
from pptgen.ppt import (
    CandidatePool,
    build_ptab,
    count_e2e_paths,
    create_test_cases,
    enumerate_e2e_candidates,
    generate_ppt,
    prune_candidates,
    remove_used_targets,
    score,
    select_best_e2e,
)
from pptgen.requirements import enumerate_tdl_paths, select_relevant


def e2e_oracle(m, repeats):
    """Breadth-first, level by level: every start-to-end path under the repeat bound."""
    out, level = [], [()]
    while level:
        nxt = []
        for path in level:
            node = m.edge[path[-1]].target if path else m.start
            if path and node in m.ends:
                out.append(path)
            used = Counter(path)
            for e in m.out_edges[node]:
                if used[e.id] < repeats:
                    nxt.append(path + (e.id,))
        level = nxt
    return out


@pytest.mark.parametrize(
    "tdl,ptl,expected",
    [(1, "high", T_R1H), (1, "medium", T_R1M), (2, "high", T_R2H), (2, "medium", T_R2M)],
)
def test_fig2_outputs(fig2, tdl, ptl, expected):
    t = generate_ppt(fig2, tdl, ptl)
    assert sorted(t.cases) == sorted(expected)
    assert (t.algorithm, t.tdl, t.ptl) == ("ppt", tdl, ptl)


def test_fig2_pool_tdl1_high(fig2):
    targets = [("11",), ("13",), ("14",), ("16",)]
    pool = enumerate_e2e_candidates(fig2, targets, 1)
    assert ("1", "2", "4", "11", "13", "16", "18", "20", "21") in pool.paths
    assert ("1", "2", "4", "11", "14", "19", "20", "21") in pool.paths
    assert all(any(is_subpath(t, x) for t in targets) for x in pool)
    want = [x for x in e2e_oracle(fig2, 1) if any(is_subpath(t, x) for t in targets)]
    assert sorted(pool.paths) == sorted(want)


def test_pool_is_shortest_first(fig2):
    pool = enumerate_e2e_candidates(fig2, [("11",)], 1)
    lengths = [len(x) for x in pool]
    assert lengths == sorted(lengths)


def test_ptab_buckets_by_second_node(fig2):
    ptab = build_ptab(fig2, [("11", "13"), ("11", "14"), ("13", "16")])
    assert set(ptab.buckets) == {"I", "J"}
    assert ptab.buckets["I"] == (("11", "13"), ("11", "14"))


def test_score_counts_contained_targets(fig2):
    ptab = build_ptab(fig2, [("11",), ("13",), ("14",), ("16",)])
    assert score(ptab, T_R1H[0]) == 3
    assert score(ptab, T_R1H[1]) == 2
    assert score(ptab, ("1", "2", "3", "6", "8", "9")) == 0


def test_select_best_keeps_earliest_on_ties():
    m = model([("1", "s", "a"), ("2", "a", "e"), ("3", "a", "e")], prios={"1": "high"})
    ptab = build_ptab(m, [("1",)])
    pool = CandidatePool((("1", "2"), ("1", "3")))
    assert select_best_e2e(ptab, pool) == ("1", "2")


def test_prune_scores_across_all_buckets(fig2):
    # a candidate scoring 0 on the first bucket but >0 on a later one survives
    ptab = build_ptab(fig2, [("3",), ("16",)])
    x = ("1", "2", "4", "11", "13", "16", "18", "20", "21")
    assert prune_candidates(ptab, CandidatePool((x,))).paths == (x,)


def test_remove_used_targets(fig2):
    ptab = build_ptab(fig2, [("11",), ("13",), ("14",), ("16",)])
    left = remove_used_targets(ptab, T_R1H[0])
    assert left.paths() == [("14",)]


def naive_ppt(m, targets, pool):
    """Direct loop over the table operations, without bitmasks."""
    ptab, out = build_ptab(m, targets), []
    while ptab:
        b = select_best_e2e(ptab, pool)
        out.append(b)
        ptab = remove_used_targets(ptab, b)
        pool = prune_candidates(ptab, pool)
    return out


def test_bitmask_greedy_matches_naive_loop(fig2):
    models = [fig2] + [random_small_model(s) for s in range(60)]
    compared = 0
    for m in models:
        for tdl in (1, 2):
            for ptl in ("high", "medium"):
                targets = select_relevant(m, enumerate_tdl_paths(m, tdl), tdl, ptl).paths
                if not targets:
                    continue
                try:
                    pool = enumerate_e2e_candidates(m, targets, tdl)
                except InfeasibleError:
                    continue
                assert create_test_cases(build_ptab(m, targets), pool) == naive_ppt(m, targets, pool)
                compared += 1
    assert compared > 100


def test_loop_needing_two_passes_is_infeasible():
    # b's only way out is edge 3, so going round the loop through 4 reuses 3
    m = model([("1", "s", "a"), ("2", "a", "b"), ("3", "b", "c"), ("4", "c", "b"), ("5", "c", "e")], prios={"4": "high"})
    with pytest.raises(InfeasibleError, match="no candidate covers target 4") as err:
        generate_ppt(m, 1, "high")
    assert err.value.targets == (("4",),)
    t = generate_ppt(m, 1, "high", max_edge_repeats=2)
    assert t.cases == (("1", "2", "3", "4", "3", "5"),)


def test_empty_targets_warn(caplog):
    m = model([("1", "s", "e")])
    with caplog.at_level(logging.WARNING):
        t = generate_ppt(m, 1, "high")
    assert t.cases == ()
    assert "no high-priority targets" in caplog.text


def test_repeats_must_be_positive(fig2):
    with pytest.raises(ValueError):
        enumerate_e2e_candidates(fig2, [("11",)], 0)


def test_count_paths_matches_oracle():
    for s in range(40):
        m = random_small_model(s)
        for r in (1, 2):
            assert count_e2e_paths(m, r) == len(e2e_oracle(m, r))


def test_pool_matches_oracle_on_small_models():
    for s in range(40):
        m = random_small_model(s)
        targets = select_relevant(m, enumerate_tdl_paths(m, 2), 2, "medium").paths
        if not targets:
            continue
        want = [x for x in e2e_oracle(m, 2) if any(is_subpath(t, x) for t in targets)]
        covered = {t for t in targets if any(is_subpath(t, x) for x in want)}
        if covered != set(targets):
            with pytest.raises(InfeasibleError):
                enumerate_e2e_candidates(m, targets, 2)
            continue
        assert sorted(enumerate_e2e_candidates(m, targets, 2).paths) == sorted(want)

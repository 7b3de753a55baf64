import csv
import io
from fractions import Fraction

import pytest

from conftest import model
from pptgen.corpus import CorpusSpec, generate_corpus
from pptgen.harness import (
    REPORT_COLUMNS,
    RunConfig,
    RunSpec,
    read_corpus,
    rows_to_csv,
    run_experiment,
    write_corpus,
)


def strip_time(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        r.pop("time_ms")
    return rows


def test_run_expansion_default():
    runs = RunConfig().runs()
    assert RunSpec("pct", 1) in runs and RunSpec("pct", 2) in runs
    assert RunSpec("ppt", 2, "medium") in runs
    assert RunSpec("sc", 1, "high", "sequence") in runs
    assert RunSpec("pg", 2, None, "edge-pair") in runs
    assert not any(r.conversion == "edge-pair" and r.tdl == 1 for r in runs)
    assert not any(r.algorithm in ("ppt", "pct", "dct") and r.conversion for r in runs)
    assert len(runs) == 25


def test_bad_config_rejected():
    with pytest.raises(ValueError):
        RunConfig(algorithms=("ppt", "magic"))
    with pytest.raises(ValueError):
        RunConfig(ptl=("low",))


def test_fig2_ppt_rows(fig2):
    rows = run_experiment([("fig2", fig2)], RunConfig(algorithms=("ppt",), tdl=(1,)))
    inst = [r for r in rows if r["instance_id"] == "fig2"]
    assert [(r["ptl"], r["T"], r["alpha"]) for r in inst] == [("high", 2, 17), ("medium", 2, 19)]
    assert all(r["status"] == "ok" for r in inst)


def test_empty_corpus_gives_header_only():
    text = rows_to_csv(run_experiment([], RunConfig()))
    assert text == ",".join(REPORT_COLUMNS) + "\n"


def test_mean_row_is_arithmetic_mean(fig2):
    corpus = [("fig2", fig2)] + generate_corpus(CorpusSpec(instance_count=2, seed=1))
    rows = run_experiment(corpus, RunConfig(algorithms=("ppt", "sc"), tdl=(1,), ptl=("high",), conversions=("atomic",)))
    for alg in ("ppt", "sc"):
        inst = [r for r in rows if r["algorithm"] == alg and r["instance_id"] != "mean"]
        mean = next(r for r in rows if r["algorithm"] == alg and r["instance_id"] == "mean")
        assert mean["alpha"] == Fraction(sum(r["alpha"] for r in inst), 3)
        assert mean["ac"] == sum(r["ac"] for r in inst) / 3
        assert mean["status"] == "ok 3/3"


def test_failed_row_flagged_and_left_out_of_mean(fig2):
    # edge 4 can only be reached by walking edge 3 twice
    bad = model([("1", "s", "a"), ("2", "a", "b"), ("3", "b", "c"), ("4", "c", "b"), ("5", "c", "e")], prios={"4": "high"})
    rows = run_experiment([("bad", bad), ("fig2", fig2)], RunConfig(algorithms=("ppt",), tdl=(1,), ptl=("high",)))
    assert rows[0]["status"].startswith("error: no candidate covers target 4")
    assert rows[0]["alpha"] is None
    assert rows[-1]["status"] == "ok 1/2"
    assert rows[-1]["alpha"] == 17
    text = rows_to_csv(rows)
    assert "error: no candidate covers target 4" in text


def test_csv_deterministic_and_parallel_safe(fig2):
    corpus = [("fig2", fig2)] + generate_corpus(CorpusSpec(instance_count=3, seed=2))
    cfg = RunConfig(tdl=(1,))
    a = strip_time(rows_to_csv(run_experiment(corpus, cfg)))
    b = strip_time(rows_to_csv(run_experiment(corpus, cfg)))
    c = strip_time(rows_to_csv(run_experiment(corpus, RunConfig(tdl=(1,), jobs=2))))
    assert a == b == c


def test_corpus_dir_round_trip(tmp_path):
    corpus = generate_corpus(CorpusSpec(instance_count=3, seed=4))
    write_corpus(corpus, tmp_path)
    assert read_corpus(tmp_path) == corpus

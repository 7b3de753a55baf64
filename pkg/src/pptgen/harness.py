"""Experiment orchestration: run every (instance, algorithm, config), verify, measure, tabulate."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Iterable, Sequence

from .baselines import ALGORITHMS, REQUIREMENT_ALGORITHMS, generate_pct, reduce_dct, run_requirement_baseline
from .errors import PPTError
from .metrics import CSV_COLUMNS, efficiency_metrics, metrics_row, test_set_metrics, verify_consistency
from .model import SutModel, TestSet, parse_model, serialize_model
from .ppt import generate_ppt

log = logging.getLogger(__name__)

REPORT_COLUMNS = CSV_COLUMNS + ["status"]
NUMERIC = CSV_COLUMNS[5:]


@dataclass(frozen=True)
class RunSpec:
    """One concrete configuration to run on every instance."""

    algorithm: str
    tdl: int
    ptl: str | None = None
    conversion: str | None = None


@dataclass(frozen=True)
class RunConfig:
    algorithms: tuple[str, ...] = ALGORITHMS
    tdl: tuple[int, ...] = (1, 2)
    ptl: tuple[str, ...] = ("high", "medium")
    conversions: tuple[str, ...] = ("atomic", "sequence", "edge-pair")
    max_edge_repeats: int | None = None
    jobs: int = 1

    def __post_init__(self):
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ValueError(f"unknown algorithms: {sorted(bad)}")
        bad = set(self.conversions) - {"atomic", "sequence", "edge-pair"}
        if bad:
            raise ValueError(f"unknown conversions: {sorted(bad)}")
        if any(p not in ("high", "medium") for p in self.ptl):
            raise ValueError("ptl values must be 'high' or 'medium'")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        for k in ("algorithms", "tdl", "ptl", "conversions"):
            if k in data:
                data[k] = tuple(data[k])
        return cls(**data)

    def runs(self) -> list[RunSpec]:
        """Atomic/sequence conversions pair with tdl=1, edge-pair with tdl=2."""
        out: list[RunSpec] = []
        for tdl in self.tdl:
            for alg in self.algorithms:
                if alg == "pct":
                    out.append(RunSpec("pct", tdl))
                elif alg in ("dct", "ppt"):
                    out.extend(RunSpec(alg, tdl, p) for p in self.ptl)
                else:
                    for conv in self.conversions:
                        if conv == "edge-pair" and tdl == 2:
                            out.append(RunSpec(alg, tdl, None, conv))
                        elif conv != "edge-pair" and tdl == 1:
                            out.extend(RunSpec(alg, tdl, p, conv) for p in self.ptl)
        return out


def _ns() -> int:
    return time.perf_counter_ns()


def run_one(m: SutModel, spec: RunSpec, max_edge_repeats: int | None = None, pct_cache: dict | None = None):
    """Generate one test set. Returns (TestSet, requirements or None, elapsed ms).

    DCT time covers only the reduction; requirement conversion is not timed.
    """
    reqs = None
    if spec.algorithm == "ppt":
        t0 = _ns()
        ts = generate_ppt(m, spec.tdl, spec.ptl, max_edge_repeats)
        elapsed = _ns() - t0
    elif spec.algorithm in ("pct", "dct"):
        cache = pct_cache if pct_cache is not None else {}
        if spec.tdl not in cache:
            t0 = _ns()
            cache[spec.tdl] = (generate_pct(m, spec.tdl), _ns() - t0)
        pct_set, pct_ns = cache[spec.tdl]
        if spec.algorithm == "pct":
            ts, elapsed = pct_set, pct_ns
        else:
            t0 = _ns()
            ts = reduce_dct(pct_set, m, spec.ptl)
            elapsed = _ns() - t0
    elif spec.algorithm in REQUIREMENT_ALGORITHMS:
        ts, reqs, _, elapsed = run_requirement_baseline(m, spec.algorithm, spec.conversion, spec.ptl, timer=_ns)
        ts = TestSet(ts.cases, spec.algorithm, spec.tdl, spec.ptl, spec.conversion)
    else:
        raise ValueError(f"unknown algorithm {spec.algorithm!r}")
    return ts, reqs, elapsed / 1e6


def run_instance(instance_id: str, m: SutModel, runs: Sequence[RunSpec], max_edge_repeats: int | None = None) -> list[dict]:
    rows = []
    pct_cache: dict = {}
    for spec in runs:
        row = {"instance_id": instance_id, "algorithm": spec.algorithm, "tdl": spec.tdl, "ptl": spec.ptl or "", "conversion": spec.conversion or ""}
        try:
            ts, reqs, ms = run_one(m, spec, max_edge_repeats, pct_cache)
        except PPTError as exc:
            row.update({k: None for k in NUMERIC})
            row["status"] = f"error: {exc}"
            rows.append(row)
            continue
        report = verify_consistency(m, ts, spec.algorithm, spec.ptl, reqs)
        rec = test_set_metrics(m, ts, ms)
        eff = efficiency_metrics(rec, m) if rec.alpha else None
        row.update(metrics_row(rec, eff))
        row["status"] = "ok" if report.passed else "failed: " + " | ".join(l for l in report.lines() if "FAIL" in l)
        rows.append(row)
    return rows


def _run_instance_star(args):
    return run_instance(*args)


def run_experiment(corpus: Sequence[tuple[str, SutModel]], cfg: RunConfig) -> list[dict]:
    """Instance rows (ordered by instance, then run) followed by one mean row per run."""
    runs = cfg.runs()
    work = [(iid, m, runs, cfg.max_edge_repeats) for iid, m in corpus]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_instance = list(pool.map(_run_instance_star, work))
    else:
        per_instance = [run_instance(*w) for w in work]
    rows = [r for rs in per_instance for r in rs]
    return rows + average_rows(rows, runs)


def average_rows(rows: Sequence[dict], runs: Sequence[RunSpec]) -> list[dict]:
    out = []
    for spec in runs:
        key = (spec.algorithm, spec.tdl, spec.ptl or "", spec.conversion or "")
        ok = [r for r in rows if (r["algorithm"], r["tdl"], r["ptl"], r["conversion"]) == key and r["status"] == "ok"]
        if not ok:
            continue
        total = len([r for r in rows if (r["algorithm"], r["tdl"], r["ptl"], r["conversion"]) == key])
        avg = {"instance_id": "mean", "algorithm": key[0], "tdl": key[1], "ptl": key[2], "conversion": key[3]}
        for col in NUMERIC:
            vals = [r[col] for r in ok if r[col] is not None]
            if not vals:
                avg[col] = None
            elif col == "time_ms":
                avg[col] = sum(vals) / len(vals)
            else:
                avg[col] = Fraction(sum(Fraction(v) for v in vals), len(vals))
        avg["status"] = f"ok {len(ok)}/{total}"
        out.append(avg)
    return out


def _fmt(col: str, v) -> str:
    if v is None:
        return ""
    if col == "time_ms":
        return f"{v:.3f}"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{float(v):.2f}"
    return str(v)


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str] = REPORT_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(c, r.get(c)) for c in columns])
    return buf.getvalue()


# -- corpus directories ------------------------------------------------------------------


def write_corpus(corpus: Sequence[tuple[str, SutModel]], out_dir) -> list[FsPath]:
    out_dir = FsPath(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for iid, m in corpus:
        p = out_dir / f"{iid}.json"
        p.write_text(serialize_model(m), encoding="utf-8")
        paths.append(p)
    return paths


def read_corpus(in_dir) -> list[tuple[str, SutModel]]:
    in_dir = FsPath(in_dir)
    files = sorted(p for p in in_dir.glob("*.json") if p.name != "manifest.json")
    return [(p.stem, parse_model(p.read_text(encoding="utf-8"))) for p in files]


def load_run_config(text: str) -> RunConfig:
    return RunConfig.from_dict(json.loads(text))

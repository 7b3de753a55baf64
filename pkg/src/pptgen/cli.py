"""Command-line entry point: generate, verify, metrics, requirements, corpus, bench.

Exit codes: 0 success, 1 validation or verification failure, 2 infeasible
generation, 3 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path as FsPath

from . import baselines, corpus, harness, metrics
from .errors import InfeasibleError, ModelError, ModelFormatError, PPTError
from .model import (
    TestSet,
    parse_model,
    parse_requirements,
    parse_test_set,
    serialize_requirements,
    serialize_test_set,
    split_parallel_edges,
)
from .ppt import generate_ppt
from .requirements import make_requirements

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("pptgen")


def _read(path: str) -> str:
    return FsPath(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None) -> None:
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    m = parse_model(_read(args.model))
    alg = args.algorithm
    reqs = None
    if alg == "ppt":
        if not args.ptl:
            raise SystemExit("generate: --ptl is required for ppt")
        ts = generate_ppt(m, args.tdl, args.ptl, args.max_edge_repeats)
    elif alg == "pct":
        ts = baselines.generate_pct(m, args.tdl)
    elif alg == "dct":
        if not args.ptl:
            raise SystemExit("generate: --ptl is required for dct")
        ts = baselines.reduce_dct(baselines.generate_pct(m, args.tdl), m, args.ptl)
    else:
        conv = args.conversion or ("edge-pair" if args.tdl == 2 else None)
        if conv is None:
            raise SystemExit(f"generate: --conversion is required for {alg}")
        if conv != "edge-pair" and not args.ptl:
            raise SystemExit(f"generate: --ptl is required for {conv} conversion")
        ts, reqs, _, _ = baselines.run_requirement_baseline(m, alg, conv, args.ptl)
        ts = TestSet(ts.cases, alg, args.tdl, ts.ptl, conv)
    _emit(serialize_test_set(ts), args.out)
    if reqs is not None and args.requirements_out:
        FsPath(args.requirements_out).write_text(serialize_requirements(reqs), encoding="utf-8")
    return EXIT_OK


def cmd_requirements(args) -> int:
    m = parse_model(_read(args.model))
    g, _ = split_parallel_edges(m)
    _emit(serialize_requirements(make_requirements(g, args.conversion, args.ptl)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    m = parse_model(_read(args.model))
    ts = parse_test_set(_read(args.tests))
    reqs = parse_requirements(_read(args.requirements)) if args.requirements else None
    report = metrics.verify_consistency(m, ts, requirements=reqs)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_metrics(args) -> int:
    m = parse_model(_read(args.model))
    ts = parse_test_set(_read(args.tests))
    rec = metrics.test_set_metrics(m, ts)
    eff = metrics.efficiency_metrics(rec, m) if rec.alpha else None
    row = {"instance_id": FsPath(args.model).stem, "algorithm": ts.algorithm, "tdl": ts.tdl or "",
           "ptl": ts.ptl or "", "conversion": ts.conversion or ""}  # fmt: skip
    row.update(metrics.metrics_row(rec, eff))
    if args.csv:
        sys.stdout.write(harness.rows_to_csv([row], metrics.CSV_COLUMNS))
    else:
        for col in metrics.CSV_COLUMNS[5:]:
            print(f"{col}: {harness._fmt(col, row[col]) or '-'}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    data = json.loads(_read(args.spec)) if args.spec else {"preset": "reference"}
    if args.seed is not None:
        data["seed"] = args.seed
    spec = corpus.CorpusSpec.from_dict(data)
    models = corpus.generate_corpus(spec)
    harness.write_corpus(models, args.out)
    manifest = {
        "spec": spec.to_dict(),
        "instances": [{"id": iid, **vars(corpus.model_stats(m))} for iid, m in models],
    }
    (FsPath(args.out) / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    log.info("wrote %d models to %s", len(models), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    models = harness.read_corpus(args.corpus)
    cfg = harness.load_run_config(_read(args.config)) if args.config else harness.RunConfig()
    if args.jobs:
        cfg = harness.RunConfig(**{**vars(cfg), "jobs": args.jobs})
    rows = harness.run_experiment(models, cfg)
    _emit(harness.rows_to_csv(rows), args.csv)
    failed = [r for r in rows if r["instance_id"] != "mean" and r["status"] != "ok"]
    for r in failed:
        log.error("%s %s tdl=%s ptl=%s %s: %s", r["instance_id"], r["algorithm"], r["tdl"], r["ptl"], r["conversion"], r["status"])
    return EXIT_INVALID if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pptgen", description="Priority-driven path-based test generation")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a test set for one model")
    g.add_argument("--model", required=True)
    g.add_argument("--algorithm", required=True, choices=baselines.ALGORITHMS)
    g.add_argument("--tdl", type=int, default=1, choices=(1, 2, 3))
    g.add_argument("--ptl", choices=("high", "medium"))
    g.add_argument("--conversion", choices=("atomic", "sequence", "edge-pair"))
    g.add_argument("--max-edge-repeats", type=int, default=None)
    g.add_argument("--out")
    g.add_argument("--requirements-out", help="also write the requirement set (bf/sc/pg)")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("requirements", help="convert a model into a requirement set")
    r.add_argument("--model", required=True)
    r.add_argument("--conversion", required=True, choices=("atomic", "sequence", "edge-pair"))
    r.add_argument("--ptl", choices=("high", "medium"))
    r.add_argument("--out")
    r.set_defaults(func=cmd_requirements)

    v = sub.add_parser("verify", help="run the consistency checks")
    v.add_argument("--model", required=True)
    v.add_argument("--tests", required=True)
    v.add_argument("--requirements")
    v.set_defaults(func=cmd_verify)

    mt = sub.add_parser("metrics", help="print test-set metrics")
    mt.add_argument("--model", required=True)
    mt.add_argument("--tests", required=True)
    mt.add_argument("--csv", action="store_true")
    mt.set_defaults(func=cmd_metrics)

    c = sub.add_parser("corpus", help="generate a seeded synthetic corpus")
    c.add_argument("--spec", help="corpus spec JSON; default is the 59-row reference preset")
    c.add_argument("--seed", type=int)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_corpus)

    b = sub.add_parser("bench", help="run every algorithm over a corpus directory")
    b.add_argument("--corpus", required=True)
    b.add_argument("--config")
    b.add_argument("--csv")
    b.add_argument("--jobs", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ModelFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ModelError, PPTError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""Test-set metrics, efficiency ratios and the four consistency checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MetricsError, PathError
from .model import PTL, Priority, RequirementSet, SutModel, TestSet, is_subpath, natural_key, split_parallel_edges

PPT_FAMILY = ("ppt", "pct", "dct")
REQUIREMENT_FAMILY = ("bf", "sc", "pg")


@dataclass(frozen=True)
class MetricsRecord:
    t_count: int
    alpha: int
    alpha_h: int
    alpha_m: int  # high or medium
    beta: int
    beta_h: int
    beta_m: int  # high or medium
    delta: int
    epsilon: int
    time_ms: float = 0.0

    @property
    def steps(self) -> int:
        return self.alpha + self.delta


@dataclass(frozen=True)
class EfficiencyRecord:
    """Percentages kept as exact fractions; format with :func:`pct`."""

    ac: Fraction
    lambda_h: Fraction
    lambda_m: Fraction
    Lambda_h: Fraction
    Lambda_m: Fraction


def pct(x: Fraction) -> str:
    return f"{float(x):.2f}"


def test_set_metrics(m: SutModel, t: TestSet, elapsed_ms: float = 0.0) -> MetricsRecord:
    t.validate(m)
    hi = m.edges_with(Priority.HIGH)
    him = m.edges_with(Priority.HIGH, Priority.MEDIUM)
    alpha = alpha_h = alpha_m = 0
    uniq_e: set[str] = set()
    uniq_n: set[str] = set()
    delta = 0
    for c in t.cases:
        alpha += len(c)
        alpha_h += sum(1 for e in c if e in hi)
        alpha_m += sum(1 for e in c if e in him)
        uniq_e.update(c)
        nodes = m.path_nodes(c)
        delta += len(nodes)
        uniq_n.update(nodes)
    return MetricsRecord(
        t_count=len(t.cases),
        alpha=alpha,
        alpha_h=alpha_h,
        alpha_m=alpha_m,
        beta=len(uniq_e),
        beta_h=len(uniq_e & hi),
        beta_m=len(uniq_e & him),
        delta=delta,
        epsilon=len(uniq_n),
        time_ms=elapsed_ms,
    )


test_set_metrics.__test__ = False  # name starts with "test"


def efficiency_metrics(rec: MetricsRecord, m: SutModel) -> EfficiencyRecord:
    if rec.alpha == 0:
        raise MetricsError("efficiency ratios are undefined for a test set without edges")
    a = rec.alpha
    return EfficiencyRecord(
        ac=Fraction(100 * rec.beta, len(m.edges)),
        lambda_h=Fraction(100 * rec.alpha_h, a),
        lambda_m=Fraction(100 * rec.alpha_m, a),
        Lambda_h=Fraction(100 * rec.beta_h, a),
        Lambda_m=Fraction(100 * rec.beta_m, a),
    )


# -- consistency checks ------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    applies: bool
    passed: bool = True
    problems: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.passed = False
        self.problems.append(msg)


@dataclass
class CheckReport:
    checks: list[CheckResult]
    requirements_per_test: Fraction | None = None  # |R|/|T|, reported only

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.applies)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "n/a" if not c.applies else ("PASS" if c.passed else "FAIL")
            line = f"{c.name}: {status}"
            if c.problems:
                line += " - " + "; ".join(c.problems)
            out.append(line)
        if self.requirements_per_test is not None:
            out.append(f"|R|/|T| = {float(self.requirements_per_test):.2f}")
        return out


def verify_consistency(
    m: SutModel,
    t: TestSet,
    algorithm: str | None = None,
    ptl: PTL | str | None = None,
    requirements: RequirementSet | None = None,
) -> CheckReport:
    """Run the four checks.

    1. every case is a start-to-end path (all algorithms);
    2. every qualifying priority edge appears (ppt, pct, dct);
    3. every requirement appears as a subpath (bf, sc, pg);
    4. beta_h == |A_h|, and for ptl=medium also beta_m == |A_h|+|A_m|.

    Without a ptl (PCT, or an edge-pair run) checks 2 and 4 use the medium
    class, which covers both equalities.
    """
    algorithm = (algorithm or t.algorithm or "").lower()
    ptl = PTL(ptl or t.ptl or "medium")
    c1 = CheckResult("check 1 (start-to-end paths)", True)
    c2 = CheckResult("check 2 (priority edges present)", algorithm in PPT_FAMILY or not algorithm)
    c3 = CheckResult("check 3 (requirements present)", requirements is not None)
    c4 = CheckResult("check 4 (beta_h / beta_m)", True)

    valid_cases = []
    for i, c in enumerate(t.cases):
        try:
            nodes = m.path_nodes(c)
        except PathError as exc:
            c1.fail(f"case {i}: {exc}")
            continue
        if nodes[0] != m.start:
            c1.fail(f"case {i}: starts at {nodes[0]!r}")
        elif nodes[-1] not in m.ends:
            c1.fail(f"case {i}: ends at {nodes[-1]!r}")
        else:
            valid_cases.append(c)

    present = {e for c in valid_cases for e in c}
    wanted = m.priority_edges(ptl)
    if c2.applies:
        missing = sorted(wanted - present, key=natural_key)
        if missing:
            c2.fail("missing edges " + ", ".join(missing))

    if requirements is not None:
        g, split = split_parallel_edges(m)
        images = [split.image(c) for c in valid_cases] if split else valid_cases
        for r in requirements.requirements:
            try:
                redges = g.node_path_to_edges(r)
            except PathError as exc:
                c3.fail(f"requirement {'-'.join(r)}: {exc}")
                continue
            if not any(is_subpath(redges, c) for c in images):
                c3.fail(f"requirement {'-'.join(r)} not covered")

    hi = m.edges_with(Priority.HIGH)
    him = m.edges_with(Priority.HIGH, Priority.MEDIUM)
    beta_h, beta_m = len(present & hi), len(present & him)
    if beta_h != len(hi):
        c4.fail(f"beta_h={beta_h} but |A_h|={len(hi)}")
    if ptl is PTL.MEDIUM and beta_m != len(him):
        c4.fail(f"beta_m={beta_m} but |A_h|+|A_m|={len(him)}")

    ratio = None
    if requirements is not None and t.cases:
        ratio = Fraction(len(requirements), len(t.cases))
    return CheckReport([c1, c2, c3, c4], ratio)


CSV_COLUMNS = [
    "instance_id", "algorithm", "tdl", "ptl", "conversion",
    "T", "alpha", "alpha_h", "alpha_m", "beta", "beta_h", "beta_m", "delta", "epsilon",
    "ac", "lambda_h", "lambda_m", "Lambda_h", "Lambda_m", "time_ms",
]  # fmt: skip


def metrics_row(rec: MetricsRecord, eff: EfficiencyRecord | None) -> dict:
    row = {
        "T": rec.t_count, "alpha": rec.alpha, "alpha_h": rec.alpha_h, "alpha_m": rec.alpha_m,
        "beta": rec.beta, "beta_h": rec.beta_h, "beta_m": rec.beta_m,
        "delta": rec.delta, "epsilon": rec.epsilon,
    }  # fmt: skip
    for k in ("ac", "lambda_h", "lambda_m", "Lambda_h", "Lambda_m"):
        row[k] = getattr(eff, k) if eff is not None else None
    row["time_ms"] = rec.time_ms
    return row

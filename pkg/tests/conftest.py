import random

import pytest

from pptgen import Edge, Priority, SutModel, load_fig2
from pptgen.model import TestSet


def p(s: str) -> tuple[str, ...]:
    return tuple(s.split("-"))


# worked-example test sets on fig2, as edge sequences
T_R1 = [p("1-2-3-5-7-8-9-10-12-13-16-18-20-21"), p("1-2-4-11-14-19-20-21"), p("1-2-3-6-8-9-10-12-15-17-20-21")]
T_R2 = [
    p("1-2-3-5-7-8-9-10-12-13-16-18-20-21"),
    p("1-2-4-9-10-12-14-19-20-21"),
    p("1-2-3-6-8-11-13-16-18-20-21"),
    p("1-2-4-11-14-19-20-21"),
    p("1-2-4-11-15-17-20-21"),
    p("1-2-4-9-10-12-15-17-20-21"),
]
T_R1H = [p("1-2-4-11-13-16-18-20-21"), p("1-2-4-11-14-19-20-21")]
T_R1M = [p("1-2-3-6-8-11-13-16-18-20-21"), p("1-2-4-11-14-19-20-21")]
T_R2H = [p("1-2-4-11-13-16-18-20-21"), p("1-2-4-11-14-19-20-21"), p("1-2-4-11-15-17-20-21")]
T_R2M = [p("1-2-3-6-8-11-13-16-18-20-21"), p("1-2-3-5-7-8-11-14-19-20-21"), p("1-2-4-11-15-17-20-21")]


@pytest.fixture(scope="session")
def fig2() -> SutModel:
    return load_fig2()


@pytest.fixture
def t_r1():
    return TestSet(tuple(T_R1))


@pytest.fixture
def t_r2():
    return TestSet(tuple(T_R2))


def model(edges, start="s", ends=("e",), prios=None) -> SutModel:
    """Small model from (id, src, dst) triples; nodes are inferred."""
    prios = prios or {}
    nodes = []
    for _, u, v in edges:
        for n in (u, v):
            if n not in nodes:
                nodes.append(n)
    es = tuple(Edge(i, u, v, Priority(prios.get(i, "low"))) for i, u, v in edges)
    return SutModel(tuple(nodes), es, start, frozenset(ends))


def random_small_model(seed: int, max_nodes: int = 8) -> SutModel:
    """Valid model with at most ``max_nodes`` nodes, some parallel edges and loops."""
    rng = random.Random(seed)
    n = rng.randint(3, max_nodes)
    names = ["s"] + [f"n{i}" for i in range(1, n - 1)] + ["e"]
    pairs = [(names[i], names[i + 1]) for i in range(n - 1)]
    for _ in range(rng.randint(0, n)):
        u = rng.randrange(n - 1)
        v = rng.randrange(1, n)
        pairs.append((names[u], names[v]))
    if rng.random() < 0.3:
        pairs.append(pairs[rng.randrange(len(pairs))])  # parallel edge
    edges = []
    for i, (u, v) in enumerate(pairs):
        pr = rng.choice(["high", "medium", "low", "low"])
        edges.append(Edge(str(i + 1), u, v, Priority(pr)))
    return SutModel(tuple(names), tuple(edges), "s", frozenset({"e"}))


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")

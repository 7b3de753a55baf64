"""Seeded synthetic workflow models with prescribed size, priority and loop statistics."""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field

import networkx as nx

from .errors import CorpusError
from .model import Edge, Priority, SutModel, validate_model
from .ppt import count_e2e_paths, uncoverable_targets
from .requirements import enumerate_tdl_paths, select_relevant

# (|D|, |A|, |A_h|, |A_m|, loops) of the 59 reference workflow models
REFERENCE_MODEL_STATS: tuple[tuple[int, int, int, int, int], ...] = (
    (11, 19, 4, 2, 5), (13, 19, 4, 2, 5), (24, 43, 9, 8, 10), (15, 24, 8, 5, 7),
    (14, 22, 3, 3, 7), (9, 14, 5, 1, 4), (13, 21, 4, 3, 7), (15, 23, 6, 6, 6),
    (13, 19, 5, 2, 5), (19, 32, 6, 4, 7), (15, 25, 3, 4, 8), (16, 26, 7, 3, 9),
    (12, 19, 6, 2, 5), (14, 22, 6, 3, 8), (16, 19, 5, 5, 0), (6, 10, 3, 3, 1),
    (11, 16, 2, 3, 0), (13, 20, 3, 4, 0), (8, 10, 1, 3, 2), (9, 11, 2, 3, 0),
    (10, 15, 3, 3, 0), (7, 9, 1, 4, 0), (8, 12, 2, 3, 0), (10, 12, 3, 2, 0),
    (8, 12, 3, 2, 3), (8, 11, 3, 3, 3), (7, 12, 3, 2, 5), (8, 11, 2, 4, 2),
    (7, 11, 4, 2, 0), (10, 15, 3, 4, 1), (23, 32, 7, 9, 3), (26, 40, 8, 4, 4),
    (35, 48, 5, 9, 4), (45, 61, 10, 9, 5), (21, 27, 12, 6, 0), (19, 24, 7, 4, 1),
    (24, 29, 8, 9, 2), (25, 35, 8, 7, 0), (26, 38, 10, 3, 2), (27, 37, 8, 7, 3),
    (14, 20, 5, 5, 1), (21, 26, 3, 3, 0), (20, 30, 7, 4, 4), (28, 46, 13, 10, 5),
    (21, 28, 10, 6, 0), (19, 31, 9, 9, 6), (25, 39, 9, 11, 8), (52, 79, 7, 9, 3),
    (47, 68, 12, 8, 3), (46, 65, 9, 11, 0), (61, 97, 21, 10, 3), (51, 71, 16, 8, 0),
    (27, 40, 11, 3, 2), (21, 22, 7, 4, 0), (29, 35, 9, 8, 0), (34, 50, 10, 8, 0),
    (35, 50, 8, 4, 0), (37, 55, 16, 5, 2), (35, 48, 12, 8, 1),
)  # fmt: skip


@dataclass(frozen=True)
class InstanceTarget:
    nodes: int
    edges: int
    high: int
    medium: int
    loops: int

    @property
    def deg(self) -> float:
        """Average in-degree plus average out-degree."""
        return 2 * self.edges / self.nodes


@dataclass(frozen=True)
class CorpusSpec:
    instance_count: int = 59
    nodes: tuple[int, int] = (6, 61)
    edges: tuple[int, int] = (9, 97)
    high_fraction: tuple[float, float] = (0.05, 0.45)
    medium_fraction: tuple[float, float] = (0.05, 0.35)
    loops: tuple[int, int] = (0, 10)
    deg: tuple[float, float] = (2.10, 3.58)
    seed: int = 0
    # explicit per-instance statistics; when set, the ranges above are ignored
    rows: tuple[InstanceTarget, ...] | None = None
    # upper bound on start-to-end paths (edges used at most twice) per instance
    max_paths: int = 20000

    @classmethod
    def reference(cls, seed: int = 0, **kw) -> "CorpusSpec":
        rows = tuple(InstanceTarget(*r) for r in REFERENCE_MODEL_STATS)
        kw.setdefault("instance_count", len(rows))
        return cls(rows=rows, seed=seed, **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusSpec":
        data = dict(data)
        if data.pop("preset", None) == "reference":
            return cls.reference(**data)
        for k in ("nodes", "edges", "high_fraction", "medium_fraction", "loops", "deg"):
            if k in data:
                data[k] = tuple(data[k])
        if data.get("rows") is not None:
            data["rows"] = tuple(InstanceTarget(**r) if isinstance(r, dict) else InstanceTarget(*r) for r in data["rows"])
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def targets(self) -> list[InstanceTarget]:
        if self.rows is not None:
            return list(self.rows[: self.instance_count])
        rng = random.Random(f"targets:{self.seed}")
        return [self._draw(rng) for _ in range(self.instance_count)]

    def _draw(self, rng: random.Random) -> InstanceTarget:
        n = rng.randint(*self.nodes)
        lo = max(self.edges[0], math.ceil(self.deg[0] * n / 2), n)
        hi = min(self.edges[1], math.floor(self.deg[1] * n / 2))
        if lo > hi:
            raise CorpusError(f"no edge count for {n} nodes satisfies edges {self.edges} and deg {self.deg}")
        m = rng.randint(lo, hi)
        h = max(1, round(rng.uniform(*self.high_fraction) * m))
        med = round(rng.uniform(*self.medium_fraction) * m)
        med = min(med, m - h)
        loops = rng.randint(self.loops[0], min(self.loops[1], max(0, m - n)))
        return InstanceTarget(n, m, h, med, loops)


def loop_count(m: SutModel) -> int:
    """Back edges of a depth-first traversal from start (canonical edge order)."""
    on_stack, seen, back = set(), set(), 0
    stack = [(m.start, iter(m.out_edges[m.start]))]
    seen.add(m.start)
    on_stack.add(m.start)
    while stack:
        node, it = stack[-1]
        e = next(it, None)
        if e is None:
            stack.pop()
            on_stack.discard(node)
            continue
        if e.target in on_stack:
            back += 1
        elif e.target not in seen:
            seen.add(e.target)
            on_stack.add(e.target)
            stack.append((e.target, iter(m.out_edges[e.target])))
    return back


def model_stats(m: SutModel) -> InstanceTarget:
    return InstanceTarget(len(m.nodes), len(m.edges), len(m.high), len(m.medium), loop_count(m))


class _Attempt(Exception):
    pass


def _dag_paths(n_inner: int, ends: list[int], adj: dict[int, set[int]]) -> int:
    # nodes are topologically numbered 0..n_inner-1, then the ends
    ways = {v: 1 for v in ends}
    for u in range(n_inner - 1, -1, -1):
        ways[u] = sum(ways[v] for v in adj[u])
    return ways[0]


def generate_instance(t: InstanceTarget, rng: random.Random, max_paths: int = 20000, dag_budget: int = 150) -> SutModel:
    """One model realising ``t`` exactly; raises CorpusError after repeated failures."""
    if t.high + t.medium > t.edges:
        raise CorpusError(f"{t}: more priority edges than edges")
    for _ in range(400):
        try:
            m = _try_instance(t, rng, max_paths, dag_budget)
        except _Attempt:
            continue
        return m
    raise CorpusError(f"could not realise {t} within the path budget")


def _try_instance(t: InstanceTarget, rng: random.Random, max_paths: int, dag_budget: int) -> SutModel:
    k = 2 if t.nodes >= 12 and rng.random() < 0.3 else 1
    n_inner = t.nodes - k
    spare = t.edges - (n_inner - 1) - t.loops
    if n_inner < 3 or spare < k:
        raise CorpusError(f"{t}: too few edges for a connected workflow")
    leaves = rng.randint(k, min(spare, n_inner - 1, k + max(1, spare // 2)))
    forward = spare - leaves
    ends = list(range(n_inner, n_inner + k))

    adj: dict[int, set[int]] = {u: set() for u in range(n_inner)}
    children = [0] * n_inner
    branch_at = set(rng.sample(range(2, n_inner), leaves - 1)) if leaves > 1 else set()
    for i in range(1, n_inner):
        if i in branch_at:
            internal = [p for p in range(i - 1) if children[p]]
            near = [p for p in internal if p >= i - 6] or internal
            parent = rng.choice(near)
        else:
            parent = i - 1
        adj[parent].add(i)
        children[parent] += 1
    leaf_nodes = [u for u in range(n_inner) if not adj[u]]
    assert len(leaf_nodes) == leaves
    order = ends * (len(leaf_nodes) // k + 1)
    rng.shuffle(leaf_nodes)
    for u, v in zip(leaf_nodes, order):
        adj[u].add(v)

    placed = 0
    for _ in range(forward * 60 + 100):
        if placed == forward:
            break
        u = rng.randrange(n_inner)
        if rng.random() < 0.25:
            v = rng.choice(ends)
            if u == 0:
                continue
        else:
            if u + 1 >= n_inner:
                continue
            v = rng.randint(u + 1, min(n_inner - 1, u + 6))
        if v in adj[u]:
            continue
        adj[u].add(v)
        if _dag_paths(n_inner, ends, adj) > dag_budget:
            adj[u].discard(v)
            continue
        placed += 1
    if placed < forward:
        raise _Attempt

    names = ["start"] + [f"d{i}" for i in range(1, n_inner)] + (["end"] if k == 1 else ["end1", "end2"])
    dag = nx.DiGraph([(u, v) for u in adj for v in adj[u]])
    idom = nx.immediate_dominators(dag, 0)
    back: list[tuple[int, int]] = []
    used = {(u, v) for u in adj for v in adj[u]}
    for _ in range(t.loops * 60 + 50):
        if len(back) == t.loops:
            break
        u = rng.randrange(1, n_inner)
        doms, d = [], u
        while d != 0:
            d = idom[d]
            doms.append(d)
        v = doms[min(len(doms) - 1, int(rng.expovariate(1.0)))]
        if (u, v) in used:
            continue
        # the loop must be walkable once on the way to an end; extra edges never
        # remove paths, so checking each new back edge on its own is enough
        trial = _plain_model(names, used | {(u, v)}, ends)
        if uncoverable_targets(trial, [(f"{u}_{v}",)], 1):
            continue
        used.add((u, v))
        back.append((u, v))
    if len(back) < t.loops:
        raise _Attempt

    pairs = sorted(used, key=lambda p: (p[0], p[1]))
    rng.shuffle(pairs)
    prios = [Priority.HIGH] * t.high + [Priority.MEDIUM] * t.medium
    prios += [Priority.LOW] * (len(pairs) - len(prios))
    rng.shuffle(prios)
    # ids follow a breadth-first reading order, as a modeller would number them
    pairs.sort(key=lambda p: (p[0], p[1]))
    edges = tuple(Edge(str(i + 1), names[u], names[v], pr) for i, ((u, v), pr) in enumerate(zip(pairs, prios)))
    m = SutModel(tuple(names), edges, "start", frozenset(names[e] for e in ends))
    if validate_model(m) or model_stats(m) != t:
        raise _Attempt
    if count_e2e_paths(m, 2, cap=max_paths) > max_paths:
        raise _Attempt
    if not _ppt_feasible(m):
        raise _Attempt
    return m


def _plain_model(names: list[str], pairs, ends: list[int]) -> SutModel:
    edges = tuple(Edge(f"{u}_{v}", names[u], names[v]) for u, v in pairs)
    return SutModel(tuple(names), edges, "start", frozenset(names[e] for e in ends))


def _ppt_feasible(m: SutModel) -> bool:
    """Every edge fits on a start-to-end path using each edge once, and the
    tdl=2 medium targets fit under two uses per edge (the default bounds)."""
    if uncoverable_targets(m, [(e.id,) for e in m.edges], 1):
        return False
    targets = select_relevant(m, enumerate_tdl_paths(m, 2), 2, "medium")
    return not targets.paths or not uncoverable_targets(m, targets.paths, 2)


def generate_corpus(spec: CorpusSpec) -> list[tuple[str, SutModel]]:
    """(instance id, model) pairs; identical specs give identical corpora."""
    out = []
    width = max(2, len(str(spec.instance_count)))
    for i, t in enumerate(spec.targets()):
        rng = random.Random(f"corpus:{spec.seed}:{i}")
        out.append((f"M{i + 1:0{width}d}", generate_instance(t, rng, spec.max_paths)))
    return out


def spec_from_json(text: str) -> CorpusSpec:
    return CorpusSpec.from_dict(json.loads(text))

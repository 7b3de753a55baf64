"""Comparison strategies: PCT, DCT, Brute Force, Set-Covering and Prefix-Graph.

PCT/DCT work on the multigraph directly. BF/SC/PG consume a simple graph and a
requirement set (node paths); :func:`run_requirement_baseline` handles the
split/translate round trip for multigraphs. The BF/SC/PG internals are
reconstructions: shortest-connector stitching, greedy set cover, and a
matching-based minimum path cover over requirements.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import InfeasibleError, ModelError
from .model import (
    PTL,
    NodePath,
    Path,
    RequirementSet,
    SutModel,
    TestSet,
    ensure_valid,
    is_subpath,
    natural_key,
    path_key,
    sort_paths,
    split_parallel_edges,
    translate_paths,
)
from .requirements import enumerate_tdl_paths, make_requirements

ALGORITHMS = ("ppt", "pct", "dct", "bf", "sc", "pg")
REQUIREMENT_ALGORITHMS = ("bf", "sc", "pg")


class Connector:
    """Shortest (fewest-edge) paths with deterministic tie-breaking.

    Distances to a goal set come from a reverse BFS; the path is then read
    forwards, taking the first out-edge in canonical order that gets one step
    closer.
    """

    def __init__(self, m: SutModel):
        self.m = m
        self._dist: dict[frozenset[str], dict[str, int]] = {}

    def distances(self, goals) -> dict[str, int]:
        goals = frozenset(goals)
        dist = self._dist.get(goals)
        if dist is None:
            dist = {g: 0 for g in goals}
            todo = deque(sorted(goals, key=natural_key))
            while todo:
                n = todo.popleft()
                for e in self.m.in_edges[n]:
                    if e.source not in dist:
                        dist[e.source] = dist[n] + 1
                        todo.append(e.source)
            self._dist[goals] = dist
        return dist

    def path(self, src: str, goals) -> Path | None:
        dist = self.distances(goals)
        if src not in dist:
            return None
        out: list[str] = []
        node = src
        while dist[node] > 0:
            for e in self.m.out_edges[node]:
                if dist.get(e.target) == dist[node] - 1:
                    out.append(e.id)
                    node = e.target
                    break
        return tuple(out)

    def to_end(self, src: str) -> Path | None:
        return self.path(src, self.m.ends)

    def from_start(self, dst: str) -> Path | None:
        return self.path(self.m.start, (dst,))

    def stitch(self, core: Path) -> Path:
        """start -> core -> end using shortest connectors on both sides."""
        head = self.m.edge[core[0]].source
        tail = self.m.edge[core[-1]].target
        pre, post = self.from_start(head), self.to_end(tail)
        if pre is None or post is None:
            raise InfeasibleError(f"target {'-'.join(core)} cannot be joined to start and end", [core])
        return pre + tuple(core) + post


# -- PCT / DCT ------------------------------------------------------------------


def pct_targets(m: SutModel, tdl: int) -> list[Path]:
    """All tdl-walks, plus any edge that lies on none of them (only possible for tdl > 1)."""
    walks = enumerate_tdl_paths(m, tdl).paths
    inside = {e for w in walks for e in w}
    extra = [(e.id,) for e in m.edges if e.id not in inside]
    return sort_paths(list(walks) + extra)


def generate_pct(m: SutModel, tdl: int) -> TestSet:
    """Greedy stitching: the first uncovered target (canonical order) is joined
    to start and end by shortest connectors; every target the result contains
    is marked covered."""
    ensure_valid(m)
    conn = Connector(m)
    targets = pct_targets(m, tdl)
    uncovered = list(targets)
    cases: list[Path] = []
    while uncovered:
        t = conn.stitch(uncovered[0])
        cases.append(t)
        uncovered = [p for p in uncovered if not is_subpath(p, t)]
    return TestSet(tuple(cases), "pct", tdl)


def reduce_dct(pct_set: TestSet, m: SutModel, ptl: PTL | str) -> TestSet:
    """Keep only the PCT cases that touch at least one qualifying edge."""
    ptl = PTL(ptl)
    wanted = m.priority_edges(ptl)
    kept = tuple(c for c in pct_set.cases if any(e in wanted for e in c))
    return TestSet(kept, "dct", pct_set.tdl, ptl.value)


# -- requirement-based baselines ------------------------------------------------------


def _req_edges(g: SutModel, r: RequirementSet) -> list[Path]:
    return [g.node_path_to_edges(x) for x in r.requirements]


def _candidates(g: SutModel, reqs: Sequence[Path]) -> list[Path]:
    conn = Connector(g)
    out: list[Path] = []
    seen = set()
    for r in reqs:
        try:
            c = conn.stitch(r)
        except InfeasibleError:
            raise InfeasibleError(f"requirement {'-'.join(g.path_nodes(r))} is unreachable", [g.path_nodes(r)]) from None
        if c not in seen:
            seen.add(c)
            out.append(c)
    return sorted(out, key=path_key)


def _cover_sets(cands: Sequence[Path], reqs: Sequence[Path]) -> list[frozenset[int]]:
    return [frozenset(i for i, r in enumerate(reqs) if is_subpath(r, c)) for c in cands]


def _bf_pool(g: SutModel, reqs: Sequence[Path]) -> list[Path]:
    cands = _candidates(g, reqs)
    cover = _cover_sets(cands, reqs)
    kept = list(range(len(cands)))
    for i in range(len(cands)):
        others = set()
        for j in kept:
            if j != i:
                others |= cover[j]
        if cover[i] <= others:
            kept.remove(i)
    return [cands[i] for i in kept]


def generate_bf(g: SutModel, r: RequirementSet) -> TestSet:
    """One stitched candidate per requirement, then redundant candidates are dropped."""
    _require_simple(g)
    return TestSet(tuple(_bf_pool(g, _req_edges(g, r))), "bf")


def generate_sc(g: SutModel, r: RequirementSet) -> TestSet:
    """Greedy set cover over the brute-force output.

    Choosing among BF's kept candidates means SC never returns more cases
    than BF: every pick covers at least one new requirement.
    """
    _require_simple(g)
    reqs = _req_edges(g, r)
    cands = _bf_pool(g, reqs)
    cover = _cover_sets(cands, reqs)
    left = set(range(len(reqs)))
    chosen: list[int] = []
    while left:
        best = max(range(len(cands)), key=lambda i: (len(cover[i] & left), -i))
        chosen.append(best)
        left -= cover[best]
    return TestSet(tuple(cands[i] for i in chosen), "sc")


def _overlap(a: NodePath, b: NodePath) -> int:
    """Largest k >= 1 with a[-k:] == b[:k] (k < len(b)), or 0."""
    for k in range(min(len(a), len(b) - 1), 0, -1):
        if a[-k:] == b[:k]:
            return k
    return 0


def _prefix_graph_arcs(g: SutModel, reqs: Sequence[NodePath], conn: Connector):
    """arcs[(i, j)] = (cost, joining edge ids between r_i's tail and the rest of r_j)."""
    arcs = {}
    for i, a in enumerate(reqs):
        for j, b in enumerate(reqs):
            if i == j:
                continue
            k = _overlap(a, b)
            if k:
                rest = g.node_path_to_edges(b[k - 1 :])
                arcs[i, j] = (len(rest), rest)
                continue
            link = conn.path(a[-1], (b[0],))
            if link is None:
                continue
            rest = link + g.node_path_to_edges(b)
            arcs[i, j] = (len(rest), rest)
    return arcs


def _max_matching(n: int, arcs) -> dict[int, int]:
    """Maximum bipartite matching (left copy i -> right copy j); arc costs are ignored."""
    if n == 0 or not arcs:
        return {}
    ij = sorted(arcs)
    rows = np.array([i for i, _ in ij])
    cols = np.array([j for _, j in ij])
    adj = csr_matrix((np.ones(len(ij), dtype=np.int8), (rows, cols)), shape=(n, n))
    match = maximum_bipartite_matching(adj, perm_type="column")
    return {i: int(j) for i, j in enumerate(match) if j >= 0}


def _break_cycles(succ: dict[int, int], arcs) -> dict[int, int]:
    succ = dict(succ)
    seen: set[int] = set()
    for s in sorted(succ):
        if s in seen:
            continue
        walk, node = [], s
        while node in succ and node not in seen and node not in walk:
            walk.append(node)
            node = succ[node]
        seen.update(walk)
        if node in walk:  # closed a cycle: drop its costliest arc
            cyc = walk[walk.index(node) :]
            worst = max(cyc, key=lambda u: (arcs[u, succ[u]][0], -u))
            del succ[worst]
    return succ


def generate_pg(g: SutModel, r: RequirementSet) -> TestSet:
    """Chain requirements along a minimum path cover of the prefix graph.

    Arcs join r_i to r_j either by overlap (a suffix of r_i is a prefix of
    r_j) or by a shortest connector from r_i's last node to r_j's first. A
    maximum bipartite matching picks successors; each resulting
    chain is spliced into one path and stitched to start and end.
    """
    _require_simple(g)
    conn = Connector(g)
    # requirements inside other requirements are covered for free
    raw = list(r.requirements)
    edges_of = {x: g.node_path_to_edges(x) for x in raw}
    reqs = [x for x in raw if not any(x != y and is_subpath(edges_of[x], edges_of[y]) for y in raw)]
    arcs = _prefix_graph_arcs(g, reqs, conn)
    succ = _break_cycles(_max_matching(len(reqs), arcs), arcs)
    has_pred = set(succ.values())
    cases: list[Path] = []
    for head in range(len(reqs)):
        if head in has_pred:
            continue
        core = list(edges_of[reqs[head]])
        node = head
        while node in succ:
            nxt = succ[node]
            core.extend(arcs[node, nxt][1])
            node = nxt
        try:
            cases.append(conn.stitch(tuple(core)))
        except InfeasibleError:
            raise InfeasibleError(f"requirement {'-'.join(reqs[head])} is unreachable", [reqs[head]]) from None
    return TestSet(tuple(cases), "pg")


GENERATORS: dict[str, Callable[[SutModel, RequirementSet], TestSet]] = {
    "bf": generate_bf,
    "sc": generate_sc,
    "pg": generate_pg,
}


def _require_simple(g: SutModel) -> None:
    if not g.is_simple:
        raise ModelError("requirement-based baselines need a simple graph; split parallel edges first")
    ensure_valid(g)


def run_requirement_baseline(
    m: SutModel,
    algorithm: str,
    conversion: str,
    ptl: PTL | str | None = None,
    *,
    timer: Callable[[], int] | None = None,
) -> tuple[TestSet, RequirementSet, SutModel, int]:
    """Split ``m``, build requirements, run BF/SC/PG and translate cases back to ``m``.

    Returns (test set on m, requirements on the split graph, split graph,
    elapsed generation nanoseconds). Requirement construction is not timed.
    """
    gen = GENERATORS[algorithm]
    g, split = split_parallel_edges(m)
    reqs = make_requirements(g, conversion, ptl)
    t0 = timer() if timer else 0
    ts = gen(g, reqs)
    cases = translate_paths(ts.cases, split) if split else list(ts.cases)
    elapsed = (timer() - t0) if timer else 0
    ptl_value = PTL(ptl).value if ptl is not None else None
    result = TestSet(tuple(cases), algorithm, None, ptl_value, conversion)
    return result, reqs, g, elapsed

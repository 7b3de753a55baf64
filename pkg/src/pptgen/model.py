"""SUT model: a weighted directed multigraph with one start node and a set of end nodes.

Paths are plain tuples of edge ids. Requirements are tuples of node ids, the
orientation used by the requirement-based baselines. Everything here is
immutable and ordered canonically (natural, numeric-aware order of ids) so
that all downstream algorithms are deterministic.
"""

from __future__ import annotations

import enum
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import ModelError, ModelFormatError, PathError

Path = tuple[str, ...]
NodePath = tuple[str, ...]

SPLIT_SUFFIX = "__split"

_DIGITS = re.compile(r"(\d+)")


def natural_key(s: str) -> tuple:
    """Sort key that orders "2" before "10" and "e2" before "e10"."""
    return tuple((0, int(tok), "") if tok.isdigit() else (1, 0, tok) for tok in _DIGITS.split(s) if tok)


def path_key(path: Sequence[str]) -> tuple:
    """Canonical order of paths: fewer edges first, then natural order of ids."""
    return (len(path), tuple(natural_key(e) for e in path))


def sort_paths(paths: Iterable[Sequence[str]]) -> list[tuple[str, ...]]:
    return sorted({tuple(p) for p in paths}, key=path_key)


class Priority(str, enum.Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


class PTL(str, enum.Enum):
    """Prioritized test level: which priority classes must be covered."""

    HIGH = "high"
    MEDIUM = "medium"

    @property
    def classes(self) -> frozenset[Priority]:
        if self is PTL.HIGH:
            return frozenset({Priority.HIGH})
        return frozenset({Priority.HIGH, Priority.MEDIUM})


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    priority: Priority = Priority.LOW


@dataclass(frozen=True)
class SutModel:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    start: str
    ends: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=natural_key)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: natural_key(e.id))))
        object.__setattr__(self, "ends", frozenset(self.ends))
        if len(set(self.nodes)) != len(self.nodes):
            dup = _first_duplicate(self.nodes)
            raise ModelError(f"duplicate node id {dup!r}")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ModelError(f"duplicate edge id {_first_duplicate(ids)!r}")
        known = set(self.nodes)
        if self.start not in known:
            raise ModelError(f"unknown node reference {self.start!r} (start)")
        if not self.ends:
            raise ModelError("empty end set")
        for n in sorted(self.ends, key=natural_key):
            if n not in known:
                raise ModelError(f"unknown node reference {n!r} (end)")
        for e in self.edges:
            for n in (e.source, e.target):
                if n not in known:
                    raise ModelError(f"unknown node reference {n!r} in edge {e.id!r}")
            if not isinstance(e.priority, Priority):
                raise ModelError(f"edge {e.id!r} has invalid priority {e.priority!r}")

    @cached_property
    def edge(self) -> Mapping[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> Mapping[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.source].append(e)
        return {n: tuple(es) for n, es in out.items()}

    @cached_property
    def in_edges(self) -> Mapping[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            inc[e.target].append(e)
        return {n: tuple(es) for n, es in inc.items()}

    def edges_with(self, *priorities: Priority) -> frozenset[str]:
        wanted = set(priorities)
        return frozenset(e.id for e in self.edges if e.priority in wanted)

    @property
    def high(self) -> frozenset[str]:
        return self.edges_with(Priority.HIGH)

    @property
    def medium(self) -> frozenset[str]:
        return self.edges_with(Priority.MEDIUM)

    @property
    def low(self) -> frozenset[str]:
        return self.edges_with(Priority.LOW)

    def priority_edges(self, ptl: PTL | str) -> frozenset[str]:
        """A_h for ptl=high, A_h ∪ A_m for ptl=medium."""
        return self.edges_with(*PTL(ptl).classes)

    @cached_property
    def edge_between(self) -> Mapping[tuple[str, str], str]:
        """(source, target) -> first edge id; only meaningful on simple graphs."""
        out: dict[tuple[str, str], str] = {}
        for e in self.edges:
            out.setdefault((e.source, e.target), e.id)
        return out

    @property
    def is_simple(self) -> bool:
        return len(self.edge_between) == len(self.edges)

    # -- paths ---------------------------------------------------------------

    def path_nodes(self, path: Sequence[str]) -> NodePath:
        """Node sequence visited by ``path``; raises PathError if it is not a path."""
        if not path:
            raise PathError("empty path")
        nodes = []
        for i, eid in enumerate(path):
            e = self.edge.get(eid)
            if e is None:
                raise PathError(f"unknown edge {eid!r}")
            if i == 0:
                nodes.append(e.source)
            elif nodes[-1] != e.source:
                raise PathError(f"edge {eid!r} does not continue from node {nodes[-1]!r}")
            nodes.append(e.target)
        return tuple(nodes)

    def is_path(self, path: Sequence[str]) -> bool:
        try:
            self.path_nodes(path)
        except PathError:
            return False
        return True

    def is_test_case(self, path: Sequence[str]) -> bool:
        try:
            nodes = self.path_nodes(path)
        except PathError:
            return False
        return nodes[0] == self.start and nodes[-1] in self.ends

    def node_path_to_edges(self, nodes: Sequence[str]) -> Path:
        """Edge ids along a node sequence of a simple graph."""
        out = []
        for u, v in zip(nodes, nodes[1:]):
            eid = self.edge_between.get((u, v))
            if eid is None:
                raise PathError(f"no edge {u!r}->{v!r}")
            out.append(eid)
        return tuple(out)


def _first_duplicate(items):
    seen = set()
    for x in items:
        if x in seen:
            return x
        seen.add(x)
    return None


def is_subpath(sub: Sequence[str], path: Sequence[str]) -> bool:
    """True if ``sub`` occurs as a contiguous run inside ``path``."""
    n, m = len(sub), len(path)
    if n == 0:
        return True
    first = sub[0]
    sub = tuple(sub)
    for i in range(m - n + 1):
        if path[i] == first and tuple(path[i : i + n]) == sub:
            return True
    return False


def steps(path: Sequence[str]) -> int:
    """Test-case steps: node occurrences plus edge occurrences."""
    return 2 * len(path) + 1


# -- test artifacts ------------------------------------------------------------


@dataclass(frozen=True)
class TestSet:
    __test__ = False  # keep pytest from collecting this

    cases: tuple[Path, ...]
    algorithm: str = ""
    tdl: int | None = None
    ptl: str | None = None
    conversion: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "cases", tuple(tuple(c) for c in self.cases))

    def __len__(self) -> int:
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)

    def validate(self, m: SutModel) -> None:
        for i, c in enumerate(self.cases):
            nodes = m.path_nodes(c)
            if nodes[0] != m.start:
                raise PathError(f"test case {i} starts at {nodes[0]!r}, not at {m.start!r}")
            if nodes[-1] not in m.ends:
                raise PathError(f"test case {i} ends at {nodes[-1]!r}, not at an end node")


@dataclass(frozen=True)
class RequirementSet:
    """Node paths that must each appear inside some test case."""

    requirements: tuple[NodePath, ...]

    def __post_init__(self):
        reqs = sort_paths(self.requirements)
        object.__setattr__(self, "requirements", tuple(reqs))

    def __len__(self) -> int:
        return len(self.requirements)

    def __iter__(self):
        return iter(self.requirements)

    def validate(self, m: SutModel) -> None:
        for r in self.requirements:
            if len(r) < 2:
                raise PathError(f"requirement {r!r} has fewer than two nodes")
            m.node_path_to_edges(r)


# -- validation ----------------------------------------------------------------


def _reachable(start_nodes: Iterable[str], adjacency: Mapping[str, Iterable[str]]) -> set[str]:
    seen = set(start_nodes)
    todo = deque(seen)
    while todo:
        n = todo.popleft()
        for nxt in adjacency[n]:
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def validate_model(m: SutModel) -> list[str]:
    """List every violated feasibility invariant. An empty list means usable."""
    problems = []
    fwd = {n: [e.target for e in m.out_edges[n]] for n in m.nodes}
    bwd = {n: [e.source for e in m.in_edges[n]] for n in m.nodes}
    from_start = _reachable([m.start], fwd)
    to_end = _reachable(m.ends, bwd)
    for n in m.nodes:
        if n not in from_start:
            problems.append(f"{n} unreachable from start")
    for n in m.nodes:
        if n not in to_end:
            problems.append(f"{n} cannot reach an end node")
    return problems


def ensure_valid(m: SutModel) -> SutModel:
    problems = validate_model(m)
    if problems:
        raise ModelError("invalid model: " + "; ".join(problems))
    return m


# -- (de)serialization -----------------------------------------------------------


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{what}: syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def model_from_dict(data) -> SutModel:
    if not isinstance(data, dict) or not isinstance(data.get("nodes"), list) or not isinstance(data.get("edges"), list):
        raise ModelFormatError("model must be an object with 'nodes' and 'edges' lists")
    nodes, starts, ends = [], [], set()
    for i, nd in enumerate(data["nodes"]):
        if not isinstance(nd, dict) or not isinstance(nd.get("id"), str):
            raise ModelFormatError(f"nodes[{i}]: expected an object with a string 'id'")
        nodes.append(nd["id"])
        if nd.get("start"):
            starts.append(nd["id"])
        if nd.get("end"):
            ends.add(nd["id"])
    if len(starts) != 1:
        raise ModelError(f"expected exactly one start node, found {len(starts)}")
    edges = []
    for i, ed in enumerate(data["edges"]):
        if not isinstance(ed, dict):
            raise ModelFormatError(f"edges[{i}]: expected an object")
        try:
            eid, src, tgt = ed["id"], ed["source"], ed["target"]
        except KeyError as exc:
            raise ModelFormatError(f"edges[{i}]: missing field {exc.args[0]!r}") from None
        if not all(isinstance(x, str) for x in (eid, src, tgt)):
            raise ModelFormatError(f"edges[{i}]: id, source and target must be strings")
        prio = ed.get("priority", "low")
        try:
            prio = Priority(prio)
        except ValueError:
            raise ModelFormatError(f"edges[{i}]: unknown priority {prio!r}") from None
        edges.append(Edge(eid, src, tgt, prio))
    return SutModel(tuple(nodes), tuple(edges), starts[0], frozenset(ends))


def parse_model(text: str, validate: bool = True) -> SutModel:
    """Decode a model file. With ``validate`` the reachability checks must pass too."""
    m = model_from_dict(_load_json(text, "model"))
    return ensure_valid(m) if validate else m


def model_to_dict(m: SutModel) -> dict:
    nodes = []
    for n in m.nodes:
        nd: dict = {"id": n}
        if n == m.start:
            nd["start"] = True
        if n in m.ends:
            nd["end"] = True
        nodes.append(nd)
    edges = [{"id": e.id, "source": e.source, "target": e.target, "priority": e.priority.value} for e in m.edges]
    return {"nodes": nodes, "edges": edges}


def serialize_model(m: SutModel) -> str:
    return json.dumps(model_to_dict(m), indent=1) + "\n"


def parse_test_set(text: str) -> TestSet:
    data = _load_json(text, "test set")
    if not isinstance(data, dict) or not isinstance(data.get("cases"), list):
        raise ModelFormatError("test set must be an object with a 'cases' list")
    cases = []
    for i, c in enumerate(data["cases"]):
        if not isinstance(c, list) or not all(isinstance(e, str) for e in c):
            raise ModelFormatError(f"cases[{i}]: expected a list of edge-id strings")
        cases.append(tuple(c))
    tdl = data.get("tdl")
    return TestSet(tuple(cases), data.get("algorithm", ""), tdl, data.get("ptl"), data.get("conversion"))


def serialize_test_set(t: TestSet) -> str:
    data = {"algorithm": t.algorithm, "tdl": t.tdl, "ptl": t.ptl, "conversion": t.conversion, "cases": [list(c) for c in t.cases]}
    return json.dumps(data) + "\n"


def parse_requirements(text: str) -> RequirementSet:
    data = _load_json(text, "requirements")
    if not isinstance(data, dict) or not isinstance(data.get("requirements"), list):
        raise ModelFormatError("requirements file must be an object with a 'requirements' list")
    reqs = []
    for i, r in enumerate(data["requirements"]):
        if not isinstance(r, list) or not all(isinstance(n, str) for n in r):
            raise ModelFormatError(f"requirements[{i}]: expected a list of node-id strings")
        reqs.append(tuple(r))
    return RequirementSet(tuple(reqs))


def serialize_requirements(r: RequirementSet) -> str:
    return json.dumps({"requirements": [list(x) for x in r.requirements]}) + "\n"


# -- parallel-edge splitting -------------------------------------------------------


@dataclass(frozen=True)
class SplitMap:
    """Synthetic split node -> the original edge it stands for.

    The split edge ``e`` becomes ``u -e__in-> e__split -e__out-> v``.
    """

    nodes: Mapping[str, str] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.nodes)

    @cached_property
    def by_edge(self) -> Mapping[str, str]:
        return {orig: node for node, orig in self.nodes.items()}

    @staticmethod
    def halves(edge_id: str) -> tuple[str, str]:
        return f"{edge_id}__in", f"{edge_id}__out"

    def image(self, path: Sequence[str]) -> Path:
        """Path in the split graph that corresponds to an original path."""
        out: list[str] = []
        for e in path:
            if e in self.by_edge:
                out.extend(self.halves(e))
            else:
                out.append(e)
        return tuple(out)


def split_parallel_edges(m: SutModel) -> tuple[SutModel, SplitMap]:
    """Make ``m`` a simple digraph by routing every extra parallel edge through a new node.

    The first edge (canonical order) of each parallel bundle is kept as is.
    Both halves of a split edge inherit its priority.
    """
    seen: set[tuple[str, str]] = set()
    nodes = list(m.nodes)
    edges: list[Edge] = []
    mapping: dict[str, str] = {}
    taken = set(m.nodes)
    for e in m.edges:
        pair = (e.source, e.target)
        if pair not in seen:
            seen.add(pair)
            edges.append(e)
            continue
        node = f"{e.id}{SPLIT_SUFFIX}"
        if node in taken:
            raise ModelError(f"split node id {node!r} collides with an existing node")
        taken.add(node)
        nodes.append(node)
        mapping[node] = e.id
        h_in, h_out = SplitMap.halves(e.id)
        edges.append(Edge(h_in, e.source, node, e.priority))
        edges.append(Edge(h_out, node, e.target, e.priority))
    if not mapping:
        return m, SplitMap({})
    return SutModel(tuple(nodes), tuple(edges), m.start, m.ends), SplitMap(mapping)


def translate_paths(paths: Iterable[Sequence[str]], split: SplitMap, split_model: SutModel | None = None) -> list[Path]:
    """Collapse each split-node detour back into the original edge id.

    Paths may be given as edge-id sequences of the split graph. A path that
    enters a split node without leaving it (or leaves without entering) is
    rejected.
    """
    paths = [tuple(p) for p in paths]
    out = []
    for p in paths:
        res: list[str] = []
        pending: str | None = None
        for e in p:
            orig = _split_half(e, split)
            if orig is None:
                if pending is not None:
                    raise PathError(f"path {p!r} enters split node of edge {pending!r} without leaving it")
                res.append(e)
                continue
            half, eid = orig
            if half == "in":
                if pending is not None:
                    raise PathError(f"path {p!r} enters split node of edge {pending!r} without leaving it")
                pending = eid
            else:
                if pending != eid:
                    raise PathError(f"path {p!r} leaves split node of edge {eid!r} without entering it")
                res.append(eid)
                pending = None
        if pending is not None:
            raise PathError(f"path {p!r} ends inside split node of edge {pending!r}")
        out.append(tuple(res))
    if split_model is not None:
        for p in paths:
            split_model.path_nodes(p)
    return out


def _split_half(edge_id: str, split: SplitMap):
    for half in ("in", "out"):
        suffix = f"__{half}"
        if edge_id.endswith(suffix):
            orig = edge_id[: -len(suffix)]
            if orig in split.by_edge:
                return half, orig
    return None

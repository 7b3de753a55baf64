"""Target paths for PPT and test requirements for the requirement-based baselines."""

from __future__ import annotations

from dataclasses import dataclass

from .model import PTL, Path, RequirementSet, SutModel, is_subpath, natural_key, path_key, sort_paths


@dataclass(frozen=True)
class TargetPathSet:
    paths: tuple[Path, ...]
    tdl: int
    ptl: str = "all"  # "all" before priority filtering

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(sort_paths(self.paths)))

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def enumerate_tdl_paths(m: SutModel, tdl: int) -> TargetPathSet:
    """Every walk of exactly ``tdl`` consecutive edges, from every node.

    Edges may repeat inside a walk when the model has loops.
    """
    if tdl < 1:
        raise ValueError("tdl must be >= 1")
    found: set[Path] = set()
    stack: list[str] = []

    def walk(node: str, depth: int) -> None:
        if depth == 0:
            found.add(tuple(stack))
            return
        for e in m.out_edges[node]:
            stack.append(e.id)
            walk(e.target, depth - 1)
            stack.pop()

    for d in m.nodes:
        walk(d, tdl)
    return TargetPathSet(tuple(found), tdl)


def select_relevant(m: SutModel, all_tdl: TargetPathSet, tdl: int, ptl: PTL | str) -> TargetPathSet:
    """Keep target paths whose first edge carries a qualifying priority.

    For tdl > 1, a qualifying edge that ends up in no kept path (e.g. an edge
    into a terminal node, which starts no longer walk) is added on its own.
    """
    ptl = PTL(ptl)
    wanted = m.priority_edges(ptl)
    kept = [p for p in all_tdl.paths if p[0] in wanted]
    if tdl > 1:
        contained = {e for p in kept for e in p}
        kept.extend((a,) for a in sorted(wanted - contained, key=natural_key))
    return TargetPathSet(tuple(kept), tdl, ptl.value)


# -- requirement conversions ------------------------------------------------------


def convert_atomic(m: SutModel, ptl: PTL | str) -> RequirementSet:
    """One (source, target) requirement per qualifying edge."""
    wanted = m.priority_edges(ptl)
    return RequirementSet(tuple((e.source, e.target) for e in m.edges if e.id in wanted))


def _maximal_trails(m: SutModel, wanted: frozenset[str]) -> set[Path]:
    # trails: each edge at most once per path, so cyclic priority subgraphs terminate
    out: set[Path] = set()
    trail: list[str] = []
    used: set[str] = set()

    def extend(node: str) -> None:
        nxt = [e for e in m.out_edges[node] if e.id in wanted and e.id not in used]
        if not nxt:
            out.add(tuple(trail))
            return
        for e in nxt:
            trail.append(e.id)
            used.add(e.id)
            extend(e.target)
            used.discard(e.id)
            trail.pop()

    for e in m.edges:
        if e.id in wanted:
            trail.append(e.id)
            used.add(e.id)
            extend(e.target)
            used.clear()
            trail.clear()
    return out


def convert_sequence(m: SutModel, ptl: PTL | str) -> RequirementSet:
    """Maximal paths made only of qualifying edges; none is a subpath of another."""
    trails = sorted(_maximal_trails(m, m.priority_edges(ptl)), key=lambda t: (-len(t), path_key(t)))
    keep: list[Path] = []
    for t in trails:
        if not any(is_subpath(t, k) for k in keep):
            keep.append(t)
    return RequirementSet(tuple(m.path_nodes(p) for p in keep))


def edge_pair_requirements(m: SutModel) -> RequirementSet:
    """One (d_i, d_i+1, d_i+2) requirement per pair of adjacent edges."""
    reqs = []
    for v in m.nodes:
        for a in m.in_edges[v]:
            for b in m.out_edges[v]:
                reqs.append((a.source, v, b.target))
    return RequirementSet(tuple(reqs))


CONVERSIONS = {
    "atomic": convert_atomic,
    "sequence": convert_sequence,
}


def make_requirements(m: SutModel, conversion: str, ptl: PTL | str | None = None) -> RequirementSet:
    if conversion == "edge-pair":
        return edge_pair_requirements(m)
    try:
        conv = CONVERSIONS[conversion]
    except KeyError:
        raise ValueError(f"unknown conversion {conversion!r}") from None
    if ptl is None:
        raise ValueError(f"conversion {conversion!r} needs a ptl")
    return conv(m, ptl)

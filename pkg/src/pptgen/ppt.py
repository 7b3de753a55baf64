"""Prioritized Process Test generation.

Pipeline: enumerate TDL walks -> keep the priority-led ones (the targets) ->
enumerate start-to-end candidates that contain a target -> index targets by
their second node -> greedily pick the candidate covering most remaining
targets until none remain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InfeasibleError, PPTError
from .model import PTL, Path, SutModel, TestSet, ensure_valid, is_subpath, natural_key, path_key, sort_paths
from .requirements import TargetPathSet, enumerate_tdl_paths, select_relevant

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexedTargetTable:
    """Remaining targets, bucketed by the second node of each path."""

    buckets: Mapping[str, tuple[Path, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return sum(len(v) for v in self.buckets.values())

    def __bool__(self) -> bool:
        return bool(self.buckets)

    def paths(self) -> list[Path]:
        return sort_paths(p for ps in self.buckets.values() for p in ps)

    def without(self, drop) -> "IndexedTargetTable":
        buckets = {}
        for k, ps in self.buckets.items():
            left = tuple(p for p in ps if p not in drop)
            if left:
                buckets[k] = left
        return IndexedTargetTable(buckets)


@dataclass(frozen=True)
class CandidatePool:
    """Start-to-end candidate test cases in canonical order (shortest first)."""

    paths: tuple[Path, ...]

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def build_ptab(m: SutModel, targets) -> IndexedTargetTable:
    buckets: dict[str, list[Path]] = {}
    for p in sort_paths(targets):
        second = m.edge[p[0]].target
        buckets.setdefault(second, []).append(p)
    return IndexedTargetTable({k: tuple(v) for k, v in sorted(buckets.items(), key=lambda kv: natural_key(kv[0]))})


def score(ptab: IndexedTargetTable, candidate: Sequence[str]) -> int:
    return sum(1 for ps in ptab.buckets.values() for p in ps if is_subpath(p, candidate))


def select_best_e2e(ptab: IndexedTargetTable, pool: CandidatePool) -> Path:
    """Candidate containing the most remaining targets; earliest in pool order on ties."""
    best, best_score = None, 0
    for x in pool.paths:
        s = score(ptab, x)
        if s > best_score:
            best, best_score = x, s
    if best is None:
        raise PPTError("no candidate covers any remaining target")
    return best


def remove_used_targets(ptab: IndexedTargetTable, b: Sequence[str]) -> IndexedTargetTable:
    return ptab.without({p for ps in ptab.buckets.values() for p in ps if is_subpath(p, b)})


def prune_candidates(ptab: IndexedTargetTable, pool: CandidatePool) -> CandidatePool:
    """Drop candidates that contain none of the remaining targets (scored over all buckets)."""
    return CandidatePool(tuple(x for x in pool.paths if score(ptab, x) > 0))


# -- candidate enumeration ---------------------------------------------------------


def _walk_e2e(m: SutModel, max_edge_repeats: int, on_end, windows=None):
    """Depth-first walk over start-to-end paths honouring the repeat bound.

    ``windows`` maps a tuple of trailing edges to a bit; the bits of all
    windows seen so far are OR-ed into a mask handed to ``on_end``.
    """
    lengths = sorted({len(w) for w in windows}) if windows else []
    counts: dict[str, int] = {}
    path: list[str] = []
    # explicit stack: (node, mask, out-edge iterator)
    stack = [(m.start, 0, iter(m.out_edges[m.start]))]
    while stack:
        node, mask, it = stack[-1]
        e = next(it, None)
        if e is None:
            stack.pop()
            if path:
                gone = path.pop()
                counts[gone] -= 1
            continue
        c = counts.get(e.id, 0)
        if c >= max_edge_repeats:
            continue
        counts[e.id] = c + 1
        path.append(e.id)
        new_mask = mask
        for n in lengths:
            if n <= len(path):
                bit = windows.get(tuple(path[-n:]))
                if bit:
                    new_mask |= bit
        if e.target in m.ends:
            if on_end(path, new_mask) is False:
                return
        stack.append((e.target, new_mask, iter(m.out_edges[e.target])))


def count_e2e_paths(m: SutModel, max_edge_repeats: int, cap: int | None = None) -> int:
    """Number of start-to-end paths under the repeat bound, stopping early past ``cap``."""
    n = 0

    def on_end(path, mask):
        nonlocal n
        n += 1
        return cap is None or n <= cap

    _walk_e2e(m, max_edge_repeats, on_end)
    return n


def _enumerate_masked(m: SutModel, targets: Sequence[Path], max_edge_repeats: int) -> list[tuple[Path, int]]:
    bits = {p: 1 << i for i, p in enumerate(targets)}
    found: list[tuple[Path, int]] = []

    def on_end(path, mask):
        if mask:
            found.append((tuple(path), mask))

    _walk_e2e(m, max_edge_repeats, on_end, bits)
    found.sort(key=lambda pm: path_key(pm[0]))
    return found


def _uncovered(targets: Sequence[Path], masks) -> list[Path]:
    covered = 0
    for _, mk in masks:
        covered |= mk
    return [p for i, p in enumerate(targets) if not covered >> i & 1]


def uncoverable_targets(m: SutModel, targets, max_edge_repeats: int) -> list[Path]:
    """Targets that no start-to-end path under the repeat bound contains."""
    targets = sort_paths(targets)
    full = (1 << len(targets)) - 1
    found = 0

    def on_end(path, mask):
        nonlocal found
        found |= mask
        return found != full

    _walk_e2e(m, max_edge_repeats, on_end, {p: 1 << i for i, p in enumerate(targets)})
    return [p for i, p in enumerate(targets) if not found >> i & 1]


def _check_feasible(targets: Sequence[Path], masks) -> None:
    missing = _uncovered(targets, masks)
    if missing:
        shown = ", ".join("-".join(p) for p in missing)
        raise InfeasibleError(f"no candidate covers target {shown}", missing)


def enumerate_e2e_candidates(m: SutModel, targets, max_edge_repeats: int = 1) -> CandidatePool:
    """All start-to-end paths (each edge used at most ``max_edge_repeats`` times)
    that contain at least one target as a contiguous subpath."""
    if max_edge_repeats < 1:
        raise ValueError("max_edge_repeats must be >= 1")
    targets = sort_paths(targets)
    masked = _enumerate_masked(m, targets, max_edge_repeats)
    _check_feasible(targets, masked)
    return CandidatePool(tuple(p for p, _ in masked))


def create_test_cases(ptab: IndexedTargetTable, pool: CandidatePool) -> list[Path]:
    """Greedy loop: select best, drop the targets it covers, prune the pool."""
    targets = ptab.paths()
    bits = {p: 1 << i for i, p in enumerate(targets)}
    masks = []
    for x in pool.paths:
        mk = 0
        for p, b in bits.items():
            if is_subpath(p, x):
                mk |= b
        masks.append(mk)
    return _greedy(pool.paths, masks, (1 << len(targets)) - 1)


def _greedy(paths: Sequence[Path], masks: Sequence[int], remaining: int) -> list[Path]:
    # bitmask form of select_best_e2e / remove_used_targets / prune_candidates
    live = [i for i, mk in enumerate(masks) if mk & remaining]
    out: list[Path] = []
    while remaining:
        best, best_score = -1, 0
        for i in live:
            s = (masks[i] & remaining).bit_count()
            if s > best_score:
                best, best_score = i, s
        if best < 0:
            raise PPTError("no candidate covers any remaining target")
        out.append(paths[best])
        remaining &= ~masks[best]
        live = [i for i in live if masks[i] & remaining]
    return out


def generate_ppt(m: SutModel, tdl: int, ptl: PTL | str, max_edge_repeats: int | None = None) -> TestSet:
    ensure_valid(m)
    ptl = PTL(ptl)
    repeats = tdl if max_edge_repeats is None else max_edge_repeats
    targets = select_relevant(m, enumerate_tdl_paths(m, tdl), tdl, ptl)
    meta = dict(algorithm="ppt", tdl=tdl, ptl=ptl.value)
    if not targets.paths:
        log.warning("no %s-priority targets at tdl=%d; returning an empty test set", ptl.value, tdl)
        return TestSet((), **meta)
    cases = ppt_from_targets(m, targets, repeats)
    return TestSet(tuple(cases), **meta)


def ppt_from_targets(m: SutModel, targets: TargetPathSet, max_edge_repeats: int) -> list[Path]:
    paths = sort_paths(targets)
    masked = _enumerate_masked(m, paths, max_edge_repeats)
    _check_feasible(paths, masked)
    return _greedy([p for p, _ in masked], [mk for _, mk in masked], (1 << len(paths)) - 1)

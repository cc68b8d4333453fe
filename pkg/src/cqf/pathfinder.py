"""Ranked enumeration of simple paths and point-to-point query composition.

Paths between two object types are produced strictly in relevance order
(fewest steps first, verbalization text breaking ties) and in batches, so a
caller can keep asking for MORE without the full path set ever being
materialized.  Relevance-order emission comes from a best-first frontier over
partial simple paths: a partial path is only kept if the target is still
reachable through unvisited object types, so the frontier never holds dead
ends and exhaustion is detected exactly.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, replace

from . import schema as sch
from .errors import BadIndexError, InvalidPathError, NoPathError
from .schema import SchemaGraph, SchemaPath

DEFAULT_BATCH = 5


@dataclass(frozen=True)
class WeightedPath:
    path: SchemaPath
    weight: int


def path_weight(g: SchemaGraph, p: SchemaPath) -> int:
    """Relevance weight of a path: its step count."""
    sch.validate_path(g, p)
    return len(p.steps)


def _step_keys(p: SchemaPath) -> tuple[tuple[str, str], ...]:
    return tuple((s.fact_type, s.direction) for s in p.steps)


def path_order_key(g: SchemaGraph, p: SchemaPath):
    """Total order used everywhere paths are ranked."""
    return (len(p.steps), sch.verbalize_path(g, p), _step_keys(p))


def _reaches(g: SchemaGraph, start: str, target: str, blocked: frozenset[str]) -> bool:
    """True when `target` is reachable from `start` avoiding `blocked` nodes."""
    if start == target:
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for step in g.adjacency[node]:
            nxt = sch.step_target(g, step)
            if nxt in seen or nxt in blocked:
                continue
            if nxt == target:
                return True
            seen.add(nxt)
            queue.append(nxt)
    return False


class PathEnumerator:
    """Resumable generator of simple paths from one object type to another.

    Paths are emitted in (weight, verbalization, step ids) order with no
    duplicates; `exhausted` becomes true exactly when every simple path has
    been emitted.  Single-owner: never drive one enumerator concurrently.
    """

    def __init__(self, g: SchemaGraph, source: str, target: str):
        sch.require_object_type(g, source)
        sch.require_object_type(g, target)
        self.graph = g
        self.source = source
        self.target = target
        self.emitted: list[WeightedPath] = []
        self._heap: list[tuple] = []
        self._counter = 0  # heap tiebreak, never reached (keys are unique)
        if _reaches(g, source, target, frozenset()):
            seed = SchemaPath(source)
            self._push(seed, sch.head_display(source))
        self.exhausted = not self._heap

    def _push(self, p: SchemaPath, verbalization: str) -> None:
        self._counter += 1
        heapq.heappush(
            self._heap,
            (len(p.steps), verbalization, _step_keys(p), self._counter, p),
        )

    def next_batch(self, batch: int = DEFAULT_BATCH) -> list[WeightedPath]:
        """Return up to `batch` further paths; short or empty once exhausted."""
        if batch < 1:
            raise ValueError("batch must be >= 1")
        g = self.graph
        out: list[WeightedPath] = []
        while self._heap and len(out) < batch:
            weight, verbalization, _, _, p = heapq.heappop(self._heap)
            tail = sch.path_tail(g, p)
            if tail == self.target:
                wp = WeightedPath(p, weight)
                out.append(wp)
                self.emitted.append(wp)
                # Extensions of a complete path would have to revisit the
                # target to complete again, so this path is never extended.
                continue
            visited = frozenset(sch.path_nodes(g, p))
            used_facts = {s.fact_type for s in p.steps}
            for step in g.adjacency[tail]:
                nxt = sch.step_target(g, step)
                if nxt in visited or step.fact_type in used_facts:
                    continue
                if nxt != self.target and not _reaches(
                    g, nxt, self.target, visited
                ):
                    continue
                child = SchemaPath(p.head, p.steps + (step,))
                self._push(child, f"{verbalization} {sch.step_text(g, step)}")
        self.exhausted = not self._heap
        return out


def open_enumeration(g: SchemaGraph, source: str, target: str) -> PathEnumerator:
    """Start a lazy enumeration; nothing is emitted until the first batch."""
    return PathEnumerator(g, source, target)


def next_batch(e: PathEnumerator, batch: int = DEFAULT_BATCH) -> list[WeightedPath]:
    return e.next_batch(batch)


def drain(e: PathEnumerator, chunk: int = 64) -> list[WeightedPath]:
    """Exhaust an enumerator; convenience for tests and batch tooling."""
    while not e.exhausted:
        e.next_batch(chunk)
    return list(e.emitted)


def concat_paths(g: SchemaGraph, p: SchemaPath, q: SchemaPath) -> SchemaPath:
    """Join two paths where the first ends exactly where the second starts."""
    tail = sch.path_tail(g, p)
    if tail != q.head:
        raise InvalidPathError(
            f"cannot concatenate: first path ends at '{tail}', "
            f"second starts at '{q.head}'"
        )
    return SchemaPath(p.head, p.steps + q.steps)


# ---------------------------------------------------------------------------
# Point-to-point queries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PpqSegment:
    source: str
    target: str
    offered: tuple[WeightedPath, ...]
    selected_index: int
    enumerator: PathEnumerator

    @property
    def selected(self) -> SchemaPath:
        return self.offered[self.selected_index].path


@dataclass(frozen=True)
class PpqResult:
    points: tuple[str, ...]
    segments: tuple[PpqSegment, ...]


def run_ppq(g: SchemaGraph, points: list[str], batch: int = DEFAULT_BATCH) -> PpqResult:
    """Connect consecutive points with their best paths.

    Each segment's offered list is its first batch; the most likely path
    (index 0) starts out selected.
    """
    if len(points) < 2:
        raise ValueError("a point-to-point query needs at least 2 points")
    for point in points:
        sch.require_object_type(g, point)
    segments = []
    for source, target in zip(points, points[1:]):
        enum = open_enumeration(g, source, target)
        offered = enum.next_batch(batch)
        if not offered:
            raise NoPathError(source, target)
        segments.append(PpqSegment(source, target, tuple(offered), 0, enum))
    return PpqResult(tuple(points), tuple(segments))


def select_alternative(r: PpqResult, segment: int, choice: int) -> PpqResult:
    """Pick a different offered path for one segment; everything else is kept."""
    if not 0 <= segment < len(r.segments):
        raise BadIndexError(f"segment index {segment} out of range "
                            f"(result has {len(r.segments)} segments)")
    seg = r.segments[segment]
    if not 0 <= choice < len(seg.offered):
        raise BadIndexError(f"choice index {choice} out of range "
                            f"(segment offers {len(seg.offered)} paths)")
    new_seg = replace(seg, selected_index=choice)
    segments = r.segments[:segment] + (new_seg,) + r.segments[segment + 1:]
    return PpqResult(r.points, segments)


def more_paths(
    r: PpqResult, segment: int, batch: int = DEFAULT_BATCH
) -> tuple[PpqResult, list[WeightedPath]]:
    """Extend one segment's offered list with its next batch (the MORE press)."""
    if not 0 <= segment < len(r.segments):
        raise BadIndexError(f"segment index {segment} out of range "
                            f"(result has {len(r.segments)} segments)")
    seg = r.segments[segment]
    additions = seg.enumerator.next_batch(batch)
    new_seg = replace(seg, offered=seg.offered + tuple(additions))
    segments = r.segments[:segment] + (new_seg,) + r.segments[segment + 1:]
    return PpqResult(r.points, segments), additions


def combined_selected(g: SchemaGraph, r: PpqResult) -> SchemaPath:
    """The whole-query path: selected segment paths concatenated in order."""
    combined = r.segments[0].selected
    for seg in r.segments[1:]:
        combined = concat_paths(g, combined, seg.selected)
    return combined

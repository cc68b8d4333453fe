"""Query by navigation: a focus path walked step by step through the schema.

A session starts from an object type or any existing path; refines extend the
focus by one departing step (never revisiting an object type, so the focus
stays a simple path) and generalize drops the last step.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import schema as sch
from .errors import IllegalMoveError
from .schema import SchemaGraph, SchemaPath, Step

REFINE = "refine"
GENERALIZE = "generalize"


@dataclass(frozen=True)
class NavMove:
    kind: str  # REFINE | GENERALIZE
    step: Step | None = None


@dataclass(frozen=True)
class NavNode:
    focus: SchemaPath
    history: tuple[NavMove, ...] = ()


def start_session(g: SchemaGraph, origin: str | SchemaPath) -> NavNode:
    """Open a session; an object type origin means a 0-step focus."""
    if isinstance(origin, SchemaPath):
        sch.validate_path(g, origin)
        return NavNode(origin)
    sch.require_object_type(g, origin)
    return NavNode(SchemaPath(origin))


def moves(g: SchemaGraph, n: NavNode) -> list[NavMove]:
    """Legal moves at this node: non-revisiting refines, then generalize."""
    visited = set(sch.path_nodes(g, n.focus))
    tail = sch.path_tail(g, n.focus)
    out = [
        NavMove(REFINE, step)
        for step in sch.adjacent_steps(g, tail)
        if sch.step_target(g, step) not in visited
    ]
    if n.focus.steps:
        out.append(NavMove(GENERALIZE))
    return out


def apply_move(g: SchemaGraph, n: NavNode, m: NavMove) -> NavNode:
    if m not in moves(g, n):
        if m.kind == GENERALIZE:
            raise IllegalMoveError("cannot generalize a 0-step focus")
        raise IllegalMoveError(
            f"illegal move {m.kind}"
            + (f" ({m.step.fact_type} {m.step.direction})" if m.step else "")
        )
    if m.kind == REFINE:
        focus = SchemaPath(n.focus.head, n.focus.steps + (m.step,))
    else:
        focus = SchemaPath(n.focus.head, n.focus.steps[:-1])
    return NavNode(focus, n.history + (m,))


def to_particle(n: NavNode) -> SchemaPath:
    """Hand the focus back to query construction."""
    return n.focus

"""Conceptual schemas: object types, binary fact types, adjacency and verbalization.

The schema is the graph every other module walks.  Object types are nodes,
binary fact types are edges, and each role carries a connector phrase used
when a traversal leaves that role's player toward the other one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import InvalidPathError, SchemaParseError, UnknownObjectTypeError

FORWARD = "forward"
REVERSE = "reverse"

# Vocabulary deciding which reference schemes / value types hold numbers.
# Entity types consult their reference scheme label, value types the words of
# their own name ("NrOfVotes" -> nr, of, votes).
NUMERIC_WORDS = frozenset(
    {"year", "nr", "number", "votes", "count", "amount", "quantity", "total"}
)


@dataclass(frozen=True)
class ObjectType:
    """A node of the schema: an entity (with a reference scheme) or a value type."""

    id: str
    name: str
    kind: str  # "entity" | "value"
    reference_scheme: str | None = None


@dataclass(frozen=True)
class Role:
    """One side of a fact type.

    The connector is the phrase used when traversing the fact type from this
    role's player toward the other role's player.
    """

    player: str
    connector: str
    role_name: str | None = None


@dataclass(frozen=True)
class FactType:
    id: str
    roles: tuple[Role, Role]


@dataclass(frozen=True)
class Step:
    """One traversal of a fact type; forward runs roles[0] -> roles[1]."""

    fact_type: str
    direction: str  # FORWARD | REVERSE

    def reversed(self) -> "Step":
        return Step(self.fact_type, REVERSE if self.direction == FORWARD else FORWARD)


@dataclass(frozen=True)
class SchemaPath:
    """A head-to-tail walk through the schema; the atomic query particle."""

    head: str
    steps: tuple[Step, ...] = ()


@dataclass(frozen=True)
class Violation:
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


@dataclass(frozen=True)
class SchemaGraph:
    """Immutable conceptual schema; adjacency is derived from the fact types."""

    object_types: dict[str, ObjectType]
    fact_types: dict[str, FactType]
    adjacency: dict[str, tuple[Step, ...]] = field(
        init=False, compare=False, repr=False
    )

    def __post_init__(self):
        object.__setattr__(self, "adjacency", derive_adjacency(self))


def derive_adjacency(g: SchemaGraph) -> dict[str, tuple[Step, ...]]:
    """Recompute the step adjacency from the fact types alone."""
    out: dict[str, list[Step]] = {ot: [] for ot in g.object_types}
    for ft in g.fact_types.values():
        out[ft.roles[0].player].append(Step(ft.id, FORWARD))
        out[ft.roles[1].player].append(Step(ft.id, REVERSE))
    return {
        ot: tuple(sorted(steps, key=lambda s: (s.fact_type, s.direction)))
        for ot, steps in out.items()
    }


# ---------------------------------------------------------------------------
# Parsing and serialization of the `.cqs` line format
# ---------------------------------------------------------------------------

_OBJECT_RE = re.compile(r"^object\s+(\S+)\s+(value|id:(\S+))\s*$")
_FACT_RE = re.compile(
    r"^fact\s+(\S+)\s*:\s*(\S+)\s+\"([^\"]*)\"\s*/\s*\"([^\"]*)\"\s+(\S+)\s*$"
)


def parse_schema(source: str) -> SchemaGraph:
    """Parse `.cqs` text into a validated SchemaGraph.

    Raises SchemaParseError with line/column positions for malformed input,
    duplicate names and unknown role players.
    """
    object_types: dict[str, ObjectType] = {}
    fact_lines: list[tuple[int, str]] = []
    seen_names: dict[str, int] = {}

    lines = source.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("object"):
            m = _OBJECT_RE.match(line)
            if not m:
                raise SchemaParseError(
                    lineno, 1, "malformed object declaration (expected "
                    "'object <Name> value' or 'object <Name> id:<scheme>')"
                )
            name, marker, scheme = m.group(1), m.group(2), m.group(3)
            if name.casefold() in seen_names:
                raise SchemaParseError(
                    lineno,
                    raw.find(name) + 1,
                    f"duplicate object type name '{name}' "
                    f"(first declared on line {seen_names[name.casefold()]})",
                )
            seen_names[name.casefold()] = lineno
            if marker == "value":
                object_types[name] = ObjectType(name, name, "value")
            else:
                object_types[name] = ObjectType(name, name, "entity", scheme)
        elif line.startswith("fact"):
            fact_lines.append((lineno, raw))
        else:
            raise SchemaParseError(
                lineno, 1, f"unrecognized directive '{line.split()[0]}'"
            )

    if not object_types:
        raise SchemaParseError(1, 1, "no object types declared")

    fact_types: dict[str, FactType] = {}
    for lineno, raw in fact_lines:
        m = _FACT_RE.match(raw.strip())
        if not m:
            raise SchemaParseError(
                lineno, 1, "malformed fact declaration (expected 'fact <Id>: "
                "<PlayerA> \"<connector>\" / \"<connector>\" <PlayerB>'; "
                "only binary fact types are supported)"
            )
        ft_id, player_a, conn_ab, conn_ba, player_b = m.groups()
        if ft_id in fact_types:
            raise SchemaParseError(lineno, raw.find(ft_id) + 1,
                                   f"duplicate fact type id '{ft_id}'")
        for player in (player_a, player_b):
            if player not in object_types:
                raise SchemaParseError(
                    lineno,
                    raw.find(player) + 1,
                    f"unknown object type '{player}'",
                )
        for conn in (conn_ab, conn_ba):
            if not conn.strip():
                raise SchemaParseError(lineno, raw.find('"') + 1,
                                       "empty connector phrase")
        fact_types[ft_id] = FactType(
            ft_id, (Role(player_a, conn_ab), Role(player_b, conn_ba))
        )

    return SchemaGraph(object_types, fact_types)


def serialize_schema(g: SchemaGraph) -> str:
    """Render a SchemaGraph back to `.cqs` text; parse_schema round-trips it."""
    out = []
    for ot in g.object_types.values():
        if ot.kind == "value":
            out.append(f"object {ot.name} value")
        else:
            out.append(f"object {ot.name} id:{ot.reference_scheme}")
    if g.fact_types:
        out.append("")
    for ft in g.fact_types.values():
        a, b = ft.roles
        out.append(
            f'fact {ft.id}: {a.player} "{a.connector}" / "{b.connector}" {b.player}'
        )
    return "\n".join(out) + "\n"


def validate_schema(g: SchemaGraph) -> list[Violation]:
    """Check every type invariant; empty result means the schema is sound."""
    violations: list[Violation] = []
    seen: dict[str, str] = {}
    for ot in g.object_types.values():
        lowered = ot.name.casefold()
        if lowered in seen:
            violations.append(Violation(
                ot.name, f"duplicate name (clashes with '{seen[lowered]}')"))
        else:
            seen[lowered] = ot.name
        if ot.kind == "value" and ot.reference_scheme is not None:
            violations.append(Violation(ot.name, "value type carries a reference scheme"))
        if ot.kind == "entity" and not ot.reference_scheme:
            violations.append(Violation(ot.name, "entity type lacks a reference scheme"))
        if ot.kind not in ("entity", "value"):
            violations.append(Violation(ot.name, f"unknown kind '{ot.kind}'"))
    for ft_id, ft in g.fact_types.items():
        if ft.id != ft_id:
            violations.append(Violation(ft_id, "fact type stored under a foreign id"))
        if len(ft.roles) != 2:
            violations.append(Violation(ft.id, "fact types must be binary"))
            continue
        for role in ft.roles:
            if role.player not in g.object_types:
                violations.append(Violation(
                    ft.id, f"role references unknown object type '{role.player}'"))
            if not role.connector.strip():
                violations.append(Violation(ft.id, "empty connector phrase"))
    return violations


# ---------------------------------------------------------------------------
# Adjacency, importance, numeric classification
# ---------------------------------------------------------------------------

def require_object_type(g: SchemaGraph, ot: str) -> ObjectType:
    try:
        return g.object_types[ot]
    except KeyError:
        raise UnknownObjectTypeError(f"unknown object type '{ot}'") from None


def adjacent_steps(g: SchemaGraph, ot: str) -> tuple[Step, ...]:
    """All steps departing `ot`, ordered by (fact type id, direction)."""
    require_object_type(g, ot)
    return g.adjacency[ot]


def importance_order(g: SchemaGraph) -> list[str]:
    """Object type ids by descending degree, ties broken by name."""
    return sorted(
        g.object_types,
        key=lambda ot: (-len(g.adjacency[ot]), g.object_types[ot].name.casefold(),
                        g.object_types[ot].name),
    )


def is_numeric_type(g: SchemaGraph, ot: str) -> bool:
    """Whether instances of `ot` are denoted by numbers (see NUMERIC_WORDS)."""
    obj = require_object_type(g, ot)
    label = obj.reference_scheme if obj.kind == "entity" else obj.name
    words = display_name(label or "").replace("_", " ").split()
    return any(w in NUMERIC_WORDS for w in words)


# ---------------------------------------------------------------------------
# Paths and verbalization
# ---------------------------------------------------------------------------

def step_source(g: SchemaGraph, step: Step) -> str:
    ft = g.fact_types.get(step.fact_type)
    if ft is None:
        raise InvalidPathError(f"unknown fact type '{step.fact_type}'")
    return ft.roles[0].player if step.direction == FORWARD else ft.roles[1].player


def step_target(g: SchemaGraph, step: Step) -> str:
    ft = g.fact_types.get(step.fact_type)
    if ft is None:
        raise InvalidPathError(f"unknown fact type '{step.fact_type}'")
    return ft.roles[1].player if step.direction == FORWARD else ft.roles[0].player


def step_connector(g: SchemaGraph, step: Step) -> str:
    ft = g.fact_types[step.fact_type]
    return ft.roles[0].connector if step.direction == FORWARD else ft.roles[1].connector


def validate_path(g: SchemaGraph, p: SchemaPath) -> None:
    """Raise InvalidPathError unless `p` chains head-to-tail through `g`."""
    if p.head not in g.object_types:
        raise InvalidPathError(f"path head '{p.head}' is not an object type")
    at = p.head
    for i, step in enumerate(p.steps):
        src = step_source(g, step)
        if src != at:
            raise InvalidPathError(
                f"step {i} ({step.fact_type} {step.direction}) departs "
                f"'{src}' but the path is at '{at}'"
            )
        at = step_target(g, step)


def path_tail(g: SchemaGraph, p: SchemaPath) -> str:
    return step_target(g, p.steps[-1]) if p.steps else p.head


def path_nodes(g: SchemaGraph, p: SchemaPath) -> list[str]:
    """The visited object types, head first."""
    nodes = [p.head]
    for step in p.steps:
        nodes.append(step_target(g, step))
    return nodes


_CAMEL_SPLIT = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def display_name(name: str) -> str:
    """Lowercased, de-camelized display form: 'NrOfVotes' -> 'nr of votes'."""
    return _CAMEL_SPLIT.sub(" ", name).lower()


def head_display(name: str) -> str:
    """Display form with the leading letter capitalized (path heads)."""
    text = display_name(name)
    return text[:1].upper() + text[1:]


def step_text(g: SchemaGraph, step: Step) -> str:
    """The traversal fragment: connector followed by the target's display name."""
    return f"{step_connector(g, step)} {display_name(step_target(g, step))}"


def path_fragments(g: SchemaGraph, p: SchemaPath) -> list[str]:
    return [step_text(g, s) for s in p.steps]


def verbalize_path(g: SchemaGraph, p: SchemaPath) -> str:
    """Near-natural-language rendering: capitalized head, then step fragments."""
    validate_path(g, p)
    parts = [head_display(p.head)]
    parts.extend(path_fragments(g, p))
    return " ".join(parts)

"""The matching step: evaluate paths, expressions and query trees over facts.

A population maps each fact type to its set of instance pairs.  A path
denotes a binary relation between instance values (relational composition of
its step relations); expressions add set connectives, selection and counting.
Set semantics throughout: results are distinct pairs.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from . import querybuilder as qb
from . import schema as sch
from . import spider as sp
from .errors import PopulationError, TypingError, UnresolvedPlaceholderError
from .querybuilder import (
    Atom,
    Concat,
    Count,
    Difference,
    Intersect,
    Placeholder,
    QueryExpr,
    Select,
    TreeExpr,
    Union,
)
from .schema import FORWARD, SchemaGraph, SchemaPath
from .spider import QueryTree


@dataclass(frozen=True)
class Population:
    """The information base: instance pairs per fact type."""

    facts: dict[str, frozenset[tuple[str, str]]]

    def total(self) -> int:
        return sum(len(pairs) for pairs in self.facts.values())


@dataclass(frozen=True)
class BinaryRelation:
    head_type: str
    tail_type: str
    pairs: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str | None, ...], ...]


_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")


def _is_number(text: str) -> bool:
    return bool(_NUMBER_RE.match(text.strip()))


# ---------------------------------------------------------------------------
# Parsing the `.cqp` population format
# ---------------------------------------------------------------------------

def _split_values(body: str, lineno: int) -> list[str]:
    """Split on top-level commas; double quotes protect embedded ones."""
    values, current, in_quotes = [], [], False
    for ch in body:
        if ch == '"':
            in_quotes = not in_quotes
            continue
        if ch == "," and not in_quotes:
            values.append("".join(current).strip())
            current = []
            continue
        current.append(ch)
    if in_quotes:
        raise PopulationError(lineno, "unterminated quote")
    values.append("".join(current).strip())
    return values


def parse_population(source: str, g: SchemaGraph) -> Population:
    """Parse `.cqp` text: one `<FactTypeId>: <valueA> , <valueB>` per line."""
    facts: dict[str, set[tuple[str, str]]] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise PopulationError(lineno, "malformed fact (missing ':')")
        ft_id, _, body = line.partition(":")
        ft_id = ft_id.strip()
        ft = g.fact_types.get(ft_id)
        if ft is None:
            raise PopulationError(lineno, f"unknown fact type '{ft_id}'")
        values = _split_values(body, lineno)
        if len(values) != 2:
            raise PopulationError(
                lineno, f"expected 2 values for '{ft_id}', found {len(values)}")
        for value, role in zip(values, ft.roles):
            if not value:
                raise PopulationError(lineno, "empty instance value")
            if sch.is_numeric_type(g, role.player) and not _is_number(value):
                raise PopulationError(
                    lineno,
                    f"'{value}' is not numeric but '{role.player}' holds numbers",
                )
        facts.setdefault(ft_id, set()).add((values[0], values[1]))
    return Population({ft: frozenset(pairs) for ft, pairs in facts.items()})


def active_domain(g: SchemaGraph, pop: Population, ot: str) -> set[str]:
    """Values of `ot` occurring anywhere in the population."""
    sch.require_object_type(g, ot)
    out: set[str] = set()
    for ft_id, pairs in pop.facts.items():
        ft = g.fact_types[ft_id]
        for idx in (0, 1):
            if ft.roles[idx].player == ot:
                out.update(pair[idx] for pair in pairs)
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _step_relation(g: SchemaGraph, pop: Population, step: sch.Step) -> frozenset:
    pairs = pop.facts.get(step.fact_type, frozenset())
    if step.direction == FORWARD:
        return pairs
    return frozenset((b, a) for a, b in pairs)


def _compose(left: frozenset, right: frozenset) -> frozenset:
    by_head: dict[str, set[str]] = {}
    for b, c in right:
        by_head.setdefault(b, set()).add(c)
    return frozenset(
        (a, c) for a, b in left for c in by_head.get(b, ())
    )


def eval_path(g: SchemaGraph, pop: Population, p: SchemaPath) -> BinaryRelation:
    """Relational composition of the step relations; 0 steps denote identity
    over the active domain of the head type."""
    sch.validate_path(g, p)
    if not p.steps:
        dom = active_domain(g, pop, p.head)
        return BinaryRelation(p.head, p.head, frozenset((v, v) for v in dom))
    pairs = _step_relation(g, pop, p.steps[0])
    for step in p.steps[1:]:
        pairs = _compose(pairs, _step_relation(g, pop, step))
    return BinaryRelation(p.head, sch.path_tail(g, p), pairs)


def compare_values(value: str, cmp: str, literal: str) -> bool:
    """Numeric comparison when both sides parse as numbers, else lexicographic."""
    if _is_number(value) and _is_number(literal):
        a, b = float(value), float(literal)
    else:
        a, b = value, literal
    return {
        "=": a == b,
        "!=": a != b,
        "<": a < b,
        "<=": a <= b,
        ">": a > b,
        ">=": a >= b,
    }[cmp]


def eval_expr(g: SchemaGraph, pop: Population, e: QueryExpr) -> BinaryRelation | int:
    """Evaluate a validated, placeholder-free expression.

    Count yields a scalar; everything else a BinaryRelation.  Tree queries
    are tabulated by eval_query_tree instead.
    """
    if isinstance(e, Placeholder):
        raise UnresolvedPlaceholderError(
            f"placeholder '{e.label}' must be spliced before evaluation")
    if isinstance(e, Atom):
        return eval_path(g, pop, e.path)
    if isinstance(e, Concat):
        left = eval_expr(g, pop, e.left)
        right = eval_expr(g, pop, e.right)
        return BinaryRelation(
            left.head_type, right.tail_type, _compose(left.pairs, right.pairs))
    if isinstance(e, (Intersect, Union, Difference)):
        left = eval_expr(g, pop, e.left)
        right = eval_expr(g, pop, e.right)
        if isinstance(e, Intersect):
            pairs = left.pairs & right.pairs
        elif isinstance(e, Union):
            pairs = left.pairs | right.pairs
        else:
            pairs = left.pairs - right.pairs
        return BinaryRelation(left.head_type, left.tail_type, pairs)
    if isinstance(e, Select):
        inner = eval_expr(g, pop, e.inner)
        kept = frozenset(
            pair for pair in inner.pairs if compare_values(pair[1], e.cmp, e.literal))
        return BinaryRelation(inner.head_type, inner.tail_type, kept)
    if isinstance(e, Count):
        inner = eval_expr(g, pop, e.inner)
        return len(inner.pairs)
    if isinstance(e, TreeExpr):
        raise TypingError("tree queries are tabulated, not evaluated as relations")
    raise TypingError(f"unknown expression node {type(e).__name__}")


def eval_query_tree(g: SchemaGraph, pop: Population, qt: QueryTree) -> ResultTable:
    """Flat tabulation of a double tree.

    One column per crown leaf path after the leading root column; one row per
    stem-reachable root instance, duplicated across the cartesian product of
    multi-valued leaf columns, with empty cells where a leaf has no value.
    """
    bad = qb.validate_expr(g, TreeExpr(qt))
    if bad:
        raise TypingError(str(bad[0]))
    leaf_paths = [p for p in sp.tree_paths(qt.crown) if p.steps]
    columns = [sch.display_name(qt.crown.root)]
    columns.extend(" ".join(sch.path_fragments(g, p)) for p in leaf_paths)

    stem_rel = eval_path(g, pop, qt.stem)
    roots = sorted({b for _, b in stem_rel.pairs})

    leaf_rels = [eval_path(g, pop, p) for p in leaf_paths]
    rows: list[tuple[str | None, ...]] = []
    for root in roots:
        cell_options: list[list[str | None]] = []
        for rel in leaf_rels:
            values = sorted({b for a, b in rel.pairs if a == root})
            cell_options.append(values if values else [None])
        for combo in itertools.product(*cell_options):
            rows.append((root, *combo))
    return ResultTable(tuple(columns), tuple(rows))

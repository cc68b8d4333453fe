"""Relational mapping and SQL lowering for validated expressions.

Each binary fact type becomes one two-column table; a concatenation chain of
path atoms becomes aliased joins with one equality per chaining point.  Only
the portable core of SQL is emitted (SELECT/JOIN/WHERE, UNION/INTERSECT/
EXCEPT, COUNT, TEXT/INTEGER) and the output is byte-deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import querybuilder as qb
from . import schema as sch
from .errors import (
    IdentifierCollisionError,
    SqlUnsupportedError,
    TypingError,
    UnresolvedPlaceholderError,
)
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
from .schema import FORWARD, SchemaGraph, Step

_IDENT_RE = re.compile(r"^[a-z_][a-z0-9_]*$")


@dataclass(frozen=True)
class TableMap:
    table: str
    columns: tuple[str, str]


@dataclass(frozen=True)
class RelationalMap:
    tables: dict[str, TableMap]  # fact type id -> table mapping


def relational_map(g: SchemaGraph) -> RelationalMap:
    """Deterministic fact-type-per-table mapping; collisions are errors."""
    tables: dict[str, TableMap] = {}
    seen: dict[str, str] = {}
    for ft_id, ft in g.fact_types.items():
        table = ft_id.lower()
        if not _IDENT_RE.match(table):
            raise IdentifierCollisionError(
                f"fact type id '{ft_id}' does not lower to a SQL identifier")
        if table in seen:
            raise IdentifierCollisionError(
                f"fact types '{seen[table]}' and '{ft_id}' both map to table "
                f"'{table}'")
        seen[table] = ft_id
        columns = []
        for role, default in zip(ft.roles, ("a", "b")):
            name = (role.role_name or default).lower()
            if not _IDENT_RE.match(name):
                raise IdentifierCollisionError(
                    f"role name '{name}' of '{ft_id}' is not a SQL identifier")
            columns.append(name)
        if columns[0] == columns[1]:
            raise IdentifierCollisionError(
                f"both columns of '{ft_id}' map to '{columns[0]}'")
        tables[ft_id] = TableMap(table, (columns[0], columns[1]))
    return RelationalMap(tables)


def _column_type(g: SchemaGraph, ot: str) -> str:
    return "INTEGER" if sch.is_numeric_type(g, ot) else "TEXT"


def emit_ddl(g: SchemaGraph) -> str:
    """One CREATE TABLE per fact type, ordered by table name."""
    rmap = relational_map(g)
    statements = []
    for ft_id in sorted(rmap.tables, key=lambda f: rmap.tables[f].table):
        tm = rmap.tables[ft_id]
        ft = g.fact_types[ft_id]
        cols = ", ".join(
            f"{col} {_column_type(g, role.player)}"
            for col, role in zip(tm.columns, ft.roles)
        )
        statements.append(f"CREATE TABLE {tm.table} ({cols});")
    return "\n".join(statements) + ("\n" if statements else "")


# ---------------------------------------------------------------------------
# Expression lowering
# ---------------------------------------------------------------------------

def _sql_literal(literal: str) -> str:
    if re.match(r"^-?\d+(\.\d+)?$", literal.strip()):
        return literal.strip()
    return "'" + literal.replace("'", "''") + "'"


@dataclass
class _ChainQuery:
    """A single SELECT over joined aliases, WHERE conjuncts appendable."""

    head_ref: str
    tail_ref: str
    from_items: list[str]
    joins: list[str]  # "JOIN <item> ON <cond>"
    wheres: list[str]

    def sql(self, labeled: bool) -> str:
        projection = (
            f"{self.head_ref} AS h, {self.tail_ref} AS t"
            if labeled
            else f"{self.head_ref}, {self.tail_ref}"
        )
        text = f"SELECT DISTINCT {projection} FROM {self.from_items[0]}"
        for join in self.joins:
            text += f" {join}"
        if self.wheres:
            text += " WHERE " + " AND ".join(self.wheres)
        return text


@dataclass
class _CompoundQuery:
    """A set operation over labeled operands; columns are h and t."""

    text: str

    def sql(self, labeled: bool) -> str:
        return self.text


class _Emitter:
    def __init__(self, g: SchemaGraph):
        self.g = g
        self.rmap = relational_map(g)
        self.counter = 0

    def _alias(self) -> str:
        self.counter += 1
        return f"t{self.counter}"

    def _flatten(self, e: QueryExpr) -> list:
        """Maximal concatenation chain as a unit list: Steps and subqueries."""
        if isinstance(e, Atom):
            return list(e.path.steps)  # 0-step atoms vanish: identity element
        if isinstance(e, Concat):
            return self._flatten(e.left) + self._flatten(e.right)
        return [self.emit(e)]

    def _step_refs(self, step: Step, alias: str) -> tuple[str, str, str]:
        tm = self.rmap.tables[step.fact_type]
        a, b = tm.columns
        head_col, tail_col = (a, b) if step.direction == FORWARD else (b, a)
        return f"{tm.table} {alias}", f"{alias}.{head_col}", f"{alias}.{tail_col}"

    def chain(self, e: QueryExpr) -> _ChainQuery:
        units = self._flatten(e)
        if not units:
            raise SqlUnsupportedError(
                "a pure identity path (0 steps) has no table to select from")
        from_items: list[str] = []
        joins: list[str] = []
        head_ref = tail_ref = ""
        prev_tail = ""
        for i, unit in enumerate(units):
            if isinstance(unit, Step):
                alias = self._alias()
                item, h, t = self._step_refs(unit, alias)
            else:
                alias = self._alias()
                item = f"({unit.sql(labeled=True)}) {alias}"
                h, t = f"{alias}.h", f"{alias}.t"
            from_items.append(item)
            if i == 0:
                head_ref = h
            else:
                joins.append(f"JOIN {item} ON {prev_tail} = {h}")
                from_items.pop()  # joined items live in the JOIN clause
            prev_tail = t
            tail_ref = t
        return _ChainQuery(head_ref, tail_ref, from_items, joins, [])

    def emit(self, e: QueryExpr):
        if isinstance(e, Placeholder):
            raise UnresolvedPlaceholderError(
                f"placeholder '{e.label}' must be spliced before SQL emission")
        if isinstance(e, TreeExpr):
            raise SqlUnsupportedError("tree queries are evaluated natively only")
        if isinstance(e, (Atom, Concat)):
            return self.chain(e)
        if isinstance(e, (Intersect, Union, Difference)):
            word = {"Intersect": "INTERSECT", "Union": "UNION",
                    "Difference": "EXCEPT"}[type(e).__name__]
            left = self._labeled_operand(self.emit(e.left))
            right = self._labeled_operand(self.emit(e.right))
            return _CompoundQuery(f"{left} {word} {right}")
        if isinstance(e, Select):
            inner = self.emit(e.inner)
            condition_rhs = f"{e.cmp} {_sql_literal(e.literal)}"
            if isinstance(inner, _ChainQuery):
                inner.wheres.append(f"{inner.tail_ref} {condition_rhs}")
                return inner
            alias = self._alias()
            return _ChainQuery(
                f"{alias}.h", f"{alias}.t",
                [f"({inner.sql(labeled=True)}) {alias}"], [],
                [f"{alias}.t {condition_rhs}"],
            )
        if isinstance(e, Count):
            inner = self.emit(e.inner)
            alias = self._alias()
            return _CompoundQuery(
                f"SELECT COUNT(*) FROM ({inner.sql(labeled=True)}) {alias}")
        raise TypingError(f"unknown expression node {type(e).__name__}")

    def _labeled_operand(self, q) -> str:
        if isinstance(q, _ChainQuery):
            return q.sql(labeled=True)
        alias = self._alias()
        return f"SELECT DISTINCT {alias}.h AS h, {alias}.t AS t FROM ({q.text}) {alias}"


def emit_sql(g: SchemaGraph, e: QueryExpr) -> str:
    """Lower a validated, placeholder-free expression to one SQL statement."""
    bad = qb.validate_expr(g, e)
    if bad:
        raise TypingError(str(bad[0]))
    emitter = _Emitter(g)
    return emitter.emit(e).sql(labeled=False) + ";"

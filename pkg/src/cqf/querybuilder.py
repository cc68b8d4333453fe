"""Syntax-directed construction of queries from path particles.

Expressions combine paths with concatenation, set connectives, selection and
counting under a head/tail type discipline; placeholders mark spots a later
point-to-point result will be spliced into.  A prefix text format round-trips
expressions for files and the wire.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import schema as sch
from . import spider as sp
from .errors import (
    InvalidPathError,
    QueryTextError,
    SpliceError,
    TypingError,
    UnknownObjectTypeError,
)
from .schema import FORWARD, REVERSE, SchemaGraph, SchemaPath, Step, Violation
from .spider import QueryTree

# Distinguished value type produced by counting; never part of a schema.
NUMBER_TYPE = "Number"

COMPARATORS = ("=", "!=", "<", "<=", ">", ">=")

_CMP_WORDS = {
    "=": "equals",
    "!=": "differs from",
    "<": "less than",
    "<=": "at most",
    ">": "greater than",
    ">=": "at least",
}

_INFIX_WORDS = {"intersect": "AND ALSO", "union": "OR", "difference": "BUT NOT"}


@dataclass(frozen=True)
class Atom:
    path: SchemaPath


@dataclass(frozen=True)
class Placeholder:
    label: str
    head: str
    tail: str


@dataclass(frozen=True)
class Concat:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Intersect:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Union:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Difference:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Select:
    inner: "QueryExpr"
    cmp: str
    literal: str


@dataclass(frozen=True)
class Count:
    inner: "QueryExpr"


@dataclass(frozen=True)
class TreeExpr:
    tree: QueryTree


QueryExpr = (
    Atom | Placeholder | Concat | Intersect | Union | Difference | Select | Count | TreeExpr
)

_SET_OPS = {"intersect": Intersect, "union": Union, "difference": Difference}


@dataclass(frozen=True)
class HeadTail:
    head: str
    tail: str


def head_tail(g: SchemaGraph, e: QueryExpr) -> HeadTail:
    """Derive the expression's endpoint types, re-checking typing bottom-up."""
    if isinstance(e, Atom):
        sch.validate_path(g, e.path)
        return HeadTail(e.path.head, sch.path_tail(g, e.path))
    if isinstance(e, Placeholder):
        sch.require_object_type(g, e.head)
        sch.require_object_type(g, e.tail)
        return HeadTail(e.head, e.tail)
    if isinstance(e, Concat):
        left, right = head_tail(g, e.left), head_tail(g, e.right)
        if left.tail != right.head:
            raise TypingError(
                f"cannot concatenate: left ends at '{left.tail}', "
                f"right starts at '{right.head}'"
            )
        return HeadTail(left.head, right.tail)
    if isinstance(e, (Intersect, Union, Difference)):
        left, right = head_tail(g, e.left), head_tail(g, e.right)
        if (left.head, left.tail) != (right.head, right.tail):
            raise TypingError(
                f"set connective needs matching endpoints: "
                f"({left.head}, {left.tail}) vs ({right.head}, {right.tail})"
            )
        return left
    if isinstance(e, Select):
        inner = head_tail(g, e.inner)
        if e.cmp not in COMPARATORS:
            raise TypingError(f"unknown comparator '{e.cmp}'")
        tail_type = g.object_types.get(inner.tail)
        if tail_type is None:
            raise TypingError(f"selection tail '{inner.tail}' is not comparable")
        if tail_type.kind == "entity" and not tail_type.reference_scheme:
            raise TypingError(
                f"selection tail '{inner.tail}' has no reference scheme to compare by"
            )
        return inner
    if isinstance(e, Count):
        inner = head_tail(g, e.inner)
        return HeadTail(inner.head, NUMBER_TYPE)
    if isinstance(e, TreeExpr):
        bad = sp.validate_tree(g, e.tree.crown)
        if bad:
            raise TypingError(str(bad[0]))
        sch.validate_path(g, e.tree.stem)
        if sch.path_tail(g, e.tree.stem) != e.tree.crown.root:
            raise TypingError(
                f"stem ends at '{sch.path_tail(g, e.tree.stem)}' but the crown "
                f"is rooted at '{e.tree.crown.root}'"
            )
        return HeadTail(e.tree.stem.head, e.tree.crown.root)
    raise TypingError(f"unknown expression node {type(e).__name__}")


def _reject_inner_aggregates(e: QueryExpr, at_root: bool, violations: list[Violation]) -> None:
    if isinstance(e, (Count, TreeExpr)) and not at_root:
        kind = "count" if isinstance(e, Count) else "tree query"
        violations.append(Violation(type(e).__name__, f"{kind} must be outermost"))
    for child in _children(e):
        _reject_inner_aggregates(child, False, violations)


def _children(e: QueryExpr) -> tuple[QueryExpr, ...]:
    if isinstance(e, (Concat, Intersect, Union, Difference)):
        return (e.left, e.right)
    if isinstance(e, (Select, Count)):
        return (e.inner,)
    return ()


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def atom(g: SchemaGraph, p: SchemaPath) -> Atom:
    """Wrap a valid path as an expression particle."""
    sch.validate_path(g, p)
    return Atom(p)


def placeholder(g: SchemaGraph, label: str, head: str, tail: str) -> Placeholder:
    sch.require_object_type(g, head)
    sch.require_object_type(g, tail)
    if not label:
        raise TypingError("placeholder label must be non-empty")
    return Placeholder(label, head, tail)


def combine(g: SchemaGraph, op: str, *args) -> QueryExpr:
    """Build one composite node, enforcing its typing invariant.

    op is one of concat, intersect, union, difference (binary), or
    select(inner, cmp, literal) / count(inner).
    """
    if op == "concat":
        left, right = args
        node = Concat(left, right)
    elif op in _SET_OPS:
        left, right = args
        node = _SET_OPS[op](left, right)
    elif op == "select":
        inner, cmp, literal = args
        node = Select(inner, cmp, str(literal))
    elif op == "count":
        (inner,) = args
        node = Count(inner)
    else:
        raise TypingError(f"unknown connective '{op}'")
    for child in _children(node):
        if isinstance(child, (Count, TreeExpr)):
            kind = "count" if isinstance(child, Count) else "tree query"
            raise TypingError(f"{kind} must be outermost")
    head_tail(g, node)
    return node


# ---------------------------------------------------------------------------
# Validation, splicing, verbalization
# ---------------------------------------------------------------------------

def validate_expr(g: SchemaGraph, e: QueryExpr) -> list[Violation]:
    """All violations of the variant invariants; empty means well-typed."""
    violations: list[Violation] = []
    _reject_inner_aggregates(e, True, violations)
    try:
        head_tail(g, e)
    except (TypingError, InvalidPathError, UnknownObjectTypeError) as err:
        violations.append(Violation(type(e).__name__, str(err)))
    return violations


def splice(g: SchemaGraph, e: QueryExpr, label: str, replacement: QueryExpr) -> QueryExpr:
    """Replace every placeholder carrying `label` with `replacement`."""
    repl_ht = head_tail(g, replacement)
    hits = 0

    def walk(node: QueryExpr) -> QueryExpr:
        nonlocal hits
        if isinstance(node, Placeholder) and node.label == label:
            if (node.head, node.tail) != (repl_ht.head, repl_ht.tail):
                raise TypingError(
                    f"replacement spans ({repl_ht.head}, {repl_ht.tail}) but "
                    f"placeholder '{label}' expects ({node.head}, {node.tail})"
                )
            hits += 1
            return replacement
        if isinstance(node, Concat):
            return Concat(walk(node.left), walk(node.right))
        if isinstance(node, Intersect):
            return Intersect(walk(node.left), walk(node.right))
        if isinstance(node, Union):
            return Union(walk(node.left), walk(node.right))
        if isinstance(node, Difference):
            return Difference(walk(node.left), walk(node.right))
        if isinstance(node, Select):
            return Select(walk(node.inner), node.cmp, node.literal)
        if isinstance(node, Count):
            return Count(walk(node.inner))
        return node

    result = walk(e)
    if hits == 0:
        raise SpliceError(f"no placeholder labelled '{label}' in the expression")
    head_tail(g, result)
    return result


def _strip_head(g: SchemaGraph, text: str, head: str) -> str:
    """Drop the leading head name from a verbalization (junction elision)."""
    if head == NUMBER_TYPE:
        return text
    prefix = sch.display_name(head)
    if text.lower().startswith(prefix):
        return text[len(prefix):].lstrip(" ")
    return text


def verbalize_expr(g: SchemaGraph, e: QueryExpr) -> str:
    """Deterministic near-natural-language rendering of an expression."""
    if isinstance(e, Atom):
        return sch.verbalize_path(g, e.path)
    if isinstance(e, Placeholder):
        return f"[{e.label}]"
    if isinstance(e, Concat):
        left = verbalize_expr(g, e.left)
        right_head = head_tail(g, e.right).head
        right = _strip_head(g, verbalize_expr(g, e.right), right_head)
        return " ".join(part for part in (left, right) if part)
    if isinstance(e, (Intersect, Union, Difference)):
        word = _INFIX_WORDS[type(e).__name__.lower()]
        return f"{verbalize_expr(g, e.left)} {word} {verbalize_expr(g, e.right)}"
    if isinstance(e, Select):
        return f"{verbalize_expr(g, e.inner)} {_CMP_WORDS[e.cmp]} {e.literal}"
    if isinstance(e, Count):
        return f"number of {verbalize_expr(g, e.inner)}"
    if isinstance(e, TreeExpr):
        stem_text = sch.verbalize_path(g, e.tree.stem)
        leaves = [
            " ".join(sch.path_fragments(g, p)) or sch.display_name(p.head)
            for p in sp.tree_paths(e.tree.crown)
        ]
        return f"{stem_text} [{'; '.join(leaves)}]"
    raise TypingError(f"unknown expression node {type(e).__name__}")


def path_of(e: QueryExpr) -> SchemaPath | None:
    """The plain path an expression denotes, when it is just atoms chained."""
    if isinstance(e, Atom):
        return e.path
    if isinstance(e, Concat):
        left, right = path_of(e.left), path_of(e.right)
        if left is not None and right is not None:
            return SchemaPath(left.head, left.steps + right.steps)
    return None


# ---------------------------------------------------------------------------
# Text format: prefix s-expressions, round-tripping exactly
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r'\(|\)|"(?:[^"\\]|\\.)*"|[^\s()"]+')
_DIR_TOKENS = {"fwd": FORWARD, "rev": REVERSE}
_DIR_NAMES = {FORWARD: "fwd", REVERSE: "rev"}


def _tokenize(text: str) -> list[str]:
    tokens = _TOKEN_RE.findall(text)
    if "".join(_TOKEN_RE.sub("", text).split()):
        raise QueryTextError("stray characters in query text")
    return tokens


def _unquote(token: str) -> str:
    if token.startswith('"'):
        return token[1:-1].replace('\\"', '"').replace("\\\\", "\\")
    return token


def _quote(value: str) -> str:
    if value and not re.search(r'[\s()"]', value):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Parser:
    def __init__(self, g: SchemaGraph, tokens: list[str]):
        self.g = g
        self.tokens = tokens
        self.pos = 0

    def _next(self) -> str:
        if self.pos >= len(self.tokens):
            raise QueryTextError("unexpected end of query text")
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _expect(self, token: str) -> None:
        got = self._next()
        if got != token:
            raise QueryTextError(f"expected '{token}', found '{got}'")

    def parse(self) -> QueryExpr:
        expr = self.expr()
        if self.pos != len(self.tokens):
            raise QueryTextError(f"trailing tokens after expression: "
                                 f"'{self.tokens[self.pos]}'")
        return expr

    def expr(self) -> QueryExpr:
        self._expect("(")
        op = self._next()
        if op == "atom":
            node = self._atom()
        elif op == "placeholder":
            label = _unquote(self._next())
            head = self._next()
            tail = self._next()
            node = placeholder(self.g, label, head, tail)
        elif op in ("concat", "intersect", "union", "difference"):
            left = self.expr()
            right = self.expr()
            node = combine(self.g, op, left, right)
        elif op == "select":
            inner = self.expr()
            cmp = self._next()
            if cmp not in COMPARATORS:
                raise QueryTextError(f"unknown comparator '{cmp}'")
            literal = _unquote(self._next())
            node = combine(self.g, "select", inner, cmp, literal)
        elif op == "count":
            node = combine(self.g, "count", self.expr())
        else:
            raise QueryTextError(f"unknown form '{op}'")
        self._expect(")")
        return node

    def _atom(self) -> Atom:
        args = []
        while self.pos < len(self.tokens) and self.tokens[self.pos] != ")":
            args.append(self._next())
        if not args:
            raise QueryTextError("atom needs an object type or step list")
        if len(args) == 1:
            sch.require_object_type(self.g, args[0])
            return atom(self.g, SchemaPath(args[0]))
        if len(args) % 2 != 0:
            raise QueryTextError(
                "atom steps come in '<FactType> fwd|rev' pairs")
        steps = []
        for ft, direction in zip(args[::2], args[1::2]):
            if direction not in _DIR_TOKENS:
                raise QueryTextError(f"unknown direction '{direction}'")
            steps.append(Step(ft, _DIR_TOKENS[direction]))
        head = sch.step_source(self.g, steps[0])
        return atom(self.g, SchemaPath(head, tuple(steps)))


def parse_query_text(g: SchemaGraph, text: str) -> QueryExpr:
    """Parse the prefix text form; the result always validates."""
    tokens = _tokenize(text)
    if not tokens:
        raise QueryTextError("empty query text")
    return _Parser(g, tokens).parse()


def format_query_text(e: QueryExpr) -> str:
    """Canonical text form; parse_query_text inverts it exactly."""
    if isinstance(e, Atom):
        if not e.path.steps:
            return f"(atom {e.path.head})"
        steps = " ".join(
            f"{s.fact_type} {_DIR_NAMES[s.direction]}" for s in e.path.steps
        )
        return f"(atom {steps})"
    if isinstance(e, Placeholder):
        return f"(placeholder {_quote(e.label)} {e.head} {e.tail})"
    if isinstance(e, (Concat, Intersect, Union, Difference)):
        op = type(e).__name__.lower()
        return f"({op} {format_query_text(e.left)} {format_query_text(e.right)})"
    if isinstance(e, Select):
        return (f"(select {format_query_text(e.inner)} {e.cmp} "
                f"{_quote(e.literal)})")
    if isinstance(e, Count):
        return f"(count {format_query_text(e.inner)})"
    raise QueryTextError(f"{type(e).__name__} has no text form")

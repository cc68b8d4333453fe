"""Spider queries: the radius-1 star of relevant facts around an object type.

A spider tree starts as the direct surroundings of its root; the user prunes
branches that are irrelevant and extends leaves with further spiders.  A stem
path attached to the root turns the star into the double-tree query form.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import schema as sch
from .errors import BadIndexError, InvalidPathError
from .schema import SchemaGraph, SchemaPath, Step


@dataclass(frozen=True)
class Branch:
    step: Step
    child: "SpiderTree"


@dataclass(frozen=True)
class SpiderTree:
    root: str
    branches: tuple[Branch, ...] = ()


@dataclass(frozen=True)
class QueryTree:
    """Double tree: an incoming stem path and an outgoing crown sharing a root."""

    stem: SchemaPath
    crown: SpiderTree


def spider(g: SchemaGraph, root: str) -> SpiderTree:
    """Depth-1 star: one leaf branch per step departing the root."""
    steps = sch.adjacent_steps(g, root)
    return SpiderTree(
        root,
        tuple(Branch(s, SpiderTree(sch.step_target(g, s))) for s in steps),
    )


def node_at(t: SpiderTree, at: list[int] | tuple[int, ...]) -> SpiderTree:
    """Resolve a root-to-node index path; () addresses the root itself."""
    node = t
    for depth, i in enumerate(at):
        if not 0 <= i < len(node.branches):
            raise BadIndexError(
                f"index {i} at depth {depth} out of range "
                f"({len(node.branches)} branches)"
            )
        node = node.branches[i].child
    return node


def _rebuild(t: SpiderTree, at, fn) -> SpiderTree:
    if not at:
        return fn(t)
    i = at[0]
    if not 0 <= i < len(t.branches):
        raise BadIndexError(f"index {i} out of range ({len(t.branches)} branches)")
    branch = t.branches[i]
    new_child = _rebuild(branch.child, at[1:], fn)
    branches = t.branches[:i] + (Branch(branch.step, new_child),) + t.branches[i + 1:]
    return SpiderTree(t.root, branches)


def prune_branch(t: SpiderTree, at: list[int] | tuple[int, ...], branch: int) -> SpiderTree:
    """Remove one branch (with its whole subtree) from the addressed node."""

    def cut(node: SpiderTree) -> SpiderTree:
        if not 0 <= branch < len(node.branches):
            raise BadIndexError(
                f"branch index {branch} out of range ({len(node.branches)} branches)"
            )
        return SpiderTree(node.root, node.branches[:branch] + node.branches[branch + 1:])

    return _rebuild(t, tuple(at), cut)


def _chain_to(t: SpiderTree, at) -> list[str]:
    """Object types on the root-to-node chain addressed by `at`."""
    chain = [t.root]
    node = t
    for i in at:
        if not 0 <= i < len(node.branches):
            raise BadIndexError(f"index {i} out of range ({len(node.branches)} branches)")
        node = node.branches[i].child
        chain.append(node.root)
    return chain


def extend_leaf(g: SchemaGraph, t: SpiderTree, at: list[int] | tuple[int, ...]) -> SpiderTree:
    """Grow a leaf by a fresh spider, dropping branches that would revisit the chain."""
    at = tuple(at)
    chain = set(_chain_to(t, at))

    def grow(leaf: SpiderTree) -> SpiderTree:
        if leaf.branches:
            raise BadIndexError("extension target is not a leaf")
        grown = spider(g, leaf.root)
        kept = tuple(
            b for b in grown.branches if sch.step_target(g, b.step) not in chain
        )
        return SpiderTree(leaf.root, kept)

    return _rebuild(t, at, grow)


def attach_spider(g: SchemaGraph, p: SchemaPath, t: SpiderTree) -> QueryTree:
    """Make the double tree; the stem must end at the crown's root."""
    tail = sch.path_tail(g, p)
    if tail != t.root:
        raise InvalidPathError(
            f"stem ends at '{tail}' but the crown is rooted at '{t.root}'"
        )
    return QueryTree(p, t)


def tree_paths(t: SpiderTree) -> list[SchemaPath]:
    """One root-to-leaf path per leaf, in depth-first branch order.

    A bare root yields its own 0-step path, so consumers always get a particle.
    """
    out: list[SchemaPath] = []

    def walk(node: SpiderTree, steps: tuple[Step, ...]) -> None:
        if not node.branches:
            out.append(SchemaPath(t.root, steps))
            return
        for b in node.branches:
            walk(b.child, steps + (b.step,))

    walk(t, ())
    return out


def validate_tree(g: SchemaGraph, t: SpiderTree) -> list[sch.Violation]:
    """Structural check used when trees arrive from outside the constructors."""
    violations: list[sch.Violation] = []
    if t.root not in g.object_types:
        violations.append(sch.Violation(t.root, "unknown object type at tree root"))
        return violations

    def walk(node: SpiderTree, chain: list[str]) -> None:
        seen_steps = set()
        for b in node.branches:
            key = (b.step.fact_type, b.step.direction)
            if key in seen_steps:
                violations.append(sch.Violation(
                    node.root, f"duplicate branch step {key}"))
            seen_steps.add(key)
            if b.step.fact_type not in g.fact_types:
                violations.append(sch.Violation(
                    node.root, f"branch uses unknown fact type '{b.step.fact_type}'"))
                continue
            if sch.step_source(g, b.step) != node.root:
                violations.append(sch.Violation(
                    node.root,
                    f"branch step {key} does not depart '{node.root}'"))
                continue
            target = sch.step_target(g, b.step)
            if b.child.root != target:
                violations.append(sch.Violation(
                    node.root,
                    f"branch step {key} reaches '{target}' but the child "
                    f"is rooted at '{b.child.root}'"))
            if target in chain:
                violations.append(sch.Violation(
                    node.root, f"chain revisits object type '{target}'"))
            walk(b.child, chain + [target])

    walk(t, [t.root])
    return violations


def size(t: SpiderTree) -> int:
    """Node count, root included."""
    return 1 + sum(size(b.child) for b in t.branches)

#!/usr/bin/env python3
"""Walk the sample election session end to end and print every artifact.

Usage: python3 scripts/demo_session.py
"""

from pathlib import Path

import cqf.evaluator as ev
import cqf.navigator as nav
import cqf.pathfinder as pf
import cqf.querybuilder as qb
import cqf.schema as sch
import cqf.spider as sp
import cqf.sqlgen as sq

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    g = sch.parse_schema((ROOT / "fixtures" / "el1.cqs").read_text())
    pop = ev.parse_population((ROOT / "fixtures" / "p1.cqp").read_text(), g)

    print("== object types by importance ==")
    for ot in sch.importance_order(g):
        print(f"  {ot} (degree {len(sch.adjacent_steps(g, ot))})")

    print("\n== point-to-point query: President -> Election -> NrOfVotes ==")
    result = pf.run_ppq(g, ["President", "Election", "NrOfVotes"], batch=5)
    for i, seg in enumerate(result.segments):
        print(f"  segment {i}: {seg.source} -> {seg.target}")
        for w in seg.offered:
            print(f"    [{w.weight}] {sch.verbalize_path(g, w.path)}")
    combined = pf.combined_selected(g, result)
    print(f"  selected: {sch.verbalize_path(g, combined)}")

    print("\n== spider query on Politician, pruned twice ==")
    tree = sp.spider(g, "Politician")
    for b in tree.branches:
        print(f"  branch: {sch.step_text(g, b.step)}")
    tree = sp.prune_branch(tree, (), 2)
    tree = sp.prune_branch(tree, (), 1)
    print("  after pruning:")
    for p in sp.tree_paths(tree):
        print(f"    {sch.verbalize_path(g, p)}")

    print("\n== query by navigation from the concatenated focus ==")
    origin = pf.concat_paths(
        g,
        sch.SchemaPath("Politician", (sch.Step("FT1", sch.FORWARD),)),
        sch.SchemaPath("Administration", (sch.Step("FT2", sch.FORWARD),)),
    )
    node = nav.start_session(g, origin)
    print(f"  focus: {sch.verbalize_path(g, node.focus)}")
    for m in nav.moves(g, node):
        label = m.kind if m.kind == "generalize" else f"refine {sch.step_text(g, m.step)}"
        print(f"  move: {label}")

    print("\n== evaluation over P-1 ==")
    expr = qb.parse_query_text(g, "(concat (atom FT3 fwd) (atom FT4 fwd))")
    rel = ev.eval_expr(g, pop, expr)
    print(f"  {qb.verbalize_expr(g, expr)}:")
    for a, b in sorted(rel.pairs):
        print(f"    {a}\t{b}")
    counted = qb.parse_query_text(g, "(count (atom FT3 fwd))")
    print(f"  {qb.verbalize_expr(g, counted)}: {ev.eval_expr(g, pop, counted)}")

    print("\n== SQL lowering ==")
    print(f"  {sq.emit_sql(g, expr)}")


if __name__ == "__main__":
    main()

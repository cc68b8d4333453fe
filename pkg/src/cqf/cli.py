"""Batch command line driver: validate, ppq, spider, nav, eval, sql, serve.

Artifacts go to stdout (one per line, or TSV for tables); diagnostics go to
stderr.  Exit codes: 0 ok, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evaluator as ev
from . import navigator as nav
from . import pathfinder as pf
from . import querybuilder as qb
from . import schema as sch
from . import spider as sp
from . import sqlgen
from .errors import CqfError

OK, DOMAIN_ERROR, USAGE_ERROR = 0, 1, 2


def _load_schema(path: str) -> sch.SchemaGraph:
    graph = sch.parse_schema(Path(path).read_text(encoding="utf-8"))
    violations = sch.validate_schema(graph)
    if violations:
        raise CqfError(
            "schema does not validate: " + "; ".join(str(v) for v in violations))
    return graph


def _cmd_validate(args) -> int:
    _load_schema(args.schema)
    return OK


def _cmd_object_types(args) -> int:
    g = _load_schema(args.schema)
    for ot_id in sch.importance_order(g):
        ot = g.object_types[ot_id]
        print(f"{ot.name}\t{ot.kind}\t{len(sch.adjacent_steps(g, ot_id))}")
    return OK


def _cmd_ppq(args) -> int:
    if len(args.points) < 2:
        print("usage: ppq needs at least 2 points", file=sys.stderr)
        return USAGE_ERROR
    g = _load_schema(args.schema)
    result = pf.run_ppq(g, args.points, args.batch)
    for _ in range(args.more):
        for i in range(len(result.segments)):
            result, _additions = pf.more_paths(result, i, args.batch)
    for i, seg in enumerate(result.segments, start=1):
        for wp in seg.offered:
            print(f"{i}\t{wp.weight}\t{sch.verbalize_path(g, wp.path)}")
    combined = pf.combined_selected(g, result)
    print(f"selected\t{sch.verbalize_path(g, combined)}")
    return OK


def _cmd_spider(args) -> int:
    g = _load_schema(args.schema)
    tree = sp.spider(g, args.object_type)
    for branch in args.prune or []:
        tree = sp.prune_branch(tree, (), branch)
    for path in sp.tree_paths(tree):
        print(sch.verbalize_path(g, path))
    return OK


def _parse_moves_script(g, script: str) -> list[nav.NavMove]:
    moves = []
    for part in script.split(";"):
        part = part.strip()
        if not part:
            continue
        tokens = part.split()
        if tokens[0] == "generalize" and len(tokens) == 1:
            moves.append(nav.NavMove(nav.GENERALIZE))
        elif tokens[0] == "refine" and len(tokens) == 3 and tokens[2] in ("fwd", "rev"):
            direction = sch.FORWARD if tokens[2] == "fwd" else sch.REVERSE
            moves.append(nav.NavMove(nav.REFINE, sch.Step(tokens[1], direction)))
        else:
            raise CqfError(
                f"bad move '{part}' (use 'refine <FT> fwd|rev' or 'generalize')")
    return moves


def _cmd_nav(args) -> int:
    g = _load_schema(args.schema)
    if args.start in g.object_types:
        node = nav.start_session(g, args.start)
    else:
        expr = qb.parse_query_text(g, Path(args.start).read_text(encoding="utf-8"))
        path = qb.path_of(expr)
        if path is None:
            raise CqfError("start expression is not a plain path")
        node = nav.start_session(g, path)
    print(sch.verbalize_path(g, node.focus))
    for move in _parse_moves_script(g, args.moves or ""):
        node = nav.apply_move(g, node, move)
        print(sch.verbalize_path(g, node.focus))
    return OK


def _load_expr(g, args) -> qb.QueryExpr:
    if args.path:
        return qb.parse_query_text(g, args.path)
    return qb.parse_query_text(g, Path(args.query).read_text(encoding="utf-8"))


def _cmd_eval(args) -> int:
    g = _load_schema(args.schema)
    pop = ev.parse_population(Path(args.population).read_text(encoding="utf-8"), g)
    expr = _load_expr(g, args)
    result = ev.eval_expr(g, pop, expr)
    if isinstance(result, int):
        print(result)
    else:
        for a, b in sorted(result.pairs):
            print(f"{a}\t{b}")
    return OK


def _cmd_sql(args) -> int:
    g = _load_schema(args.schema)
    expr = qb.parse_query_text(g, Path(args.query).read_text(encoding="utf-8"))
    print(sqlgen.emit_sql(g, expr))
    return OK


def _cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("PORT", "8000"))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqf", description="conceptual query formulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_schema(p):
        p.add_argument("-s", "--schema", required=True, help=".cqs schema file")
        return p

    with_schema(sub.add_parser("validate", help="check a schema file"))
    with_schema(sub.add_parser("object-types", help="list types by importance"))

    ppq = with_schema(sub.add_parser("ppq", help="point-to-point query"))
    ppq.add_argument("points", nargs="+", help="object type points in order")
    ppq.add_argument("--batch", type=int, default=pf.DEFAULT_BATCH)
    ppq.add_argument("--more", type=int, default=0,
                     help="extra MORE presses per segment")

    spider_p = with_schema(sub.add_parser("spider", help="spider query"))
    spider_p.add_argument("object_type")
    spider_p.add_argument("--prune", type=int, action="append",
                          help="root branch index to prune (repeatable)")

    nav_p = with_schema(sub.add_parser("nav", help="query by navigation"))
    nav_p.add_argument("--start", required=True,
                       help="object type or path expression file")
    nav_p.add_argument("--moves", default="",
                       help="script like 'refine FT2 fwd; generalize'")

    eval_p = with_schema(sub.add_parser("eval", help="evaluate over a population"))
    eval_p.add_argument("-p", "--population", required=True, help=".cqp file")
    group = eval_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--path", help="inline query expression text")
    group.add_argument("--query", help="query expression file")

    sql_p = with_schema(sub.add_parser("sql", help="lower a query to SQL"))
    sql_p.add_argument("--query", required=True, help="query expression file")

    serve_p = sub.add_parser("serve", help="run the HTTP service")
    serve_p.add_argument("--port", type=int, default=None)

    return parser


_COMMANDS = {
    "validate": _cmd_validate,
    "object-types": _cmd_object_types,
    "ppq": _cmd_ppq,
    "spider": _cmd_spider,
    "nav": _cmd_nav,
    "eval": _cmd_eval,
    "sql": _cmd_sql,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else OK
    try:
        return _COMMANDS[args.command](args)
    except (CqfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

"""Session-keeping HTTP API over the query formulation engine.

Sessions are in-memory with TTL eviction.  Requests within one session are
serialized behind a per-session lock; the immutable core structures are
shared freely across sessions.  Every response carries verbalizations so
clients never re-implement the rendering rules.
"""

from __future__ import annotations

import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import evaluator as ev
from . import navigator as nav
from . import pathfinder as pf
from . import querybuilder as qb
from . import schema as sch
from . import spider as sp
from . import sqlgen
from .errors import BadIndexError, CqfError, IllegalMoveError, TypingError
from .schema import SchemaGraph, SchemaPath

DEFAULT_TTL_MINUTES = 30.0


class NotFound(CqfError):
    pass


# Everything else under CqfError is a 400: the body echoes the engine's text.
_CONFLICTS = (IllegalMoveError, BadIndexError)


@dataclass
class Session:
    id: str
    graph: SchemaGraph
    default_batch: int
    last_used: float
    lock: threading.RLock = field(default_factory=threading.RLock)
    population: ev.Population | None = None
    ppqs: dict[str, pf.PpqResult] = field(default_factory=dict)
    ppq_batches: dict[str, int] = field(default_factory=dict)
    navs: dict[str, nav.NavNode] = field(default_factory=dict)
    spiders: dict[str, sp.SpiderTree] = field(default_factory=dict)
    drafts: dict[str, qb.QueryExpr] = field(default_factory=dict)


class SessionStore:
    def __init__(self, ttl_minutes: float = DEFAULT_TTL_MINUTES):
        self.ttl_minutes = ttl_minutes
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, graph: SchemaGraph, default_batch: int) -> Session:
        session = Session(
            id=secrets.token_urlsafe(16),
            graph=graph,
            default_batch=default_batch,
            last_used=time.monotonic(),
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise NotFound(f"unknown session '{session_id}'")
        session.last_used = time.monotonic()
        return session

    def gc_sessions(self, now: float | None = None) -> int:
        """Evict sessions idle longer than the TTL; returns how many."""
        now = time.monotonic() if now is None else now
        cutoff = self.ttl_minutes * 60.0
        with self._lock:
            stale = [
                sid
                for sid, session in self._sessions.items()
                if now - session.last_used > cutoff
            ]
            for sid in stale:
                del self._sessions[sid]
        return len(stale)


def _fresh_id() -> str:
    return secrets.token_urlsafe(8)


def _lookup(mapping: dict, key: str, kind: str):
    try:
        return mapping[key]
    except KeyError:
        raise NotFound(f"unknown {kind} '{key}'") from None


# ---------------------------------------------------------------------------
# Wire rendering helpers
# ---------------------------------------------------------------------------

def _path_json(g: SchemaGraph, p: SchemaPath) -> dict:
    return {
        "head": p.head,
        "steps": [{"fact_type": s.fact_type, "direction": s.direction} for s in p.steps],
    }


def _offered_json(g: SchemaGraph, offered, start: int = 0) -> list[dict]:
    return [
        {
            "index": start + i,
            "weight": wp.weight,
            "verbalization": sch.verbalize_path(g, wp.path),
            "expr_text": qb.format_query_text(qb.Atom(wp.path)),
            "path": _path_json(g, wp.path),
        }
        for i, wp in enumerate(offered)
    ]


def _segment_json(g: SchemaGraph, index: int, seg: pf.PpqSegment) -> dict:
    return {
        "index": index,
        "source": seg.source,
        "target": seg.target,
        "selected": seg.selected_index,
        "offered": _offered_json(g, seg.offered),
        "exhausted": seg.enumerator.exhausted,
    }


def _ppq_json(g: SchemaGraph, ppq_id: str, result: pf.PpqResult) -> dict:
    combined = pf.combined_selected(g, result)
    return {
        "ppq_id": ppq_id,
        "points": list(result.points),
        "segments": [
            _segment_json(g, i, seg) for i, seg in enumerate(result.segments)
        ],
        "combined": {
            "verbalization": sch.verbalize_path(g, combined),
            "expr_text": qb.format_query_text(qb.Atom(combined)),
        },
    }


def _tree_json(g: SchemaGraph, t: sp.SpiderTree) -> dict:
    return {
        "root": t.root,
        "display": sch.display_name(t.root),
        "branches": [
            {
                "step": {"fact_type": b.step.fact_type, "direction": b.step.direction},
                "text": sch.step_text(g, b.step),
                "child": _tree_json(g, b.child),
            }
            for b in t.branches
        ],
    }


def _spider_json(g: SchemaGraph, spider_id: str, t: sp.SpiderTree) -> dict:
    return {
        "spider_id": spider_id,
        "tree": _tree_json(g, t),
        "paths": [
            {
                "verbalization": sch.verbalize_path(g, p),
                "expr_text": qb.format_query_text(qb.Atom(p)),
            }
            for p in sp.tree_paths(t)
        ],
    }


def _move_json(g: SchemaGraph, m: nav.NavMove) -> dict:
    if m.kind == nav.GENERALIZE:
        return {"kind": "generalize"}
    return {
        "kind": "refine",
        "fact_type": m.step.fact_type,
        "direction": m.step.direction,
        "text": sch.step_text(g, m.step),
    }


def _nav_json(g: SchemaGraph, nav_id: str, node: nav.NavNode) -> dict:
    focus = node.focus
    return {
        "nav_id": nav_id,
        "focus": {
            "verbalization": sch.verbalize_path(g, focus),
            "expr_text": qb.format_query_text(qb.Atom(focus)),
            "head": focus.head,
            "tail": sch.path_tail(g, focus),
        },
        "moves": [_move_json(g, m) for m in nav.moves(g, node)],
    }


def _draft_json(g: SchemaGraph, draft_id: str, e: qb.QueryExpr) -> dict:
    ht = qb.head_tail(g, e)
    return {
        "draft_id": draft_id,
        "expr_text": qb.format_query_text(e),
        "verbalization": qb.verbalize_expr(g, e),
        "head": ht.head,
        "tail": ht.tail,
    }


# ---------------------------------------------------------------------------
# Request bodies
# ---------------------------------------------------------------------------

class CreateSessionBody(BaseModel):
    schema_text: str


class PpqBody(BaseModel):
    points: list[str]
    batch: int | None = None


class MoreBody(BaseModel):
    segment: int


class SelectBody(BaseModel):
    segment: int
    choice: int


class SpiderBody(BaseModel):
    object_type: str


class PruneBody(BaseModel):
    at: list[int] = []
    branch: int


class ExtendBody(BaseModel):
    at: list[int]


class NavBody(BaseModel):
    object_type: str | None = None
    draft_path_ids: list[str] | None = None


class MoveBody(BaseModel):
    kind: str
    fact_type: str | None = None
    direction: str | None = None


class DraftBody(BaseModel):
    expr: str


class SpliceBody(BaseModel):
    label: str
    replacement_expr: str | None = None
    replacement_draft_id: str | None = None


class PopulationBody(BaseModel):
    population: str


class EvalBody(BaseModel):
    draft_id: str | None = None
    tree_id: str | None = None


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------

def create_app(
    ttl_minutes: float | None = None, default_batch: int | None = None
) -> FastAPI:
    ttl = (
        ttl_minutes
        if ttl_minutes is not None
        else float(os.environ.get("SESSION_TTL_MINUTES", DEFAULT_TTL_MINUTES))
    )
    batch = (
        default_batch
        if default_batch is not None
        else int(os.environ.get("DEFAULT_BATCH", pf.DEFAULT_BATCH))
    )
    store = SessionStore(ttl_minutes=ttl)
    app = FastAPI(title="cqf service")
    app.state.store = store

    @app.exception_handler(CqfError)
    async def _domain_error(request: Request, exc: CqfError):
        if isinstance(exc, NotFound):
            status = 404
        elif isinstance(exc, _CONFLICTS):
            status = 409
        else:
            status = 400
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        store.gc_sessions()
        graph = sch.parse_schema(body.schema_text)
        violations = sch.validate_schema(graph)
        if violations:
            return JSONResponse(
                status_code=400,
                content={"error": "schema does not validate",
                         "violations": [str(v) for v in violations]},
            )
        session = store.create(graph, batch)
        return {"session_id": session.id}

    @app.get("/sessions/{sid}/object-types")
    def object_types(sid: str):
        session = store.get(sid)
        with session.lock:
            g = session.graph
            out = []
            for ot_id in sch.importance_order(g):
                ot = g.object_types[ot_id]
                out.append(
                    {
                        "id": ot.id,
                        "name": ot.name,
                        "kind": ot.kind,
                        "reference_scheme": ot.reference_scheme,
                        "display": sch.display_name(ot.name),
                        "degree": len(sch.adjacent_steps(g, ot_id)),
                    }
                )
            return {"object_types": out}

    @app.post("/sessions/{sid}/ppq", status_code=201)
    def create_ppq(sid: str, body: PpqBody):
        session = store.get(sid)
        with session.lock:
            used_batch = body.batch or session.default_batch
            result = pf.run_ppq(session.graph, body.points, used_batch)
            ppq_id = _fresh_id()
            session.ppqs[ppq_id] = result
            session.ppq_batches[ppq_id] = used_batch
            return _ppq_json(session.graph, ppq_id, result)

    @app.post("/sessions/{sid}/ppq/{pid}/more")
    def ppq_more(sid: str, pid: str, body: MoreBody):
        session = store.get(sid)
        with session.lock:
            result = _lookup(session.ppqs, pid, "ppq")
            already = len(result.segments[body.segment].offered) \
                if 0 <= body.segment < len(result.segments) else 0
            new_result, additions = pf.more_paths(
                result, body.segment, session.ppq_batches[pid])
            session.ppqs[pid] = new_result
            seg = new_result.segments[body.segment]
            return {
                "segment": body.segment,
                "additions": _offered_json(session.graph, additions, start=already),
                "exhausted": seg.enumerator.exhausted,
            }

    @app.post("/sessions/{sid}/ppq/{pid}/select")
    def ppq_select(sid: str, pid: str, body: SelectBody):
        session = store.get(sid)
        with session.lock:
            result = _lookup(session.ppqs, pid, "ppq")
            new_result = pf.select_alternative(result, body.segment, body.choice)
            session.ppqs[pid] = new_result
            return _ppq_json(session.graph, pid, new_result)

    @app.post("/sessions/{sid}/spider", status_code=201)
    def create_spider(sid: str, body: SpiderBody):
        session = store.get(sid)
        with session.lock:
            tree = sp.spider(session.graph, body.object_type)
            spider_id = _fresh_id()
            session.spiders[spider_id] = tree
            return _spider_json(session.graph, spider_id, tree)

    @app.post("/sessions/{sid}/spider/{tid}/prune")
    def spider_prune(sid: str, tid: str, body: PruneBody):
        session = store.get(sid)
        with session.lock:
            tree = _lookup(session.spiders, tid, "spider")
            new_tree = sp.prune_branch(tree, body.at, body.branch)
            session.spiders[tid] = new_tree
            return _spider_json(session.graph, tid, new_tree)

    @app.post("/sessions/{sid}/spider/{tid}/extend")
    def spider_extend(sid: str, tid: str, body: ExtendBody):
        session = store.get(sid)
        with session.lock:
            tree = _lookup(session.spiders, tid, "spider")
            new_tree = sp.extend_leaf(session.graph, tree, body.at)
            session.spiders[tid] = new_tree
            return _spider_json(session.graph, tid, new_tree)

    @app.post("/sessions/{sid}/nav", status_code=201)
    def create_nav(sid: str, body: NavBody):
        session = store.get(sid)
        with session.lock:
            g = session.graph
            if (body.object_type is None) == (body.draft_path_ids is None):
                raise ValueError(
                    "origin must be exactly one of object_type or draft_path_ids")
            if body.object_type is not None:
                node = nav.start_session(g, body.object_type)
            else:
                if not body.draft_path_ids:
                    raise ValueError("draft_path_ids must be non-empty")
                paths = []
                for draft_id in body.draft_path_ids:
                    expr = _lookup(session.drafts, draft_id, "draft")
                    path = qb.path_of(expr)
                    if path is None:
                        raise TypingError(
                            f"draft '{draft_id}' is not a plain path")
                    paths.append(path)
                origin = paths[0]
                for path in paths[1:]:
                    origin = pf.concat_paths(g, origin, path)
                node = nav.start_session(g, origin)
            nav_id = _fresh_id()
            session.navs[nav_id] = node
            return _nav_json(g, nav_id, node)

    @app.get("/sessions/{sid}/nav/{nid}/moves")
    def nav_moves(sid: str, nid: str):
        session = store.get(sid)
        with session.lock:
            node = _lookup(session.navs, nid, "nav session")
            return {
                "moves": [_move_json(session.graph, m)
                          for m in nav.moves(session.graph, node)]
            }

    @app.post("/sessions/{sid}/nav/{nid}/move")
    def nav_move(sid: str, nid: str, body: MoveBody):
        session = store.get(sid)
        with session.lock:
            g = session.graph
            node = _lookup(session.navs, nid, "nav session")
            if body.kind == "generalize":
                move = nav.NavMove(nav.GENERALIZE)
            elif body.kind == "refine":
                if not body.fact_type or body.direction not in (
                    sch.FORWARD, sch.REVERSE
                ):
                    raise ValueError(
                        "refine needs fact_type and direction forward|reverse")
                move = nav.NavMove(nav.REFINE, sch.Step(body.fact_type, body.direction))
            else:
                raise ValueError(f"unknown move kind '{body.kind}'")
            new_node = nav.apply_move(g, node, move)
            session.navs[nid] = new_node
            return _nav_json(g, nid, new_node)

    @app.post("/sessions/{sid}/drafts", status_code=201)
    def create_draft(sid: str, body: DraftBody):
        session = store.get(sid)
        with session.lock:
            expr = qb.parse_query_text(session.graph, body.expr)
            draft_id = _fresh_id()
            session.drafts[draft_id] = expr
            return _draft_json(session.graph, draft_id, expr)

    @app.post("/sessions/{sid}/drafts/{did}/splice")
    def splice_draft(sid: str, did: str, body: SpliceBody):
        session = store.get(sid)
        with session.lock:
            g = session.graph
            expr = _lookup(session.drafts, did, "draft")
            if (body.replacement_expr is None) == (body.replacement_draft_id is None):
                raise ValueError(
                    "provide exactly one of replacement_expr or replacement_draft_id")
            if body.replacement_expr is not None:
                replacement = qb.parse_query_text(g, body.replacement_expr)
            else:
                replacement = _lookup(
                    session.drafts, body.replacement_draft_id, "draft")
            new_expr = qb.splice(g, expr, body.label, replacement)
            session.drafts[did] = new_expr
            return _draft_json(g, did, new_expr)

    @app.post("/sessions/{sid}/population")
    def load_population(sid: str, body: PopulationBody):
        session = store.get(sid)
        with session.lock:
            population = ev.parse_population(body.population, session.graph)
            session.population = population
            return {
                "fact_types": len(population.facts),
                "facts": population.total(),
            }

    @app.post("/sessions/{sid}/eval")
    def eval_query(sid: str, body: EvalBody):
        session = store.get(sid)
        with session.lock:
            g = session.graph
            if session.population is None:
                raise ValueError("no population loaded for this session")
            if (body.draft_id is None) == (body.tree_id is None):
                raise ValueError("provide exactly one of draft_id or tree_id")
            if body.tree_id is not None:
                tree = _lookup(session.spiders, body.tree_id, "spider")
                qt = sp.QueryTree(SchemaPath(tree.root), tree)
                table = ev.eval_query_tree(g, session.population, qt)
                return {
                    "kind": "table",
                    "columns": list(table.columns),
                    "rows": [list(row) for row in table.rows],
                }
            expr = _lookup(session.drafts, body.draft_id, "draft")
            if isinstance(expr, qb.TreeExpr):
                table = ev.eval_query_tree(g, session.population, expr.tree)
                return {
                    "kind": "table",
                    "columns": list(table.columns),
                    "rows": [list(row) for row in table.rows],
                }
            result = ev.eval_expr(g, session.population, expr)
            if isinstance(result, int):
                return {"kind": "count", "count": result}
            return {
                "kind": "relation",
                "head": result.head_type,
                "tail": result.tail_type,
                "columns": [
                    sch.display_name(result.head_type),
                    sch.display_name(result.tail_type),
                ],
                "rows": [list(pair) for pair in sorted(result.pairs)],
            }

    @app.get("/sessions/{sid}/sql/{did}")
    def draft_sql(sid: str, did: str):
        session = store.get(sid)
        with session.lock:
            expr = _lookup(session.drafts, did, "draft")
            return {"sql": sqlgen.emit_sql(session.graph, expr)}

    return app


app = create_app()

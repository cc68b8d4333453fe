"""Acceptance criteria, one test per criterion at its stated time budget.

Run with `pytest tests/test_acceptance.py -s` to see one line per criterion.
"""

import itertools
import random
import time
from contextlib import contextmanager

from fastapi.testclient import TestClient

import cqf.evaluator as ev
import cqf.navigator as nav
import cqf.pathfinder as pf
import cqf.querybuilder as qb
import cqf.schema as sch
import cqf.spider as sp
import cqf.sqlgen as sq
from cqf.schema import SchemaPath
from cqf.service import create_app

from conftest import FIXTURES, path
from oracles import (
    dfs_simple_paths,
    nested_loop_eval,
    random_population,
    random_schema,
    random_simple_path,
    ranked,
)

from test_sqlgen import CASES as SQL_CASES, _count_chains, _count_steps


@contextmanager
def budget(name: str, seconds: float):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"{name}: {elapsed:.2f}s exceeds {seconds}s budget"
    print(f"[ACCEPTANCE] {name}: PASS ({elapsed:.2f}s < {seconds:g}s)")


def test_session_string_reproduction(el1):
    with budget("session strings", 1.0):
        result = pf.run_ppq(el1, ["President", "Election", "NrOfVotes"], 5)
        combined = pf.combined_selected(el1, result)
        assert (
            sch.verbalize_path(el1, combined)
            == "President winning election which resulted in nr of votes"
        )

        origin = pf.concat_paths(
            el1,
            path("Politician", ("FT1", "fwd")),
            path("Administration", ("FT2", "fwd")),
        )
        node = nav.start_session(el1, origin)
        assert (
            sch.verbalize_path(el1, node.focus)
            == "Politician is president of administration inaugurated in year"
        )

        sub = nav.start_session(el1, path("Administration", ("FT2", "fwd")))
        assert (
            sch.verbalize_path(el1, sub.focus)
            == "Administration inaugurated in year"
        )


def test_enumeration_oracle(el1):
    with budget("enumeration oracle", 10.0):
        schemas = [el1] + [random_schema(random.Random(seed)) for seed in range(20)]
        for g in schemas:
            for source, target in itertools.product(g.object_types, repeat=2):
                enum = pf.open_enumeration(g, source, target)
                emitted = pf.drain(enum)
                got = [tuple(w.path.steps) for w in emitted]
                expected = [
                    tuple(p.steps)
                    for p in ranked(g, dfs_simple_paths(g, source, target))
                ]
                assert set(got) == set(expected)  # set equality
                assert got == expected  # and relevance order
                weights = [w.weight for w in emitted]
                assert weights == sorted(weights)
                assert len(set(got)) == len(got)  # zero duplicates


def test_more_protocol(el1):
    with budget("MORE protocol", 2.0):
        pairs = [
            ("President", "Election"),
            ("Politician", "Year"),
            ("Party", "NrOfVotes"),
            ("Election", "Election"),
        ]
        for seed in range(6):
            g = random_schema(random.Random(seed + 50))
            ids = sorted(g.object_types)
            cases = [(g, ids[0], ids[-1]), (g, ids[-1], ids[0])]
            for graph, source, target in cases + [(el1, a, b) for a, b in pairs]:
                full = [
                    tuple(w.path.steps)
                    for w in pf.drain(pf.open_enumeration(graph, source, target))
                ]
                for batch in range(1, 6):
                    enum = pf.open_enumeration(graph, source, target)
                    got = []
                    while True:
                        chunk = enum.next_batch(batch)
                        got.extend(tuple(w.path.steps) for w in chunk)
                        if len(chunk) < batch:
                            break
                    assert got == full, (source, target, batch)
                    assert enum.next_batch(batch) == []


def test_spider_laws(el1):
    with budget("spider laws", 5.0):
        schemas = [el1] + [random_schema(random.Random(seed)) for seed in range(10)]
        for g in schemas:
            for ot in g.object_types:
                assert tuple(
                    b.step for b in sp.spider(g, ot).branches
                ) == sch.adjacent_steps(g, ot)

        rng = random.Random(99)
        sequences = 0
        while sequences < 500:
            g = schemas[rng.randrange(len(schemas))]
            t = sp.spider(g, rng.choice(list(g.object_types)))
            for _ in range(rng.randint(1, 8)):
                nodes = list(_tree_nodes(t, ()))
                if rng.random() < 0.5 and any(sp.node_at(t, n).branches for n in nodes):
                    at = rng.choice([n for n in nodes if sp.node_at(t, n).branches])
                    t = sp.prune_branch(
                        t, at, rng.randrange(len(sp.node_at(t, at).branches)))
                else:
                    leaves = [n for n in nodes if not sp.node_at(t, n).branches]
                    if not leaves:
                        continue
                    t = sp.extend_leaf(g, t, rng.choice(leaves))
                _assert_chains_simple(g, t, [t.root])
            sequences += 1


def _tree_nodes(t, prefix):
    yield prefix
    for i, b in enumerate(t.branches):
        yield from _tree_nodes(b.child, prefix + (i,))


def _assert_chains_simple(g, t, chain):
    for b in t.branches:
        target = sch.step_target(g, b.step)
        assert target not in chain
        _assert_chains_simple(g, b.child, chain + [target])


def test_qbn_laws(el1):
    with budget("QBN laws", 5.0):
        rng = random.Random(7)
        schemas = [el1] + [random_schema(random.Random(seed)) for seed in range(10)]
        walks = 0
        while walks < 1000:
            g = schemas[rng.randrange(len(schemas))]
            node = nav.start_session(g, rng.choice(list(g.object_types)))
            for _ in range(rng.randint(1, 8)):
                options = nav.moves(g, node)
                if not options:
                    break
                move = rng.choice(options)
                before = node.focus
                node = nav.apply_move(g, node, move)
                sch.validate_path(g, node.focus)
                if move.kind == nav.REFINE:
                    assert nav.apply_move(
                        g, node, nav.NavMove(nav.GENERALIZE)).focus == before
            walks += 1

        particles = 0
        while particles < 200:
            g = schemas[rng.randrange(len(schemas))]
            p = random_simple_path(rng, g)
            assert nav.to_particle(nav.start_session(g, p)) == p
            particles += 1


def test_evaluator_oracle(el1, p1):
    with budget("evaluator oracle", 10.0):
        instances = [(el1, p1)]
        for seed in range(20):
            rng = random.Random(seed + 500)
            g = random_schema(rng, max_objects=6, max_facts=10)
            instances.append((g, random_population(rng, g, max_facts=50)))
        for g, pop in instances:
            ids = sorted(g.object_types)
            for source, target in itertools.product(ids, repeat=2):
                for p in dfs_simple_paths(g, source, target):
                    if len(p.steps) > 4:
                        continue
                    rel = ev.eval_path(g, pop, p)
                    assert rel.pairs == frozenset(nested_loop_eval(g, pop, p))
                    # transpose law
                    reverse = SchemaPath(
                        target, tuple(s.reversed() for s in reversed(p.steps)))
                    assert ev.eval_path(g, pop, reverse).pairs == frozenset(
                        (b, a) for a, b in rel.pairs)
                    # composition law at every cut point
                    for cut in range(len(p.steps) + 1):
                        left = SchemaPath(source, p.steps[:cut])
                        mid = sch.path_tail(g, left)
                        right = SchemaPath(mid, p.steps[cut:])
                        lrel = ev.eval_path(g, pop, left)
                        rrel = ev.eval_path(g, pop, right)
                        composed = {
                            (a, c)
                            for a, b in lrel.pairs
                            for b2, c in rrel.pairs
                            if b == b2
                        }
                        assert rel.pairs == frozenset(composed)


def test_builder_typing(el1):
    from test_querybuilder import _mutate_types, _random_expr

    with budget("builder typing", 5.0):
        rng = random.Random(21)
        constructed = 0
        while constructed < 1000:
            g = random_schema(rng, max_objects=6, max_facts=9)
            e = _random_expr(rng, g)
            if rng.random() < 0.15:
                e = qb.combine(g, "count", e)
            assert qb.validate_expr(g, e) == []
            constructed += 1

        mutated = 0
        while mutated < 1000:
            g = random_schema(rng, max_objects=6, max_facts=9)
            e = _random_expr(rng, g)
            bad = _mutate_types(rng, g, e)
            assert len(qb.validate_expr(g, bad)) >= 1
            mutated += 1


def test_sql_determinism(el1):
    with budget("SQL determinism", 2.0):
        golden_dir = FIXTURES.parent / "tests" / "golden" / "sql"
        assert len(SQL_CASES) >= 10
        for name, text in SQL_CASES:
            expr = qb.parse_query_text(el1, text)
            sql = sq.emit_sql(el1, expr)
            frozen = (golden_dir / f"{name}.sql").read_text(encoding="utf-8")
            assert sql + "\n" == frozen, name
            assert sq.emit_sql(el1, expr) == sql
            assert sql.count("JOIN") == _count_steps(expr) - _count_chains(expr)


def test_service_contract(el1_text, p1_text):
    with budget("service contract", 5.0):
        app = create_app(ttl_minutes=30, default_batch=5)
        with TestClient(app) as client:
            sid = client.post(
                "/sessions", json={"schema_text": el1_text}).json()["session_id"]

            r = client.post(
                f"/sessions/{sid}/ppq",
                json={"points": ["President", "Election", "NrOfVotes"]})
            assert r.status_code == 201
            ppq = r.json()
            assert (
                ppq["combined"]["verbalization"]
                == "President winning election which resulted in nr of votes"
            )

            r = client.post(
                f"/sessions/{sid}/ppq/{ppq['ppq_id']}/more", json={"segment": 0})
            assert r.status_code == 200 and r.json()["additions"] == []

            r = client.post(
                f"/sessions/{sid}/ppq/{ppq['ppq_id']}/select",
                json={"segment": 0, "choice": 1})
            assert r.json()["segments"][0]["offered"][1]["weight"] == 4

            r = client.post(
                f"/sessions/{sid}/spider", json={"object_type": "Politician"})
            spider_id = r.json()["spider_id"]
            assert [b["text"] for b in r.json()["tree"]["branches"]] == [
                "is president of administration",
                "who is president",
                "member of party",
            ]
            r = client.post(
                f"/sessions/{sid}/spider/{spider_id}/prune",
                json={"at": [], "branch": 2})
            r = client.post(
                f"/sessions/{sid}/spider/{spider_id}/prune",
                json={"at": [], "branch": 1})
            assert len(r.json()["tree"]["branches"]) == 1

            d1 = client.post(
                f"/sessions/{sid}/drafts", json={"expr": "(atom FT1 fwd)"}).json()
            d2 = client.post(
                f"/sessions/{sid}/drafts", json={"expr": "(atom FT2 fwd)"}).json()
            r = client.post(
                f"/sessions/{sid}/nav",
                json={"draft_path_ids": [d1["draft_id"], d2["draft_id"]]})
            nav_id = r.json()["nav_id"]
            assert (
                r.json()["focus"]["verbalization"]
                == "Politician is president of administration inaugurated in year"
            )

            refine = next(
                m for m in r.json()["moves"] if m["kind"] == "refine")
            r = client.post(
                f"/sessions/{sid}/nav/{nav_id}/move",
                json={"kind": "refine", "fact_type": refine["fact_type"],
                      "direction": refine["direction"]})
            r = client.post(
                f"/sessions/{sid}/nav/{nav_id}/move", json={"kind": "generalize"})
            assert (
                r.json()["focus"]["verbalization"]
                == "Politician is president of administration inaugurated in year"
            )

            client.post(
                f"/sessions/{sid}/population", json={"population": p1_text})
            dq = client.post(
                f"/sessions/{sid}/drafts",
                json={"expr": "(concat (atom FT3 fwd) (atom FT4 fwd))"}).json()
            r = client.post(
                f"/sessions/{sid}/eval", json={"draft_id": dq["draft_id"]})
            assert r.json()["rows"] == [
                ["Lincoln", "1866452"], ["Lincoln", "2218388"]]

            r = client.get(f"/sessions/{sid}/sql/{dq['draft_id']}")
            assert r.json()["sql"] == (
                "SELECT DISTINCT t1.a, t2.b FROM ft3 t1 JOIN ft4 t2 ON t1.b = t2.a;"
            )

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cqf.pathfinder as pf
import cqf.schema as sch
from cqf.errors import BadIndexError, InvalidPathError, NoPathError
from cqf.schema import SchemaPath

from conftest import path
from oracles import dfs_simple_paths, random_schema, ranked


def drain_steps(enum):
    return [tuple(w.path.steps) for w in pf.drain(enum)]


def test_path_weight(el1):
    assert pf.path_weight(el1, SchemaPath("Party")) == 0
    assert pf.path_weight(el1, path("President", ("FT3", "fwd"))) == 1
    long = path("President", ("FT5", "fwd"), ("FT1", "fwd"), ("FT2", "fwd"), ("FT7", "rev"))
    assert pf.path_weight(el1, long) == 4


def test_open_enumeration_president_election(el1):
    enum = pf.open_enumeration(el1, "President", "Election")
    assert enum.emitted == [] and not enum.exhausted
    assert len(pf.drain(enum)) == 2


def test_same_point_yields_identity_path(el1):
    enum = pf.open_enumeration(el1, "Party", "Party")
    paths = pf.drain(enum)
    assert [p.path for p in paths] == [SchemaPath("Party")]
    assert paths[0].weight == 0


def test_disconnected_immediately_exhausted(el1_text):
    g = sch.parse_schema(
        "\n".join(l for l in el1_text.splitlines() if not l.startswith("fact FT6")))
    enum = pf.open_enumeration(g, "Party", "Election")
    assert enum.exhausted
    assert enum.next_batch(3) == []


def test_next_batch_order_and_exhaustion(el1):
    enum = pf.open_enumeration(el1, "President", "Election")
    first = enum.next_batch(1)
    assert len(first) == 1
    assert sch.verbalize_path(el1, first[0].path) == "President winning election"
    assert first[0].weight == 1
    rest = enum.next_batch(5)
    assert len(rest) == 1 and rest[0].weight == 4
    assert enum.exhausted
    assert enum.next_batch(3) == []


def test_enumerator_matches_bruteforce_on_el1(el1):
    for source, target in itertools.product(el1.object_types, repeat=2):
        enum = pf.open_enumeration(el1, source, target)
        got = drain_steps(enum)
        expected = [tuple(p.steps) for p in ranked(el1, dfs_simple_paths(el1, source, target))]
        assert got == expected, (source, target)


def test_enumerator_matches_bruteforce_on_random_schemas():
    for seed in range(8):
        g = random_schema(random.Random(seed))
        for source, target in itertools.product(g.object_types, repeat=2):
            got = drain_steps(pf.open_enumeration(g, source, target))
            expected = [
                tuple(p.steps) for p in ranked(g, dfs_simple_paths(g, source, target))
            ]
            assert got == expected, (seed, source, target)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5))
def test_more_prefix_property(seed, batch):
    rng = random.Random(seed)
    g = random_schema(rng)
    ids = list(g.object_types)
    source, target = rng.choice(ids), rng.choice(ids)
    full = drain_steps(pf.open_enumeration(g, source, target))
    enum = pf.open_enumeration(g, source, target)
    batched = []
    while True:
        got = enum.next_batch(batch)
        batched.extend(tuple(w.path.steps) for w in got)
        if len(got) < batch:
            break
    assert batched == full
    assert enum.exhausted
    assert enum.next_batch(batch) == []


def test_weights_nondecreasing_verbalizations_ascend(el1):
    for seed in range(4):
        g = random_schema(random.Random(seed + 100))
        ids = sorted(g.object_types)
        for source, target in itertools.product(ids[:4], repeat=2):
            emitted = pf.drain(pf.open_enumeration(g, source, target))
            keys = [
                (w.weight, sch.verbalize_path(g, w.path)) for w in emitted
            ]
            assert keys == sorted(keys)
            assert len({tuple(w.path.steps) for w in emitted}) == len(emitted)


def test_two_enumerators_identical(el1):
    a = pf.drain(pf.open_enumeration(el1, "Politician", "Year"))
    b = pf.drain(pf.open_enumeration(el1, "Politician", "Year"))
    assert a == b


def test_batch_must_be_positive(el1):
    enum = pf.open_enumeration(el1, "President", "Election")
    with pytest.raises(ValueError):
        enum.next_batch(0)


def test_concat_paths(el1):
    joined = pf.concat_paths(
        el1, path("President", ("FT3", "fwd")), path("Election", ("FT4", "fwd")))
    assert joined == path("President", ("FT3", "fwd"), ("FT4", "fwd"))
    # identity elements
    p = path("President", ("FT3", "fwd"))
    assert pf.concat_paths(el1, p, SchemaPath("Election")) == p
    assert pf.concat_paths(el1, SchemaPath("President"), p) == p
    with pytest.raises(InvalidPathError, match="Election.*Politician"):
        pf.concat_paths(
            el1, path("President", ("FT3", "fwd")), path("Politician", ("FT1", "fwd")))


def test_concat_associativity(el1):
    p = path("President", ("FT5", "fwd"))
    q = path("Politician", ("FT1", "fwd"))
    r = path("Administration", ("FT2", "fwd"))
    left = pf.concat_paths(el1, pf.concat_paths(el1, p, q), r)
    right = pf.concat_paths(el1, p, pf.concat_paths(el1, q, r))
    assert left == right


def test_run_ppq_session(el1):
    result = pf.run_ppq(el1, ["President", "Election", "NrOfVotes"], 5)
    assert len(result.segments) == 2
    combined = pf.combined_selected(el1, result)
    assert (
        sch.verbalize_path(el1, combined)
        == "President winning election which resulted in nr of votes"
    )
    for seg in result.segments:
        all_paths = ranked(el1, dfs_simple_paths(el1, seg.source, seg.target))
        assert tuple(seg.selected.steps) == tuple(all_paths[0].steps)


def test_run_ppq_needs_two_points(el1):
    with pytest.raises(ValueError):
        pf.run_ppq(el1, ["President"], 5)


def test_run_ppq_no_path_names_pair(el1_text):
    g = sch.parse_schema(
        "\n".join(l for l in el1_text.splitlines() if not l.startswith("fact FT6")))
    with pytest.raises(NoPathError) as err:
        pf.run_ppq(g, ["Party", "Election"], 5)
    assert (err.value.source, err.value.target) == ("Party", "Election")


def test_select_alternative(el1):
    result = pf.run_ppq(el1, ["President", "Election", "NrOfVotes"], 5)
    picked = pf.select_alternative(result, 0, 1)
    assert picked.segments[0].selected_index == 1
    assert len(picked.segments[0].selected.steps) == 4
    assert picked.segments[1] == result.segments[1]
    # idempotent when re-picking the current choice
    assert pf.select_alternative(result, 0, 0) == result
    with pytest.raises(BadIndexError):
        pf.select_alternative(result, 7, 0)
    with pytest.raises(BadIndexError):
        pf.select_alternative(result, 0, 99)


def test_more_paths_appends(el1):
    result = pf.run_ppq(el1, ["President", "Election"], 1)
    assert len(result.segments[0].offered) == 1
    grown, additions = pf.more_paths(result, 0, 5)
    assert len(additions) == 1
    assert len(grown.segments[0].offered) == 2
    assert grown.segments[0].enumerator.exhausted
    again, nothing = pf.more_paths(grown, 0, 5)
    assert nothing == []
    assert [w.path for w in again.segments[0].offered] == [
        w.path for w in grown.segments[0].offered
    ]

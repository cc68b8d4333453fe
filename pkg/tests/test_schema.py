import random

import pytest

import cqf.schema as sch
from cqf.errors import SchemaParseError, UnknownObjectTypeError
from cqf.schema import FORWARD, REVERSE, SchemaPath, Step

from conftest import path
from oracles import random_schema


def test_parse_el1_counts(el1):
    assert len(el1.object_types) == 7
    assert len(el1.fact_types) == 7
    assert el1.object_types["Year"].kind == "value"
    assert el1.object_types["Election"].reference_scheme == "year"


def test_parse_empty_text_rejected():
    with pytest.raises(SchemaParseError, match="no object types declared"):
        sch.parse_schema("")


def test_parse_unknown_player_names_type_and_line(el1_text):
    broken = el1_text.replace(
        'fact FT3: President "winning"', 'fact FT3: Presidant "winning"')
    with pytest.raises(SchemaParseError, match="Presidant") as err:
        sch.parse_schema(broken)
    line = next(
        i for i, text in enumerate(broken.splitlines(), start=1)
        if "Presidant" in text
    )
    assert err.value.line == line


def test_parse_duplicate_name_rejected():
    with pytest.raises(SchemaParseError, match="duplicate object type name"):
        sch.parse_schema("object Year value\nobject year value\n")


def test_parse_rejects_nonbinary_fact():
    text = (
        "object A id:name\nobject B id:name\nobject C id:name\n"
        'fact F1: A "x" / "y" B C\n'
    )
    with pytest.raises(SchemaParseError, match="binary"):
        sch.parse_schema(text)


def test_serialize_round_trip(el1, el1_text):
    assert sch.parse_schema(sch.serialize_schema(el1)) == el1
    # re-serializing the reparse is byte-stable
    once = sch.serialize_schema(el1)
    assert sch.serialize_schema(sch.parse_schema(once)) == once


def test_serialize_round_trip_random_schemas():
    for seed in range(10):
        g = random_schema(random.Random(seed))
        assert sch.parse_schema(sch.serialize_schema(g)) == g


def test_validate_clean_fixture(el1):
    assert sch.validate_schema(el1) == []


def test_validate_duplicate_names():
    g = sch.parse_schema("object Year value\nobject Budget value\n")
    bad = sch.SchemaGraph(
        {**g.object_types, "year": sch.ObjectType("year", "year", "value")},
        g.fact_types,
    )
    violations = sch.validate_schema(bad)
    assert len(violations) == 1
    assert "duplicate name" in violations[0].message


def test_validate_empty_connector(el1):
    ft = el1.fact_types["FT1"]
    bad_ft = sch.FactType(ft.id, (sch.Role(ft.roles[0].player, "  "), ft.roles[1]))
    bad = sch.SchemaGraph(el1.object_types, {**el1.fact_types, "FT1": bad_ft})
    violations = sch.validate_schema(bad)
    assert [v.element for v in violations] == ["FT1"]


def test_adjacent_steps_politician(el1):
    steps = sch.adjacent_steps(el1, "Politician")
    assert steps == (
        Step("FT1", FORWARD), Step("FT5", REVERSE), Step("FT6", FORWARD))


def test_adjacent_steps_party(el1):
    assert sch.adjacent_steps(el1, "Party") == (Step("FT6", REVERSE),)


def test_adjacent_steps_isolated_without_ft6(el1_text):
    g = sch.parse_schema(
        "\n".join(l for l in el1_text.splitlines() if not l.startswith("fact FT6")))
    assert sch.adjacent_steps(g, "Party") == ()


def test_adjacent_steps_unknown_type(el1):
    with pytest.raises(UnknownObjectTypeError):
        sch.adjacent_steps(el1, "Nope")


def test_adjacency_symmetry_and_degree_sum(el1):
    graphs = [el1] + [random_schema(random.Random(s)) for s in range(6)]
    for g in graphs:
        total = 0
        for ot in g.object_types:
            steps = sch.adjacent_steps(g, ot)
            total += len(steps)
            for step in steps:
                back = step.reversed()
                assert back in sch.adjacent_steps(g, sch.step_target(g, step))
        assert total == 2 * len(g.fact_types)
        assert sch.derive_adjacency(g) == g.adjacency


def test_importance_order_rule(el1):
    order = sch.importance_order(el1)
    assert sorted(order) == sorted(el1.object_types)
    degrees = [len(sch.adjacent_steps(el1, ot)) for ot in order]
    assert degrees == sorted(degrees, reverse=True)
    # Election and Politician both have degree 3; the name tie-break leads.
    assert order[:2] == ["Election", "Politician"]
    # stable under serialization round-trip
    assert sch.importance_order(sch.parse_schema(sch.serialize_schema(el1))) == order


def test_importance_order_singleton():
    g = sch.parse_schema("object Lone value\n")
    assert sch.importance_order(g) == ["Lone"]


def test_importance_order_tie_break():
    g = sch.parse_schema(
        "object Election id:year\nobject Administration id:ordinal\n"
        'fact F1: Election "x" / "y" Administration\n'
    )
    assert sch.importance_order(g) == ["Administration", "Election"]


def test_verbalize_paper_strings(el1):
    assert (
        sch.verbalize_path(el1, path("President", ("FT3", "fwd"), ("FT4", "fwd")))
        == "President winning election which resulted in nr of votes"
    )
    assert (
        sch.verbalize_path(el1, path("Politician", ("FT1", "fwd"), ("FT2", "fwd")))
        == "Politician is president of administration inaugurated in year"
    )


def test_verbalize_zero_step(el1):
    assert sch.verbalize_path(el1, SchemaPath("Year")) == "Year"
    assert sch.verbalize_path(el1, SchemaPath("NrOfVotes")) == "Nr of votes"


def test_verbalize_rejects_broken_chain(el1):
    with pytest.raises(sch.InvalidPathError):
        sch.verbalize_path(el1, path("President", ("FT1", "fwd")))


def test_numeric_classification(el1):
    numeric = {ot for ot in el1.object_types if sch.is_numeric_type(el1, ot)}
    assert numeric == {"Election", "Year", "NrOfVotes"}

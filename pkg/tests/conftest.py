from __future__ import annotations

from pathlib import Path

import pytest

import cqf.evaluator as ev
import cqf.schema as sch
from cqf.schema import FORWARD, REVERSE, SchemaPath, Step

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_DIRS = {"fwd": FORWARD, "rev": REVERSE}


def path(head: str, *steps: tuple[str, str]) -> SchemaPath:
    """Shorthand path builder: path('President', ('FT3', 'fwd'))."""
    return SchemaPath(head, tuple(Step(ft, _DIRS[d]) for ft, d in steps))


@pytest.fixture(scope="session")
def el1_text() -> str:
    return (FIXTURES / "el1.cqs").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def el1(el1_text) -> sch.SchemaGraph:
    return sch.parse_schema(el1_text)


@pytest.fixture(scope="session")
def p1_text() -> str:
    return (FIXTURES / "p1.cqp").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def p1(el1, p1_text) -> ev.Population:
    return ev.parse_population(p1_text, el1)

"""Shared fixtures and the acceptance-criteria terminal summary."""

from __future__ import annotations

from pathlib import Path

import pytest

from classpulse.domain import (
    ActivityEvent,
    ActivitySpec,
    KnowledgeComponent,
    Question,
    RosterEntry,
)

REPO = Path(__file__).resolve().parent.parent
DEMO_CSV = REPO / "data" / "demo_activity.csv"


def build_spec(n_students: int = 4, kc_names: tuple[str, ...] = ("Mean", "Circle Graph"),
               questions_per_kc: int = 2) -> ActivitySpec:
    kcs = tuple(KnowledgeComponent(id=name, name=name) for name in kc_names)
    questions = tuple(
        Question(id=f"q{ki * questions_per_kc + qi + 1}", kc_id=kc.id)
        for ki, kc in enumerate(kcs)
        for qi in range(questions_per_kc)
    )
    roster = tuple(RosterEntry(id=f"s{i + 1}", name=f"Student {i + 1}") for i in range(n_students))
    return ActivitySpec(kcs=kcs, questions=questions, roster=roster)


def resp(sid: str, qid: str, correct: bool, **kw) -> ActivityEvent:
    return ActivityEvent.response(sid, qid, correct, **kw)


def hint(sid: str, qid: str, ordinal: int = 1, **kw) -> ActivityEvent:
    return ActivityEvent.hint(sid, qid, ordinal, **kw)


@pytest.fixture
def spec() -> ActivitySpec:
    return build_spec()


@pytest.fixture(scope="session")
def demo_csv() -> Path:
    assert DEMO_CSV.exists(), "bundled demo fixture is missing"
    return DEMO_CSV


def pytest_configure(config):
    config._acceptance_results = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for num, ok, desc in sorted(results):
            status = "PASS" if ok else "FAIL"
            terminalreporter.write_line(f"criterion {num}: {status} - {desc}")

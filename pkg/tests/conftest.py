"""Shared builders for the test suite."""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

import pytest

from antmon.annotate import Annotation, Color
from antmon.domain import DEFAULT_CALENDAR, AntCycle, validate_cycle
from antmon.scoring import RecordStatus, ScoredCycle, ScoreRecord

MONDAY = date(2025, 1, 6)
DAY_START = datetime(2025, 1, 6, 7, 0, tzinfo=timezone.utc)


def slot_ts(slot: int, day: date = MONDAY) -> datetime:
    return datetime(day.year, day.month, day.day, 7, 0, tzinfo=timezone.utc) + timedelta(
        minutes=2 * slot
    )


def make_cycle(readings, slot: int = 0, day: date = MONDAY) -> AntCycle:
    return validate_cycle(readings, slot_ts(slot, day), DEFAULT_CALENDAR)


def flat(value: float) -> list[float]:
    return [float(value)] * 8


def make_scored(
    slot: int = 100,
    day: date = MONDAY,
    base: float = 0.0,
    modified: float = 0.0,
    threat: float = 0.0,
    environmental: float = 0.0,
    total: float | None = None,
    status: RecordStatus = RecordStatus.FINALIZED,
) -> ScoredCycle:
    """Fabricated scored cycle for driving the monitor directly."""
    ts = slot_ts(slot, day)
    cycle = AntCycle(cycle_id=slot, timestamp=ts, readings=tuple(flat(180.0)))
    annotation = Annotation(
        cycle_id=slot,
        color=Color.NONE,
        extreme_max=False,
        extreme_min=False,
        extreme_range=False,
        changepoints=(),
    )
    record = ScoreRecord(
        cycle_id=slot,
        timestamp=ts,
        base_score=base,
        lookahead_factor=1.0,
        trend_factor=1.0,
        modified_score=modified,
        threat_score=threat,
        environmental_score=environmental,
        total_score=modified + threat + environmental if total is None else total,
        status=status,
        es_deficient=False,
    )
    return ScoredCycle(cycle=cycle, annotation=annotation, record=record)


@pytest.fixture
def day_start() -> datetime:
    return DAY_START

"""Validation, calendar, and cycle identity rules."""

from __future__ import annotations

import math
from datetime import date, datetime, time, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from antmon.domain import (
    DEFAULT_CALENDAR,
    READINGS_PER_CYCLE,
    InControlModel,
    NonFinite,
    NonPositive,
    OutsideSchedule,
    ProductionCalendar,
    WrongArity,
    validate_cycle,
)

from .conftest import MONDAY, flat, make_cycle, slot_ts

UTC = timezone.utc


# --- basic acceptance of well-formed cycles ---------------------------------


def test_valid_cycle_accepted():
    cycle = make_cycle([181.0, 182.5, 180.1, 183.9, 180.0, 184.0, 182.2, 181.7], slot=0)
    assert cycle.cycle_id == 0
    assert len(cycle.readings) == READINGS_PER_CYCLE
    assert cycle.timestamp == slot_ts(0)


def test_cycle_id_is_slot_index():
    assert make_cycle(flat(180), slot=1).cycle_id == 1
    assert make_cycle(flat(180), slot=30).cycle_id == 30  # 08:00
    # 02:58 the next calendar morning belongs to Monday, last slot of the day
    ts = datetime(2025, 1, 7, 2, 58, tzinfo=UTC)
    cycle = validate_cycle(flat(180), ts, DEFAULT_CALENDAR)
    assert cycle.cycle_id == 599


def test_naive_timestamp_treated_as_utc():
    cycle = validate_cycle(flat(180), datetime(2025, 1, 6, 7, 0), DEFAULT_CALENDAR)
    assert cycle.timestamp.tzinfo == UTC
    assert cycle.timestamp == slot_ts(0)


def test_seconds_truncated_to_minute():
    ts = datetime(2025, 1, 6, 7, 2, 37, 123456, tzinfo=UTC)
    cycle = validate_cycle(flat(180), ts, DEFAULT_CALENDAR)
    assert cycle.timestamp == slot_ts(1)
    assert cycle.cycle_id == 1


def test_readings_are_immutable_tuple():
    cycle = make_cycle(flat(180))
    assert isinstance(cycle.readings, tuple)
    with pytest.raises(Exception):
        cycle.readings = ()  # type: ignore[misc]


# --- rejection rules ---------------------------------------------------------


def test_wrong_arity_rejected():
    with pytest.raises(WrongArity):
        make_cycle([180.0] * 7)
    with pytest.raises(WrongArity):
        make_cycle([180.0] * 9)
    with pytest.raises(WrongArity):
        make_cycle([])


def test_non_finite_rejected():
    with pytest.raises(NonFinite):
        make_cycle([180.0] * 7 + [math.nan])
    with pytest.raises(NonFinite):
        make_cycle([math.inf] + [180.0] * 7)
    with pytest.raises(NonFinite):
        make_cycle([-math.inf] + [180.0] * 7)


def test_non_positive_rejected():
    with pytest.raises(NonPositive):
        make_cycle([0.0] + [180.0] * 7)
    with pytest.raises(NonPositive):
        make_cycle([-3.0] + [180.0] * 7)


def test_outside_schedule_rejected():
    # dead window between 03:00 and 07:00
    with pytest.raises(OutsideSchedule):
        validate_cycle(flat(180), datetime(2025, 1, 6, 4, 30, tzinfo=UTC), DEFAULT_CALENDAR)
    with pytest.raises(OutsideSchedule):
        validate_cycle(flat(180), datetime(2025, 1, 6, 6, 58, tzinfo=UTC), DEFAULT_CALENDAR)
    # 03:00 itself is already outside; 02:58 is the last valid slot
    with pytest.raises(OutsideSchedule):
        validate_cycle(flat(180), datetime(2025, 1, 7, 3, 0, tzinfo=UTC), DEFAULT_CALENDAR)
    validate_cycle(flat(180), datetime(2025, 1, 7, 2, 58, tzinfo=UTC), DEFAULT_CALENDAR)


def test_sunday_rejected_saturday_overnight_kept():
    # Sunday mid-day is a rest day
    with pytest.raises(OutsideSchedule):
        validate_cycle(flat(180), datetime(2025, 1, 12, 10, 0, tzinfo=UTC), DEFAULT_CALENDAR)
    # early Sunday morning still belongs to Saturday's run
    cycle = validate_cycle(flat(180), datetime(2025, 1, 12, 1, 30, tzinfo=UTC), DEFAULT_CALENDAR)
    assert DEFAULT_CALENDAR.production_day(cycle.timestamp) == date(2025, 1, 11)


def test_error_precedence_arity_first():
    # several problems at once: arity wins, then finiteness, then positivity
    with pytest.raises(WrongArity):
        validate_cycle([math.nan] * 3, datetime(2025, 1, 6, 5, 0, tzinfo=UTC), DEFAULT_CALENDAR)
    with pytest.raises(NonFinite):
        validate_cycle(
            [math.nan, -5.0] + [180.0] * 6,
            datetime(2025, 1, 6, 5, 0, tzinfo=UTC),
            DEFAULT_CALENDAR,
        )
    with pytest.raises(NonPositive):
        validate_cycle(
            [-5.0] + [180.0] * 7, datetime(2025, 1, 6, 5, 0, tzinfo=UTC), DEFAULT_CALENDAR
        )


# --- calendar geometry -------------------------------------------------------


def test_production_day_mapping():
    cal = DEFAULT_CALENDAR
    assert cal.production_day(datetime(2025, 1, 6, 7, 0, tzinfo=UTC)) == MONDAY
    assert cal.production_day(datetime(2025, 1, 6, 23, 59, tzinfo=UTC)) == MONDAY
    assert cal.production_day(datetime(2025, 1, 7, 2, 58, tzinfo=UTC)) == MONDAY
    assert cal.production_day(datetime(2025, 1, 7, 3, 0, tzinfo=UTC)) is None
    assert cal.production_day(datetime(2025, 1, 6, 6, 59, tzinfo=UTC)) is None
    # Sunday daytime maps nowhere
    assert cal.production_day(datetime(2025, 1, 12, 12, 0, tzinfo=UTC)) is None


def test_cycles_per_day_and_slots():
    cal = DEFAULT_CALENDAR
    assert cal.cycles_per_day() == 600
    assert cal.cycle_slot(datetime(2025, 1, 6, 7, 0, tzinfo=UTC)) == 0
    assert cal.cycle_slot(datetime(2025, 1, 6, 7, 2, tzinfo=UTC)) == 1
    assert cal.cycle_slot(datetime(2025, 1, 6, 8, 0, tzinfo=UTC)) == 30
    assert cal.cycle_slot(datetime(2025, 1, 7, 2, 58, tzinfo=UTC)) == 599


def test_odd_minute_floors_into_slot():
    # an off-grid arrival shares the slot of the even minute before it;
    # the streaming pipeline is what rejects two cycles in one slot
    cycle = validate_cycle(flat(180), datetime(2025, 1, 6, 7, 1, tzinfo=UTC), DEFAULT_CALENDAR)
    assert cycle.cycle_id == 0


def test_warmup_window():
    cal = DEFAULT_CALENDAR
    assert cal.in_warmup(datetime(2025, 1, 6, 7, 0, tzinfo=UTC))
    assert cal.in_warmup(datetime(2025, 1, 6, 7, 8, tzinfo=UTC))
    assert not cal.in_warmup(datetime(2025, 1, 6, 7, 10, tzinfo=UTC))
    assert not cal.in_warmup(datetime(2025, 1, 6, 12, 0, tzinfo=UTC))


def test_day_start_at():
    cal = DEFAULT_CALENDAR
    assert cal.day_start_at(MONDAY) == datetime(2025, 1, 6, 7, 0, tzinfo=UTC)


def test_custom_calendar():
    cal = ProductionCalendar(
        day_start=time(6, 0),
        day_end=time(2, 0),
        operating_weekdays=frozenset({0, 1, 2, 3, 4}),
        warmup_minutes=4,
    )
    assert cal.cycles_per_day() == 600
    assert cal.production_day(datetime(2025, 1, 6, 6, 0, tzinfo=UTC)) == MONDAY
    assert cal.production_day(datetime(2025, 1, 11, 10, 0, tzinfo=UTC)) is None  # Saturday off
    assert cal.in_warmup(datetime(2025, 1, 6, 6, 2, tzinfo=UTC))
    assert not cal.in_warmup(datetime(2025, 1, 6, 6, 4, tzinfo=UTC))


def test_model_defaults():
    model = InControlModel()
    assert model.mean == 180.0
    assert model.std == 4.0


# --- property: validated cycles always come out clean ------------------------


@given(
    st.lists(
        st.floats(min_value=0.1, max_value=400.0, allow_nan=False, allow_infinity=False),
        min_size=8,
        max_size=8,
    ),
    st.integers(min_value=0, max_value=599),
)
def test_validated_cycle_is_clean(readings, slot):
    cycle = make_cycle(readings, slot=slot)
    assert cycle.cycle_id == slot
    assert all(math.isfinite(r) and r > 0 for r in cycle.readings)
    assert DEFAULT_CALENDAR.production_day(cycle.timestamp) == MONDAY

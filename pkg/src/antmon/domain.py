"""Core data model: frying cycles, the production calendar, and the in-control process model.

A production day runs from 07:00 to 03:00 the next calendar day, Monday through
Saturday. A cycle is one basket: 8 temperature readings taken 15 seconds apart,
one cycle every 2 minutes, 600 cycles per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone, tzinfo

from .errors import AntmonError

READINGS_PER_CYCLE = 8
CYCLE_SPACING = timedelta(minutes=2)


class CycleValidationError(AntmonError):
    """A raw record that cannot become a valid AntCycle. Exactly one is raised per bad record."""


class WrongArity(CycleValidationError):
    code = "wrong_arity"


class NonFinite(CycleValidationError):
    code = "non_finite"


class NonPositive(CycleValidationError):
    code = "non_positive"


class OutsideSchedule(CycleValidationError):
    code = "outside_schedule"


@dataclass(frozen=True)
class InControlModel:
    """Gaussian model of reading noise while the process is healthy."""

    mean: float = 180.0
    std: float = 4.0


@dataclass(frozen=True)
class ProductionCalendar:
    """Operating schedule of the line.

    `day_start` is inclusive, `day_end` (on the next calendar day) exclusive.
    Weekdays use Monday=0; the default set is Monday through Saturday. The
    stretch belonging to a Saturday start therefore runs into Sunday morning.
    """

    day_start: time = time(7, 0)
    day_end: time = time(3, 0)
    operating_weekdays: frozenset = field(default_factory=lambda: frozenset(range(6)))
    warmup_minutes: int = 10
    tz: tzinfo = timezone.utc

    def normalize(self, ts: datetime) -> datetime:
        """Attach the calendar timezone to naive timestamps and truncate to the minute."""
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=self.tz)
        return ts.replace(second=0, microsecond=0)

    def production_day(self, ts: datetime) -> date | None:
        """The production date owning `ts`, or None when the line is shut."""
        ts = self.normalize(ts)
        t = ts.time()
        if t >= self.day_start:
            day = ts.date()
        elif t < self.day_end:
            day = ts.date() - timedelta(days=1)
        else:
            return None
        if day.weekday() not in self.operating_weekdays:
            return None
        return day

    def day_start_at(self, day: date) -> datetime:
        return datetime.combine(day, self.day_start, tzinfo=self.tz)

    def in_warmup(self, ts: datetime) -> bool:
        """True inside the first `warmup_minutes` of the owning production day."""
        day = self.production_day(ts)
        if day is None:
            return False
        start = self.day_start_at(day)
        return self.normalize(ts) < start + timedelta(minutes=self.warmup_minutes)

    def cycle_slot(self, ts: datetime) -> int:
        """0-based 2-minute slot index since the owning day's start (0..599 for a full day)."""
        day = self.production_day(ts)
        if day is None:
            raise OutsideSchedule(f"{ts.isoformat()} is outside the operating window")
        delta = self.normalize(ts) - self.day_start_at(day)
        return int(delta // CYCLE_SPACING)

    def cycles_per_day(self) -> int:
        start = datetime.combine(date(2000, 1, 3), self.day_start)
        end = datetime.combine(date(2000, 1, 4), self.day_end)
        return int((end - start) // CYCLE_SPACING)


DEFAULT_CALENDAR = ProductionCalendar()


@dataclass(frozen=True)
class AntCycle:
    """One validated frying cycle: the digital ant for one basket."""

    cycle_id: int
    timestamp: datetime
    readings: tuple[float, ...]

    @property
    def initial(self) -> float:
        return self.readings[0]


def validate_cycle(
    readings,
    timestamp: datetime,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> AntCycle:
    """Turn a raw (readings, timestamp) pair into an AntCycle or raise one validation error.

    Checks run in a fixed order (arity, finiteness, positivity, schedule) so a
    record with several defects always reports the same one. The function is
    pure: cycle_id is the timestamp's slot index within its production day.
    """
    values = tuple(float(x) for x in readings)
    if len(values) != READINGS_PER_CYCLE:
        raise WrongArity(f"expected {READINGS_PER_CYCLE} readings, got {len(values)}")
    for x in values:
        if not math.isfinite(x):
            raise NonFinite(f"non-finite reading {x!r}")
    for x in values:
        if x <= 0.0:
            raise NonPositive(f"non-positive reading {x!r}")
    ts = calendar.normalize(timestamp)
    if calendar.production_day(ts) is None:
        raise OutsideSchedule(f"{ts.isoformat()} is outside the operating window")
    return AntCycle(cycle_id=calendar.cycle_slot(ts), timestamp=ts, readings=values)

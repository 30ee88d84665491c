"""The pheromone score stack and the streaming pipeline that maintains it.

Score vocabulary (severity-style, low to high aggregation):

* base score      - band-count signature of one cycle, scaled by max/min
* lookahead factor - tuning from the next 5 cycles' base scores
* trend factor    - tuning from the tail shape of the cycle itself
* modified score  - lookahead * trend * base
* threat score    - change-point count plus extreme-value flags
* environmental score - decay-weighted means of the last 30 modified scores
* total score     - modified + threat + environmental

A cycle's modified score needs 5 future base scores, so streaming emits a
provisional record immediately and a finalized record 5 cycles later (or at
the day-end flush, whichever comes first).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import Iterable, Sequence

from .annotate import Annotation, annotate
from .changepoint import binary_segmentation, default_penalty
from .domain import DEFAULT_CALENDAR, AntCycle, InControlModel, ProductionCalendar
from .errors import AntmonError

LOOKAHEAD_CYCLES = 5
ENVIRONMENT_CYCLES = 30
ENVIRONMENT_BLOCK = 10
# Oldest block first: 21-30 cycles back weigh 1/2, 11-20 back 3/4, 1-10 back 1.
ENVIRONMENT_WEIGHTS = (0.5, 0.75, 1.0)

BAND_UP_1 = 184.0
BAND_UP_2 = 188.0
BAND_UP_3 = 192.0
BAND_DOWN = 180.0


class NonPositiveMin(AntmonError):
    code = "non_positive_min"


class InsufficientLookahead(AntmonError):
    code = "insufficient_lookahead"


class InsufficientHistory(AntmonError):
    code = "insufficient_history"


class OutOfOrder(AntmonError):
    code = "out_of_order"


def band_counts(readings: Sequence[float]) -> tuple[int, int, int, int]:
    """Cumulative band counts (above 184, above 188, above 192, below 180).

    Cumulative on purpose: a reading above 192 is also above 188 and 184, so it
    lands in all three up-counts. That triple counting is what lets a fully
    overheated cycle reach the maximum multiplier.
    """
    up1 = sum(1 for x in readings if x > BAND_UP_1)
    up2 = sum(1 for x in readings if x > BAND_UP_2)
    up3 = sum(1 for x in readings if x > BAND_UP_3)
    down = sum(1 for x in readings if x < BAND_DOWN)
    return (up1, up2, up3, down)


def base_score(readings: Sequence[float]) -> float:
    """(max/min) * (up-counts minus down-count) / 2, in [-4*max/min, 12*max/min]."""
    lo = min(readings)
    if lo <= 0.0:
        raise NonPositiveMin(f"minimum reading {lo!r} must be positive")
    up1, up2, up3, down = band_counts(readings)
    return (max(readings) / lo) * (up1 + up2 + up3 - down) / 2.0


def lookahead_factor(
    current: float,
    next_scores: Sequence[float],
    require_full: bool = True,
) -> float:
    """Tuning from the next cycles' base scores: 1 + 0.1/hotter - 0.05/negative.

    A future value that is both above `current` and negative contributes to
    both counts. Needs exactly 5 future values; the day-end flush relaxes that
    (`require_full=False`) and applies the same raw counts to what exists.
    """
    if len(next_scores) > LOOKAHEAD_CYCLES:
        raise InsufficientLookahead(
            f"expected at most {LOOKAHEAD_CYCLES} lookahead values, got {len(next_scores)}"
        )
    if require_full and len(next_scores) != LOOKAHEAD_CYCLES:
        raise InsufficientLookahead(
            f"expected {LOOKAHEAD_CYCLES} lookahead values, got {len(next_scores)}"
        )
    hotter = sum(1 for b in next_scores if b > current)
    negative = sum(1 for b in next_scores if b < 0.0)
    return 1.0 + 0.1 * hotter - 0.05 * negative


def trend_factor(readings: Sequence[float]) -> float:
    """Tail-shape tuning: 1.1 for a strictly rising last half, 0.9 for a strictly

    falling last three, else 1.0. Ties satisfy neither pattern.
    """
    r = readings
    if r[4] < r[5] < r[6] < r[7]:
        return 1.1
    if r[5] > r[6] > r[7]:
        return 0.9
    return 1.0


def modified_score(base: float, lookahead: float, trend: float) -> float:
    return lookahead * trend * base


def threat_score(annotation: Annotation) -> float:
    """Change-point count plus flag contributions; ranges over [-0.5, 5]."""
    value = float(annotation.changepoint_count)
    if annotation.extreme_max:
        value += 1.0
    if annotation.extreme_min:
        value -= 0.5
    if annotation.extreme_range:
        value += 1.0
    return value


def environmental_score(window: Sequence[float]) -> float:
    """Weighted block means over the last 30 modified scores, oldest block first."""
    if len(window) != ENVIRONMENT_CYCLES:
        raise InsufficientHistory(
            f"environmental window needs {ENVIRONMENT_CYCLES} values, got {len(window)}"
        )
    total = 0.0
    for block, weight in enumerate(ENVIRONMENT_WEIGHTS):
        chunk = window[block * ENVIRONMENT_BLOCK:(block + 1) * ENVIRONMENT_BLOCK]
        total += weight * (sum(chunk) / ENVIRONMENT_BLOCK)
    return total


def total_score(modified: float, threat: float, environmental: float) -> float:
    return modified + threat + environmental


class RecordStatus(str, Enum):
    PROVISIONAL = "provisional"
    FINALIZED = "finalized"


@dataclass(frozen=True)
class ScoreRecord:
    """Full score vector for one cycle at one point in its life."""

    cycle_id: int
    timestamp: datetime
    base_score: float
    lookahead_factor: float
    trend_factor: float
    modified_score: float
    threat_score: float
    environmental_score: float
    total_score: float
    status: RecordStatus
    es_deficient: bool  # fewer than 30 same-day predecessors; ES forced to 0 when finalized


@dataclass(frozen=True)
class ScoredCycle:
    """A cycle together with its annotation and its score record."""

    cycle: AntCycle
    annotation: Annotation
    record: ScoreRecord

    @property
    def finalized(self) -> bool:
        return self.record.status is RecordStatus.FINALIZED


@dataclass(frozen=True)
class ScoringConfig:
    model: InControlModel = InControlModel()
    segmentation_penalty: float | None = None
    min_segment_length: int = 2
    max_changepoints: int = 3

    def penalty(self, n: int) -> float:
        if self.segmentation_penalty is not None:
            return self.segmentation_penalty
        return default_penalty(n, self.model)


class _Entry:
    """Per-cycle working state inside one production day."""

    __slots__ = ("cycle", "annotation", "base", "trend", "threat", "best_mbs", "final")

    def __init__(self, cycle: AntCycle, annotation: Annotation, base: float, trend: float, threat: float):
        self.cycle = cycle
        self.annotation = annotation
        self.base = base
        self.trend = trend
        self.threat = threat
        self.best_mbs = modified_score(base, 1.0, trend)  # provisional until finalized
        self.final: ScoreRecord | None = None


def _window_environment(values: Sequence[float], end: int) -> tuple[float, bool]:
    """ES over values[end-30:end]; (0, deficient) when fewer than 30 exist."""
    if end < ENVIRONMENT_CYCLES:
        return 0.0, True
    return environmental_score(values[end - ENVIRONMENT_CYCLES:end]), False


class ScoringPipeline:
    """Streaming scorer: push cycles in time order, receive provisional and

    finalized ScoredCycles. Crossing into a new production day flushes the old
    one; `flush()` does the same at end of stream. Emission order per push:
    finalized records of older cycles first, then the new cycle's provisional.
    """

    def __init__(
        self,
        config: ScoringConfig = ScoringConfig(),
        calendar: ProductionCalendar = DEFAULT_CALENDAR,
    ):
        self.config = config
        self.calendar = calendar
        self.day: date | None = None
        self._last_ts: datetime | None = None
        self._entries: list[_Entry] = []
        self._best_mbs: list[float] = []   # best-known modified score per entry
        self._final_mbs: list[float] = []  # finalized modified scores, finalization order
        self._next_final = 0  # index of the oldest unfinalized entry

    @property
    def pending_count(self) -> int:
        return len(self._entries) - self._next_final

    def push_cycle(self, cycle: AntCycle) -> list[ScoredCycle]:
        if self._last_ts is not None and cycle.timestamp <= self._last_ts:
            raise OutOfOrder(
                f"cycle at {cycle.timestamp.isoformat()} does not advance past "
                f"{self._last_ts.isoformat()}"
            )
        day = self.calendar.production_day(cycle.timestamp)
        out: list[ScoredCycle] = []
        if self.day is not None and day != self.day:
            out.extend(self.flush())
        if self._entries and cycle.cycle_id <= self._entries[-1].cycle.cycle_id:
            # distinct timestamps can share one 2-minute slot; ids must still advance
            raise OutOfOrder(
                f"cycle id {cycle.cycle_id} does not advance past {self._entries[-1].cycle.cycle_id}"
            )
        self.day = day
        self._last_ts = cycle.timestamp

        seg = binary_segmentation(
            cycle.readings,
            self.config.penalty(len(cycle.readings)),
            self.config.min_segment_length,
            self.config.max_changepoints,
        )
        annotation = annotate(cycle, seg)
        entry = _Entry(
            cycle=cycle,
            annotation=annotation,
            base=base_score(cycle.readings),
            trend=trend_factor(cycle.readings),
            threat=threat_score(annotation),
        )
        self._entries.append(entry)
        self._best_mbs.append(entry.best_mbs)

        # Older cycles gain their 5th lookahead value one push at a time.
        while self._next_final + LOOKAHEAD_CYCLES <= len(self._entries) - 1:
            out.append(self._finalize(self._next_final, partial=False))
            self._next_final += 1

        out.append(self._provisional(len(self._entries) - 1))
        return out

    def flush(self) -> list[ScoredCycle]:
        """Finalize everything still pending (day end: short lookahead allowed)."""
        out = [self._finalize(i, partial=True) for i in range(self._next_final, len(self._entries))]
        self.day = None
        self._entries = []
        self._best_mbs = []
        self._final_mbs = []
        self._next_final = 0
        return out

    def _provisional(self, i: int) -> ScoredCycle:
        e = self._entries[i]
        mbs = e.best_mbs
        es, deficient = _window_environment(self._best_mbs, i)
        record = ScoreRecord(
            cycle_id=e.cycle.cycle_id,
            timestamp=e.cycle.timestamp,
            base_score=e.base,
            lookahead_factor=1.0,
            trend_factor=e.trend,
            modified_score=mbs,
            threat_score=e.threat,
            environmental_score=es,
            total_score=total_score(mbs, e.threat, es),
            status=RecordStatus.PROVISIONAL,
            es_deficient=deficient,
        )
        return ScoredCycle(cycle=e.cycle, annotation=e.annotation, record=record)

    def _finalize(self, i: int, partial: bool) -> ScoredCycle:
        e = self._entries[i]
        future = [x.base for x in self._entries[i + 1:i + 1 + LOOKAHEAD_CYCLES]]
        t1 = lookahead_factor(e.base, future, require_full=not partial)
        mbs = modified_score(e.base, t1, e.trend)
        es, deficient = _window_environment(self._final_mbs, i)
        record = ScoreRecord(
            cycle_id=e.cycle.cycle_id,
            timestamp=e.cycle.timestamp,
            base_score=e.base,
            lookahead_factor=t1,
            trend_factor=e.trend,
            modified_score=mbs,
            threat_score=e.threat,
            environmental_score=es,
            total_score=total_score(mbs, e.threat, es),
            status=RecordStatus.FINALIZED,
            es_deficient=deficient,
        )
        e.best_mbs = mbs
        e.final = record
        self._best_mbs[i] = mbs
        self._final_mbs.append(mbs)
        return ScoredCycle(cycle=e.cycle, annotation=e.annotation, record=record)


def score_day(
    cycles: Sequence[AntCycle],
    config: ScoringConfig = ScoringConfig(),
) -> list[ScoredCycle]:
    """Batch scorer over one production day, all data up front; finalized records only.

    Kept as an independent windowing implementation (plain slices) against
    which the streaming pipeline is checked for bit-identical output.
    """
    segs = [
        binary_segmentation(
            c.readings,
            config.penalty(len(c.readings)),
            config.min_segment_length,
            config.max_changepoints,
        )
        for c in cycles
    ]
    annotations = [annotate(c, s) for c, s in zip(cycles, segs)]
    bases = [base_score(c.readings) for c in cycles]
    trends = [trend_factor(c.readings) for c in cycles]
    threats = [threat_score(a) for a in annotations]
    lookaheads = [
        lookahead_factor(bases[i], bases[i + 1:i + 1 + LOOKAHEAD_CYCLES], require_full=False)
        for i in range(len(cycles))
    ]
    modifieds = [modified_score(b, t1, t2) for b, t1, t2 in zip(bases, lookaheads, trends)]

    out: list[ScoredCycle] = []
    for i, cycle in enumerate(cycles):
        es, deficient = _window_environment(modifieds, i)
        record = ScoreRecord(
            cycle_id=cycle.cycle_id,
            timestamp=cycle.timestamp,
            base_score=bases[i],
            lookahead_factor=lookaheads[i],
            trend_factor=trends[i],
            modified_score=modifieds[i],
            threat_score=threats[i],
            environmental_score=es,
            total_score=total_score(modifieds[i], threats[i], es),
            status=RecordStatus.FINALIZED,
            es_deficient=deficient,
        )
        out.append(ScoredCycle(cycle=cycle, annotation=annotations[i], record=record))
    return out


def score_stream(
    cycles: Iterable[AntCycle],
    config: ScoringConfig = ScoringConfig(),
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> list[ScoredCycle]:
    """Run the streaming pipeline over a whole (possibly multi-day) sequence."""
    pipeline = ScoringPipeline(config, calendar)
    out: list[ScoredCycle] = []
    for cycle in cycles:
        out.extend(pipeline.push_cycle(cycle))
    out.extend(pipeline.flush())
    return out

"""Alarm policy, the InC/OutC state machine, forecasting, and threshold tuning.

The monitor consumes finalized score records only. Alarms are edge-triggered:
one event per excursion, raised at the first sustained crossing; the state
machine then carries the excursion until the scores stay quiet long enough.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .domain import DEFAULT_CALENDAR, ProductionCalendar
from .errors import AntmonError
from .metrics import EpisodeLabel, balanced_accuracy, compute_metrics, match_episodes
from .scoring import RecordStatus, ScoredCycle, ScoreRecord

FORECAST_WINDOW = 5


class UnknownAlarm(AntmonError):
    code = "unknown_alarm"


class InvalidTransition(AntmonError):
    code = "invalid_transition"


class EmptyTrainingSet(AntmonError):
    code = "empty_training_set"


@dataclass(frozen=True)
class AlarmPolicy:
    """Thresholds sit just below the smallest genuine peaks seen in commissioning."""

    base_threshold: float = 12.0
    modified_threshold: float = 15.0
    environmental_threshold: float = 8.5
    total_threshold: float = 20.0
    sustain_cycles: int = 1          # consecutive crossed cycles before the alarm fires
    forecast_slope: float = 0.5      # ES units per cycle over the last 5 cycles
    suppress_warmup: bool = True
    recovery_cycles: int = 15        # quiet cycles to leave SuspectedOutC / OutC_halted
    halt_after_alarmed: int = 5      # further alarmed cycles that force OutC_halted

    def crossed(self, record: ScoreRecord) -> tuple[str, ...]:
        """Names of the score channels at or above their thresholds (OR rule)."""
        hits = []
        if record.base_score >= self.base_threshold:
            hits.append("base")
        if record.modified_score >= self.modified_threshold:
            hits.append("modified")
        if record.environmental_score >= self.environmental_threshold:
            hits.append("environmental")
        if record.total_score >= self.total_threshold:
            hits.append("total")
        return tuple(hits)


class ProcessState(str, Enum):
    WARMUP = "warmup"
    IN_CONTROL = "inc"
    SUSPECTED = "suspected_outc"
    HALTED = "outc_halted"


@dataclass(frozen=True)
class SystemState:
    state: ProcessState
    since: datetime | None  # None only before the first record


class AlarmKind(str, Enum):
    ALARM = "alarm"
    FORECAST = "forecast"


class OperatorAction(str, Enum):
    NONE = "none"
    HALT = "halt"
    MAINTENANCE_NOTE = "maintenance_note"


@dataclass
class AlarmEvent:
    """One emitted event; mutable because acknowledgement arrives later."""

    alarm_id: int
    timestamp: datetime
    cycle_id: int
    kind: AlarmKind
    triggers: tuple[str, ...]
    acknowledged: bool = False
    operator_action: OperatorAction = OperatorAction.NONE
    note: str = ""
    slope: float | None = None  # forecast events carry the fitted ES slope


def environment_slope(values: Sequence[float]) -> float:
    """Least-squares slope of equally spaced values (one step per cycle)."""
    n = len(values)
    mean_x = (n - 1) / 2.0
    mean_y = sum(values) / n
    sxx = sum((i - mean_x) ** 2 for i in range(n))
    sxy = sum((i - mean_x) * (y - mean_y) for i, y in enumerate(values))
    return sxy / sxx


class Monitor:
    """Feeds on finalized ScoredCycles; owns the system state and the alarm log."""

    def __init__(
        self,
        policy: AlarmPolicy = AlarmPolicy(),
        calendar: ProductionCalendar = DEFAULT_CALENDAR,
    ):
        self.policy = policy
        self.calendar = calendar
        self._state = ProcessState.IN_CONTROL
        self._since: datetime | None = None
        self._events: list[AlarmEvent] = []
        self._open: dict[int, AlarmEvent] = {}
        self._next_id = 1
        self._crossed_streak = 0
        self._quiet_streak = 0
        self._alarmed_in_suspect = 0
        self._es_window: list[float] = []
        self._forecast_high = False

    @property
    def state(self) -> SystemState:
        return SystemState(self._state, self._since)

    @property
    def events(self) -> list[AlarmEvent]:
        return list(self._events)

    @property
    def alarms(self) -> list[AlarmEvent]:
        return [e for e in self._events if e.kind is AlarmKind.ALARM]

    def _move(self, state: ProcessState, ts: datetime) -> None:
        if state is not self._state:
            self._state = state
            self._since = ts

    def update(self, scored: ScoredCycle) -> list[AlarmEvent]:
        """Advance the state machine by one finalized cycle; return events emitted."""
        record = scored.record
        if record.status is not RecordStatus.FINALIZED:
            raise ValueError("monitor consumes finalized records only")
        ts = record.timestamp
        if self._since is None:
            self._since = ts

        in_warmup = self.policy.suppress_warmup and self.calendar.in_warmup(ts)
        triggers = () if in_warmup else self.policy.crossed(record)
        crossed = bool(triggers)
        emitted: list[AlarmEvent] = []

        if in_warmup and self._state is ProcessState.IN_CONTROL:
            self._move(ProcessState.WARMUP, ts)
        elif not in_warmup and self._state is ProcessState.WARMUP:
            self._move(ProcessState.IN_CONTROL, ts)

        if crossed:
            self._crossed_streak += 1
            self._quiet_streak = 0
        else:
            self._crossed_streak = 0
            self._quiet_streak += 1

        alarmed = crossed and self._crossed_streak >= self.policy.sustain_cycles

        if self._state in (ProcessState.IN_CONTROL, ProcessState.WARMUP):
            if alarmed:
                event = self._emit(ts, record.cycle_id, AlarmKind.ALARM, triggers)
                emitted.append(event)
                self._move(ProcessState.SUSPECTED, ts)
                self._alarmed_in_suspect = 0
        elif self._state is ProcessState.SUSPECTED:
            if alarmed:
                self._alarmed_in_suspect += 1
                if self._alarmed_in_suspect >= self.policy.halt_after_alarmed:
                    self._move(ProcessState.HALTED, ts)
            elif self._quiet_streak >= self.policy.recovery_cycles:
                self._move(ProcessState.IN_CONTROL, ts)
        elif self._state is ProcessState.HALTED:
            # No operator around in replay: recover after the same quiet span.
            if self._quiet_streak >= self.policy.recovery_cycles:
                self._move(ProcessState.IN_CONTROL, ts)

        emitted.extend(self._forecast(record, in_warmup))
        return emitted

    def _forecast(self, record: ScoreRecord, in_warmup: bool) -> list[AlarmEvent]:
        self._es_window.append(record.environmental_score)
        if len(self._es_window) > FORECAST_WINDOW:
            self._es_window.pop(0)
        if len(self._es_window) < FORECAST_WINDOW:
            return []
        slope = environment_slope(self._es_window)
        rising = slope >= self.policy.forecast_slope
        quiet_state = self._state in (ProcessState.IN_CONTROL, ProcessState.WARMUP)
        if rising and quiet_state and not in_warmup and not self._forecast_high:
            self._forecast_high = True
            event = self._emit(
                record.timestamp, record.cycle_id, AlarmKind.FORECAST, ("environmental",)
            )
            event.slope = slope
            return [event]
        if not rising:
            self._forecast_high = False
        return []

    def _emit(self, ts: datetime, cycle_id: int, kind: AlarmKind, triggers: tuple[str, ...]) -> AlarmEvent:
        event = AlarmEvent(
            alarm_id=self._next_id,
            timestamp=ts,
            cycle_id=cycle_id,
            kind=kind,
            triggers=triggers,
        )
        self._next_id += 1
        self._events.append(event)
        if kind is AlarmKind.ALARM:
            self._open[event.alarm_id] = event
        return event

    # -- operator commands ------------------------------------------------

    def acknowledge(self, alarm_id: int) -> AlarmEvent:
        event = self._open.get(alarm_id)
        if event is None:
            raise UnknownAlarm(f"no open alarm with id {alarm_id}")
        event.acknowledged = True
        del self._open[alarm_id]
        return event

    def halt(self, ts: datetime) -> SystemState:
        if self._state is ProcessState.HALTED:
            raise InvalidTransition("line is already halted")
        self._move(ProcessState.HALTED, ts)
        for event in self._open.values():
            event.operator_action = OperatorAction.HALT
        self._quiet_streak = 0
        return self.state

    def resume(self, ts: datetime) -> SystemState:
        if self._state is not ProcessState.HALTED:
            raise InvalidTransition(f"cannot resume from {self._state.value}")
        self._move(ProcessState.IN_CONTROL, ts)
        self._crossed_streak = 0
        self._quiet_streak = 0
        return self.state

    def note(self, text: str) -> None:
        for event in self._open.values():
            event.operator_action = OperatorAction.MAINTENANCE_NOTE
            event.note = text

    @property
    def open_alarms(self) -> list[AlarmEvent]:
        return list(self._open.values())


@dataclass(frozen=True)
class LabeledDay:
    """One day of finalized scored cycles plus its ground-truth labels."""

    scored: tuple[ScoredCycle, ...]
    labels: tuple[EpisodeLabel, ...]


def run_monitor(
    scored: Iterable[ScoredCycle],
    policy: AlarmPolicy,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> list[AlarmEvent]:
    monitor = Monitor(policy, calendar)
    for s in scored:
        monitor.update(s)
    return monitor.events


DEFAULT_GRID: Mapping[str, Sequence[float]] = {
    "base_threshold": (11.0, 12.0, 13.0),
    "modified_threshold": (14.0, 15.0, 17.0),
    "environmental_threshold": (7.0, 8.5, 10.0),
    "total_threshold": (18.0, 20.0, 24.0),
}


def tune_thresholds(
    training: Sequence[LabeledDay],
    grid: Mapping[str, Sequence[float]] | None = None,
    base_policy: AlarmPolicy = AlarmPolicy(),
    lead_window_minutes: float = 30.0,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> AlarmPolicy:
    """Grid search maximizing balanced accuracy over labeled days.

    Ties break toward higher specificity, then toward the earlier grid point
    (grids are iterated in the order given), so the result is deterministic.
    """
    if not training or all(not day.labels for day in training):
        raise EmptyTrainingSet("no labeled days to tune on")
    grid = dict(grid or DEFAULT_GRID)
    names = list(grid)
    best_policy: AlarmPolicy | None = None
    best_key: tuple[float, float] | None = None
    for combo in itertools.product(*(grid[n] for n in names)):
        policy = replace(base_policy, **dict(zip(names, combo)))
        matrix = None
        for day in training:
            alarms = [e for e in run_monitor(day.scored, policy, calendar) if e.kind is AlarmKind.ALARM]
            day_matrix = match_episodes(alarms, list(day.labels), lead_window_minutes)
            matrix = day_matrix if matrix is None else matrix + day_matrix
        assert matrix is not None
        bacc = balanced_accuracy(matrix)
        if bacc is None:
            continue
        tnr = compute_metrics(matrix).tnr or 0.0
        key = (bacc, tnr)
        if best_key is None or key > best_key:
            best_key = key
            best_policy = policy
    if best_policy is None:
        raise EmptyTrainingSet("no grid point produced a defined balanced accuracy")
    return best_policy

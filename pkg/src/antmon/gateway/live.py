"""Composition root: scoring pipeline + monitor + event log + broadcast sink.

One lock serializes cycles and operator commands, so consumers observe a
total order. Message order per pushed cycle: finalized scores of older cycles
(each followed by whatever alarms / state changes it causes), then the new
cycle's annotation and provisional score.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from typing import Callable

from ..domain import DEFAULT_CALENDAR, AntCycle, ProductionCalendar
from ..errors import AntmonError
from ..monitor import AlarmPolicy, Monitor, SystemState
from ..scoring import ScoringConfig, ScoringPipeline
from . import events
from .eventlog import EventLog

Sink = Callable[[dict], None]


class LineRunner:
    def __init__(
        self,
        policy: AlarmPolicy = AlarmPolicy(),
        scoring: ScoringConfig = ScoringConfig(),
        calendar: ProductionCalendar = DEFAULT_CALENDAR,
        sink: Sink | None = None,
        log: EventLog | None = None,
    ):
        self._lock = threading.RLock()
        self.calendar = calendar
        self.pipeline = ScoringPipeline(scoring, calendar)
        self.monitor = Monitor(policy, calendar)
        self._sink = sink
        self._log = log
        self._seq = 0
        self._last_state = self.monitor.state
        self._last_ts: datetime | None = None
        self._emit(self._state_message())  # consumers start from a known state

    # -- plumbing ----------------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def _emit(self, message: dict, broadcast: bool = True) -> dict:
        if self._log is not None:
            self._log.append(message)
        if broadcast and self._sink is not None:
            self._sink(message)
        return message

    def _state_message(self) -> dict:
        return events.state_message(self._next_seq(), self.monitor.state, self.monitor.open_alarms)

    def _emit_state_if_changed(self, out: list[dict]) -> None:
        state = self.monitor.state
        if state != self._last_state:
            self._last_state = state
            out.append(self._emit(self._state_message()))

    # -- data path -----------------------------------------------------------

    def process_cycle(self, cycle: AntCycle) -> list[dict]:
        with self._lock:
            out: list[dict] = []
            for scored in self.pipeline.push_cycle(cycle):
                self._handle_scored(scored, out)
            self._last_ts = cycle.timestamp
            return out

    def finish(self) -> list[dict]:
        """End of stream: flush the open day through scoring and monitoring."""
        with self._lock:
            out: list[dict] = []
            for scored in self.pipeline.flush():
                self._handle_scored(scored, out)
            return out

    def _handle_scored(self, scored, out: list[dict]) -> None:
        if scored.finalized:
            out.append(self._emit(events.score_message(self._next_seq(), scored)))
            for event in self.monitor.update(scored):
                out.append(self._emit(events.alarm_message(self._next_seq(), event)))
            self._emit_state_if_changed(out)
        else:
            out.append(self._emit(events.annotation_message(self._next_seq(), scored)))
            out.append(self._emit(events.score_message(self._next_seq(), scored)))

    # -- operator commands ---------------------------------------------------

    def apply_command(self, command: dict) -> dict:
        """Apply one operator command; always persisted, applied only if valid."""
        with self._lock:
            ts = self._command_ts(command)
            name = command.get("command")
            error: str | None = None
            try:
                if name == "halt":
                    self.monitor.halt(ts)
                elif name == "resume":
                    self.monitor.resume(ts)
                elif name == "acknowledge":
                    self.monitor.acknowledge(int(command["alarm_id"]))
                elif name == "note":
                    self.monitor.note(str(command.get("text", "")))
                else:
                    error = "unknown_command"
            except AntmonError as exc:
                error = exc.code
            except (KeyError, TypeError, ValueError):
                error = "bad_command"
            accepted = error is None
            self._emit(
                events.command_record(self._next_seq(), command, accepted, error, ts),
                broadcast=False,
            )
            result: dict = {"ok": accepted}
            if accepted:
                out: list[dict] = []
                self._emit_state_if_changed(out)
                if not out:
                    # acknowledgements and notes change no state, but consumers
                    # still need the refreshed open-alarm list
                    self._emit(self._state_message())
                result["state"] = self.monitor.state.state.value
            else:
                result["error"] = error
            return result

    def _command_ts(self, command: dict) -> datetime:
        raw = command.get("timestamp")
        if raw:
            ts = datetime.fromisoformat(raw)
            return ts if ts.tzinfo else ts.replace(tzinfo=self.calendar.tz)
        if self._last_ts is not None:
            return self._last_ts
        return datetime.now(tz=timezone.utc).replace(microsecond=0)

    @property
    def state(self) -> SystemState:
        with self._lock:
            return self.monitor.state

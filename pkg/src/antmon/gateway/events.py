"""Wire format: every message is one JSON object on one line.

Floats serialize via repr (shortest round-trip), so a consumer parsing the
line gets bit-identical values back.
"""

from __future__ import annotations

import json
from datetime import datetime

from ..annotate import Annotation
from ..monitor import AlarmEvent, AlarmKind, SystemState
from ..scoring import ScoredCycle

TYPE_SCORE = "score"
TYPE_ALARM = "alarm"
TYPE_FORECAST = "forecast"
TYPE_STATE = "state"
TYPE_ANNOTATION = "annotation"
TYPE_HEARTBEAT = "heartbeat"
TYPE_COMMAND = "command"  # event-log only, never broadcast


def _iso(ts: datetime | None) -> str | None:
    return ts.isoformat() if ts is not None else None


def annotation_message(seq: int, scored: ScoredCycle) -> dict:
    a: Annotation = scored.annotation
    return {
        "type": TYPE_ANNOTATION,
        "seq": seq,
        "cycle_id": scored.cycle.cycle_id,
        "timestamp": _iso(scored.cycle.timestamp),
        "readings": list(scored.cycle.readings),
        "color": a.color.value,
        "extreme_max": a.extreme_max,
        "extreme_min": a.extreme_min,
        "extreme_range": a.extreme_range,
        "changepoints": list(a.changepoints),
        "changepoint_count": a.changepoint_count,
    }


def score_message(seq: int, scored: ScoredCycle) -> dict:
    r = scored.record
    return {
        "type": TYPE_SCORE,
        "seq": seq,
        "cycle_id": r.cycle_id,
        "timestamp": _iso(r.timestamp),
        "status": r.status.value,
        "base_score": r.base_score,
        "lookahead_factor": r.lookahead_factor,
        "trend_factor": r.trend_factor,
        "modified_score": r.modified_score,
        "threat_score": r.threat_score,
        "environmental_score": r.environmental_score,
        "total_score": r.total_score,
        "es_deficient": r.es_deficient,
    }


def alarm_message(seq: int, event: AlarmEvent) -> dict:
    return {
        "type": TYPE_ALARM if event.kind is AlarmKind.ALARM else TYPE_FORECAST,
        "seq": seq,
        "alarm_id": event.alarm_id,
        "cycle_id": event.cycle_id,
        "timestamp": _iso(event.timestamp),
        "kind": event.kind.value,
        "triggers": list(event.triggers),
        "acknowledged": event.acknowledged,
        "operator_action": event.operator_action.value,
        "note": event.note,
        "slope": event.slope,
    }


def state_message(seq: int, state: SystemState, open_alarms: list[AlarmEvent]) -> dict:
    return {
        "type": TYPE_STATE,
        "seq": seq,
        "state": state.state.value,
        "since": _iso(state.since),
        "open_alarms": [
            {
                "alarm_id": e.alarm_id,
                "acknowledged": e.acknowledged,
                "operator_action": e.operator_action.value,
            }
            for e in open_alarms
        ],
    }


def heartbeat_message(now: datetime) -> dict:
    return {"type": TYPE_HEARTBEAT, "timestamp": _iso(now)}


def command_record(seq: int, command: dict, accepted: bool, error: str | None, ts: datetime) -> dict:
    return {
        "type": TYPE_COMMAND,
        "seq": seq,
        "timestamp": _iso(ts),
        "command": command,
        "accepted": accepted,
        "error": error,
    }


def to_line(message: dict) -> str:
    return json.dumps(message, separators=(",", ":"))


def parse_line(line: str) -> dict:
    return json.loads(line)

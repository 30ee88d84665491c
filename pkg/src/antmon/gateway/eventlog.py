"""Append-only NDJSON event log and its replay helpers.

The log carries the full broadcast stream plus command records; replaying it
reconstructs the system state and, from halt/resume pairs, operator-declared
episode boundaries.
"""

from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import IO, Iterable, Iterator

from ..metrics import EpisodeLabel, Truth
from ..monitor import ProcessState, SystemState
from .events import TYPE_COMMAND, TYPE_STATE, parse_line, to_line


class EventLog:
    """Write-through sink; one JSON object per line, flushed per message."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh: IO[str] = open(self.path, "a")

    def append(self, message: dict) -> None:
        self._fh.write(to_line(message) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_events(path: str | Path) -> Iterator[dict]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield parse_line(line)


def restore_state(events: Iterable[dict]) -> SystemState | None:
    """The system state after the logged run: the last state record wins."""
    last = None
    for msg in events:
        if msg.get("type") == TYPE_STATE:
            last = msg
    if last is None:
        return None
    since = datetime.fromisoformat(last["since"]) if last["since"] else None
    return SystemState(state=ProcessState(last["state"]), since=since)


def labels_from_commands(events: Iterable[dict]) -> list[EpisodeLabel]:
    """Operator-declared episodes: each accepted halt opens one, resume closes it."""
    labels: list[EpisodeLabel] = []
    open_start: datetime | None = None
    for msg in events:
        if msg.get("type") != TYPE_COMMAND or not msg.get("accepted"):
            continue
        name = msg.get("command", {}).get("command")
        ts = datetime.fromisoformat(msg["timestamp"])
        if name == "halt" and open_start is None:
            open_start = ts
        elif name == "resume" and open_start is not None:
            labels.append(EpisodeLabel(start=open_start, end=ts, truth=Truth.OUTC))
            open_start = None
    return labels

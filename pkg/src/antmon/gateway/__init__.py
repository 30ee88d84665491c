"""Gateway: CSV ingest/export, the JSON-lines stream, event log, CLI."""

from .csvio import HEADER, IngestResult, MissingHeader, RowError, ingest_csv, write_cycles_csv
from .eventlog import EventLog, labels_from_commands, read_events, restore_state
from .live import LineRunner
from .stream import Broadcaster, StreamServer

__all__ = [
    "HEADER", "IngestResult", "MissingHeader", "RowError", "ingest_csv", "write_cycles_csv",
    "EventLog", "labels_from_commands", "read_events", "restore_state",
    "LineRunner", "Broadcaster", "StreamServer",
]

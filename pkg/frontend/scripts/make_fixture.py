#!/usr/bin/env python3
"""Record the dashboard test fixtures from the real backend.

Crafts a short fryer day, feeds it through the installed ``antmon replay``
command, and keeps the first 50 event-stream messages as the frozen fixture
the dashboard snapshot tests replay.  Also writes the small CSV the live
round-trip test serves with ``antmon replay --serve``.

Run from the repository root after any backend change that alters the
stream schema, then re-run the frontend tests:

    python3 frontend/scripts/make_fixture.py
"""
from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path

from antmon.domain import AntCycle
from antmon.gateway.csvio import write_cycles_csv

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"

MONDAY = date(2025, 1, 6)


def slot_ts(slot: int) -> datetime:
    """Timestamp of the given two-minute slot of the reference day."""
    start = datetime.combine(MONDAY, time(7, 0), tzinfo=timezone.utc)
    return start + timedelta(minutes=2 * slot)


def flat(value: float) -> tuple[float, ...]:
    return (float(value),) * 8


def fixture_cycles() -> list[AntCycle]:
    """16 cycles covering every row colour plus a hot excursion."""
    readings = [
        flat(181.0),                       # no colour
        (170.0,) + (184.0,) * 7,           # violet row, cold + wide-range flags
        (183.0,) * 7 + (190.0,),           # red row (single spike)
        flat(186.0),                       # orange row
        flat(178.0),                       # blue row
        flat(193.0),                       # hot: base score 12 -> alarm
        flat(193.0),                       # excursion continues
    ] + [flat(181.0)] * 9                  # quiet tail
    return [
        AntCycle(cycle_id=i, timestamp=slot_ts(90 + i), readings=r)
        for i, r in enumerate(readings)
    ]


def live_cycles() -> list[AntCycle]:
    """Quiet cycles for the live-server round-trip test."""
    return [
        AntCycle(cycle_id=i, timestamp=slot_ts(120 + i), readings=flat(181.0))
        for i in range(8)
    ]


def record_stream(csv_path: Path) -> list[dict]:
    with tempfile.TemporaryDirectory() as tmp:
        log = Path(tmp) / "events.ndjson"
        subprocess.run(
            ["antmon", "replay", str(csv_path), "--log", str(log)],
            check=True,
            capture_output=True,
        )
        lines = log.read_text().splitlines()
    return [json.loads(line) for line in lines]


def check_coverage(messages: list[dict]) -> None:
    """The frozen fixture must exercise every dashboard surface."""
    types = [m["type"] for m in messages]
    colors = {m["color"] for m in messages if m["type"] == "annotation"}
    states = {m["state"] for m in messages if m["type"] == "state"}
    finalized = {
        m["cycle_id"]
        for m in messages
        if m["type"] == "score" and m["status"] == "finalized"
    }
    provisional = {
        m["cycle_id"]
        for m in messages
        if m["type"] == "score" and m["status"] == "provisional"
    }
    assert colors == {"none", "violet", "red", "orange", "blue"}, colors
    assert types.count("alarm") == 1, types.count("alarm")
    assert "suspected_outc" in states, states
    assert finalized & provisional, "need a provisional->finalized twin"
    flagged = [
        m
        for m in messages
        if m["type"] == "annotation"
        and (m["extreme_min"] or m["extreme_max"] or m["extreme_range"])
    ]
    assert flagged, "need at least one flagged row"
    for m in messages:
        if m["type"] == "score":
            total = m["modified_score"] + m["threat_score"] + m["environmental_score"]
            assert m["total_score"] == total, m


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)

    fixture_csv = FIXTURES / "cycles_fixture.csv"
    write_cycles_csv(fixture_csv, fixture_cycles())
    messages = record_stream(fixture_csv)
    assert len(messages) >= 50, len(messages)
    kept = messages[:50]
    check_coverage(kept)
    out = FIXTURES / "messages.ndjson"
    out.write_text(
        "\n".join(json.dumps(m, separators=(",", ":")) for m in kept) + "\n"
    )
    print(f"wrote {out} ({len(kept)} messages)")

    live_csv = FIXTURES / "cycles_live.csv"
    write_cycles_csv(live_csv, live_cycles())
    print(f"wrote {live_csv} ({len(live_cycles())} cycles)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

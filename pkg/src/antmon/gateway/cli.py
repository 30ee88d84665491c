"""Command-line entry points.

    antmon score data.csv
    antmon simulate --days 5 --seed 7 --out runs/jan
    antmon replay runs/jan/cycles_2025-01-06.csv --serve --port 8787
    antmon evaluate --alarms alarms.jsonl --labels labels.jsonl
    antmon tune --training runs/jan
    antmon export --daily-summary --data runs/jan --out reports
"""

from __future__ import annotations

import argparse
import csv as csvmod
import json
import sys
import threading
import time
from dataclasses import replace
from datetime import datetime
from pathlib import Path

import numpy as np

from ..domain import DEFAULT_CALENDAR
from ..errors import AntmonError
from ..metrics import EpisodeLabel, Truth, compute_metrics, inc_gaps, match_episodes
from ..monitor import LabeledDay, tune_thresholds
from ..scoring import RecordStatus, score_stream
from ..simulate import simulate_days
from . import events
from .config import load_config, policy_as_dict
from .csvio import ingest_csv, write_cycles_csv
from .eventlog import EventLog
from .live import LineRunner
from .stream import Broadcaster, StreamServer


def _fail(message: str) -> int:
    print(f"antmon: {message}", file=sys.stderr)
    return 2


def _report_row_errors(result, path, quiet=False) -> None:
    if not quiet:
        for err in result.errors:
            print(f"antmon: {path}:{err.line} skipped ({err.code}): {err.message}", file=sys.stderr)


def _load_cycles(paths: list[str]):
    cycles = []
    for path in paths:
        result = ingest_csv(path)
        _report_row_errors(result, path)
        cycles.extend(result.cycles)
    return cycles


def _data_files(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("cycles_*.csv")))
        else:
            out.append(p)
    return out


# -- subcommands -------------------------------------------------------------


def cmd_score(args) -> int:
    cycles = _load_cycles([args.csv])
    sink = open(args.out, "w") if args.out else sys.stdout
    try:
        seq = 0
        for scored in score_stream(cycles):
            if scored.record.status is RecordStatus.FINALIZED:
                seq += 1
                sink.write(events.to_line(events.score_message(seq, scored)) + "\n")
    finally:
        if args.out:
            sink.close()
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sim = cfg.simulator
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for day in simulate_days(sim, args.days):
        cycles_path = out_dir / f"cycles_{day.day.isoformat()}.csv"
        labels_path = out_dir / f"labels_{day.day.isoformat()}.jsonl"
        write_cycles_csv(cycles_path, day.cycles)
        with open(labels_path, "w") as fh:
            for label in day.labels:
                fh.write(
                    json.dumps(
                        {
                            "start": label.start.isoformat(),
                            "end": label.end.isoformat(),
                            "truth": label.truth.value,
                        }
                    )
                    + "\n"
                )
        manifest.append(
            {
                "day": day.day.isoformat(),
                "cycles": str(cycles_path),
                "labels": str(labels_path),
                "episodes": len(day.labels),
            }
        )
    print(json.dumps({"seed": sim.seed, "days": manifest}, indent=2))
    return 0


def cmd_replay(args) -> int:
    cfg = load_config(args.config)
    cycles = _load_cycles(args.csv)
    log = EventLog(args.log) if args.log else None
    broadcaster = Broadcaster()

    if args.serve:
        runner = LineRunner(policy=cfg.policy, sink=broadcaster.publish, log=log)
        server = StreamServer(
            runner,
            broadcaster,
            port=args.port if args.port is not None else cfg.port,
            heartbeat_seconds=args.heartbeat,
            ui_dir=args.ui,
        )
        server.start()
        print(f"antmon: serving on http://127.0.0.1:{server.port}", file=sys.stderr)

        def feed():
            for cycle in cycles:
                runner.process_cycle(cycle)
                if args.rate > 0:
                    time.sleep(1.0 / args.rate)
            runner.finish()
            print("antmon: replay finished, still serving", file=sys.stderr)

        thread = threading.Thread(target=feed, daemon=True)
        thread.start()
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            server.stop()
    else:
        lines: list[str] = []
        runner = LineRunner(policy=cfg.policy, sink=lambda m: lines.append(events.to_line(m)), log=log)
        for cycle in cycles:
            runner.process_cycle(cycle)
            for line in lines:
                print(line)
            lines.clear()
        runner.finish()
        for line in lines:
            print(line)
    if log is not None:
        log.close()
    return 0


def cmd_evaluate(args) -> int:
    alarms = []
    with open(args.alarms) as fh:
        for line in fh:
            if line.strip():
                alarms.append(json.loads(line))
    # tolerate a full event log as input: keep alarm messages and bare dicts
    alarms = [a for a in alarms if a.get("type") in (None, "alarm")]
    labels = []
    with open(args.labels) as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            labels.append(
                EpisodeLabel(
                    start=datetime.fromisoformat(doc["start"]),
                    end=datetime.fromisoformat(doc["end"]),
                    truth=Truth(doc["truth"]),
                )
            )
    matrix = match_episodes(alarms, labels, args.lead_window)
    metrics = compute_metrics(matrix)
    report = {
        "counts": {"tp": matrix.tp, "fn": matrix.fn, "fp": matrix.fp, "tn": matrix.tn},
        "metrics": {
            key: (round(value, 4) if value is not None else None)
            for key, value in metrics.as_report().items()
        },
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_tune(args) -> int:
    cfg = load_config(args.config)
    training_dir = Path(args.training)
    days = []
    for cycles_path in sorted(training_dir.glob("cycles_*.csv")):
        labels_path = training_dir / cycles_path.name.replace("cycles_", "labels_").replace(
            ".csv", ".jsonl"
        )
        result = ingest_csv(cycles_path)
        _report_row_errors(result, cycles_path)
        labels = []
        if labels_path.exists():
            with open(labels_path) as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    doc = json.loads(line)
                    labels.append(
                        EpisodeLabel(
                            start=datetime.fromisoformat(doc["start"]),
                            end=datetime.fromisoformat(doc["end"]),
                            truth=Truth(doc["truth"]),
                        )
                    )
        # label files list only the episodes; the quiet remainder of the day is
        # implicitly in-control, and tuning needs those negatives to balance
        if result.cycles and not any(label.truth is Truth.INC for label in labels):
            labels.extend(
                inc_gaps(labels, result.cycles[0].timestamp, result.cycles[-1].timestamp)
            )
        scored = tuple(
            s for s in score_stream(result.cycles) if s.record.status is RecordStatus.FINALIZED
        )
        days.append(LabeledDay(scored=scored, labels=tuple(labels)))
    if not days:
        return _fail(f"no cycles_*.csv files under {training_dir}")
    policy = tune_thresholds(days, base_policy=cfg.policy, lead_window_minutes=args.lead_window)
    print(json.dumps({"policy": policy_as_dict(policy)}, indent=2))
    return 0


def cmd_export(args) -> int:
    if not args.daily_summary:
        return _fail("export currently supports --daily-summary only")
    files = _data_files(args.data)
    if not files:
        return _fail("no data files found")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_day: dict[str, list] = {}
    for path in files:
        result = ingest_csv(path)
        _report_row_errors(result, path)
        for scored in score_stream(result.cycles):
            if scored.record.status is not RecordStatus.FINALIZED:
                continue
            # early-morning cycles belong to the previous production date
            pday = DEFAULT_CALENDAR.production_day(scored.record.timestamp)
            day = (pday or scored.record.timestamp.date()).isoformat()
            per_day.setdefault(day, []).append(scored)

    summary_path = out_dir / "daily_summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csvmod.writer(fh)
        writer.writerow(
            ["day", "cycles", "ts_mean", "ts_p50", "ts_p90", "ts_p99", "ts_max",
             "base_max", "modified_max", "environmental_max"]
        )
        for day in sorted(per_day):
            ts = np.array([s.record.total_score for s in per_day[day]])
            writer.writerow(
                [
                    day,
                    len(ts),
                    round(float(ts.mean()), 4),
                    round(float(np.percentile(ts, 50)), 4),
                    round(float(np.percentile(ts, 90)), 4),
                    round(float(np.percentile(ts, 99)), 4),
                    round(float(ts.max()), 4),
                    round(max(s.record.base_score for s in per_day[day]), 4),
                    round(max(s.record.modified_score for s in per_day[day]), 4),
                    round(max(s.record.environmental_score for s in per_day[day]), 4),
                ]
            )

    grid_path = out_dir / "ts_heatgrid.csv"
    hours = [(7 + i) % 24 for i in range(20)]  # 07:00 through 02:00
    with open(grid_path, "w", newline="") as fh:
        writer = csvmod.writer(fh)
        days = sorted(per_day)
        writer.writerow(["hour"] + days)
        for hour in hours:
            row = [f"{hour:02d}:00"]
            for day in days:
                values = [
                    s.record.total_score
                    for s in per_day[day]
                    if s.record.timestamp.hour == hour
                ]
                row.append(round(max(values), 4) if values else "")
            writer.writerow(row)

    print(json.dumps({"daily_summary": str(summary_path), "ts_heatgrid": str(grid_path)}))
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antmon", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("score", help="batch-score a cycles CSV to finalized score records")
    p.add_argument("csv")
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("simulate", help="generate labeled synthetic days")
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("replay", help="stream CSV files through the live pipeline")
    p.add_argument("csv", nargs="+")
    p.add_argument("--serve", action="store_true")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--rate", type=float, default=0.0, help="cycles per second; 0 = no pacing")
    p.add_argument("--heartbeat", type=float, default=10.0)
    p.add_argument("--log", default=None)
    p.add_argument("--ui", default=None, help="directory with dashboard files to serve at /")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("evaluate", help="confusion matrix and metric report from alarms vs labels")
    p.add_argument("--alarms", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--lead-window", type=float, default=30.0, dest="lead_window",
                   help="minutes before episode start an alarm still counts")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("tune", help="grid-search thresholds on a labeled training directory")
    p.add_argument("--training", required=True)
    p.add_argument("--lead-window", type=float, default=30.0, dest="lead_window")
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("export", help="write per-day summaries from cycles files")
    p.add_argument("--daily-summary", action="store_true", dest="daily_summary")
    p.add_argument("--data", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except AntmonError as exc:
        return _fail(f"{exc.code}: {exc}")
    except FileNotFoundError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())

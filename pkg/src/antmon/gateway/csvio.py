"""CSV ingestion and export for cycle files.

Header is fixed: timestamp,t1,...,t8. Timestamps are ISO-8601; readings are
written with repr so export -> ingest reproduces bit-identical cycles.
Malformed rows are collected with their line numbers, never silently dropped.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from ..domain import DEFAULT_CALENDAR, AntCycle, CycleValidationError, ProductionCalendar, validate_cycle
from ..errors import AntmonError

log = logging.getLogger(__name__)

HEADER = ["timestamp", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"]


class MissingHeader(AntmonError):
    code = "missing_header"


@dataclass(frozen=True)
class RowError:
    line: int
    code: str
    message: str


@dataclass(frozen=True)
class IngestResult:
    cycles: tuple[AntCycle, ...]
    errors: tuple[RowError, ...]


def write_cycles_csv(path: str | Path, cycles: Iterable[AntCycle]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for c in cycles:
            writer.writerow([c.timestamp.isoformat()] + [repr(x) for x in c.readings])


def ingest_csv(
    path: str | Path,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> IngestResult:
    cycles: list[AntCycle] = []
    errors: list[RowError] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingHeader(f"{path}: empty file") from None
        if [h.strip() for h in header] != HEADER:
            raise MissingHeader(f"{path}: expected header {','.join(HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                cycles.append(_parse_row(row, calendar))
            except CycleValidationError as exc:
                errors.append(RowError(line=lineno, code=exc.code, message=str(exc)))
                log.warning("%s:%d rejected (%s): %s", path, lineno, exc.code, exc)
            except (ValueError, OverflowError) as exc:
                errors.append(RowError(line=lineno, code="unparsable_row", message=str(exc)))
                log.warning("%s:%d unparsable: %s", path, lineno, exc)
    return IngestResult(cycles=tuple(cycles), errors=tuple(errors))


def _parse_row(row: Sequence[str], calendar: ProductionCalendar) -> AntCycle:
    ts = datetime.fromisoformat(row[0].strip())
    readings = [float(cell) for cell in row[1:]]
    return validate_cycle(readings, ts, calendar)

"""Per-cycle annotation: color code, extreme-value flags, change-point count.

Mirrors the supervisor's colored temperature sheet. Every cycle gets exactly
one color; the flags and the change-point count feed the threat score.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .changepoint import Segmentation, binary_segmentation
from .domain import AntCycle

VIOLET_START_BELOW = 174.0
RED_ABOVE = 188.0
ORANGE_LOW = 184.0
ORANGE_HIGH = 188.0
BLUE_BELOW = 180.0

EXTREME_MAX_AT = 195.0
EXTREME_MIN_AT = 174.0
EXTREME_RANGE_AT = 13.0


class Color(str, Enum):
    NONE = "none"
    ORANGE = "orange"
    RED = "red"
    BLUE = "blue"
    VIOLET = "violet"


def color_code(readings: tuple[float, ...]) -> Color:
    """One color per cycle, by fixed priority: violet, red, orange, blue, none.

    Violet marks a catastrophic cold start (first reading below 174), red any
    reading above 188, orange a cycle living entirely in (184, 188], blue a
    cycle entirely below 180. The priority makes overlaps deterministic.
    """
    if readings[0] < VIOLET_START_BELOW:
        return Color.VIOLET
    if any(x > RED_ABOVE for x in readings):
        return Color.RED
    if all(ORANGE_LOW < x <= ORANGE_HIGH for x in readings):
        return Color.ORANGE
    if all(x < BLUE_BELOW for x in readings):
        return Color.BLUE
    return Color.NONE


@dataclass(frozen=True)
class Annotation:
    cycle_id: int
    color: Color
    extreme_max: bool      # max reading at or above 195
    extreme_min: bool      # min reading at or below 174
    extreme_range: bool    # spread of 13 degrees or more
    changepoints: tuple[int, ...]

    @property
    def changepoint_count(self) -> int:
        return len(self.changepoints)


def extreme_flags(readings: tuple[float, ...]) -> tuple[bool, bool, bool]:
    hi = max(readings)
    lo = min(readings)
    return (hi >= EXTREME_MAX_AT, lo <= EXTREME_MIN_AT, hi - lo >= EXTREME_RANGE_AT)


def annotate(cycle: AntCycle, segmentation: Segmentation | None = None) -> Annotation:
    """Full annotation for one cycle; runs the default segmentation when none is given."""
    if segmentation is None:
        segmentation = binary_segmentation(cycle.readings)
    e_max, e_min, e_range = extreme_flags(cycle.readings)
    return Annotation(
        cycle_id=cycle.cycle_id,
        color=color_code(cycle.readings),
        extreme_max=e_max,
        extreme_min=e_min,
        extreme_range=e_range,
        changepoints=segmentation.changepoints,
    )

"""Labeled synthetic data: in-control noise plus injected out-of-control regimes.

Every day gets the startup transient (cold, noisy first cycles; unlabeled,
the warmup policy exists to ignore it). Surges start per-cycle by a Bernoulli
draw; a draw landing while an episode is active is absorbed into it. Episode
labels cover the injected regimes, recovery tail included.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .domain import (
    CYCLE_SPACING,
    DEFAULT_CALENDAR,
    AntCycle,
    InControlModel,
    ProductionCalendar,
    validate_cycle,
)
from .metrics import EpisodeLabel, Truth, inc_gaps

DRIFT = "drift"
BATCH_DROP = "batch_drop"
JOULE_OVERSHOOT = "joule_overshoot"


@dataclass(frozen=True)
class SimConfig:
    model: InControlModel = InControlModel()
    surge_probability: float = 0.008
    regimes: tuple[str, ...] = (DRIFT, BATCH_DROP, JOULE_OVERSHOOT)
    seed: int = 0
    start_date: date = date(2025, 1, 6)  # a Monday
    # drift: mean climbs drift_rate per cycle for 15-25 cycles, then the
    # controller pulls it back at drift_recovery per cycle; the episode is
    # over only once the mean is back at baseline.
    drift_rate: float = 1.0
    drift_min_cycles: int = 15
    drift_max_cycles: int = 25
    drift_recovery: float = 4.0
    # batch_drop: a cold batch depresses the mean for a few cycles. Deliberately
    # kept below every default threshold: the evaluation needs honest misses.
    drop_depth: float = 8.0
    drop_cycles: int = 3
    # joule_overshoot: one spiked cycle, then an overcorrected dip.
    overshoot_spike: float = 18.0
    overshoot_dip: float = 12.0
    overshoot_dip_cycles: int = 2
    # startup transient, injected every day, never labeled.
    startup_cycles: int = 3
    startup_drop: float = 10.0
    startup_noise_factor: float = 2.0


@dataclass(frozen=True)
class RegimeSpan:
    kind: str
    start_cycle: int
    end_cycle: int  # inclusive


@dataclass(frozen=True)
class SimDay:
    day: date
    day_index: int
    cycles: tuple[AntCycle, ...]
    labels: tuple[EpisodeLabel, ...]  # out-of-control episodes only
    regimes: tuple[RegimeSpan, ...]
    raw_surge_draws: int  # Bernoulli successes before merging


def operating_date(calendar: ProductionCalendar, start: date, index: int) -> date:
    """The index-th operating day on or after `start`."""
    day = start
    seen = 0
    while True:
        if day.weekday() in calendar.operating_weekdays:
            if seen == index:
                return day
            seen += 1
        day += timedelta(days=1)


def _regime_deltas(kind: str, rng: np.random.Generator, config: SimConfig) -> list[float]:
    """Per-cycle mean offsets for one episode, first affected cycle first."""
    if kind == DRIFT:
        length = int(rng.integers(config.drift_min_cycles, config.drift_max_cycles + 1))
        ramp = [config.drift_rate * (i + 1) for i in range(length)]
        peak = ramp[-1]
        down = []
        level = peak - config.drift_recovery
        while level > 0.0:
            down.append(level)
            level -= config.drift_recovery
        return ramp + down
    if kind == BATCH_DROP:
        return [-config.drop_depth] * config.drop_cycles
    if kind == JOULE_OVERSHOOT:
        return [config.overshoot_spike] + [-config.overshoot_dip] * config.overshoot_dip_cycles
    raise ValueError(f"unknown regime {kind!r}")


def simulate_day(
    config: SimConfig,
    day_index: int,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> SimDay:
    """One production day, deterministic in (config.seed, day_index)."""
    day = operating_date(calendar, config.start_date, day_index)
    day_start = calendar.day_start_at(day)
    n = calendar.cycles_per_day()
    rng = np.random.default_rng([config.seed, day_index])

    noise = rng.normal(0.0, config.model.std, size=(n, 8))
    surge = rng.random(n) < config.surge_probability
    raw_draws = int(surge.sum())

    mean_offset = np.zeros(n)
    mean_offset[: config.startup_cycles] -= config.startup_drop
    noise[: config.startup_cycles] *= config.startup_noise_factor

    spans: list[RegimeSpan] = []
    active_until = -1
    for t in range(n):
        if not surge[t] or t <= active_until:
            continue
        kind = config.regimes[int(rng.integers(len(config.regimes)))]
        deltas = _regime_deltas(kind, rng, config)
        end = min(t + len(deltas), n) - 1
        for i, delta in enumerate(deltas[: end - t + 1]):
            mean_offset[t + i] += delta
        spans.append(RegimeSpan(kind=kind, start_cycle=t, end_cycle=end))
        active_until = end

    readings = config.model.mean + mean_offset[:, None] + noise
    cycles = tuple(
        validate_cycle(readings[t], day_start + t * CYCLE_SPACING, calendar)
        for t in range(n)
    )
    labels = tuple(
        EpisodeLabel(
            start=cycles[s.start_cycle].timestamp,
            end=cycles[s.end_cycle].timestamp,
            truth=Truth.OUTC,
        )
        for s in spans
    )
    return SimDay(
        day=day,
        day_index=day_index,
        cycles=cycles,
        labels=labels,
        regimes=tuple(spans),
        raw_surge_draws=raw_draws,
    )


def simulate_days(
    config: SimConfig,
    days: int,
    calendar: ProductionCalendar = DEFAULT_CALENDAR,
) -> list[SimDay]:
    return [simulate_day(config, i, calendar) for i in range(days)]


def full_labels(sim_day: SimDay) -> list[EpisodeLabel]:
    """Episode labels plus in-control stretch labels covering the rest of the day."""
    start = sim_day.cycles[0].timestamp
    end = sim_day.cycles[-1].timestamp
    return sorted(
        list(sim_day.labels) + inc_gaps(list(sim_day.labels), start, end),
        key=lambda l: l.start,
    )

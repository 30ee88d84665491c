"""Score-stack formulas and the streaming pipeline's queue semantics."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antmon.annotate import Annotation, Color
from antmon.scoring import (
    ENVIRONMENT_CYCLES,
    LOOKAHEAD_CYCLES,
    InsufficientHistory,
    InsufficientLookahead,
    NonPositiveMin,
    OutOfOrder,
    RecordStatus,
    ScoringConfig,
    ScoringPipeline,
    band_counts,
    base_score,
    environmental_score,
    lookahead_factor,
    modified_score,
    score_day,
    score_stream,
    threat_score,
    total_score,
    trend_factor,
)
from antmon.simulate import SimConfig, simulate_day

from .conftest import MONDAY, flat, make_cycle

readings_strategy = st.lists(
    st.floats(min_value=170.0, max_value=200.0, allow_nan=False),
    min_size=8,
    max_size=8,
)


def note_with(count=0, hot=False, cold=False, wide=False) -> Annotation:
    return Annotation(
        cycle_id=0,
        color=Color.NONE,
        extreme_max=hot,
        extreme_min=cold,
        extreme_range=wide,
        changepoints=tuple(range(2, 2 + count)),
    )


# --- base score ---------------------------------------------------------------


def test_band_counts_are_cumulative():
    # 193 exceeds all three upper bands at once
    assert band_counts([193.0] * 8) == (8, 8, 8, 0)
    assert band_counts([178.0, 181.0, 185.0, 189.0, 193.0, 186.0, 182.0, 179.0]) == (4, 2, 1, 2)
    assert band_counts([181.0] * 8) == (0, 0, 0, 0)


def test_base_score_saturated_hot_cycle():
    assert base_score([193.0] * 8) == 12.0


def test_base_score_quiet_band_is_zero():
    assert base_score([180.0, 181.0, 182.0, 183.0, 184.0, 180.5, 181.5, 183.5]) == 0.0


def test_base_score_mixed_cycle():
    value = base_score([178.0, 181.0, 185.0, 189.0, 193.0, 186.0, 182.0, 179.0])
    assert value == pytest.approx((193.0 / 178.0) * 2.5, rel=1e-12)
    assert value == pytest.approx(2.7106741573033712, rel=1e-12)


def test_base_score_can_go_negative():
    # all readings cold: down-count dominates
    assert base_score([175.0] * 8) == pytest.approx((175.0 / 175.0) * (0 - 8) / 2.0)


def test_base_score_rejects_non_positive_min():
    with pytest.raises(NonPositiveMin):
        base_score([0.0] + [180.0] * 7)
    with pytest.raises(NonPositiveMin):
        base_score([-1.0] + [180.0] * 7)


def test_band_boundaries_strict():
    assert band_counts([184.0] * 8) == (0, 0, 0, 0)
    assert band_counts([188.0] * 8) == (8, 0, 0, 0)
    assert band_counts([192.0] * 8) == (8, 8, 0, 0)
    assert band_counts([180.0] * 8) == (0, 0, 0, 0)


@given(readings_strategy)
def test_base_score_bounds(readings):
    ratio = max(readings) / min(readings)
    assert -4.0 * ratio - 1e-9 <= base_score(readings) <= 12.0 * ratio + 1e-9


# --- lookahead factor -----------------------------------------------------------


def test_lookahead_example():
    assert lookahead_factor(5.0, [6.0, 7.0, 4.0, -1.0, -2.0]) == pytest.approx(1.1)


def test_lookahead_double_counts_hot_and_negative():
    # every future value is both above the current score and negative
    assert lookahead_factor(-3.0, [-1.0] * 5) == pytest.approx(1.25)


def test_lookahead_extremes():
    assert lookahead_factor(0.0, [1.0] * 5) == pytest.approx(1.5)
    assert lookahead_factor(5.0, [-1.0] * 5) == pytest.approx(0.75)
    assert lookahead_factor(5.0, [0.0] * 5) == pytest.approx(1.0)


def test_lookahead_requires_exactly_five():
    with pytest.raises(InsufficientLookahead):
        lookahead_factor(1.0, [1.0] * 4)
    with pytest.raises(InsufficientLookahead):
        lookahead_factor(1.0, [])
    with pytest.raises(InsufficientLookahead):
        lookahead_factor(1.0, [1.0] * 6)
    with pytest.raises(InsufficientLookahead):
        lookahead_factor(1.0, [1.0] * 6, require_full=False)


def test_lookahead_partial_window_at_day_end():
    assert lookahead_factor(0.0, [1.0, 2.0], require_full=False) == pytest.approx(1.2)
    assert lookahead_factor(0.0, [], require_full=False) == 1.0
    assert lookahead_factor(3.0, [-1.0], require_full=False) == pytest.approx(0.95)


@given(
    st.floats(min_value=-20, max_value=20, allow_nan=False),
    st.lists(st.floats(min_value=-20, max_value=20, allow_nan=False), min_size=5, max_size=5),
)
def test_lookahead_bounds(current, future):
    assert 0.75 - 1e-9 <= lookahead_factor(current, future) <= 1.5 + 1e-9


# --- trend factor -----------------------------------------------------------------


def test_trend_rising_tail():
    assert trend_factor([180.0] * 4 + [181.0, 183.0, 185.0, 187.0]) == 1.1


def test_trend_falling_tail():
    assert trend_factor([180.0] * 4 + [186.0, 185.0, 184.0, 183.0]) == 0.9


def test_trend_ties_are_neutral():
    assert trend_factor(flat(180.0)) == 1.0
    # a tie breaks the strictly-rising pattern and the falling one needs decline
    assert trend_factor([180.0] * 4 + [181.0, 183.0, 183.0, 184.0]) == 1.0
    assert trend_factor([180.0] * 4 + [186.0, 185.0, 185.0, 184.0]) == 1.0


def test_trend_rising_needs_all_four():
    # the last three rise, but the fifth reading already sits above the sixth,
    # so the strictly-rising chain across the whole back half is broken
    assert trend_factor([180.0] * 4 + [184.0, 183.0, 185.0, 187.0]) == 1.0


@given(readings_strategy)
def test_trend_in_expected_set(readings):
    assert trend_factor(readings) in (0.9, 1.0, 1.1)


# --- modified / threat / environmental / total -------------------------------------


def test_modified_is_plain_product():
    assert modified_score(10.0, 1.1, 1.1) == 1.1 * 1.1 * 10.0
    assert modified_score(-2.0, 0.75, 0.9) == 0.75 * 0.9 * -2.0


def test_threat_score_contributions():
    assert threat_score(note_with()) == 0.0
    assert threat_score(note_with(count=2)) == 2.0
    assert threat_score(note_with(hot=True)) == 1.0
    assert threat_score(note_with(cold=True)) == -0.5
    assert threat_score(note_with(wide=True)) == 1.0
    assert threat_score(note_with(count=2, hot=True, cold=True, wide=True)) == 3.5


def test_threat_score_range_exhaustive():
    values = [
        threat_score(note_with(count=c, hot=h, cold=lo, wide=w))
        for c in range(4)
        for h in (False, True)
        for lo in (False, True)
        for w in (False, True)
    ]
    assert min(values) == -0.5
    assert max(values) == 5.0
    # the ceiling needs every aggravating factor at once and no cold reading
    assert values.count(5.0) == 1
    assert threat_score(note_with(count=3, hot=True, cold=False, wide=True)) == 5.0


def test_environmental_score_blocks():
    window = [4.0] * 10 + [8.0] * 10 + [12.0] * 10
    assert environmental_score(window) == 20.0


def test_environmental_score_constant_window():
    assert environmental_score([2.0] * 30) == pytest.approx(4.5)
    assert environmental_score([0.0] * 30) == 0.0


def test_environmental_score_window_length_enforced():
    with pytest.raises(InsufficientHistory):
        environmental_score([1.0] * 29)
    with pytest.raises(InsufficientHistory):
        environmental_score([1.0] * 31)


@given(st.lists(st.floats(min_value=-5, max_value=25, allow_nan=False), min_size=30, max_size=30))
def test_environmental_score_order_within_blocks_irrelevant(window):
    shuffled = (
        sorted(window[:10]) + sorted(window[10:20], reverse=True) + sorted(window[20:])
    )
    assert environmental_score(shuffled) == pytest.approx(environmental_score(window), abs=1e-9)


@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_environmental_score_scales_constant(m):
    assert environmental_score([m] * 30) == pytest.approx(2.25 * m, rel=1e-12, abs=1e-12)


def test_total_is_plain_sum():
    assert total_score(12.1, 2.0, 9.3) == 12.1 + 2.0 + 9.3


# --- streaming pipeline -------------------------------------------------------------


def hot_then_quiet_cycles(count):
    """Distinct, schedule-valid cycles with varied readings."""
    out = []
    for slot in range(count):
        level = 181.0 + (slot % 7)
        readings = [level + 0.25 * k for k in range(8)]
        out.append(make_cycle(readings, slot=slot))
    return out


def test_first_push_yields_single_provisional():
    pipe = ScoringPipeline()
    out = pipe.push_cycle(make_cycle(flat(181.0), slot=0))
    assert len(out) == 1
    assert out[0].record.status is RecordStatus.PROVISIONAL
    assert out[0].record.lookahead_factor == 1.0
    assert pipe.pending_count == 1


def test_finalization_lags_five_cycles():
    pipe = ScoringPipeline()
    cycles = hot_then_quiet_cycles(6)
    emitted = []
    for c in cycles[:5]:
        emitted = pipe.push_cycle(c)
        assert [r.record.status for r in emitted] == [RecordStatus.PROVISIONAL]
    emitted = pipe.push_cycle(cycles[5])
    assert [r.record.status for r in emitted] == [
        RecordStatus.FINALIZED,
        RecordStatus.PROVISIONAL,
    ]
    assert emitted[0].record.cycle_id == 0
    assert emitted[1].record.cycle_id == 5
    assert pipe.pending_count == LOOKAHEAD_CYCLES


def test_finalized_lookahead_uses_future_bases():
    pipe = ScoringPipeline()
    cycles = hot_then_quiet_cycles(6)
    out = []
    for c in cycles:
        out.extend(pipe.push_cycle(c))
    final = next(r for r in out if r.finalized)
    bases = [base_score(c.readings) for c in cycles]
    expected = lookahead_factor(bases[0], bases[1:6])
    assert final.record.lookahead_factor == expected
    assert final.record.modified_score == modified_score(
        bases[0], expected, trend_factor(cycles[0].readings)
    )


def test_flush_finalizes_pending_with_partial_windows():
    pipe = ScoringPipeline()
    cycles = hot_then_quiet_cycles(7)
    for c in cycles:
        pipe.push_cycle(c)
    assert pipe.pending_count == 5
    flushed = pipe.flush()
    assert [r.record.cycle_id for r in flushed] == [2, 3, 4, 5, 6]
    assert all(r.finalized for r in flushed)
    bases = [base_score(c.readings) for c in cycles]
    # the flushed records saw 4, 3, 2, 1, 0 future values respectively
    for r, i in zip(flushed, range(2, 7)):
        expected = lookahead_factor(bases[i], bases[i + 1 : i + 6], require_full=False)
        assert r.record.lookahead_factor == expected
    # the very last cycle had no future at all
    assert flushed[-1].record.lookahead_factor == 1.0
    assert pipe.pending_count == 0


def test_out_of_order_rejected():
    pipe = ScoringPipeline()
    pipe.push_cycle(make_cycle(flat(181.0), slot=3))
    with pytest.raises(OutOfOrder):
        pipe.push_cycle(make_cycle(flat(181.0), slot=3))
    with pytest.raises(OutOfOrder):
        pipe.push_cycle(make_cycle(flat(181.0), slot=1))


def test_same_slot_different_minute_rejected():
    from antmon.domain import validate_cycle

    from .conftest import slot_ts

    pipe = ScoringPipeline()
    pipe.push_cycle(make_cycle(flat(181.0), slot=3))  # 07:06
    # 07:07 advances the clock but floors into the same slot
    offgrid = validate_cycle(flat(181.0), slot_ts(3).replace(minute=7))
    assert offgrid.cycle_id == 3
    with pytest.raises(OutOfOrder):
        pipe.push_cycle(offgrid)


def test_out_of_order_survives_flush():
    pipe = ScoringPipeline()
    pipe.push_cycle(make_cycle(flat(181.0), slot=10))
    pipe.flush()
    with pytest.raises(OutOfOrder):
        pipe.push_cycle(make_cycle(flat(181.0), slot=9))


def test_day_rollover_flushes_previous_day():
    pipe = ScoringPipeline()
    for slot in range(3):
        pipe.push_cycle(make_cycle(flat(181.0), slot=slot, day=MONDAY))
    out = pipe.push_cycle(make_cycle(flat(181.0), slot=0, day=MONDAY.replace(day=7)))
    statuses = [r.record.status for r in out]
    assert statuses == [RecordStatus.FINALIZED] * 3 + [RecordStatus.PROVISIONAL]
    assert [r.record.cycle_id for r in out] == [0, 1, 2, 0]
    assert pipe.day == MONDAY.replace(day=7)


def test_environment_never_bridges_days():
    # enough Monday history to have a live environment, then Tuesday restarts cold
    pipe = ScoringPipeline()
    monday = hot_then_quiet_cycles(40)
    finals = []
    for c in monday:
        finals.extend(r for r in pipe.push_cycle(c) if r.finalized)
    tuesday_first = pipe.push_cycle(make_cycle(flat(181.0), slot=0, day=MONDAY.replace(day=7)))
    monday_finals = [r for r in tuesday_first if r.finalized]
    finals.extend(monday_finals)
    assert len(finals) == 40
    assert not finals[-1].record.es_deficient  # Monday had plenty of history
    # Tuesday's own records start deficient again
    tuesday_prov = tuesday_first[-1]
    assert tuesday_prov.record.es_deficient
    assert tuesday_prov.record.environmental_score == 0.0


def test_environment_deficiency_clears_after_thirty():
    pipe = ScoringPipeline()
    finals = []
    for c in hot_then_quiet_cycles(40):
        finals.extend(r for r in pipe.push_cycle(c) if r.finalized)
    assert all(r.record.es_deficient for r in finals[:ENVIRONMENT_CYCLES])
    assert all(r.record.environmental_score == 0.0 for r in finals[:ENVIRONMENT_CYCLES])
    assert not finals[ENVIRONMENT_CYCLES].record.es_deficient
    assert finals[ENVIRONMENT_CYCLES].record.environmental_score != 0.0


def test_pending_never_exceeds_lookahead():
    pipe = ScoringPipeline()
    for c in hot_then_quiet_cycles(25):
        pipe.push_cycle(c)
        assert pipe.pending_count <= LOOKAHEAD_CYCLES + 1
    assert pipe.pending_count == LOOKAHEAD_CYCLES


def test_total_equals_sum_of_parts_everywhere():
    pipe = ScoringPipeline()
    records = []
    for c in hot_then_quiet_cycles(40):
        records.extend(pipe.push_cycle(c))
    records.extend(pipe.flush())
    for scored in records:
        r = scored.record
        assert r.total_score == total_score(
            r.modified_score, r.threat_score, r.environmental_score
        )


def test_streaming_matches_batch_bit_for_bit():
    day = simulate_day(SimConfig(seed=11), 0)
    batch = score_day(list(day.cycles))
    streamed = [s for s in score_stream(day.cycles) if s.finalized]
    assert len(streamed) == len(batch) == 600
    for a, b in zip(streamed, batch):
        assert a.record == b.record  # dataclass equality: every float identical
        assert a.annotation == b.annotation


def test_score_stream_handles_multiple_days():
    days = [simulate_day(SimConfig(seed=11), i) for i in range(2)]
    cycles = [c for d in days for c in d.cycles]
    out = score_stream(cycles)
    finals = [s for s in out if s.finalized]
    provisionals = [s for s in out if not s.finalized]
    assert len(finals) == 1200
    assert len(provisionals) == 1200
    # each day's slice must equal that day's batch result exactly
    assert [s.record for s in finals[:600]] == [s.record for s in score_day(list(days[0].cycles))]
    assert [s.record for s in finals[600:]] == [s.record for s in score_day(list(days[1].cycles))]


def test_scoring_config_penalty():
    assert ScoringConfig().penalty(8) == pytest.approx(66.54212933375474)
    assert ScoringConfig(segmentation_penalty=10.0).penalty(8) == 10.0


@given(st.integers(min_value=1, max_value=12))
@settings(max_examples=20, deadline=None)
def test_push_emits_one_provisional_per_cycle(n):
    pipe = ScoringPipeline()
    for c in hot_then_quiet_cycles(n):
        out = pipe.push_cycle(c)
        assert sum(1 for r in out if not r.finalized) == 1
        assert out[-1].record.status is RecordStatus.PROVISIONAL

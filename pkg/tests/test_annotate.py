"""Color coding and extreme-value flags on validated cycles."""

from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from antmon.annotate import Color, annotate, color_code, extreme_flags
from antmon.changepoint import Segmentation, binary_segmentation

from .conftest import flat, make_cycle


def colored(readings):
    return color_code(make_cycle(readings).readings)


# --- color assignment --------------------------------------------------------


def test_quiet_band_has_no_color():
    assert colored([180.0, 181.5, 183.9, 180.2, 182.0, 184.0, 181.1, 180.7]) is Color.NONE


def test_orange_when_every_reading_runs_warm():
    assert colored([185.0, 186.0, 187.0, 185.0, 186.0, 187.0, 186.0, 185.0]) is Color.ORANGE


def test_red_on_any_overshoot():
    readings = flat(185.0)
    readings[3] = 189.0
    assert colored(readings) is Color.RED


def test_blue_when_every_reading_runs_cold():
    assert colored([178.0, 179.0, 177.5, 179.9, 178.8, 176.0, 179.2, 178.1]) is Color.BLUE


def test_violet_on_cold_first_reading():
    readings = flat(181.0)
    readings[0] = 173.0
    assert colored(readings) is Color.VIOLET


def test_violet_outranks_red():
    readings = flat(181.0)
    readings[0] = 173.0
    readings[5] = 190.0
    assert colored(readings) is Color.VIOLET


def test_violet_outranks_blue():
    assert colored([173.0] + [178.0] * 7) is Color.VIOLET


def test_red_outranks_orange():
    # a single overshoot keeps the cycle red even if the rest run warm
    assert colored([185.0] * 7 + [189.5]) is Color.RED


def test_orange_boundaries():
    # the warm band is open at 184 and closed at 188
    assert colored(flat(188.0)) is Color.ORANGE
    assert colored(flat(184.0)) is Color.NONE
    assert colored([184.0] + [185.0] * 7) is Color.NONE


def test_blue_boundary():
    assert colored(flat(180.0)) is Color.NONE
    assert colored(flat(179.9999)) is Color.BLUE


def test_violet_boundary_strict():
    assert colored([174.0] + [181.0] * 7) is not Color.VIOLET


@given(
    st.lists(
        st.floats(min_value=150.0, max_value=210.0, allow_nan=False),
        min_size=8,
        max_size=8,
    )
)
def test_color_is_total(readings):
    assert colored(readings) in set(Color)


# --- extreme flags -----------------------------------------------------------


def test_flags_inclusive_thresholds():
    # span of 12 degrees stays under the width limit, so only the hot flag trips
    hot, cold, wide = extreme_flags(make_cycle([195.0] + [183.0] * 7).readings)
    assert (hot, cold, wide) == (True, False, False)

    hot, cold, wide = extreme_flags(make_cycle([174.0] + [181.0] * 7).readings)
    assert (hot, cold, wide) == (False, True, False)

    hot, cold, wide = extreme_flags(make_cycle([178.0] + [191.0] * 7).readings)
    assert (hot, cold, wide) == (False, False, True)


def test_flag_boundaries_exact():
    assert extreme_flags(flat(194.9999))[0] is False
    assert extreme_flags([195.0] + [190.0] * 7)[0] is True
    assert extreme_flags([174.0001] + [180.0] * 7)[1] is False
    assert extreme_flags([174.0] + [180.0] * 7)[1] is True
    # range exactly at the limit counts
    assert extreme_flags([180.0] * 7 + [193.0])[2] is True
    assert extreme_flags([180.0] * 7 + [192.9999])[2] is False


def test_all_flags_together():
    hot, cold, wide = extreme_flags(make_cycle([174.0] + [183.0] * 6 + [196.0]).readings)
    assert (hot, cold, wide) == (True, True, True)


# --- assembled annotation ----------------------------------------------------


def test_annotate_runs_default_segmentation():
    cycle = make_cycle([180.0] * 4 + [190.0] * 4)
    note = annotate(cycle)
    assert note.cycle_id == cycle.cycle_id
    assert note.changepoints == (4,)
    assert note.changepoint_count == 1
    assert note.color is Color.RED  # 190 exceeds the overshoot line


def test_annotate_accepts_precomputed_segmentation():
    cycle = make_cycle(flat(181.0))
    seg = binary_segmentation(cycle.readings, penalty=10.0)
    note = annotate(cycle, segmentation=seg)
    assert note.changepoints == ()
    assert note.color is Color.NONE
    assert not (note.extreme_max or note.extreme_min or note.extreme_range)


def test_annotate_flags_match_helper():
    cycle = make_cycle([174.0] + [183.0] * 6 + [196.0])
    note = annotate(cycle, segmentation=Segmentation(changepoints=(), total_cost=0.0))
    assert note.extreme_max and note.extreme_min and note.extreme_range

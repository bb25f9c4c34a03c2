"""Trajectory sampling into servo command streams."""
from __future__ import annotations

import math

import pytest

from hapticnav.errors import InputError
from hapticnav.haptics.linkage import (
    Calibration,
    KinematicsError,
    LinkageGeometry,
    forward_kinematics,
    inverse_kinematics,
)
from hapticnav.haptics.patterns import HapticPatternId, Temple, compile_pattern
from hapticnav.haptics.rendering import REST_POSITION_MM, ServoCommand, render

GEOMETRY = LinkageGeometry()
CAL = Calibration()


def by_temple(commands, temple):
    return [c for c in commands if c.temple is temple]


def test_slow_slide_renders_75_commands_per_temple():
    commands = render(compile_pattern(HapticPatternId.SLIDE_FRONT_SLOW), GEOMETRY)
    for temple in Temple:
        per = by_temple(commands, temple)
        assert len(per) == 75
        assert per[0].t_ms == 0
        assert per[-1].t_ms == 1480
        assert [c.t_ms for c in per] == list(range(0, 1500, 20))


def test_fast_slide_renders_50_commands_per_temple():
    commands = render(compile_pattern(HapticPatternId.SLIDE_RIGHT_FAST), GEOMETRY)
    for temple in Temple:
        assert len(by_temple(commands, temple)) == 50


def test_tap_renders_20_commands_per_involved_temple():
    both = render(compile_pattern(HapticPatternId.TAP_CENTER), GEOMETRY)
    assert len(by_temple(both, Temple.LEFT)) == 20
    assert len(by_temple(both, Temple.RIGHT)) == 20
    single = render(compile_pattern(HapticPatternId.TAP_RIGHT), GEOMETRY)
    assert len(single) == 20
    assert {c.temple for c in single} == {Temple.RIGHT}


def test_commands_ordered_by_tick_then_temple():
    commands = render(compile_pattern(HapticPatternId.SLIDE_LEFT_FAST), GEOMETRY)
    keys = [(c.t_ms, c.temple.value) for c in commands]
    assert keys == sorted(keys)


def test_angles_quantized_to_centidegrees():
    commands = render(compile_pattern(HapticPatternId.SLIDE_FRONT_SLOW), GEOMETRY)
    for c in commands:
        assert c.angle1_deg == pytest.approx(round(c.angle1_deg * 100) / 100, abs=1e-12)
        assert c.angle2_deg == pytest.approx(round(c.angle2_deg * 100) / 100, abs=1e-12)


def test_slide_tip_tracks_the_sweep():
    # Decode each command back through FK; the tip x must advance
    # monotonically front-ward for a front slide, at constant skin depth.
    commands = by_temple(
        render(compile_pattern(HapticPatternId.SLIDE_FRONT_FAST), GEOMETRY), Temple.LEFT
    )
    xs = []
    for c in commands:
        x, y = forward_kinematics(c.angle1_deg, c.angle2_deg, GEOMETRY)
        xs.append(x)
        assert y == pytest.approx(
            GEOMETRY.contact_y_mm + GEOMETRY.press_depth_mm, abs=0.05
        )
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert xs[0] == pytest.approx(GEOMETRY.contact_x0_mm, abs=0.05)


def test_tap_peaks_at_half_duration():
    commands = by_temple(
        render(compile_pattern(HapticPatternId.TAP_CENTER), GEOMETRY), Temple.LEFT
    )
    depths = []
    for c in commands:
        _, y = forward_kinematics(c.angle1_deg, c.angle2_deg, GEOMETRY)
        depths.append(y - GEOMETRY.contact_y_mm)
    peak_tick = max(range(len(depths)), key=depths.__getitem__)
    assert commands[peak_tick].t_ms == 200
    # Centidegree quantization leaves ~0.01 mm of tip placement error.
    assert depths[peak_tick] == pytest.approx(GEOMETRY.press_depth_mm, abs=0.01)
    assert depths[0] == pytest.approx(0.0, abs=0.01)


def test_lateral_slide_parks_idle_temple_at_rest():
    # During the leading press the trailing temple has not been scripted
    # yet and must sit at the rest pose.
    commands = render(compile_pattern(HapticPatternId.SLIDE_RIGHT_FAST), GEOMETRY)
    rest_a1, rest_a2 = inverse_kinematics(REST_POSITION_MM, GEOMETRY, CAL, Temple.RIGHT, 0.0)
    early_right = [c for c in by_temple(commands, Temple.RIGHT) if c.t_ms < 180]
    assert early_right
    for c in early_right:
        assert c.angle1_deg == pytest.approx(rest_a1, abs=0.01)
        assert c.angle2_deg == pytest.approx(rest_a2, abs=0.01)
    # And after its own release window the leading temple returns to rest.
    late_left = [c for c in by_temple(commands, Temple.LEFT) if c.t_ms > 320]
    for c in late_left:
        assert c.angle1_deg == pytest.approx(rest_a1, abs=0.01)


def test_render_respects_custom_tick_rate():
    commands = render(compile_pattern(HapticPatternId.SLIDE_FRONT_FAST), GEOMETRY, tick_hz=100.0)
    assert len(by_temple(commands, Temple.LEFT)) == 100
    with pytest.raises(InputError):
        render(compile_pattern(HapticPatternId.TAP_FRONT), GEOMETRY, tick_hz=0.0)


def test_render_applies_calibration():
    shifted = Calibration(position_offset_mm={Temple.LEFT: 3.0, Temple.RIGHT: 0.0})
    plain = render(compile_pattern(HapticPatternId.TAP_CENTER), GEOMETRY)
    offset = render(compile_pattern(HapticPatternId.TAP_CENTER), GEOMETRY, shifted)
    left_plain = by_temple(plain, Temple.LEFT)[10]
    left_offset = by_temple(offset, Temple.LEFT)[10]
    right_plain = by_temple(plain, Temple.RIGHT)[10]
    right_offset = by_temple(offset, Temple.RIGHT)[10]
    assert left_plain != left_offset
    assert right_plain == right_offset


def test_render_reports_failing_tick():
    # An offset calibration pushes the front stretch of a slide off the
    # strip (positions past 67 mm shift beyond 70), which IK refuses.
    bad = Calibration(position_offset_mm={Temple.LEFT: 3.0, Temple.RIGHT: 0.0})
    with pytest.raises(KinematicsError) as err:
        render(compile_pattern(HapticPatternId.SLIDE_FRONT_FAST), GEOMETRY, bad)
    assert "tick" in str(err.value)

"""The tactile vocabulary and its contact-point choreography.

Thirteen patterns: five single-point taps (front, center, back on both
temples together, plus left and right on one temple) and four slide
directions each at two speeds. A pattern compiles to keyframes of the
skin contact point along each temple: position in millimeters from the
back of the 70 mm strip (70 = front, toward the eyes) and a normalized
press depth. Longitudinal slides sweep one temple; lateral slides are a
cross-temple handoff, a press on the far temple releasing into a press
on the near one, which reads as motion across the head.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..errors import InputError


class Temple(Enum):
    LEFT = "L"
    RIGHT = "R"


class HapticPatternId(Enum):
    TAP_FRONT = "tap_front"
    TAP_CENTER = "tap_center"
    TAP_BACK = "tap_back"
    TAP_LEFT = "tap_left"
    TAP_RIGHT = "tap_right"
    SLIDE_FRONT_FAST = "slide_front_fast"
    SLIDE_BACK_FAST = "slide_back_fast"
    SLIDE_RIGHT_FAST = "slide_right_fast"
    SLIDE_LEFT_FAST = "slide_left_fast"
    SLIDE_FRONT_SLOW = "slide_front_slow"
    SLIDE_BACK_SLOW = "slide_back_slow"
    SLIDE_RIGHT_SLOW = "slide_right_slow"
    SLIDE_LEFT_SLOW = "slide_left_slow"


TEMPLE_SPAN_MM = 70.0
POSITION_FRONT_MM = 70.0
POSITION_CENTER_MM = 35.0
POSITION_BACK_MM = 0.0

TAP_DURATION_MS = 400.0
SLIDE_FAST_DURATION_MS = 1000.0
SLIDE_SLOW_DURATION_MS = 1500.0

# Lateral handoff timing: the leading temple presses and releases over
# this long, the trailing temple starts this far in, so the two presses
# overlap and the sensation hops across the head.
_HANDOFF_LEAD_MS = 300.0
_HANDOFF_OVERLAP_MS = 100.0


@dataclass(frozen=True)
class ContactKeyframe:
    """Contact state on one temple at one instant.

    Attributes:
        t_ms: Time from pattern start.
        temple: Which temple the contact point is on.
        position_mm: Contact point along the strip, 0 (back) to 70 (front).
        pressure: Press depth, 0 (released) to 1 (full press).
    """

    t_ms: float
    temple: Temple
    position_mm: float
    pressure: float

    def __post_init__(self) -> None:
        if self.t_ms < 0:
            raise InputError(f"keyframe time must be >= 0, got {self.t_ms}")
        if not 0.0 <= self.position_mm <= TEMPLE_SPAN_MM:
            raise InputError(f"position out of [0, {TEMPLE_SPAN_MM}] mm: {self.position_mm}")
        if not 0.0 <= self.pressure <= 1.0:
            raise InputError(f"pressure out of [0, 1]: {self.pressure}")


@dataclass(frozen=True)
class PatternTrajectory:
    """Compiled keyframes for one pattern, sorted by time."""

    pattern: HapticPatternId
    keyframes: tuple[ContactKeyframe, ...]

    def __post_init__(self) -> None:
        if not self.keyframes:
            raise InputError("a trajectory needs at least one keyframe")
        times = [k.t_ms for k in self.keyframes]
        if times != sorted(times):
            raise InputError("keyframes must be time-sorted")

    @property
    def duration_ms(self) -> float:
        return self.keyframes[-1].t_ms

    def temples(self) -> tuple[Temple, ...]:
        seen = []
        for k in self.keyframes:
            if k.temple not in seen:
                seen.append(k.temple)
        return tuple(seen)


def _sorted(frames: list[ContactKeyframe]) -> tuple[ContactKeyframe, ...]:
    return tuple(sorted(frames, key=lambda k: (k.t_ms, k.temple.value)))


def _tap(temples: tuple[Temple, ...], position_mm: float) -> list[ContactKeyframe]:
    """Triangle press: touch, full press at half time, release."""
    frames = []
    for temple in temples:
        frames += [
            ContactKeyframe(0.0, temple, position_mm, 0.0),
            ContactKeyframe(TAP_DURATION_MS / 2, temple, position_mm, 1.0),
            ContactKeyframe(TAP_DURATION_MS, temple, position_mm, 0.0),
        ]
    return frames


def _longitudinal_slide(start_mm: float, end_mm: float, duration_ms: float) -> list[ContactKeyframe]:
    """Constant-pressure sweep along both temples in parallel."""
    frames = []
    for temple in (Temple.LEFT, Temple.RIGHT):
        frames += [
            ContactKeyframe(0.0, temple, start_mm, 1.0),
            ContactKeyframe(duration_ms, temple, end_mm, 1.0),
        ]
    return frames


def _lateral_handoff(first: Temple, second: Temple, duration_ms: float) -> list[ContactKeyframe]:
    """Press-release on `first`, overlapping press on `second`."""
    lead_end = _HANDOFF_LEAD_MS
    second_start = lead_end - _HANDOFF_OVERLAP_MS
    mid = POSITION_CENTER_MM
    return [
        ContactKeyframe(0.0, first, mid, 0.0),
        ContactKeyframe(lead_end / 2, first, mid, 1.0),
        ContactKeyframe(lead_end, first, mid, 0.0),
        ContactKeyframe(second_start, second, mid, 0.0),
        ContactKeyframe((second_start + duration_ms) / 2, second, mid, 1.0),
        ContactKeyframe(duration_ms, second, mid, 0.0),
    ]


_BOTH = (Temple.LEFT, Temple.RIGHT)


def compile_pattern(pattern: HapticPatternId) -> PatternTrajectory:
    """Expand a pattern id into its keyframe choreography."""
    if pattern is HapticPatternId.TAP_FRONT:
        frames = _tap(_BOTH, POSITION_FRONT_MM)
    elif pattern is HapticPatternId.TAP_CENTER:
        frames = _tap(_BOTH, POSITION_CENTER_MM)
    elif pattern is HapticPatternId.TAP_BACK:
        frames = _tap(_BOTH, POSITION_BACK_MM)
    elif pattern is HapticPatternId.TAP_LEFT:
        frames = _tap((Temple.LEFT,), POSITION_CENTER_MM)
    elif pattern is HapticPatternId.TAP_RIGHT:
        frames = _tap((Temple.RIGHT,), POSITION_CENTER_MM)
    elif pattern is HapticPatternId.SLIDE_FRONT_FAST:
        frames = _longitudinal_slide(POSITION_BACK_MM, POSITION_FRONT_MM, SLIDE_FAST_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_FRONT_SLOW:
        frames = _longitudinal_slide(POSITION_BACK_MM, POSITION_FRONT_MM, SLIDE_SLOW_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_BACK_FAST:
        frames = _longitudinal_slide(POSITION_FRONT_MM, POSITION_BACK_MM, SLIDE_FAST_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_BACK_SLOW:
        frames = _longitudinal_slide(POSITION_FRONT_MM, POSITION_BACK_MM, SLIDE_SLOW_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_LEFT_FAST:
        frames = _lateral_handoff(Temple.RIGHT, Temple.LEFT, SLIDE_FAST_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_LEFT_SLOW:
        frames = _lateral_handoff(Temple.RIGHT, Temple.LEFT, SLIDE_SLOW_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_RIGHT_FAST:
        frames = _lateral_handoff(Temple.LEFT, Temple.RIGHT, SLIDE_FAST_DURATION_MS)
    elif pattern is HapticPatternId.SLIDE_RIGHT_SLOW:
        frames = _lateral_handoff(Temple.LEFT, Temple.RIGHT, SLIDE_SLOW_DURATION_MS)
    else:
        raise InputError(f"unknown pattern: {pattern!r}")
    return PatternTrajectory(pattern=pattern, keyframes=_sorted(frames))


def pattern_duration_ms(pattern: HapticPatternId) -> float:
    """Nominal playback time of a pattern."""
    return compile_pattern(pattern).duration_ms


def trajectory_to_csv(trajectory: PatternTrajectory, path: str | Path) -> None:
    """Write keyframes as CSV: t_ms, temple, position_mm, pressure."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ms", "temple", "position_mm", "pressure"])
        for k in trajectory.keyframes:
            writer.writerow([f"{k.t_ms:g}", k.temple.value, f"{k.position_mm:g}", f"{k.pressure:g}"])

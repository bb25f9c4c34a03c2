"""Serialized pattern playback with coalescing.

Patterns must never interrupt each other: a half-played slide feels like
a different gesture. The scheduler plays at most one pattern at a time,
holds a rest gap after each so consecutive cues stay distinguishable, and
keeps a single pending slot for requests arriving while busy. New
requests overwrite the slot (only the newest intent matters by the time
the actuator frees up), and the pending pattern starts exactly when the
busy window closes.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

from ..errors import InputError
from .patterns import HapticPatternId, compile_pattern

DEFAULT_REST_GAP_MS = 250.0


class SubmitResult(Enum):
    ACCEPTED = "accepted"  # starts now
    COALESCED = "coalesced"  # parked in (or replacing) the pending slot


@dataclass(frozen=True)
class PlaybackEvent:
    """A pattern that began playing.

    Attributes:
        pattern: What started.
        start_ms: When playback began.
        end_ms: When the skin contact ends (start + pattern duration).
        busy_until_ms: When the actuator accepts the next start
            (end + rest gap).
    """

    pattern: HapticPatternId
    start_ms: float
    end_ms: float
    busy_until_ms: float


class PatternScheduler:
    """Single-actuator playback queue with a one-deep pending slot.

    Time is supplied by the caller on every call and must not go
    backwards. Thread-safe: submissions may come from any thread.
    """

    def __init__(self, rest_gap_ms: float = DEFAULT_REST_GAP_MS):
        if rest_gap_ms < 0:
            raise InputError(f"rest gap must be >= 0: {rest_gap_ms}")
        self._rest_gap_ms = rest_gap_ms
        self._durations = {p: compile_pattern(p).duration_ms for p in HapticPatternId}
        self._lock = threading.Lock()
        self._busy_until_ms = 0.0
        self._playing: PlaybackEvent | None = None
        self._pending: HapticPatternId | None = None
        self._started: list[PlaybackEvent] = []
        self._last_time_ms = 0.0

    def _check_time(self, t_ms: float) -> None:
        if t_ms < self._last_time_ms:
            raise InputError(f"time went backwards: {t_ms} after {self._last_time_ms}")
        self._last_time_ms = t_ms

    def _start(self, pattern: HapticPatternId, t_ms: float) -> None:
        duration = self._durations[pattern]
        event = PlaybackEvent(
            pattern=pattern,
            start_ms=t_ms,
            end_ms=t_ms + duration,
            busy_until_ms=t_ms + duration + self._rest_gap_ms,
        )
        self._playing = event
        self._busy_until_ms = event.busy_until_ms
        self._started.append(event)

    def _settle(self, t_ms: float) -> None:
        # Promote pending patterns at each busy-window boundary; with a
        # big time jump several may start and finish back to back.
        while self._pending is not None and self._busy_until_ms <= t_ms:
            pattern, self._pending = self._pending, None
            self._start(pattern, self._busy_until_ms)
        if self._playing is not None and self._busy_until_ms <= t_ms:
            self._playing = None

    def submit(self, pattern: HapticPatternId, t_ms: float) -> SubmitResult:
        """Request playback at time t_ms."""
        if not isinstance(pattern, HapticPatternId):
            raise InputError(f"not a pattern: {pattern!r}")
        with self._lock:
            self._check_time(t_ms)
            self._settle(t_ms)
            if self._busy_until_ms <= t_ms:
                self._start(pattern, t_ms)
                return SubmitResult.ACCEPTED
            self._pending = pattern
            return SubmitResult.COALESCED

    def advance(self, t_ms: float) -> list[PlaybackEvent]:
        """Move time forward; return playbacks that started since last call."""
        with self._lock:
            self._check_time(t_ms)
            self._settle(t_ms)
            started, self._started = self._started, []
            return started

    def playing(self, t_ms: float) -> HapticPatternId | None:
        """Pattern in contact with the skin at t_ms, if any."""
        with self._lock:
            self._check_time(t_ms)
            self._settle(t_ms)
            if self._playing is not None and t_ms < self._playing.end_ms:
                return self._playing.pattern
            return None

    def is_idle(self, t_ms: float) -> bool:
        """True when a submission at t_ms would start immediately."""
        with self._lock:
            self._check_time(t_ms)
            self._settle(t_ms)
            return self._busy_until_ms <= t_ms and self._pending is None

    @property
    def pending(self) -> HapticPatternId | None:
        with self._lock:
            return self._pending

    def pattern_duration_ms(self, pattern: HapticPatternId) -> float:
        return self._durations[pattern]

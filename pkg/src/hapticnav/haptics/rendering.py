"""Pattern trajectories to timed servo commands.

The firmware accepts absolute shaft angles at a fixed tick rate. A
trajectory is sampled at the start of every tick period over its whole
duration; between keyframes, position and pressure interpolate linearly,
and outside a temple's scripted span the tip parks at the rest pose
(strip center, released). Angles are rounded to hundredths of a degree,
the resolution the wire protocol carries, so rendering and transmission
agree exactly.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from ..errors import InputError
from .linkage import Calibration, KinematicsError, LinkageGeometry, inverse_kinematics
from .patterns import ContactKeyframe, PatternTrajectory, POSITION_CENTER_MM, Temple

DEFAULT_TICK_HZ = 50.0
REST_POSITION_MM = POSITION_CENTER_MM
REST_PRESSURE = 0.0


@dataclass(frozen=True)
class ServoCommand:
    """One angle pair for one temple at one tick.

    Attributes:
        t_ms: Tick time from pattern start, integer milliseconds.
        temple: Which actuator the command drives.
        angle1_deg: Left motor shaft angle, hundredth-degree resolution.
        angle2_deg: Right motor shaft angle, hundredth-degree resolution.
    """

    t_ms: int
    temple: Temple
    angle1_deg: float
    angle2_deg: float


def _round_centideg(angle: float) -> float:
    return round(angle * 100.0) / 100.0


def _interpolate(
    frames: list[ContactKeyframe], t_ms: float
) -> tuple[float, float]:
    """Position and pressure on one temple at time t.

    frames must be time-sorted and non-empty. Before the first and after
    the last keyframe the tip rests. A span whose endpoints both carry
    zero pressure is also rest: the pattern has let go of the skin there,
    and the tip returns home rather than gliding along it.
    """
    times = [k.t_ms for k in frames]
    if t_ms < times[0] or t_ms > times[-1]:
        return REST_POSITION_MM, REST_PRESSURE
    i = bisect_right(times, t_ms)
    if i >= len(frames):
        last = frames[-1]
        return last.position_mm, last.pressure
    lo, hi = frames[i - 1], frames[i]
    if lo.pressure == 0.0 and hi.pressure == 0.0 and t_ms not in (lo.t_ms, hi.t_ms):
        return REST_POSITION_MM, REST_PRESSURE
    span = hi.t_ms - lo.t_ms
    frac = 0.0 if span == 0.0 else (t_ms - lo.t_ms) / span
    return (
        lo.position_mm + frac * (hi.position_mm - lo.position_mm),
        lo.pressure + frac * (hi.pressure - lo.pressure),
    )


def render(
    trajectory: PatternTrajectory,
    geometry: LinkageGeometry,
    calibration: Calibration | None = None,
    tick_hz: float = DEFAULT_TICK_HZ,
) -> list[ServoCommand]:
    """Sample a trajectory into per-tick servo commands.

    Emits one command per involved temple at the start of every tick
    period covering the duration: ceil(duration / period) ticks. Commands
    come out time-ordered, left temple before right within a tick. A pose
    the linkage cannot reach raises KinematicsError naming the tick.
    """
    if not tick_hz > 0:
        raise InputError(f"tick rate must be positive: {tick_hz}")
    calibration = calibration or Calibration()
    period_ms = 1000.0 / tick_hz
    duration = trajectory.duration_ms
    n_ticks = max(1, math.ceil(duration / period_ms - 1e-9))

    per_temple: dict[Temple, list[ContactKeyframe]] = {}
    for frame in trajectory.keyframes:
        per_temple.setdefault(frame.temple, []).append(frame)

    commands: list[ServoCommand] = []
    for k in range(n_ticks):
        t = k * period_ms
        for temple in (Temple.LEFT, Temple.RIGHT):
            frames = per_temple.get(temple)
            if frames is None:
                continue
            position, pressure = _interpolate(frames, t)
            try:
                a1, a2 = inverse_kinematics(position, geometry, calibration, temple, pressure)
            except KinematicsError as exc:
                raise KinematicsError(
                    f"{trajectory.pattern.value} tick {k} (t={t:.1f} ms): {exc}"
                ) from exc
            commands.append(
                ServoCommand(
                    t_ms=int(round(t)),
                    temple=temple,
                    angle1_deg=_round_centideg(a1),
                    angle2_deg=_round_centideg(a2),
                )
            )
    return commands

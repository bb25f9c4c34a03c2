"""Waypoint guidance: pose in, haptic cue out.

The wearer follows a polyline of waypoints. Each step the controller
checks, in order: arrival at the active waypoint (confirm and advance),
heading error beyond tolerance (rotate toward the waypoint), cross-track
drift beyond tolerance (nudge back toward the segment), otherwise keep
walking. Cues name sensations, not motor commands; mapping to patterns
happens downstream.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from enum import Enum
import pathlib
from typing import Iterable, Sequence

from .errors import InputError


def normalize_heading(degrees: float) -> float:
    """Wrap any angle to (-180, 180]."""
    wrapped = math.fmod(degrees, 360.0)
    if wrapped > 180.0:
        wrapped -= 360.0
    elif wrapped <= -180.0:
        wrapped += 360.0
    return wrapped


@dataclass(frozen=True)
class Pose:
    """Agent position and facing in the room frame.

    x east, y north, meters. heading_deg is measured counterclockwise
    from +x and stored wrapped to (-180, 180].
    """

    x_m: float
    y_m: float
    heading_deg: float

    def __post_init__(self) -> None:
        for v in (self.x_m, self.y_m, self.heading_deg):
            if not math.isfinite(v):
                raise InputError(f"pose values must be finite: {self}")
        object.__setattr__(self, "heading_deg", normalize_heading(self.heading_deg))


@dataclass(frozen=True)
class Path:
    """Named waypoint polyline."""

    name: str
    waypoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise InputError(f"path {self.name!r} needs at least 2 waypoints")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if math.hypot(b[0] - a[0], b[1] - a[1]) < 1e-9:
                raise InputError(f"path {self.name!r} repeats waypoint {a}")

    @classmethod
    def from_json(cls, path: str | pathlib.Path) -> "Path":
        try:
            raw = json.loads(pathlib.Path(path).read_text())
            return cls(
                name=str(raw["name"]),
                waypoints=tuple((float(x), float(y)) for x, y in raw["waypoints"]),
            )
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad path file {path}: {exc}") from exc

    def to_json(self, path: str | pathlib.Path) -> None:
        pathlib.Path(path).write_text(
            json.dumps(
                {"name": self.name, "waypoints": [list(w) for w in self.waypoints]},
                indent=2,
            )
            + "\n"
        )


def bundled_path_names() -> list[str]:
    """Names of the paths shipped with the package."""
    from importlib import resources

    folder = resources.files("hapticnav.data").joinpath("paths")
    return sorted(p.name[: -len(".json")] for p in folder.iterdir() if p.name.endswith(".json"))


def bundled_path(name: str) -> Path:
    """Load a shipped path by name (see bundled_path_names)."""
    from importlib import resources

    ref = resources.files("hapticnav.data").joinpath(f"paths/{name}.json")
    try:
        raw = json.loads(ref.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"no bundled path named {name!r}; have {bundled_path_names()}") from exc
    return Path(
        name=str(raw["name"]),
        waypoints=tuple((float(x), float(y)) for x, y in raw["waypoints"]),
    )


@dataclass(frozen=True)
class ToleranceConfig:
    """Guidance thresholds."""

    heading_tolerance_deg: float = 15.0
    cross_track_tolerance_m: float = 0.3
    waypoint_radius_m: float = 0.3

    def __post_init__(self) -> None:
        if self.heading_tolerance_deg <= 0 or self.cross_track_tolerance_m <= 0:
            raise InputError("tolerances must be positive")
        if self.waypoint_radius_m <= 0:
            raise InputError("waypoint radius must be positive")


class GuidanceCue(Enum):
    SLIDE_LEFT = "slide_left"  # rotate left in place
    SLIDE_RIGHT = "slide_right"  # rotate right in place
    SLIDE_FRONT = "slide_front"  # walk forward
    TAP_FRONT_ARRIVED = "tap_front_arrived"  # waypoint confirmed
    FINISHED = "finished"  # last waypoint confirmed


@dataclass(frozen=True)
class GuidanceState:
    """Progress along the path.

    origin anchors the first segment: guidance toward waypoint 0 is
    measured along the line from where the trial started.
    """

    waypoint_index: int = 0
    origin: tuple[float, float] | None = None
    done: bool = False


def bearing_deg(from_xy: tuple[float, float], to_xy: tuple[float, float]) -> float:
    return math.degrees(math.atan2(to_xy[1] - from_xy[1], to_xy[0] - from_xy[0]))


def cross_track_distance(
    point: tuple[float, float],
    segment_start: tuple[float, float],
    segment_end: tuple[float, float],
) -> float:
    """Signed perpendicular distance from the segment line.

    Positive when the point lies to the left of the direction of travel.
    """
    dx = segment_end[0] - segment_start[0]
    dy = segment_end[1] - segment_start[1]
    length = math.hypot(dx, dy)
    if length < 1e-12:
        raise InputError("degenerate segment")
    px = point[0] - segment_start[0]
    py = point[1] - segment_start[1]
    return (dx * py - dy * px) / length


def active_segment(
    state: GuidanceState, path: Path
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Segment the wearer should currently be on."""
    index = min(state.waypoint_index, len(path.waypoints) - 1)
    if index == 0:
        if state.origin is None:
            raise InputError("guidance state has no origin for the first segment")
        return state.origin, path.waypoints[0]
    return path.waypoints[index - 1], path.waypoints[index]


def guidance_step(
    pose: Pose,
    state: GuidanceState,
    path: Path,
    tolerances: ToleranceConfig = ToleranceConfig(),
) -> tuple[GuidanceCue, GuidanceState]:
    """One control decision. Pure: returns the cue and the next state."""
    if state.done:
        return GuidanceCue.FINISHED, state
    if state.origin is None:
        state = replace(state, origin=(pose.x_m, pose.y_m))

    target = path.waypoints[state.waypoint_index]
    distance = math.hypot(target[0] - pose.x_m, target[1] - pose.y_m)
    if distance <= tolerances.waypoint_radius_m:
        if state.waypoint_index == len(path.waypoints) - 1:
            return GuidanceCue.FINISHED, replace(state, done=True)
        return GuidanceCue.TAP_FRONT_ARRIVED, replace(
            state, waypoint_index=state.waypoint_index + 1
        )

    heading_error = normalize_heading(
        bearing_deg((pose.x_m, pose.y_m), target) - pose.heading_deg
    )
    if abs(heading_error) > tolerances.heading_tolerance_deg:
        cue = GuidanceCue.SLIDE_LEFT if heading_error > 0 else GuidanceCue.SLIDE_RIGHT
        return cue, state

    start, end = active_segment(state, path)
    drift = cross_track_distance((pose.x_m, pose.y_m), start, end)
    if abs(drift) > tolerances.cross_track_tolerance_m:
        # Drifted left of the path: nudge right, and vice versa.
        cue = GuidanceCue.SLIDE_RIGHT if drift > 0 else GuidanceCue.SLIDE_LEFT
        return cue, state

    return GuidanceCue.SLIDE_FRONT, state


# ---------------------------------------------------------------------------
# Trajectory metrics.


@dataclass(frozen=True)
class TrialMetrics:
    """How well a recorded walk followed its path."""

    completion_time_s: float
    waypoints_reached: int
    pct_time_outside_tolerance: float
    exit_reenter_count: int

    def to_dict(self) -> dict:
        return {
            "completion_time_s": self.completion_time_s,
            "waypoints_reached": self.waypoints_reached,
            "pct_time_outside_tolerance": self.pct_time_outside_tolerance,
            "exit_reenter_count": self.exit_reenter_count,
        }


def compute_metrics(
    trajectory: Sequence[tuple[float, Pose]],
    path: Path,
    tolerances: ToleranceConfig = ToleranceConfig(),
) -> TrialMetrics:
    """Score a time-stamped trajectory against a path.

    Walks the samples replaying waypoint arrivals, classifies each sample
    as inside or outside the cross-track band of the active segment, and
    counts inside-to-outside transitions. The first sample anchors the
    first segment.
    """
    if not trajectory:
        raise InputError("empty trajectory")
    times = [t for t, _ in trajectory]
    if times != sorted(times):
        raise InputError("trajectory timestamps must be non-decreasing")

    first_pose = trajectory[0][1]
    state = GuidanceState(origin=(first_pose.x_m, first_pose.y_m))
    reached = 0
    outside_samples = 0
    exits = 0
    previously_inside = True
    for _, pose in trajectory:
        # Replay arrivals first so classification uses the new segment.
        while not state.done:
            target = path.waypoints[state.waypoint_index]
            if math.hypot(target[0] - pose.x_m, target[1] - pose.y_m) > tolerances.waypoint_radius_m:
                break
            reached += 1
            if state.waypoint_index == len(path.waypoints) - 1:
                state = replace(state, done=True)
            else:
                state = replace(state, waypoint_index=state.waypoint_index + 1)

        start, end = active_segment(state, path)
        drift = abs(cross_track_distance((pose.x_m, pose.y_m), start, end))
        inside = drift <= tolerances.cross_track_tolerance_m
        if not inside:
            outside_samples += 1
            if previously_inside:
                exits += 1
        previously_inside = inside

    return TrialMetrics(
        completion_time_s=times[-1] - times[0],
        waypoints_reached=reached,
        pct_time_outside_tolerance=100.0 * outside_samples / len(trajectory),
        exit_reenter_count=exits,
    )


def write_trajectory_csv(
    trajectory: Sequence[tuple[float, Pose]], path: str | pathlib.Path
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_s", "x_m", "y_m", "heading_deg"])
        for t, pose in trajectory:
            writer.writerow([f"{t:.3f}", f"{pose.x_m:.6f}", f"{pose.y_m:.6f}", f"{pose.heading_deg:.6f}"])


def read_trajectory_csv(path: str | pathlib.Path) -> list[tuple[float, Pose]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            return [
                (
                    float(row["t_s"]),
                    Pose(float(row["x_m"]), float(row["y_m"]), float(row["heading_deg"])),
                )
                for row in reader
            ]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad trajectory file {path}: {exc}") from exc

"""Closed-loop waypoint navigation trials.

Each tick: the guidance controller turns the pose into a cue, the cue is
submitted to the pattern scheduler (which serializes and coalesces), each
pattern that starts playing is filtered through the perception profile,
and the agent moves under the pattern it currently feels. The wearer acts
on a cue only during its playback window (shifted by reaction latency)
and rotates at most a fixed budget per cue, mirroring how a short slide
reads as "turn a bit", not "keep spinning".

Arrival taps get special handling: scheduler coalescing would let the
steady stream of follow-up steering cues overwrite a pending confirmation
tap before it ever played, so the loop repeats the tap submission until
it actually starts, then resumes steering.

With obstacles present, every tick also renders a synthetic detection
frame through the scene pipeline; while an immediate hazard is flagged,
steering is suppressed and the wearer holds still. A trial whose path is
blocked therefore times out rather than walking through the obstacle.
"""
from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..haptics.patterns import HapticPatternId
from ..haptics.scheduler import PatternScheduler
from ..navigator import (
    GuidanceCue,
    GuidanceState,
    Path,
    Pose,
    ToleranceConfig,
    TrialMetrics,
    bearing_deg,
    compute_metrics,
    guidance_step,
)
from ..perception import map_frame
from ..scene import SceneWindow, summarize
from .agent import AgentModel, step_agent
from .camera import SyntheticCameraConfig, synth_camera
from .confusion import PerceptionProfile, perfect_profile, sample_perceived
from .environment import Environment

CUE_PATTERNS: dict[GuidanceCue, HapticPatternId] = {
    GuidanceCue.SLIDE_LEFT: HapticPatternId.SLIDE_LEFT_FAST,
    GuidanceCue.SLIDE_RIGHT: HapticPatternId.SLIDE_RIGHT_FAST,
    GuidanceCue.SLIDE_FRONT: HapticPatternId.SLIDE_FRONT_FAST,
    GuidanceCue.TAP_FRONT_ARRIVED: HapticPatternId.TAP_FRONT,
    GuidanceCue.FINISHED: HapticPatternId.TAP_FRONT,
}

ROTATION_PATTERNS = {
    HapticPatternId.SLIDE_LEFT_FAST,
    HapticPatternId.SLIDE_LEFT_SLOW,
    HapticPatternId.SLIDE_RIGHT_FAST,
    HapticPatternId.SLIDE_RIGHT_SLOW,
}


@dataclass(frozen=True)
class TrialConfig:
    tick_hz: float = 10.0
    timeout_s: float = 120.0
    turn_limit_deg: float = 20.0
    rest_gap_ms: float = 250.0
    tolerances: ToleranceConfig = ToleranceConfig()
    scene_window: int = 5
    persistence_k: int = 3
    camera: SyntheticCameraConfig = SyntheticCameraConfig()

    def __post_init__(self) -> None:
        if self.tick_hz <= 0 or self.timeout_s <= 0:
            raise InputError("tick_hz and timeout_s must be positive")
        if self.turn_limit_deg <= 0:
            raise InputError("turn_limit_deg must be positive")


@dataclass(frozen=True)
class CueRecord:
    t_s: float
    cue: GuidanceCue
    pattern: HapticPatternId


@dataclass(frozen=True)
class PlaybackRecord:
    start_ms: float
    actual: HapticPatternId
    perceived: HapticPatternId


@dataclass
class TrialResult:
    path_name: str
    seed: int
    completed: bool
    timed_out: bool
    metrics: TrialMetrics
    trajectory: list[tuple[float, Pose]]
    cues: list[CueRecord]
    playbacks: list[PlaybackRecord]

    def to_dict(self) -> dict:
        return {
            "path_name": self.path_name,
            "seed": self.seed,
            "completed": self.completed,
            "timed_out": self.timed_out,
            "metrics": self.metrics.to_dict(),
            "trajectory": [
                [round(t, 4), round(p.x_m, 6), round(p.y_m, 6), round(p.heading_deg, 6)]
                for t, p in self.trajectory
            ],
            "cues": [[round(c.t_s, 4), c.cue.value, c.pattern.value] for c in self.cues],
            "playbacks": [
                [round(p.start_ms, 3), p.actual.value, p.perceived.value]
                for p in self.playbacks
            ],
        }

    def to_json(self, path: str | pathlib.Path) -> None:
        pathlib.Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


class ActiveCue:
    """The pattern currently steering the body, with its validity window."""

    def __init__(self) -> None:
        self.pattern: HapticPatternId | None = None
        self.until_ms: float = 0.0
        self.turn_budget_deg: float = 0.0

    def take(self, perceived: HapticPatternId, start_ms: float, end_ms: float, latency_ms: float, budget_deg: float) -> None:
        self.pattern = perceived
        self.until_ms = end_ms + latency_ms
        self.turn_budget_deg = budget_deg

    def current(self, t_ms: float) -> HapticPatternId | None:
        if self.pattern is None or t_ms >= self.until_ms:
            return None
        if self.pattern in ROTATION_PATTERNS and self.turn_budget_deg <= 0:
            return None
        return self.pattern

    def spend_turn(self, degrees: float) -> None:
        self.turn_budget_deg -= degrees


def default_start_pose(path: Path) -> Pose:
    first, second = path.waypoints[0], path.waypoints[1]
    return Pose(first[0], first[1], bearing_deg(first, second))


def run_navigation_trial(
    path: Path,
    environment: Environment | None = None,
    agent: AgentModel = AgentModel(),
    profile: PerceptionProfile | None = None,
    config: TrialConfig = TrialConfig(),
    seed: int = 0,
    start_pose: Pose | None = None,
) -> TrialResult:
    """Run one seeded trial; deterministic for fixed inputs.

    profile None means perfect perception (identity confusion, zero
    latency). The trial ends when guidance reports the path finished or
    the simulated clock passes the timeout.
    """
    environment = environment or Environment()
    profile = profile or perfect_profile()
    rng = np.random.default_rng(seed)
    dt = 1.0 / config.tick_hz
    scheduler = PatternScheduler(rest_gap_ms=config.rest_gap_ms)
    pose = start_pose or default_start_pose(path)
    state = GuidanceState(origin=(pose.x_m, pose.y_m))
    active = ActiveCue()
    pending_effects: list[tuple[float, HapticPatternId, float]] = []
    window = SceneWindow(capacity=config.scene_window)
    ranging = config.camera.ranging_model(environment) if not environment.is_empty else None

    trajectory = [(0.0, pose)]
    cues: list[CueRecord] = []
    playbacks: list[PlaybackRecord] = []
    completed = False
    timed_out = False
    tap_due = False
    max_ticks = int(math.ceil(config.timeout_s * config.tick_hz))

    for k in range(1, max_ticks + 1):
        t_s = k * dt
        t_ms = t_s * 1000.0

        hazard = False
        if ranging is not None:
            frame, _ = synth_camera(environment, pose, config.camera, t_s=t_s, frame_id=k)
            window.push(k, map_frame(frame, ranging))
            if len(window) >= config.persistence_k:
                hazard = bool(summarize(window, config.persistence_k).hazards())

        cue, state = guidance_step(pose, state, path, config.tolerances)
        if cue in (GuidanceCue.TAP_FRONT_ARRIVED, GuidanceCue.FINISHED):
            tap_due = True
        if not hazard:
            pattern = HapticPatternId.TAP_FRONT if tap_due else CUE_PATTERNS[cue]
            scheduler.submit(pattern, t_ms)
            cues.append(CueRecord(t_s, cue, pattern))

        for event in scheduler.advance(t_ms):
            if event.pattern is HapticPatternId.TAP_FRONT:
                tap_due = False
            perceived = sample_perceived(event.pattern, profile, rng)
            playbacks.append(PlaybackRecord(event.start_ms, event.pattern, perceived))
            pending_effects.append((event.start_ms + profile.reaction_latency_ms, perceived, event.end_ms))
        while pending_effects and pending_effects[0][0] <= t_ms:
            effect_ms, perceived, end_ms = pending_effects.pop(0)
            active.take(perceived, effect_ms, end_ms, profile.reaction_latency_ms, config.turn_limit_deg)

        felt = active.current(t_ms)
        if hazard:
            felt = None
        if felt in ROTATION_PATTERNS:
            active.spend_turn(agent.turn_rate_dps * dt)
        pose = step_agent(pose, felt, agent, dt)
        trajectory.append((t_s, pose))

        if cue is GuidanceCue.FINISHED:
            completed = True
            break
    else:
        timed_out = True

    metrics = compute_metrics(trajectory, path, config.tolerances)
    return TrialResult(
        path_name=path.name,
        seed=seed,
        completed=completed,
        timed_out=timed_out,
        metrics=metrics,
        trajectory=trajectory,
        cues=cues,
        playbacks=playbacks,
    )


def run_trial_batch(
    path: Path,
    n_trials: int,
    environment: Environment | None = None,
    agent: AgentModel = AgentModel(),
    profile: PerceptionProfile | None = None,
    config: TrialConfig = TrialConfig(),
    seed0: int = 0,
) -> list[TrialResult]:
    """Independent seeded trials seed0, seed0+1, ..."""
    if n_trials < 1:
        raise InputError(f"n_trials must be >= 1: {n_trials}")
    return [
        run_navigation_trial(path, environment, agent, profile, config, seed0 + i)
        for i in range(n_trials)
    ]

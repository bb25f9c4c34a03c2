"""Seeded decision scenes with geometric ground truth.

Each scenario is a frozen room layout plus an observer pose. The expected
command comes from an independent labeler that works on true obstacle
geometry alone: it never renders a frame or touches the perception
pipeline. To keep that label trustworthy, the labeler refuses layouts
where any quantity sits close to a decision boundary (grid column edge,
hazard distance, blocked-cost threshold, field-of-view edge, a box
clipping the frame, or two obstacles overlapping in angle). Scene
generation simply redraws until the labeler accepts, so every scenario
in a suite is unambiguous by construction and the pipeline's answer can
be checked against geometry, not against itself.
"""
from __future__ import annotations

import itertools
import json
import math
import pathlib
import statistics
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from ..errors import InputError
from ..navigator import Pose, normalize_heading
from ..perception import Column, map_frame
from ..policy import (
    NavCommand,
    PolicyConfig,
    Sensitivity,
    build_prompt,
    decide,
    Decision,
)
from ..scene import SceneSummary, SceneWindow, summarize
from .camera import SyntheticCameraConfig, synth_camera
from .environment import DynamicObstacle, Environment, StaticObstacle

SAMPLE_TIMES_S: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4)
PERSISTENCE_K = 3

OBSERVER_POSE = Pose(1.0, 3.0, 0.0)

# Distinct labels so (label, cell) tracks never merge across obstacles.
_LABEL_HEIGHTS: tuple[tuple[str, float], ...] = (
    ("person", 1.7),
    ("chair", 0.9),
    ("bin", 0.8),
    ("cart", 1.1),
    ("plant", 1.3),
    ("stool", 0.6),
    ("box", 0.55),
    ("bench", 0.75),
    ("dog", 0.7),
    ("lamp", 1.8),
)


class ScenarioKind(Enum):
    OPEN = "open"
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class DecisionScenario:
    """One frozen scene with its geometry-derived expected command."""

    name: str
    kind: ScenarioKind
    environment: Environment
    pose: Pose
    expected: NavCommand

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "expected": self.expected.value,
            "pose": [self.pose.x_m, self.pose.y_m, self.pose.heading_deg],
            "environment": self.environment.to_dict(),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DecisionScenario":
        try:
            x, y, heading = raw["pose"]
            return cls(
                name=str(raw["name"]),
                kind=ScenarioKind(raw["kind"]),
                environment=Environment.from_dict(raw["environment"]),
                pose=Pose(float(x), float(y), float(heading)),
                expected=NavCommand(raw["expected"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad scenario: {exc}") from exc


@dataclass(frozen=True)
class ScenarioOutcome:
    name: str
    expected: NavCommand
    decision: Decision
    summary: SceneSummary

    @property
    def correct(self) -> bool:
        return self.decision.command is self.expected


# ---------------------------------------------------------------------------
# Independent labeler


def _column_of(x_center_px: float, width_px: float, margin_px: float) -> Column | None:
    """Grid column of a box centroid, or None within margin of an edge."""
    for edge in (width_px / 3.0, 2.0 * width_px / 3.0):
        if abs(x_center_px - edge) < margin_px:
            return None
    if x_center_px < width_px / 3.0:
        return Column.LEFT
    if x_center_px < 2.0 * width_px / 3.0:
        return Column.CENTER
    return Column.RIGHT


def label_scene(
    environment: Environment,
    pose: Pose = OBSERVER_POSE,
    config: SyntheticCameraConfig = SyntheticCameraConfig(),
    times: tuple[float, ...] = SAMPLE_TIMES_S,
) -> NavCommand | None:
    """Predict the fallback command from true geometry, or None.

    None means the layout is too close to some decision boundary for the
    prediction to be trusted; suite generation treats that as "redraw".
    The margins are deliberately generous: within them, the rendered
    pipeline (projection, ranging, grid cells, consolidation, costs) is
    guaranteed to agree with this purely geometric computation.
    """
    fx = config.horizontal_focal_px
    fy = config.vertical_focal_px
    width = float(config.image_width_px)
    height = float(config.image_height_px)
    half_fov = config.fov_h_deg / 2.0

    counts: dict[tuple[str, Column], int] = {}
    distances: dict[tuple[str, Column], list[float]] = {}
    for t in times:
        views: list[tuple[str, float, float, float, Column]] = []
        for o in environment.obstacles_at(t):
            if o.height_m > 2.5:
                return None
            dx, dy = o.x_m - pose.x_m, o.y_m - pose.y_m
            d = math.hypot(dx, dy)
            azimuth = normalize_heading(math.degrees(math.atan2(dy, dx)) - pose.heading_deg)
            out = (
                d >= config.max_range_m + 0.2
                or d <= config.min_range_m - 0.05
                or abs(azimuth) >= half_fov + 2.0
            )
            inside = (
                config.min_range_m + 0.1 <= d <= config.max_range_m - 0.2
                and abs(azimuth) <= half_fov - 2.0
            )
            if out:
                continue
            if not inside:
                return None
            if fy * o.height_m / d > height - 20.0:
                return None  # box would fill the frame and break ranging
            x_center = width / 2.0 - fx * math.tan(math.radians(azimuth))
            half_w = fx * o.radius_m / d
            if half_w < 1.0:
                return None
            if x_center - half_w < 2.0 or x_center + half_w > width - 2.0:
                return None
            column = _column_of(x_center, width, margin_px=8.0)
            if column is None:
                return None
            half_angle = math.degrees(math.atan2(o.radius_m, d))
            views.append((o.label, d, azimuth, half_angle, column))

        # Keep angular footprints disjoint so occlusion can never trigger.
        for a, b in itertools.combinations(views, 2):
            gap = abs(normalize_heading(a[2] - b[2])) - (a[3] + b[3])
            if gap < 0.7:
                return None

        seen: set[tuple[str, Column]] = set()
        for label, d, _, _, column in views:
            key = (label, column)
            if key not in seen:
                counts[key] = counts.get(key, 0) + 1
                seen.add(key)
            distances.setdefault(key, []).append(d)

    medians: dict[tuple[str, Column], float] = {}
    for key, n in counts.items():
        if n < PERSISTENCE_K:
            continue
        median = statistics.median(distances[key])
        if 0.94 <= median <= 1.06:
            return None
        medians[key] = median

    hazard = any(c is Column.CENTER and m < 1.0 for (_, c), m in medians.items())
    if not hazard:
        return NavCommand.FORWARD
    left = sum(1.0 / m for (_, c), m in medians.items() if c is Column.LEFT)
    right = sum(1.0 / m for (_, c), m in medians.items() if c is Column.RIGHT)
    for cost in (left, right):
        if abs(cost - 2.0) < 0.08:
            return None
    if left != right and abs(left - right) < 0.08:
        return None
    if left >= 2.0 and right >= 2.0:
        return NavCommand.STOP
    if right < left:
        return NavCommand.RIGHT
    return NavCommand.LEFT


# ---------------------------------------------------------------------------
# Scene generation


def _polar(distance_m: float, azimuth_deg: float, pose: Pose = OBSERVER_POSE) -> tuple[float, float]:
    angle = math.radians(pose.heading_deg + azimuth_deg)
    return (pose.x_m + distance_m * math.cos(angle), pose.y_m + distance_m * math.sin(angle))


_WALKER_LABELS = ("person", "dog", "cart")


def _draw_labels(
    rng: np.random.Generator, n: int, exclude: str | None = None
) -> list[tuple[str, float]]:
    pool = [entry for entry in _LABEL_HEIGHTS if entry[0] != exclude]
    picks = rng.choice(len(pool), size=n, replace=False)
    return [pool[int(i)] for i in picks]


def _draw_walker(rng: np.random.Generator) -> tuple[str, float]:
    heights = dict(_LABEL_HEIGHTS)
    label = _WALKER_LABELS[int(rng.integers(0, len(_WALKER_LABELS)))]
    return label, heights[label]


def _static(label: str, height: float, d: float, azimuth: float, radius: float) -> StaticObstacle:
    x, y = _polar(d, azimuth)
    return StaticObstacle(label, x, y, radius, height)


def _open_scene(rng: np.random.Generator, index: int) -> Environment:
    if index == 0:
        return Environment()  # the trivially open room
    n = int(rng.integers(1, 4))
    obstacles = []
    for label, h in _draw_labels(rng, n):
        side = 1.0 if rng.random() < 0.5 else -1.0
        mode = int(rng.integers(0, 3))
        if mode == 0:  # dead ahead but comfortably far
            d, az = rng.uniform(1.35, 4.2), rng.uniform(-7.5, 7.5)
        elif mode == 1:  # clearly in a side column
            d, az = rng.uniform(0.7, 3.8), side * rng.uniform(14.5, 24.0)
        else:  # clearly outside the field of view
            d, az = rng.uniform(0.8, 3.2), side * rng.uniform(34.0, 54.0)
        obstacles.append(_static(label, h, d, az, rng.uniform(0.06, 0.18)))
    return Environment(static_obstacles=tuple(obstacles))


def _hazard_ahead(rng: np.random.Generator, label: str, height: float) -> StaticObstacle:
    return _static(
        label, height, rng.uniform(0.62, 0.90), rng.uniform(-4.5, 4.5), rng.uniform(0.05, 0.10)
    )


def _near_side(rng: np.random.Generator, label: str, height: float, side: float) -> StaticObstacle:
    # Cheap-but-present side cost, well under the blocked threshold.
    return _static(
        label, height, rng.uniform(0.65, 1.30), side * rng.uniform(15.0, 22.0), rng.uniform(0.05, 0.10)
    )


def _far_side(rng: np.random.Generator, label: str, height: float, side: float) -> StaticObstacle:
    return _static(
        label, height, rng.uniform(2.3, 4.0), side * rng.uniform(13.0, 24.0), rng.uniform(0.05, 0.15)
    )


def _blocking_side(rng: np.random.Generator, label: str, height: float, side: float) -> StaticObstacle:
    # Single obstacle close enough that 1/d alone crosses the threshold.
    return _static(
        label, height, rng.uniform(0.40, 0.47), side * rng.uniform(19.5, 23.0), rng.uniform(0.05, 0.06)
    )


def _static_scene(rng: np.random.Generator, intended: NavCommand) -> Environment:
    labels = _draw_labels(rng, 4)
    obstacles = [_hazard_ahead(rng, *labels[0])]
    if intended is NavCommand.STOP:
        obstacles.append(_blocking_side(rng, *labels[1], side=+1.0))
        obstacles.append(_blocking_side(rng, *labels[2], side=-1.0))
    else:
        # Sidestep away from the crowded side; azimuth > 0 is the
        # wearer's left, so +1.0 puts an obstacle in the left column.
        crowded = -1.0 if intended is NavCommand.LEFT else +1.0
        if intended is NavCommand.LEFT and rng.random() < 0.3:
            pass  # both sides clear: the tie also resolves Left
        else:
            obstacles.append(_near_side(rng, *labels[1], side=crowded))
            if rng.random() < 0.5:
                obstacles.append(_far_side(rng, *labels[2], side=-crowded))
    return Environment(static_obstacles=tuple(obstacles))


def _crossing_walker(rng: np.random.Generator, label: str, height: float) -> DynamicObstacle:
    d = rng.uniform(2.2, 4.0)
    az0 = rng.uniform(2.0, 8.0)
    direction = 1.0 if rng.random() < 0.5 else -1.0
    a = _polar(d, direction * az0)
    b = _polar(d, -direction * rng.uniform(6.0, 12.0))
    return DynamicObstacle(
        label,
        radius_m=rng.uniform(0.08, 0.14),
        height_m=height,
        route=(a, b),
        speed_mps=rng.uniform(0.5, 1.0),
    )


def _approaching_walker(rng: np.random.Generator, label: str, height: float) -> DynamicObstacle:
    azimuth = rng.uniform(-3.5, 3.5)
    d0 = rng.uniform(1.00, 1.10)
    a = _polar(d0, azimuth)
    b = _polar(d0 - 0.8, azimuth)
    return DynamicObstacle(
        label,
        radius_m=rng.uniform(0.08, 0.12),
        height_m=height,
        route=(a, b),
        speed_mps=rng.uniform(0.8, 1.1),
    )


def _dynamic_scene(rng: np.random.Generator, intended: NavCommand) -> Environment:
    walker_label, walker_height = _draw_walker(rng)
    labels = [(walker_label, walker_height)] + _draw_labels(rng, 3, exclude=walker_label)
    if intended is NavCommand.FORWARD:
        walker = _crossing_walker(rng, walker_label, walker_height)
        statics: tuple[StaticObstacle, ...] = ()
        if rng.random() < 0.5:
            statics = (_far_side(rng, *labels[1], side=1.0 if rng.random() < 0.5 else -1.0),)
        return Environment(static_obstacles=statics, dynamic_obstacles=(walker,))
    walker = _approaching_walker(rng, walker_label, walker_height)
    obstacles: list[StaticObstacle] = []
    if intended is NavCommand.STOP:
        obstacles.append(_blocking_side(rng, *labels[1], side=+1.0))
        obstacles.append(_blocking_side(rng, *labels[2], side=-1.0))
    else:
        crowded = -1.0 if intended is NavCommand.LEFT else +1.0
        if intended is NavCommand.LEFT and rng.random() < 0.3:
            pass
        else:
            obstacles.append(_near_side(rng, *labels[1], side=crowded))
    return Environment(static_obstacles=tuple(obstacles), dynamic_obstacles=(walker,))


_KIND_ORDER = {ScenarioKind.OPEN: 0, ScenarioKind.STATIC: 1, ScenarioKind.DYNAMIC: 2}
_STATIC_CYCLE = (NavCommand.LEFT, NavCommand.RIGHT, NavCommand.STOP)
_DYNAMIC_CYCLE = (NavCommand.FORWARD, NavCommand.LEFT, NavCommand.RIGHT, NavCommand.STOP)


def build_scenario(kind: ScenarioKind, index: int, base_seed: int = 11) -> DecisionScenario:
    """Deterministically grow one labeled scene.

    Redraws until the labeler accepts the layout and agrees with the
    command the generator was aiming for.
    """
    if index < 0:
        raise InputError(f"index must be >= 0: {index}")
    rng = np.random.default_rng([base_seed, _KIND_ORDER[kind], index])
    if kind is ScenarioKind.OPEN:
        intended = NavCommand.FORWARD
    elif kind is ScenarioKind.STATIC:
        intended = _STATIC_CYCLE[index % len(_STATIC_CYCLE)]
    else:
        intended = _DYNAMIC_CYCLE[index % len(_DYNAMIC_CYCLE)]
    for _ in range(500):
        try:
            if kind is ScenarioKind.OPEN:
                environment = _open_scene(rng, index)
            elif kind is ScenarioKind.STATIC:
                environment = _static_scene(rng, intended)
            else:
                environment = _dynamic_scene(rng, intended)
        except InputError:
            continue  # a draw landed outside the room; redraw
        if label_scene(environment) is intended:
            return DecisionScenario(
                name=f"{kind.value}-{index:02d}",
                kind=kind,
                environment=environment,
                pose=OBSERVER_POSE,
                expected=intended,
            )
    raise InputError(f"no unambiguous {kind.value} scene found for index {index}")


def build_scenario_suite(base_seed: int = 11, per_kind: int = 20) -> list[DecisionScenario]:
    if per_kind < 1:
        raise InputError(f"per_kind must be >= 1: {per_kind}")
    return [
        build_scenario(kind, index, base_seed)
        for kind in ScenarioKind
        for index in range(per_kind)
    ]


# ---------------------------------------------------------------------------
# Running scenes through the real pipeline


def scene_summary(
    environment: Environment,
    pose: Pose = OBSERVER_POSE,
    config: SyntheticCameraConfig = SyntheticCameraConfig(),
    times: tuple[float, ...] = SAMPLE_TIMES_S,
) -> SceneSummary:
    """Render the sample window and consolidate it, hazards flagged."""
    ranging = config.ranging_model(environment)
    window = SceneWindow(capacity=len(times))
    for i, t in enumerate(times):
        frame, _ = synth_camera(environment, pose, config, t_s=t, frame_id=i + 1)
        window.push(i + 1, map_frame(frame, ranging))
    return summarize(window, PERSISTENCE_K)


def run_decision_scenario(
    scenario: DecisionScenario,
    config: PolicyConfig | None = None,
    client=None,
    camera: SyntheticCameraConfig = SyntheticCameraConfig(),
) -> ScenarioOutcome:
    summary = scene_summary(scenario.environment, scenario.pose, camera)
    decision = decide(summary, config or PolicyConfig(), client)
    return ScenarioOutcome(
        name=scenario.name, expected=scenario.expected, decision=decision, summary=summary
    )


def record_transcript(
    scenarios: list[DecisionScenario],
    sensitivity: Sensitivity = Sensitivity.MEDIUM,
    camera: SyntheticCameraConfig = SyntheticCameraConfig(),
) -> list[dict]:
    """Entries a faithful model would produce, pinned to their prompts."""
    entries = []
    for scenario in scenarios:
        summary = scene_summary(scenario.environment, scenario.pose, camera)
        prompt = build_prompt(summary, sensitivity)
        entries.append(
            {"prompt_sha256": prompt.sha256(), "response": scenario.expected.value}
        )
    return entries


# ---------------------------------------------------------------------------
# Bundled suite


def bundled_suite() -> list[DecisionScenario]:
    """The frozen 60-scene suite shipped with the package."""
    text = (
        resources.files("hapticnav.data").joinpath("scenarios/decision_suite.json").read_text()
    )
    raw = json.loads(text)
    return [DecisionScenario.from_dict(entry) for entry in raw["scenarios"]]


def save_suite(scenarios: list[DecisionScenario], path: str | pathlib.Path) -> None:
    payload = {"scenarios": [s.to_dict() for s in scenarios]}
    pathlib.Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_suite(path: str | pathlib.Path) -> list[DecisionScenario]:
    try:
        raw = json.loads(pathlib.Path(path).read_text())
        return [DecisionScenario.from_dict(entry) for entry in raw["scenarios"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"bad scenario file {path}: {exc}") from exc
